// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/scripted_lm.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace predgen {

namespace {

// Canonical spacing so verdict lookups ignore whitespace differences.
std::string normalize(std::string_view text) {
    std::string out;
    for (const auto& w : split_words(text)) {
        if (!out.empty() && !is_punctuation(w)) {
            out.push_back(' ');
        }
        out += w;
    }
    return out;
}

void add_item(Script& script, const nlohmann::json& item) {
    if (item.contains("continuation")) {
        script.entries.push_back(
            {item.value("prompt_prefix", std::string{}), item.at("continuation").get<std::string>()});
    } else if (item.contains("verdict")) {
        const auto v = item.at("verdict").get<std::string>();
        if (v != "yes" && v != "no") {
            throw std::invalid_argument("verdict must be \"yes\" or \"no\", got \"" + v + "\"");
        }
        script.verdicts.push_back(
            {item.at("prompt").get<std::string>(), item.at("answer").get<std::string>(), v == "yes"});
    } else {
        throw std::invalid_argument("script item is neither an entry nor a verdict: " + item.dump());
    }
}

}  // namespace

Script parse_script(const nlohmann::json& doc) {
    Script script;
    if (doc.is_array()) {
        for (const auto& item : doc) {
            add_item(script, item);
        }
        return script;
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("script must be a JSON object or array");
    }
    for (const auto& item : doc.value("entries", nlohmann::json::array())) {
        add_item(script, item);
    }
    for (const auto& item : doc.value("verdicts", nlohmann::json::array())) {
        add_item(script, item);
    }
    script.fallback = doc.value("fallback", std::string(kEosSurface));
    return script;
}

Script load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open script file " + path.string());
    }
    return parse_script(nlohmann::json::parse(in));
}

ScriptedLm::ScriptedLm(const Script& script, Vocabulary& vocab, LatencyModel latency)
    : LanguageModel(latency) {
    for (const auto& e : script.entries) {
        entries_.push_back({tokenize(e.prompt_prefix, vocab), tokenize(e.continuation, vocab)});
    }
    for (const auto& v : script.verdicts) {
        verdicts_[{normalize(v.prompt), normalize(v.answer)}] = v.yes;
    }
    fallback_ = vocab.intern(script.fallback);
    vocab_size_ = vocab.size();
}

Token ScriptedLm::predict(std::span<const Token> context) const {
    std::size_t best_len = 0;
    std::optional<Token> best;
    for (const auto& e : entries_) {
        const std::size_t plen = e.prompt.size();
        for (std::size_t j = e.continuation.size(); j-- > 0;) {
            const std::size_t len = plen + j;
            if (len > context.size() || (best && len <= best_len)) {
                continue;
            }
            const std::size_t off = context.size() - len;
            bool match = true;
            for (std::size_t i = 0; i < len && match; ++i) {
                const Token want = i < plen ? e.prompt[i] : e.continuation[i - plen];
                match = context[off + i] == want;
            }
            if (match) {
                best_len = len;
                best = e.continuation[j];
                break;
            }
        }
    }
    return best.value_or(fallback_);
}

void ScriptedLm::score_positions(std::span<const Token> context, std::size_t first, LogitsBlock& out) {
    for (std::size_t pos = first; pos < context.size(); ++pos) {
        auto row = out.append_row();
        row[predict(context.first(pos + 1))] = 1.0f;
    }
}

JudgeOutcome ScriptedLm::judge_consistency(std::string_view partial_prompt, std::string_view partial_answer) {
    bool yes = false;
    const std::string answer = normalize(partial_answer);
    if (!answer.empty()) {
        if (auto it = verdicts_.find({normalize(partial_prompt), answer}); it != verdicts_.end()) {
            yes = it->second;
        }
    }
    const double likely = std::log(0.9);
    const double unlikely = std::log(0.1);
    JudgeOutcome out;
    out.verdict = yes ? JudgeResult{likely, unlikely} : JudgeResult{unlikely, likely};
    out.cost = judge_pass_cost(partial_prompt, partial_answer);
    return out;
}

}  // namespace predgen
