// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/text.hpp"

#include <algorithm>

namespace predgen {

namespace {

constexpr std::string_view kPunctuation = ".,?!:;\"";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Vocabulary::Vocabulary() { intern(kEosSurface); }

Token Vocabulary::intern(std::string_view word) {
    if (auto it = ids_.find(std::string(word)); it != ids_.end()) {
        return it->second;
    }
    if (frozen_) {
        throw VocabularyError("unknown word in frozen vocabulary: " + std::string(word));
    }
    const auto id = static_cast<Token>(words_.size());
    words_.emplace_back(word);
    ids_.emplace(words_.back(), id);
    return id;
}

std::optional<Token> Vocabulary::find(std::string_view word) const {
    if (auto it = ids_.find(std::string(word)); it != ids_.end()) {
        return it->second;
    }
    return std::nullopt;
}

const std::string& Vocabulary::surface(Token id) const {
    if (!contains(id)) {
        throw VocabularyError("token id " + std::to_string(id) + " outside vocabulary of size " +
                              std::to_string(words_.size()));
    }
    return words_[id];
}

bool is_punctuation(std::string_view surface) {
    return surface.size() == 1 && kPunctuation.find(surface[0]) != std::string_view::npos;
}

bool is_sentence_terminator(std::string_view surface) {
    return surface == "." || surface == "?" || surface == "!";
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(std::move(word));
            word.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_space(c)) {
            flush();
            continue;
        }
        if (kPunctuation.find(c) != std::string_view::npos) {
            const bool decimal_point = c == '.' && !word.empty() && is_digit(word.back()) &&
                                       i + 1 < text.size() && is_digit(text[i + 1]);
            if (!decimal_point) {
                flush();
                out.emplace_back(1, c);
                continue;
            }
        }
        word.push_back(c);
    }
    flush();
    return out;
}

TokenSeq tokenize(std::string_view text, Vocabulary& vocab) {
    TokenSeq seq;
    for (const auto& word : split_words(text)) {
        seq.push_back(vocab.intern(word));
    }
    return seq;
}

std::string detokenize(std::span<const Token> seq, const Vocabulary& vocab) {
    std::string out;
    for (const Token t : seq) {
        if (t == kEosToken) {
            continue;
        }
        const std::string& s = vocab.surface(t);
        if (!out.empty() && !is_punctuation(s)) {
            out.push_back(' ');
        }
        out += s;
    }
    return out;
}

std::optional<SentenceSpan> first_sentence(std::span<const Token> seq, const Vocabulary& vocab) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == kEosToken) {
            continue;
        }
        const std::string& s = vocab.surface(seq[i]);
        if (is_sentence_terminator(s)) {
            return SentenceSpan{0, i + 1, s[0]};
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> sentence_end(std::span<const Token> response, std::size_t from,
                                        const Vocabulary& vocab) {
    for (std::size_t i = from; i < response.size(); ++i) {
        if (response[i] == kEosToken) {
            return i > from ? std::optional<std::size_t>(i + 1) : std::nullopt;
        }
        if (is_sentence_terminator(vocab.surface(response[i]))) {
            return i + 1;
        }
    }
    return std::nullopt;
}

}  // namespace predgen
