// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <random>

#include "oracles.hpp"
#include "predgen/scripted_lm.hpp"
#include "predgen/toy_lm.hpp"

using namespace predgen;
using predgen::testing::naive_argmax;
using predgen::testing::naive_greedy;
using predgen::testing::naive_rank;

// Recorded once from seed 42 and frozen; a change means the toy model or
// the decoder changed behavior.
constexpr std::string_view kGoldenToyDecode =
    "water! Bob new here! apples very. very your we 2 water. your for apples here like idea last water here";

TEST_CASE("latency model arithmetic") {
    const LatencyModel flat;
    CHECK(flat.pass_cost(1) == from_ms(25));
    CHECK(flat.pass_cost(500) == from_ms(25));
    const LatencyModel per{10, 0.5};
    CHECK(per.pass_cost(4) == from_ms(12));
    CHECK_THROWS_AS((LatencyModel{-1, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((LatencyModel{1, -0.1}.validate()), std::invalid_argument);
}

TEST_CASE("judge prompt layout") {
    const std::string p = format_judge_prompt("How many", "Two.");
    CHECK(p.rfind("<|im_start|>user\n", 0) == 0);
    CHECK(p.find("Partial Prompt: How many\nPartial Answer: Two.\n") != std::string::npos);
    CHECK(p.ends_with("<|im_end|>\n<|im_start|>assistant\n"));
}

TEST_CASE("system prompt tells the model to tolerate truncation") {
    CHECK(kDefaultSystemPrompt.find("Do not complain about incomplete prompts.") != std::string_view::npos);
    CHECK(kDefaultSystemPrompt.rfind("<|im_start|>system\n", 0) == 0);
}

TEST_CASE("argmax and top-k ranking break ties toward the lowest id") {
    const std::vector<float> row{0.1f, 0.9f, 0.9f, 0.5f, 0.2f};
    CHECK(argmax_token(row) == 1);
    CHECK(topk_tokens(row, 3) == std::vector<Token>{1, 2, 3});
    CHECK(topk_tokens(row, 10).size() == 5);
    CHECK(in_topk(row, 1, 1));
    CHECK_FALSE(in_topk(row, 2, 1));
    CHECK(in_topk(row, 2, 2));
    CHECK_FALSE(in_topk(row, 0, 4));
    CHECK(in_topk(row, 0, 5));
    CHECK_THROWS(argmax_token(std::vector<float>{}));
    for (Token t = 0; t < row.size(); ++t) {
        for (std::size_t k = 1; k <= row.size(); ++k) {
            CHECK(in_topk(row, t, k) == (naive_rank(row, t) < k));
        }
    }
}

TEST_CASE("forward respects the cache prefix") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 7);
    const TokenSeq ctx = tokenize("the tree is old and the water is new", vocab);
    const ForwardResult full = lm->forward(ctx);
    CHECK(full.new_positions == ctx.size());
    CHECK(full.logits.rows() == ctx.size());
    CHECK(full.cache.length() == ctx.size());

    const CacheHandle part = full.cache.truncated(4);
    const ForwardResult inc = lm->forward(ctx, part);
    CHECK(inc.new_positions == ctx.size() - 4);
    CHECK(inc.logits.first_position() == 4);
    for (std::size_t pos = 4; pos < ctx.size(); ++pos) {
        const auto a = full.logits.at_position(pos);
        const auto b = inc.logits.at_position(pos);
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
    CHECK_THROWS_AS(inc.logits.at_position(3), std::out_of_range);

    SUBCASE("mismatched prefix is rejected") {
        TokenSeq other = ctx;
        other[1] = vocab.intern("city");
        CHECK_THROWS_AS(lm->forward(other, part), PrefixViolation);
    }
    SUBCASE("a pass needs at least one uncached position") {
        CHECK_THROWS_AS(lm->forward(ctx, full.cache), std::invalid_argument);
    }
    SUBCASE("truncation cannot extend") {
        CHECK_THROWS_AS(part.truncated(5), PrefixViolation);
        CHECK(full.cache.common_prefix(ctx) == ctx.size());
        CHECK(part.valid_for(ctx));
    }
}

TEST_CASE("toy LM is deterministic per seed and depends on the last n tokens") {
    Vocabulary vocab = toy_vocabulary();
    auto a = make_toy_lm(vocab, 42);
    auto b = make_toy_lm(vocab, 42);
    auto c = make_toy_lm(vocab, 43);
    const TokenSeq ctx = tokenize("you can see the old tree", vocab);
    const auto la = a->forward(ctx).logits;
    CHECK(la == b->forward(ctx).logits);
    CHECK_FALSE(la == c->forward(ctx).logits);

    // Only the last three tokens matter for the next-token scores.
    const TokenSeq other = tokenize("I know we see the old tree", vocab);
    const auto lo = a->forward(other).logits;
    const auto r1 = la.at_position(ctx.size() - 1);
    const auto r2 = lo.at_position(other.size() - 1);
    CHECK(std::equal(r1.begin(), r1.end(), r2.begin(), r2.end()));
    for (float s : r1) {
        CHECK(s >= 0.0f);
        CHECK(s < 1.1f);
    }
}

TEST_CASE("toy LM has no judge") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 1);
    CHECK_THROWS_AS(lm->judge_consistency("a", "b"), CapabilityError);
}

TEST_CASE("greedy_decode matches the cache-free oracle") {
    Vocabulary vocab = toy_vocabulary();
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto lm = make_toy_lm(vocab, seed);
        const TokenSeq prompt = tokenize(predgen::testing::random_words(rng, vocab, 3 + seed % 7), vocab);
        const TokenSeq got = greedy_decode(*lm, prompt, 40);
        const TokenSeq want = predgen::testing::concat(prompt, naive_greedy(*lm, prompt, 40));
        CHECK(got == want);
    }
}

TEST_CASE("greedy_decode stop rule and cap") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 5);
    const TokenSeq prompt = tokenize("tell me a story", vocab);
    CHECK(greedy_decode(*lm, prompt, 0) == prompt);
    const TokenSeq capped = greedy_decode(*lm, prompt, 3);
    CHECK(capped.size() <= prompt.size() + 3);
    const TokenSeq one = greedy_decode(*lm, prompt, 200, stop_after_first_sentence(vocab));
    const std::span<const Token> gen = std::span<const Token>(one).subspan(prompt.size());
    if (gen.back() != kEosToken && gen.size() < 200) {
        CHECK(sentence_end(gen, 0, vocab) == gen.size());
    }
    CHECK_THROWS_AS(greedy_decode(*lm, TokenSeq{}, 5), std::invalid_argument);
}

TEST_CASE("golden toy decode snapshot") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 42);
    const TokenSeq prompt = tokenize("Alice and Bob have apples", vocab);
    const TokenSeq out = greedy_decode(*lm, prompt, 24);
    const std::string text = detokenize(std::span<const Token>(out).subspan(prompt.size()), vocab);
    CHECK(text == kGoldenToyDecode);
}

TEST_CASE("scripted LM follows the longest matching script suffix") {
    Script script;
    script.entries = {
        {"how are you ?", "fine thanks . <eos>"},
        {"", "hello there . <eos>"},
        {"you ?", "me ? <eos>"},
    };
    Vocabulary vocab;
    ScriptedLm lm(script, vocab);
    const TokenSeq q = tokenize("so how are you ?", vocab);
    CHECK(lm.predict(q) == *vocab.find("fine"));
    CHECK(lm.predict(tokenize("so how are you ? fine", vocab)) == *vocab.find("thanks"));
    // A shorter entry applies when the long one does not match.
    CHECK(lm.predict(tokenize("and you ?", vocab)) == *vocab.find("me"));
    // The empty prompt prefix matches anything.
    CHECK(lm.predict(tokenize("unrelated", vocab)) == *vocab.find("hello"));
    CHECK(lm.predict(tokenize("hello there .", vocab)) == kEosToken);

    const TokenSeq gen = greedy_decode(lm, q, 10);
    CHECK(detokenize(std::span<const Token>(gen).subspan(q.size()), vocab) == "fine thanks.");
    CHECK(gen.back() == kEosToken);

    const auto logits = lm.forward(q).logits;
    const auto row = logits.at_position(q.size() - 1);
    CHECK(row[*vocab.find("fine")] == 1.0f);
    CHECK(std::count(row.begin(), row.end(), 0.0f) == static_cast<long>(row.size() - 1));
}

TEST_CASE("scripted fallback token") {
    Script script;
    script.fallback = "hmm";
    Vocabulary vocab;
    ScriptedLm lm(script, vocab);
    CHECK(lm.predict(tokenize("anything", vocab)) == *vocab.find("hmm"));
}

TEST_CASE("scripted judge verdicts") {
    Script script;
    script.verdicts = {{"is it warm", "It is warm .", true}, {"is it cold", "No.", false}};
    Vocabulary vocab;
    ScriptedLm lm(script, vocab);
    const auto yes = lm.judge_consistency("is it  warm", "It is warm.");
    CHECK(yes.verdict.says_yes());
    CHECK(yes.cost == from_ms(25));
    CHECK_FALSE(lm.judge_consistency("is it cold", "No.").verdict.says_yes());
    CHECK_FALSE(lm.judge_consistency("never scripted", "x").verdict.says_yes());
    CHECK_FALSE(lm.judge_consistency("is it warm", "").verdict.says_yes());
}

TEST_CASE("script parsing") {
    const auto doc = nlohmann::json::parse(R"({
        "entries": [{"prompt_prefix": "hi", "continuation": "hello ."}],
        "verdicts": [{"prompt": "p", "answer": "a", "verdict": "yes"}],
        "fallback": "<eos>"})");
    const Script s = parse_script(doc);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].continuation == "hello .");
    REQUIRE(s.verdicts.size() == 1);
    CHECK(s.verdicts[0].yes);

    const Script flat = parse_script(nlohmann::json::parse(
        R"([{"continuation": "x ."}, {"prompt": "p", "answer": "a", "verdict": "no"}])"));
    CHECK(flat.entries.size() == 1);
    CHECK(flat.entries[0].prompt_prefix.empty());
    CHECK_FALSE(flat.verdicts[0].yes);

    CHECK_THROWS_AS(parse_script(nlohmann::json::parse(R"([{"prompt": "p", "answer": "a", "verdict": "maybe"}])")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_script(nlohmann::json::parse(R"([{"foo": 1}])")), std::invalid_argument);
    CHECK_THROWS_AS(parse_script(nlohmann::json::parse("3")), std::invalid_argument);
    CHECK_THROWS(load_script("/nonexistent/script.json"));
}
