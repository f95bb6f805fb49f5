// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "predgen/scripted_lm.hpp"
#include "predgen/toy_lm.hpp"
#include "predgen/verifier.hpp"
#include "scenarios.hpp"

using namespace predgen;
namespace t = predgen::testing;

namespace {

// Accepted length recomputed from one cache-free pass and the naive ranker.
std::size_t oracle_accept(LanguageModel& lm, std::span<const Token> ctx, std::span<const Token> resp,
                          std::size_t k) {
    const TokenSeq seq = t::concat(ctx, resp);
    const auto fwd = lm.forward(seq, std::nullopt);
    std::size_t n = 0;
    while (n < resp.size() && t::naive_rank(fwd.logits.at_position(ctx.size() - 1 + n), resp[n]) < k) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("greedy verification accepts the greedy prefix") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 3);
    const TokenSeq ctx = tokenize("the old tree can see the water", vocab);
    const TokenSeq greedy = t::naive_greedy(*lm, ctx, 12);

    SUBCASE("full greedy response is fully accepted") {
        const auto out = verify_greedy(*lm, vocab, ctx, greedy);
        CHECK(out.accepted == greedy.size());
        CHECK(out.nfe == 1);
        CHECK(out.cost == from_ms(25));
        REQUIRE(out.cache);
        CHECK(out.cache->length() == ctx.size() + greedy.size());
    }
    SUBCASE("divergence at position j gives k = j") {
        for (std::size_t j = 0; j < greedy.size(); ++j) {
            TokenSeq resp = greedy;
            resp[j] = resp[j] == 5 ? 6 : 5;
            if (resp[j] == greedy[j]) continue;
            const auto out = verify_greedy(*lm, vocab, ctx, resp);
            CHECK(out.accepted == j);
            CHECK(out.cache->length() == ctx.size() + j);
        }
    }
    SUBCASE("empty response") {
        const auto out = verify_greedy(*lm, vocab, ctx, TokenSeq{});
        CHECK(out.accepted == 0);
        CHECK(out.nfe == 0);
        CHECK_FALSE(out.first_sentence_accepted);
        CHECK_FALSE(out.cache.has_value());
    }
    SUBCASE("empty context is rejected") {
        CHECK_THROWS_AS(verify_greedy(*lm, vocab, TokenSeq{}, greedy), std::invalid_argument);
    }
}

TEST_CASE("verification reuses a cache over a shared prefix") {
    Vocabulary vocab = toy_vocabulary();
    LatencyModel lat{10, 1};
    auto lm = make_toy_lm(vocab, 3, lat);
    const TokenSeq ctx = tokenize("you can make a new friend", vocab);
    const TokenSeq resp = tokenize("sure , I can .", vocab);
    const auto cold = verify_greedy(*lm, vocab, ctx, resp);
    CHECK(cold.cost == lat.pass_cost(ctx.size() + resp.size()));
    const auto warm = verify_greedy(*lm, vocab, ctx, resp, cold.cache);
    CHECK(warm.accepted == cold.accepted);
    // At most ctx-1 positions come from the cache.
    CHECK(warm.cost == lat.pass_cost(resp.size() + 1));
    // A cache over a different prompt is only partly usable.
    TokenSeq other = ctx;
    other.back() = vocab.intern("book");
    const auto diverged = verify_greedy(*lm, vocab, other, resp, cold.cache);
    CHECK(diverged.cost == lat.pass_cost(resp.size() + 1));
}

TEST_CASE("first sentence acceptance flag") {
    Script script;
    script.entries = {{"q ?", "Yes it is. And more."}};
    Vocabulary vocab;
    ScriptedLm lm(script, vocab);
    const TokenSeq ctx = tokenize("q ?", vocab);
    const auto full = verify_greedy(lm, vocab, ctx, tokenize("Yes it is. But", vocab));
    CHECK(full.accepted == 4);
    CHECK(full.first_sentence_end == 4);
    CHECK(full.first_sentence_accepted);
    const auto part = verify_greedy(lm, vocab, ctx, tokenize("Yes it was.", vocab));
    CHECK(part.accepted == 2);
    CHECK_FALSE(part.first_sentence_accepted);
    const auto open = verify_greedy(lm, vocab, ctx, tokenize("Yes it is", vocab));
    CHECK(open.accepted == 3);
    CHECK_FALSE(open.first_sentence_end.has_value());
    CHECK_FALSE(open.first_sentence_accepted);
}

TEST_CASE("top-k verification") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 9);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const TokenSeq ctx = tokenize(t::random_words(rng, vocab, 4 + trial % 9), vocab);
        TokenSeq resp = t::naive_greedy(*lm, ctx, 3 + trial % 5);
        const TokenSeq noise = t::random_tokens(rng, vocab.size(), 6);
        resp.insert(resp.end(), noise.begin(), noise.end());

        const auto g = verify_greedy(*lm, vocab, ctx, resp);
        const auto k1 = verify_topk(*lm, vocab, ctx, resp, 1);
        CHECK(k1.accepted == g.accepted);
        CHECK(k1.first_sentence_accepted == g.first_sentence_accepted);
        std::size_t prev = 0;
        for (std::size_t k : {1, 2, 3, 5, 10}) {
            const auto out = verify_topk(*lm, vocab, ctx, resp, k);
            CHECK(out.accepted >= prev);
            CHECK(out.accepted == oracle_accept(*lm, ctx, resp, k));
            prev = out.accepted;
        }
        CHECK(verify_topk(*lm, vocab, ctx, resp, vocab.size()).accepted == resp.size());
    }
    CHECK_THROWS_AS(verify_topk(*lm, vocab, tokenize("a", vocab), tokenize("b", vocab), 0),
                    std::invalid_argument);
}

TEST_CASE("reflection verification") {
    for (const auto& c : t::reflection_cases()) {
        Vocabulary vocab;
        ScriptedLm lm(c.script, vocab);
        const TokenSeq ctx = tokenize(c.prompt, vocab);
        const TokenSeq resp = tokenize(c.candidate, vocab);
        const auto out = verify_reflection(lm, vocab, ctx, c.prompt, resp);
        const auto g = verify_greedy(lm, vocab, ctx, resp);
        if (c.judge_yes) {
            CHECK(out.judge == JudgeVerdict::yes);
            CHECK(out.accepted == c.first_sentence_tokens);
            CHECK(out.first_sentence_accepted);
            CHECK(out.nfe == 1);
            CHECK_FALSE(out.cache.has_value());
        } else {
            CHECK(out.judge == JudgeVerdict::no);
            CHECK(out.accepted == g.accepted);
            CHECK(out.first_sentence_accepted == g.first_sentence_accepted);
            CHECK(out.nfe == 2);
            CHECK(out.cost == g.cost + from_ms(25));
        }
    }
}

TEST_CASE("reflection without a sentence or a judge falls back to greedy") {
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 1);
    const TokenSeq ctx = tokenize("the city is", vocab);
    const TokenSeq resp = tokenize("very old .", vocab);
    const auto out = verify_reflection(*lm, vocab, ctx, "the city is", resp);
    CHECK(out.judge == JudgeVerdict::unsupported);
    CHECK(out.accepted == verify_greedy(*lm, vocab, ctx, resp).accepted);
    CHECK(out.nfe == 1);

    Script script;
    script.verdicts = {{"p", "open ended", true}};
    Vocabulary v2;
    ScriptedLm slm(script, v2);
    const auto open = verify_reflection(slm, v2, tokenize("p", v2), "p", tokenize("open ended", v2));
    CHECK(open.judge == JudgeVerdict::none);
    CHECK(open.nfe == 1);
}

TEST_CASE("verifier dispatch and names") {
    CHECK(parse_verifier_kind("topk") == VerifierKind::topk);
    CHECK(to_string(VerifierKind::reflection) == "reflection");
    CHECK_THROWS_AS(parse_verifier_kind("beam"), std::invalid_argument);
    Vocabulary vocab = toy_vocabulary();
    auto lm = make_toy_lm(vocab, 4);
    const TokenSeq ctx = tokenize("we like music", vocab);
    const TokenSeq resp = t::naive_greedy(*lm, ctx, 5);
    CHECK(verify({VerifierKind::topk, 1}, *lm, vocab, ctx, "", resp).accepted == resp.size());
}
