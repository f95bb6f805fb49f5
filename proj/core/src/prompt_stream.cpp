// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/prompt_stream.hpp"

#include <cmath>
#include <stdexcept>

namespace predgen {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

SimDuration arrival_offset(std::size_t chars, double rate) {
    return SimDuration{std::llround(static_cast<double>(chars) * 60'000'000.0 / rate)};
}

}  // namespace

std::size_t count_chars(std::string_view s) {
    std::size_t n = 0;
    for (const char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

PromptStream PromptStream::make(std::string_view text, double rate_chars_per_min,
                                std::size_t chunk_words, SimTime start_at) {
    if (!(rate_chars_per_min > 0.0)) {
        throw std::invalid_argument("prompt stream rate must be positive");
    }
    if (chunk_words == 0) {
        throw std::invalid_argument("chunk_words must be at least 1");
    }
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;

    PromptStream stream;
    stream.full_text_ = std::string(text.substr(b, e - b));
    stream.rate_ = rate_chars_per_min;
    const std::string_view full = stream.full_text_;

    if (full.empty()) {
        stream.chunks_.push_back(PromptChunk{"", 0, start_at});
        return stream;
    }

    std::size_t words_in_chunk = 0;
    std::size_t i = 0;
    while (i < full.size()) {
        while (i < full.size() && is_space(full[i])) ++i;
        while (i < full.size() && !is_space(full[i])) ++i;
        ++words_in_chunk;
        if (words_in_chunk == chunk_words || i == full.size()) {
            std::string prefix(full.substr(0, i));
            const std::size_t chars = count_chars(prefix);
            stream.chunks_.push_back(
                PromptChunk{std::move(prefix), chars, start_at + arrival_offset(chars, rate_chars_per_min)});
            words_in_chunk = 0;
        }
    }
    return stream;
}

PromptStream PromptStream::from_chunks(std::vector<PromptChunk> chunks, double rate_chars_per_min) {
    if (chunks.empty()) {
        throw std::invalid_argument("prompt stream needs at least one chunk");
    }
    for (std::size_t i = 1; i < chunks.size(); ++i) {
        const auto& prev = chunks[i - 1];
        const auto& cur = chunks[i];
        if (cur.text.size() <= prev.text.size() || cur.text.compare(0, prev.text.size(), prev.text) != 0) {
            throw std::invalid_argument("prompt chunks must be strictly growing prefixes");
        }
        if (cur.arrival < prev.arrival) {
            throw std::invalid_argument("prompt chunk arrivals must be nondecreasing");
        }
    }
    PromptStream stream;
    stream.full_text_ = chunks.back().text;
    stream.rate_ = rate_chars_per_min;
    stream.chunks_ = std::move(chunks);
    return stream;
}

PromptStream::Poll PromptStream::poll(SimTime now) const {
    Poll p;
    for (std::size_t i = 0; i < chunks_.size() && chunks_[i].arrival <= now; ++i) {
        p.index = i;
    }
    if (p.index) {
        p.text = chunks_[*p.index].text;
        p.is_final = *p.index + 1 == chunks_.size();
    }
    return p;
}

}  // namespace predgen
