// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace predgen {

using Token = std::uint32_t;
using TokenSeq = std::vector<Token>;

/// End-of-sequence is reserved as id 0 in every vocabulary.
inline constexpr Token kEosToken = 0;
inline constexpr std::string_view kEosSurface = "<eos>";

class VocabularyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Word-level vocabulary with ids assigned in order of first appearance.
class Vocabulary {
public:
    Vocabulary();

    /// Returns the id of `word`, adding it if unseen. Throws VocabularyError
    /// when the vocabulary is frozen and the word is unknown.
    Token intern(std::string_view word);
    std::optional<Token> find(std::string_view word) const;

    const std::string& surface(Token id) const;
    bool contains(Token id) const { return id < words_.size(); }
    std::size_t size() const { return words_.size(); }

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, Token> ids_;
    bool frozen_ = false;
};

/// Punctuation marks that always form their own token.
bool is_punctuation(std::string_view surface);
/// ".", "?" and "!"; sub-sentence marks ("," ":" ";") never terminate.
bool is_sentence_terminator(std::string_view surface);

/// Applies the tokenization rule without touching a vocabulary: whitespace
/// separates words and each mark in {. , ? ! : ; "} is split off, except a
/// '.' between two digits ("3.5" stays one word).
std::vector<std::string> split_words(std::string_view text);

TokenSeq tokenize(std::string_view text, Vocabulary& vocab);

/// Joins words with single spaces, with no space before punctuation. EOS
/// tokens produce no text.
std::string detokenize(std::span<const Token> seq, const Vocabulary& vocab);

struct SentenceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    char terminator = '.';
};

/// Span from index 0 through the first ".", "?" or "!" token.
std::optional<SentenceSpan> first_sentence(std::span<const Token> seq, const Vocabulary& vocab);

/// One past the end of the sentence starting at `from` within a response.
/// A sentence ends at the first terminator; if EOS comes first, the text
/// before it is the sentence and the span includes the EOS. Returns nullopt
/// while the sentence is still open.
std::optional<std::size_t> sentence_end(std::span<const Token> response, std::size_t from,
                                        const Vocabulary& vocab);

}  // namespace predgen
