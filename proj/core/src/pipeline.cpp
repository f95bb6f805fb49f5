// Copyright 2026 The PredGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "predgen/pipeline.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace predgen {

void PipelineConfig::validate() const {
    if (verifier.kind == VerifierKind::topk && verifier.top_k == 0) {
        throw std::invalid_argument("top-k verification needs k >= 1");
    }
    if (!(rate_chars_per_min > 0)) {
        throw std::invalid_argument("input rate must be > 0");
    }
    if (chunk_words == 0) {
        throw std::invalid_argument("chunk_words must be >= 1");
    }
    tts.validate();
}

std::string method_name(const PipelineConfig& cfg) {
    std::string name = "predgen-";
    if (cfg.verifier.kind == VerifierKind::topk) {
        name += fmt::format("top{}", cfg.verifier.top_k);
    } else {
        name += to_string(cfg.verifier.kind);
    }
    if (cfg.generator == GeneratorKind::jacobi) {
        name += "-jacobi";
    }
    return name;
}

namespace {

using Json = nlohmann::ordered_json;

class TurnRunner {
public:
    TurnRunner(Session& s, std::span<const Token> history, const PipelineConfig& cfg, const TurnInfo& info,
               std::string method)
        : s_(s), cfg_(cfg), info_(info), method_(std::move(method)),
          meter_(s.clock, [this](const PassRecord& rec) { on_pass(rec); }) {
        prefix_ = tokenize(cfg.system_prompt, s.vocab);
        prefix_.insert(prefix_.end(), history.begin(), history.end());
        s_.tts.set_observer([this](const TtsJob& job, std::size_t chunk) { on_chunk(job, chunk); });
    }
    ~TurnRunner() { s_.tts.set_observer({}); }

    TurnResult run_predgen(const PromptStream& stream) {
        const auto& chunks = stream.chunks();
        wait_until(chunks.front().arrival);
        while (true) {
            const auto poll = stream.poll(s_.clock.now());
            const std::size_t idx = *poll.index;
            log_chunk(stream, idx);
            const TokenSeq ctx = context_for(chunks[idx].text);
            if (poll.is_final) {
                return finish(ctx, chunks[idx].text);
            }
            speculate(ctx, chunks[idx].text, chunks[idx + 1].arrival);
            wait_until(chunks[idx + 1].arrival);
        }
    }

    TurnResult run_baseline(const PromptStream& stream) {
        wait_until(stream.final_chunk().arrival);
        log_chunk(stream, stream.chunks().size() - 1);
        return finish(context_for(stream.full_text()), stream.full_text());
    }

private:
    void log(EventKind kind, Json payload) {
        s_.log.add(PipelineEvent{s_.clock.now(), kind, info_.turn_id, info_.round, std::move(payload)});
    }

    void wait_until(SimTime t) {
        if (t > s_.clock.now()) {
            s_.clock.advance_to(t);
        }
    }

    TokenSeq context_for(std::string_view prompt) {
        TokenSeq ctx = prefix_;
        const TokenSeq p = tokenize(prompt, s_.vocab);
        ctx.insert(ctx.end(), p.begin(), p.end());
        return ctx;
    }

    void log_chunk(const PromptStream& stream, std::size_t idx) {
        const auto& ch = stream.chunks()[idx];
        log(EventKind::chunk_received, Json{{"index", idx},
                                            {"chars", ch.chars},
                                            {"arrival_ms", to_ms(ch.arrival)},
                                            {"is_final", idx + 1 == stream.chunks().size()},
                                            {"text", ch.text}});
    }

    void on_pass(const PassRecord& rec) {
        log(EventKind::generate_step,
            Json{{"start_ms", to_ms(rec.start)},
                 {"cost_ms", to_ms(rec.cost)},
                 {"new_positions", rec.new_positions},
                 {"nfe", 1},
                 {"phase", phase_},
                 {"step", rec.kind == PassKind::jacobi_iteration ? "jacobi" : "ar"},
                 {"response_len", rec.response_length}});
    }

    void on_chunk(const TtsJob& job, std::size_t chunk) {
        if (chunk == 1 || chunk == job.buffer_target) {
            log(EventKind::tts_chunk_ready, Json{{"job", job.id}, {"chunk", chunk}, {"of", job.buffer_target}});
        }
    }

    bool has_first_sentence(std::span<const Token> resp) const {
        return sentence_end(resp, 0, s_.vocab).has_value();
    }

    StopRule stop_at_sentence(std::size_t from) const {
        return [this, from](std::span<const Token> resp) { return sentence_end(resp, from, s_.vocab).has_value(); };
    }

    VerifierOutcome verify_logged(const TokenSeq& ctx, std::string_view prompt, bool final) {
        const SimTime start = s_.clock.now();
        VerifierOutcome vo = verify(cfg_.verifier, s_.lm, s_.vocab, ctx, prompt, candidate_, cache_);
        s_.clock.charge(vo.cost);
        Json judge = nullptr;
        if (vo.judge != JudgeVerdict::none) {
            judge = vo.judge == JudgeVerdict::yes ? "yes" : vo.judge == JudgeVerdict::no ? "no" : "unsupported";
        }
        log(EventKind::verify, Json{{"iter", iteration_},
                                    {"final", final},
                                    {"k", vo.accepted},
                                    {"response_len", candidate_.size()},
                                    {"first_sentence_end", vo.first_sentence_end ? Json(*vo.first_sentence_end) : Json()},
                                    {"first_sentence_accepted", vo.first_sentence_accepted},
                                    {"nfe", vo.nfe},
                                    {"cost_ms", to_ms(vo.cost)},
                                    {"start_ms", to_ms(start)},
                                    {"judge", judge}});
        cache_ = vo.cache;
        return vo;
    }

    void drop_job(std::optional<TtsJobId>& replaced) {
        if (job_) {
            s_.tts.cancel(*job_);
            replaced = job_;
            job_.reset();
            job_text_.clear();
        }
    }

    // Keeps the live TTS job in sync with resp[0:end], by default the first
    // complete sentence of `resp`.
    void update_tts(std::span<const Token> resp, std::optional<std::size_t> end = std::nullopt) {
        std::optional<TtsJobId> replaced;
        if (!end) {
            end = sentence_end(resp, 0, s_.vocab);
        }
        if (!end) {
            drop_job(replaced);
            return;
        }
        std::string text = detokenize(resp.first(*end), s_.vocab);
        if (job_ && job_text_ == text && s_.tts.job(*job_).state != TtsState::canceled) {
            return;
        }
        drop_job(replaced);
        job_ = s_.tts.synthesize_buffer(text);
        job_text_ = text;
        log(EventKind::tts_submit, Json{{"job", *job_},
                                        {"text", text},
                                        {"sentence", 0},
                                        {"buffer_chunks", s_.tts.job(*job_).buffer_target},
                                        {"replaces", replaced ? Json(*replaced) : Json()}});
    }

    // One round on a non-final chunk: verify the previous candidate, then
    // extend it until the next chunk is due.
    void speculate(const TokenSeq& ctx, std::string_view prompt, SimTime deadline) {
        ++iteration_;
        phase_ = "speculate";
        std::size_t k = 0;
        if (!candidate_.empty()) {
            k = verify_logged(ctx, prompt, false).accepted;
        }
        const GenerationBudget budget{deadline, cfg_.max_new_tokens};
        GenerationResult first =
            generate(cfg_.generator, s_.lm, ctx, candidate_, k, cache_, budget, stop_at_sentence(0), &meter_);
        candidate_ = std::move(first.response);
        cache_ = first.cache;
        update_tts(candidate_);
        if (first.interrupted || first.complete) {
            return;
        }
        GenerationResult rest = ar_generate(s_.lm, ctx, candidate_, candidate_.size(), cache_, budget, {}, &meter_);
        candidate_ = std::move(rest.response);
        cache_ = rest.cache;
    }

    TurnResult finish(const TokenSeq& ctx, std::string_view prompt) {
        ++iteration_;
        phase_ = "final";
        const GenerationBudget budget{std::nullopt, cfg_.max_new_tokens};
        TokenSeq resp;
        bool accepted_first = false;
        std::size_t k = 0;
        if (!candidate_.empty()) {
            const VerifierOutcome vo = verify_logged(ctx, prompt, true);
            k = vo.accepted;
            accepted_first = vo.first_sentence_accepted;
        }
        if (accepted_first) {
            resp.assign(candidate_.begin(), candidate_.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            // Only the candidate's first sentence matters before audio starts.
            std::span<const Token> cand = candidate_;
            if (const auto end = sentence_end(cand, 0, s_.vocab); end && *end > k) {
                cand = cand.first(*end);
            }
            GenerationResult g =
                generate(cfg_.generator, s_.lm, ctx, cand, k, cache_, budget, stop_at_sentence(0), &meter_);
            resp = std::move(g.response);
            cache_ = g.cache;
        }

        std::size_t pos = 0;
        int sentence = 0;
        while (true) {
            auto end = sentence_end(resp, pos, s_.vocab);
            if (!end) {
                const bool done = (!resp.empty() && resp.back() == kEosToken) || resp.size() >= cfg_.max_new_tokens;
                if (!done) {
                    GenerationResult g = ar_generate(s_.lm, ctx, resp, resp.size(), cache_, budget,
                                                     stop_at_sentence(pos), &meter_);
                    resp = std::move(g.response);
                    cache_ = g.cache;
                    continue;
                }
                if (sentence > 0 && detokenize(std::span<const Token>(resp).subspan(pos), s_.vocab).empty()) {
                    break;
                }
                end = resp.size();
            }
            emit(resp, pos, *end, sentence++);
            pos = *end;
            phase_ = "remainder";
            if (pos >= resp.size() && ((!resp.empty() && resp.back() == kEosToken) ||
                                       resp.size() >= cfg_.max_new_tokens)) {
                break;
            }
        }

        s_.clock.run_all();
        TurnResult out;
        out.turn_id = info_.turn_id;
        out.round = info_.round;
        out.response = resp;
        out.final_text = detokenize(resp, s_.vocab);
        out.first_audio_job = first_audio_job_;
        log(EventKind::turn_done, Json{{"text", out.final_text},
                                       {"method", method_},
                                       {"dataset", info_.dataset},
                                       {"response_len", resp.size()}});
        return out;
    }

    void emit(std::span<const Token> resp, std::size_t begin, std::size_t end, int sentence) {
        const std::string text = detokenize(resp.subspan(begin, end - begin), s_.vocab);
        log(EventKind::sentence_emitted,
            Json{{"sentence", sentence}, {"text", text}, {"begin", begin}, {"end", end}});
        if (sentence > 0) {
            if (!text.empty()) {
                const TtsJobId id = s_.tts.synthesize_buffer(text);
                log(EventKind::tts_submit, Json{{"job", id},
                                                {"text", text},
                                                {"sentence", sentence},
                                                {"buffer_chunks", s_.tts.job(id).buffer_target},
                                                {"replaces", nullptr}});
                s_.tts.start_playback(id, s_.clock.now());
            }
            return;
        }
        if (text.empty()) {
            log(EventKind::audio_start, Json{{"job", nullptr}, {"text", ""}});
            return;
        }
        // A response without a terminator is spoken as one sentence.
        update_tts(resp, end);
        const TtsJobId id = *job_;
        first_audio_job_ = id;
        const SimTime at = s_.tts.start_playback(id, s_.clock.now());
        Json payload{{"job", id}, {"text", text}, {"job_submitted_ms", to_ms(s_.tts.job(id).submitted_at)}};
        if (at == s_.clock.now()) {
            log(EventKind::audio_start, std::move(payload));
        } else {
            s_.clock.schedule(at, [this, payload = std::move(payload)]() mutable {
                log(EventKind::audio_start, std::move(payload));
            });
        }
    }

    Session& s_;
    const PipelineConfig& cfg_;
    const TurnInfo& info_;
    std::string method_;
    PassMeter meter_;
    TokenSeq prefix_;
    TokenSeq candidate_;
    std::optional<CacheHandle> cache_;
    std::optional<TtsJobId> job_;
    std::string job_text_;
    std::optional<TtsJobId> first_audio_job_;
    std::string phase_ = "speculate";
    int iteration_ = 0;
};

}  // namespace

TurnResult run_turn(Session& session, std::span<const Token> history, const PromptStream& stream,
                    const PipelineConfig& cfg, const TurnInfo& info) {
    cfg.validate();
    TurnRunner runner(session, history, cfg, info, method_name(cfg));
    return runner.run_predgen(stream);
}

TurnResult run_baseline(Session& session, std::span<const Token> history, const PromptStream& stream,
                        const PipelineConfig& cfg, const TurnInfo& info) {
    cfg.validate();
    TurnRunner runner(session, history, cfg, info, std::string(kBaselineMethod));
    return runner.run_baseline(stream);
}

std::vector<TurnResult> run_conversation(Session& session, const std::vector<std::string>& turns,
                                         const PipelineConfig& cfg, RunMode mode,
                                         const std::string& conversation_id, const std::string& dataset) {
    if (turns.empty()) {
        throw std::invalid_argument("conversation " + conversation_id + " has no turns");
    }
    std::vector<TurnResult> results;
    TokenSeq history;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const TurnInfo info{fmt::format("{}/{}", conversation_id, i + 1), static_cast<int>(i + 1), dataset};
        const PromptStream stream =
            PromptStream::make(turns[i], cfg.rate_chars_per_min, cfg.chunk_words, session.clock.now());
        TurnResult r = mode == RunMode::predgen ? run_turn(session, history, stream, cfg, info)
                                                : run_baseline(session, history, stream, cfg, info);
        const TokenSeq user = tokenize(turns[i], session.vocab);
        history.insert(history.end(), user.begin(), user.end());
        for (Token t : r.response) {
            if (t != kEosToken) {
                history.push_back(t);
            }
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<Conversation> parse_dataset(std::istream& in) {
    std::vector<Conversation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            Conversation c;
            c.id = j.at("id").get<std::string>();
            c.turns = j.at("turns").get<std::vector<std::string>>();
            if (c.turns.empty()) {
                throw std::invalid_argument("no turns");
            }
            out.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw std::invalid_argument(fmt::format("dataset line {}: {}", lineno, e.what()));
        }
    }
    return out;
}

std::vector<Conversation> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset " + path.string());
    }
    return parse_dataset(in);
}

RunOutput run_dataset(const std::vector<Conversation>& dataset, const PipelineConfig& cfg,
                      const BackendFactory& make_backend, RunMode mode, const std::string& dataset_name) {
    RunOutput out;
    for (const auto& conv : dataset) {
        Backend backend = make_backend(cfg);
        SimClock clock;
        TtsSimulator tts(clock, cfg.tts);
        Session session{*backend.lm, *backend.vocab, clock, tts, out.log};
        auto turns = run_conversation(session, conv.turns, cfg, mode, conv.id, dataset_name);
        out.turns.insert(out.turns.end(), std::make_move_iterator(turns.begin()),
                         std::make_move_iterator(turns.end()));
    }
    return out;
}

}  // namespace predgen
