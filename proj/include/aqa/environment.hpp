#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqa/textproc.hpp"

namespace aqa {

/// One dataset record. The context is the retrieval "document".
struct QAExample {
    std::string id;
    std::string question_raw;
    TokenSeq question;
    TokenSeq answer_gold;
    TokenSeq context;
};

/// Document statistics over example contexts (never questions).
class CorpusIndex {
public:
    explicit CorpusIndex(std::span<const QAExample> examples);

    [[nodiscard]] std::size_t num_docs() const noexcept { return doc_lengths_.size(); }
    [[nodiscard]] double avg_doc_len() const noexcept { return avg_doc_len_; }
    /// 0 for tokens that never occur in any context.
    [[nodiscard]] std::size_t df(const std::string& token) const;
    /// ln(1 + (N - df + 0.5) / (df + 0.5))
    [[nodiscard]] double idf(const std::string& token) const;
    [[nodiscard]] std::size_t doc_length(const std::string& id) const;
    [[nodiscard]] std::size_t tf(const std::string& token, const std::string& doc_id) const;

    [[nodiscard]] const std::map<std::string, std::size_t>& df_table() const noexcept { return df_; }
    [[nodiscard]] const std::map<std::string, std::size_t>& doc_lengths() const noexcept {
        return doc_lengths_;
    }

private:
    std::map<std::string, std::size_t> df_;
    std::map<std::string, std::size_t> doc_lengths_;
    std::unordered_map<std::string, std::map<std::string, std::size_t>> postings_;
    double avg_doc_len_ = 0.0;
};

[[nodiscard]] CorpusIndex build_index(std::span<const QAExample> examples);

struct EnvParams {
    double k1 = 1.2;
    double b = 0.75;
    double lambda = 0.5;  // soft-match weight
    double theta = 0.4;   // trigram Jaccard threshold
    std::size_t window = 10;
    std::size_t answer_max = 5;
    bool expose_env_score = false;
};

/// A (q0, qi, ai) triple with the environment's score and the F1 reward.
struct AnswerCandidate {
    TokenSeq q0;
    TokenSeq qi;
    TokenSeq ai;
    double env_score = 0.0;
    double reward = 0.0;
};

/// 1 for identical tokens, lambda * J when trigram Jaccard J >= theta, else 0.
[[nodiscard]] double match_weight(std::string_view q_token, std::string_view d_token,
                                  double lambda, double theta);

/// BM25 over a context window with query-side term frequency and
/// character-trigram soft term frequency.
[[nodiscard]] double score_window(const CorpusIndex& index, const TokenSeq& query,
                                  std::span<const std::string> window, const EnvParams& params);

/// Bag-of-tokens F1 with multiplicity. Throws on empty gold.
[[nodiscard]] double token_f1(const TokenSeq& pred, const TokenSeq& gold);

/// Location of an extracted answer inside the example context.
struct SpanPick {
    std::size_t window_start = 0;
    std::size_t window_len = 0;
    std::size_t span_start = 0;
    std::size_t span_len = 0;
    double window_score = 0.0;
};

/// The black-box QA system: answers a question from its example's context by
/// picking the best-scoring window and the most informative sub-span in it.
/// Immutable after construction, so answer() may be called concurrently.
class Environment {
public:
    Environment(std::vector<QAExample> examples, EnvParams params = {});
    /// Uses `index` for term statistics instead of indexing `examples`.
    Environment(std::vector<QAExample> examples, CorpusIndex index, EnvParams params);

    [[nodiscard]] const CorpusIndex& index() const noexcept { return index_; }
    [[nodiscard]] const EnvParams& params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<QAExample>& examples() const noexcept { return examples_; }
    [[nodiscard]] const QAExample& example(const std::string& id) const;

    /// Window and sub-span selection for `question` against the context of `example_id`.
    [[nodiscard]] SpanPick locate(const TokenSeq& question, const std::string& example_id) const;

    [[nodiscard]] AnswerCandidate answer_question(const TokenSeq& question,
                                                  const std::string& example_id) const;

private:
    std::vector<QAExample> examples_;
    std::unordered_map<std::string, std::size_t> by_id_;
    CorpusIndex index_;
    EnvParams params_;
};

}  // namespace aqa
