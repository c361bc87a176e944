#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqa/agent.hpp"
#include "aqa/environment.hpp"
#include "aqa/textproc.hpp"

namespace aqa {

/// tokens / distinct tokens. Throws on an empty question.
[[nodiscard]] double mean_tf(const TokenSeq& q);

/// Median of df over the question's tokens (with multiplicity); unindexed
/// tokens count as df 0. Even counts average the middle two.
[[nodiscard]] double median_df(const TokenSeq& q, const CorpusIndex& index);

struct MorphFlags {
    bool has_morph_variant = false;  // two distinct surface forms share a stem
    bool same_stem_multi = false;    // some stem occurs at least twice

    friend bool operator==(const MorphFlags&, const MorphFlags&) = default;
};

[[nodiscard]] MorphFlags morph_flags(const TokenSeq& q);

using PrefixCount = std::pair<std::string, std::size_t>;

/// First k tokens (space-joined) of every question with at least k tokens,
/// sorted by count descending then prefix ascending.
[[nodiscard]] std::vector<PrefixCount> prefix_histogram(std::span<const TokenSeq> corpus, std::size_t k);

struct StatsSummary {
    std::string metric;
    std::size_t n = 0;
    double mean = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation (type 7) quantile of sorted values.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);

[[nodiscard]] StatsSummary summarize(std::span<const double> values, const std::string& metric);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch unequal-variance two-sample t-test, two-sided.
[[nodiscard]] TTestResult welch_ttest(std::span<const double> a, std::span<const double> b);

struct QuestionStats {
    std::string id;
    std::size_t length = 0;
    double mean_tf = 0.0;
    double median_df = 0.0;
    std::optional<double> lm_nll;  // empty when nothing is left after prefix stripping
    bool has_morph_variant = false;
    bool same_stem_multi = false;
};

[[nodiscard]] QuestionStats question_stats(const TokenSeq& q, const CorpusIndex& index,
                                           const LanguageModel& lm,
                                           std::span<const std::string> strip_prefix);

/// Per-question statistics for a whole set; empty questions are skipped.
/// Serial and omp variants produce identical output.
[[nodiscard]] std::vector<QuestionStats> question_stats_batch(std::span<const TokenSeq> questions,
                                                              const CorpusIndex& index,
                                                              const LanguageModel& lm,
                                                              std::span<const std::string> strip_prefix,
                                                              Exec exec);

struct NamedSet {
    std::string name;
    std::vector<TokenSeq> questions;
    /// Removed from the front of each question before LM scoring only.
    std::vector<std::string> strip_prefix;
};

struct SetReport {
    std::string name;
    std::size_t num_questions = 0;
    std::size_t skipped_empty = 0;
    std::vector<QuestionStats> stats;
    std::map<std::string, StatsSummary> summaries;  // keyed by metric
    double variant_rate = 0.0;
    double same_stem_rate = 0.0;
    std::vector<PrefixCount> prefixes;
};

struct PairTest {
    std::string metric;
    std::string set_a;
    std::string set_b;
    TTestResult result;
};

struct AnalysisReport {
    std::vector<SetReport> sets;
    std::vector<PairTest> ttests;
};

/// Metrics summarized and compared across sets, in report order.
inline constexpr const char* kAnalysisMetrics[] = {"length", "mean_tf", "median_df", "lm_nll"};

struct AnalysisOptions {
    std::size_t prefix_k = 3;
    Exec exec = Exec::serial;
};

[[nodiscard]] AnalysisReport compare_corpora(std::span<const NamedSet> sets, const CorpusIndex& index,
                                             const LanguageModel& lm, const AnalysisOptions& opts = {});

/// Writes summary.csv, ttests.csv, prefixes.csv, morphology.csv and report.json.
void write_report(const AnalysisReport& report, const std::string& out_dir);

}  // namespace aqa
