#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aqa/environment.hpp"

namespace aqa {

/// Planted-corpus generator. Every context holds three regions at least a
/// window apart:
///   - an echo region up front holding the discriminative term once among
///     decoys;
///   - a distractor region with the question's high-DF distractor term and
///     its shared topic terms repeated, next to a decoy span;
///   - an answer region where the gold span is guarded by the discriminative
///     low-DF term and a few of the topic terms.
/// With the question as given the distractor region wins, so the identity
/// query returns a decoy. Dropping every other term ties the echo and answer
/// regions and the leftmost (echo) wins; boosting the discriminative term's
/// query-side frequency recovers the gold span. A fraction of questions carry
/// an inflected form of the discriminative term that only matches through
/// stemming or character soft-matching.
struct SyntheticSpec {
    std::size_t num_examples = 400;
    double inflected_rate = 0.3;
    std::size_t filler_vocab = 60;
    std::size_t distractor_vocab = 6;
    std::size_t topic_vocab = 24;
    std::size_t topic_terms = 2;      // shared topic terms per question
    std::size_t topic_repeats = 2;    // occurrences of each topic term in the distractor region
    std::size_t distractor_repeats = 3;
    std::size_t answer_topics = 1;    // topic terms also placed in the answer region
    std::size_t key_vocab = 80;       // discriminative terms are drawn from this pool
    bool echo = true;
    std::size_t gap = 10;             // filler tokens separating the two regions
    std::uint64_t seed = 7;
};

struct SyntheticCorpus {
    std::vector<QAExample> train;
    std::vector<QAExample> dev;
};

/// Raw (untokenized) records; questions, answers and contexts are
/// space-separated lowercase pseudo-words that preprocess() leaves intact.
[[nodiscard]] std::vector<QAExample> generate_synthetic(const SyntheticSpec& spec);

/// generate_synthetic() split into train/dev by `dev_fraction` (tail goes to dev).
[[nodiscard]] SyntheticCorpus generate_synthetic_split(const SyntheticSpec& spec, double dev_fraction);

}  // namespace aqa
