#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqa/environment.hpp"

namespace aqa {

enum class SelectionMode { max_env, vote, linear };

[[nodiscard]] std::string_view to_string(SelectionMode m) noexcept;
[[nodiscard]] SelectionMode parse_selection_mode(std::string_view s);

inline constexpr std::size_t kNumSelectionFeatures = 5;

/// Feature names in vector order.
inline constexpr std::array<std::string_view, kNumSelectionFeatures> kSelectionFeatureNames = {
    "env_score_norm", "q0_answer_f1", "answer_len", "vote_share", "q_jaccard"};

using SelectionFeatures = std::array<double, kNumSelectionFeatures>;

struct SelectionModel {
    SelectionMode mode = SelectionMode::vote;
    SelectionFeatures weights{};
};

/// Features of candidate `which` within `all`: env_score min-max normalized
/// over the set (1.0 when all scores are equal), token F1 between the answer
/// and q0, answer length, share of candidates with the same answer, and the
/// token-set Jaccard between qi and q0.
[[nodiscard]] SelectionFeatures selection_features(std::span<const AnswerCandidate> all,
                                                   std::size_t which);

/// Index of the selected candidate. Ties go to the earliest candidate.
[[nodiscard]] std::size_t select_index(const SelectionModel& model,
                                       std::span<const AnswerCandidate> candidates);

[[nodiscard]] const AnswerCandidate& select_answer(const SelectionModel& model,
                                                   std::span<const AnswerCandidate> candidates);

struct LabeledSet {
    std::vector<AnswerCandidate> candidates;
    std::size_t best = 0;
};

/// Perceptron training from zero weights.
[[nodiscard]] SelectionFeatures train_linear_selector(std::span<const LabeledSet> labeled,
                                                      std::size_t epochs, double lr,
                                                      SelectionFeatures init = {});

}  // namespace aqa
