#include "aqa/selection.hpp"

#include <algorithm>
#include <set>

#include "aqa/error.hpp"

namespace aqa {

std::string_view to_string(SelectionMode m) noexcept {
    switch (m) {
        case SelectionMode::max_env: return "max_env";
        case SelectionMode::vote: return "vote";
        case SelectionMode::linear: return "linear";
    }
    return "?";
}

SelectionMode parse_selection_mode(std::string_view s) {
    if (s == "max_env") return SelectionMode::max_env;
    if (s == "vote") return SelectionMode::vote;
    if (s == "linear") return SelectionMode::linear;
    throw Error(ErrorKind::config, "unknown selection mode: " + std::string(s));
}

namespace {

double set_jaccard(const TokenSeq& a, const TokenSeq& b) {
    std::set<std::string> sa(a.tokens.begin(), a.tokens.end());
    std::set<std::string> sb(b.tokens.begin(), b.tokens.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

double vote_share(std::span<const AnswerCandidate> all, std::size_t which) {
    auto same = std::count_if(all.begin(), all.end(),
                              [&](const AnswerCandidate& c) { return c.ai == all[which].ai; });
    return static_cast<double>(same) / static_cast<double>(all.size());
}

double dot(const SelectionFeatures& w, const SelectionFeatures& phi) {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumSelectionFeatures; ++i) s += w[i] * phi[i];
    return s;
}

}  // namespace

SelectionFeatures selection_features(std::span<const AnswerCandidate> all, std::size_t which) {
    if (which >= all.size()) throw Error(ErrorKind::invalid_argument, "candidate index out of range");
    const auto& c = all[which];
    auto [lo, hi] = std::minmax_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.env_score < b.env_score;
    });
    const double range = hi->env_score - lo->env_score;
    const double norm = range > 0.0 ? (c.env_score - lo->env_score) / range : 1.0;
    const double echo = c.q0.empty() ? 0.0 : token_f1(c.ai, c.q0);
    return {norm, echo, static_cast<double>(c.ai.size()), vote_share(all, which),
            set_jaccard(c.qi, c.q0)};
}

std::size_t select_index(const SelectionModel& model, std::span<const AnswerCandidate> candidates) {
    if (candidates.empty()) throw Error(ErrorKind::invalid_argument, "select_answer: empty candidate set");
    std::size_t best = 0;
    switch (model.mode) {
        case SelectionMode::max_env:
            for (std::size_t i = 1; i < candidates.size(); ++i)
                if (candidates[i].env_score > candidates[best].env_score) best = i;
            return best;
        case SelectionMode::vote: {
            std::vector<std::size_t> votes(candidates.size());
            for (std::size_t i = 0; i < candidates.size(); ++i)
                for (const auto& other : candidates) votes[i] += other.ai == candidates[i].ai;
            for (std::size_t i = 1; i < candidates.size(); ++i) {
                if (votes[i] > votes[best] ||
                    (votes[i] == votes[best] && candidates[i].env_score > candidates[best].env_score))
                    best = i;
            }
            return best;
        }
        case SelectionMode::linear: {
            double best_score = dot(model.weights, selection_features(candidates, 0));
            for (std::size_t i = 1; i < candidates.size(); ++i) {
                double s = dot(model.weights, selection_features(candidates, i));
                if (s > best_score) {
                    best_score = s;
                    best = i;
                }
            }
            return best;
        }
    }
    return best;
}

const AnswerCandidate& select_answer(const SelectionModel& model,
                                     std::span<const AnswerCandidate> candidates) {
    return candidates[select_index(model, candidates)];
}

SelectionFeatures train_linear_selector(std::span<const LabeledSet> labeled, std::size_t epochs,
                                        double lr, SelectionFeatures init) {
    SelectionModel model{SelectionMode::linear, init};
    for (const auto& set : labeled)
        if (set.candidates.empty() || set.best >= set.candidates.size())
            throw Error(ErrorKind::invalid_argument, "train_linear_selector: invalid labeled set");
    for (std::size_t e = 0; e < epochs; ++e) {
        for (const auto& set : labeled) {
            std::size_t pred = select_index(model, set.candidates);
            if (pred == set.best) continue;
            auto good = selection_features(set.candidates, set.best);
            auto bad = selection_features(set.candidates, pred);
            for (std::size_t i = 0; i < kNumSelectionFeatures; ++i) model.weights[i] += lr * (good[i] - bad[i]);
        }
    }
    return model.weights;
}

}  // namespace aqa
