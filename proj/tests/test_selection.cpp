#include <random>

#include <gtest/gtest.h>

#include "aqa/error.hpp"
#include "aqa/selection.hpp"

using namespace aqa;

namespace {

AnswerCandidate cand(TokenSeq answer, double env, TokenSeq qi = {"q"}) {
    AnswerCandidate c;
    c.q0 = TokenSeq{"q"};
    c.qi = std::move(qi);
    c.ai = std::move(answer);
    c.env_score = env;
    return c;
}

}  // namespace

TEST(SelectionFeatures, Singleton) {
    std::vector<AnswerCandidate> all{cand({"x"}, 3.0)};
    auto f = selection_features(all, 0);
    EXPECT_DOUBLE_EQ(f[0], 1.0);
    EXPECT_DOUBLE_EQ(f[3], 1.0);
    EXPECT_DOUBLE_EQ(f[4], 1.0);
}

TEST(SelectionFeatures, SharedAnswerVotes) {
    std::vector<AnswerCandidate> all{cand({"x", "y"}, 1.0), cand({"x", "y"}, 3.0, {"q", "z"})};
    auto a = selection_features(all, 0);
    auto b = selection_features(all, 1);
    EXPECT_DOUBLE_EQ(a[3], 1.0);
    EXPECT_DOUBLE_EQ(b[3], 1.0);
    EXPECT_DOUBLE_EQ(a[0], 0.0);
    EXPECT_DOUBLE_EQ(b[0], 1.0);
    EXPECT_DOUBLE_EQ(a[2], 2.0);
    EXPECT_DOUBLE_EQ(b[4], 0.5);
    EXPECT_EQ(selection_features(all, 1), b);
}

TEST(Select, Singleton) {
    std::vector<AnswerCandidate> all{cand({"x"}, 0.0)};
    for (auto mode : {SelectionMode::max_env, SelectionMode::vote, SelectionMode::linear})
        EXPECT_EQ(select_index(SelectionModel{mode, {}}, all), 0u);
    EXPECT_THROW((void)select_index(SelectionModel{}, std::span<const AnswerCandidate>{}), Error);
}

TEST(Select, VoteMajority) {
    std::vector<AnswerCandidate> all{cand({"x"}, 0.1), cand({"x"}, 0.2), cand({"y"}, 0.9)};
    EXPECT_EQ(select_answer(SelectionModel{SelectionMode::vote, {}}, all).ai, TokenSeq{"x"});
    EXPECT_EQ(select_index(SelectionModel{SelectionMode::vote, {}}, all), 1u);
    EXPECT_EQ(select_index(SelectionModel{SelectionMode::max_env, {}}, all), 2u);
}

TEST(Select, LinearOnEnvScoreEqualsMaxEnv) {
    std::mt19937_64 rng(4);
    SelectionModel lin{SelectionMode::linear, {1.0, 0, 0, 0, 0}};
    SelectionModel env{SelectionMode::max_env, {}};
    for (int c = 0; c < 100; ++c) {
        std::vector<AnswerCandidate> all;
        for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i)
            all.push_back(cand({std::string(1, static_cast<char>('a' + rng() % 3))}, static_cast<double>(rng() % 5)));
        EXPECT_EQ(select_index(lin, all), select_index(env, all));
    }
}

TEST(Select, ParseMode) {
    EXPECT_EQ(parse_selection_mode("vote"), SelectionMode::vote);
    EXPECT_EQ(to_string(SelectionMode::max_env), "max_env");
    EXPECT_THROW((void)parse_selection_mode("best"), Error);
}

TEST(Perceptron, SeparableFixture) {
    // Distinct one-token answers of equal length and identical questions, so
    // only env_score separates the best candidate.
    std::vector<LabeledSet> sets{
        {{cand({"a"}, 0.1), cand({"b"}, 0.9), cand({"c"}, 0.5)}, 1},
        {{cand({"d"}, 0.3), cand({"e"}, 0.2), cand({"f"}, 0.8)}, 2},
        {{cand({"g"}, 0.7), cand({"h"}, 0.1)}, 0},
    };
    auto w = train_linear_selector(sets, 10, 1.0);
    SelectionModel m{SelectionMode::linear, w};
    for (const auto& s : sets) EXPECT_EQ(select_index(m, s.candidates), s.best);
    EXPECT_GT(w[0], 0.0);
}

TEST(Perceptron, NoUpdateCases) {
    std::vector<LabeledSet> sets{{{cand({"a"}, 0.1), cand({"b"}, 0.9)}, 1}};
    SelectionFeatures init{0.2, 0, 0, 0, 0};
    EXPECT_EQ(train_linear_selector(sets, 5, 0.0, init), init);
    std::vector<LabeledSet> singles{{{cand({"a"}, 0.1)}, 0}, {{cand({"b"}, 0.4)}, 0}};
    EXPECT_EQ(train_linear_selector(singles, 5, 1.0), SelectionFeatures{});
    std::vector<LabeledSet> bad{{{cand({"a"}, 0.1)}, 3}};
    EXPECT_THROW((void)train_linear_selector(bad, 1, 1.0), Error);
}
