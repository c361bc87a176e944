#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aqa/environment.hpp"
#include "aqa/textproc.hpp"

namespace aqa {

enum class EditKind { Delete, Duplicate, Stem, Prepend, Substitute, Submit };

inline constexpr std::size_t kNumEditKinds = 6;

[[nodiscard]] std::string_view to_string(EditKind k) noexcept;

/// One reformulation step. `pos` is meaningful for the positional kinds,
/// `template_id` for Prepend and `variant_id` (a suffix index) for Substitute.
struct EditAction {
    EditKind kind = EditKind::Submit;
    std::size_t pos = 0;
    std::size_t template_id = 0;
    std::size_t variant_id = 0;

    static EditAction submit() { return {}; }
    static EditAction del(std::size_t p) { return {EditKind::Delete, p, 0, 0}; }
    static EditAction duplicate(std::size_t p) { return {EditKind::Duplicate, p, 0, 0}; }
    static EditAction stem_at(std::size_t p) { return {EditKind::Stem, p, 0, 0}; }
    static EditAction prepend(std::size_t t) { return {EditKind::Prepend, 0, t, 0}; }
    static EditAction substitute(std::size_t p, std::size_t v) { return {EditKind::Substitute, p, 0, v}; }

    friend bool operator==(const EditAction&, const EditAction&) = default;
};

[[nodiscard]] std::string to_string(const EditAction& a);

/// Prefix templates for Prepend and suffixes for Substitute variants.
struct Catalogs {
    std::vector<std::vector<std::string>> templates;
    std::vector<std::string> suffixes;

    /// "what is name", "what country is", "what state"; suffixes s, ey, ing.
    [[nodiscard]] static Catalogs defaults();
};

/// stem(token) + suffix, or empty when that would reproduce `token`.
[[nodiscard]] std::string substitute_variant(const std::string& token, const std::string& suffix);

/// Episode state: the original question, the current rewrite and the edits
/// applied so far.
struct EpisodeState {
    TokenSeq q0;
    TokenSeq current;
    std::size_t step = 0;
    std::vector<EditAction> history;
    std::vector<AnswerCandidate> answers_so_far;

    [[nodiscard]] static EpisodeState start(const TokenSeq& q0);
    [[nodiscard]] bool prepended() const;
    /// FNV-1a over the current tokens and the step counter.
    [[nodiscard]] std::uint64_t hash() const;
};

/// All legal actions in canonical order: Delete, Duplicate, Stem, Substitute
/// (each by position), then Prepend per template, then Submit.
[[nodiscard]] std::vector<EditAction> enumerate_actions(const EpisodeState& state,
                                                        const Catalogs& catalogs);

/// Applies a non-Submit action. Throws if the action is illegal in `state`.
void apply_action(EpisodeState& state, const EditAction& action, const Catalogs& catalogs);

/// Corpus-level DF priors available to the agent (training-split contexts).
struct BackgroundStats {
    std::size_t num_docs = 0;
    std::map<std::string, std::size_t> df;

    [[nodiscard]] static BackgroundStats from_index(const CorpusIndex& index);
    [[nodiscard]] std::size_t df_of(const std::string& token) const;
    /// 0 for df = 0; buckets 1..5 split df/N at 1%, 5%, 20% and 50%.
    [[nodiscard]] std::size_t df_bucket(const std::string& token) const;
};

inline constexpr std::size_t kNumDfBuckets = 6;

using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

/// Named binary features; ids are assigned in a fixed construction order.
class FeatureSpace {
public:
    explicit FeatureSpace(const Catalogs& catalogs);

    [[nodiscard]] std::size_t dim() const noexcept { return names_.size(); }
    [[nodiscard]] const std::string& name(std::uint32_t id) const { return names_.at(id); }
    [[nodiscard]] std::uint32_t id(const std::string& name) const;
    [[nodiscard]] bool contains(const std::string& name) const { return ids_.contains(name); }

private:
    void add(std::string name);
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Linear-softmax policy weights.
struct PolicyParams {
    std::vector<double> weights;
    double temperature = 1.0;

    [[nodiscard]] std::size_t feature_dim() const noexcept { return weights.size(); }
    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct TrajectoryStep {
    std::uint64_t state_hash = 0;
    EditAction action;
    double logprob = 0.0;
    /// Submit forced by the step limit; not sampled, contributes nothing.
    bool forced = false;
};

struct Trajectory {
    std::string q0_id;
    TokenSeq q0;
    std::vector<TrajectoryStep> actions;
    TokenSeq final_question;
    AnswerCandidate candidate;
    double reward = 0.0;

    [[nodiscard]] double logprob() const;
};

struct EpochStat {
    std::size_t epoch = 0;
    double mean_reward = 0.0;
    double baseline = 0.0;
};

enum class Exec { serial, omp };

struct TrainConfig {
    std::size_t episodes = 20000;
    double lr = 0.05;
    double baseline_decay = 0.95;
    bool per_question_baseline = false;
    std::size_t max_steps = 6;
    std::uint64_t seed = 1;
    /// Episodes sampled with one parameter snapshot before the update is applied.
    std::size_t batch_size = 1;
};

struct TrainResult {
    PolicyParams params;
    std::vector<EpochStat> curve;
};

/// Deterministic per-stream seed derivation (splitmix64 mix of seed and index).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
[[nodiscard]] double uniform01(std::mt19937_64& rng);

/// The question reformulator: legal-move generator, feature extractor and a
/// linear-softmax policy over edits. Stateless apart from its immutable
/// configuration, so all methods may run concurrently.
class Reformulator {
public:
    Reformulator(Catalogs catalogs, BackgroundStats background, StopwordSet stopwords);

    [[nodiscard]] const Catalogs& catalogs() const noexcept { return catalogs_; }
    [[nodiscard]] const FeatureSpace& features() const noexcept { return space_; }
    [[nodiscard]] const BackgroundStats& background() const noexcept { return background_; }

    /// Zero weights except `submit_bias` on the Submit kind feature.
    [[nodiscard]] PolicyParams warm_start(double submit_bias, double temperature = 1.0) const;

    [[nodiscard]] std::vector<EditAction> enumerate_actions(const EpisodeState& state) const;
    [[nodiscard]] SparseVec action_features(const EpisodeState& state, const EditAction& action) const;
    [[nodiscard]] std::vector<double> policy_distribution(const PolicyParams& params,
                                                          const EpisodeState& state,
                                                          std::span<const EditAction> actions) const;

    /// Samples edits from `q0` until Submit or `max_steps` edits (then a forced
    /// Submit). The environment is not consulted.
    [[nodiscard]] Trajectory rollout(const PolicyParams& params, const TokenSeq& q0,
                                     std::size_t max_steps, std::uint64_t seed) const;

    /// rollout() followed by one environment query with the final question.
    [[nodiscard]] Trajectory sample_trajectory(const PolicyParams& params, const QAExample& example,
                                               const Environment& env, std::size_t max_steps,
                                               std::uint64_t seed) const;

    /// Highest-probability action at every step (ties to canonical order).
    [[nodiscard]] Trajectory greedy_trajectory(const PolicyParams& params, const TokenSeq& q0,
                                               std::size_t max_steps) const;

    /// Applies the recorded actions to q0.
    [[nodiscard]] TokenSeq replay(const Trajectory& traj) const;

    /// Σ log π(a_t | s_t) of the recorded actions under `params`.
    [[nodiscard]] double trajectory_logprob(const PolicyParams& params, const Trajectory& traj) const;

    /// Σ_t (φ(s_t, a_t) − E_π[φ(s_t, ·)]) / T, dense.
    [[nodiscard]] std::vector<double> grad_logprob(const PolicyParams& params,
                                                   const Trajectory& traj) const;

    /// Final questions of N sampled rollouts, optionally deduplicated
    /// (first occurrence kept), with q0 appended when `include_identity`.
    [[nodiscard]] std::vector<TokenSeq> generate_rewrites(const PolicyParams& params,
                                                          const TokenSeq& q0, std::size_t n,
                                                          std::uint64_t seed, bool dedupe,
                                                          bool include_identity,
                                                          std::size_t max_steps) const;

private:
    void check_dim(const PolicyParams& params) const;
    [[nodiscard]] double dot(const PolicyParams& params, const SparseVec& phi) const;

    Catalogs catalogs_;
    BackgroundStats background_;
    StopwordSet stopwords_;
    FeatureSpace space_;
};

/// Samples one trajectory per (example, seed) pair. The serial and omp
/// variants return identical results.
[[nodiscard]] std::vector<Trajectory> rollout_batch(const Reformulator& agent,
                                                    const PolicyParams& params,
                                                    const Environment& env,
                                                    std::span<const QAExample* const> examples,
                                                    std::span<const std::uint64_t> seeds,
                                                    std::size_t max_steps, Exec exec);

/// REINFORCE with an exponential-moving-average reward baseline. Each epoch
/// visits the dataset in a seeded shuffled order; the curve has one row per
/// (possibly partial) epoch.
[[nodiscard]] TrainResult reinforce_train(const Reformulator& agent, const Environment& env,
                                          std::span<const QAExample> dataset,
                                          const TrainConfig& config, PolicyParams init,
                                          Exec exec = Exec::serial);

}  // namespace aqa
