#include "aqa/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "aqa/error.hpp"

namespace aqa {

std::string_view to_string(EditKind k) noexcept {
    switch (k) {
        case EditKind::Delete: return "DELETE";
        case EditKind::Duplicate: return "DUPLICATE";
        case EditKind::Stem: return "STEM";
        case EditKind::Prepend: return "PREPEND";
        case EditKind::Substitute: return "SUBSTITUTE";
        case EditKind::Submit: return "SUBMIT";
    }
    return "?";
}

std::string to_string(const EditAction& a) {
    std::string out(to_string(a.kind));
    switch (a.kind) {
        case EditKind::Delete:
        case EditKind::Duplicate:
        case EditKind::Stem: return out + "(" + std::to_string(a.pos) + ")";
        case EditKind::Substitute:
            return out + "(" + std::to_string(a.pos) + "," + std::to_string(a.variant_id) + ")";
        case EditKind::Prepend: return out + "(" + std::to_string(a.template_id) + ")";
        case EditKind::Submit: return out;
    }
    return out;
}

Catalogs Catalogs::defaults() {
    return Catalogs{{{"what", "is", "name"}, {"what", "country", "is"}, {"what", "state"}},
                    {"s", "ey", "ing"}};
}

std::string substitute_variant(const std::string& token, const std::string& suffix) {
    std::string v = stem(token) + suffix;
    return v == token ? std::string{} : v;
}

// ---------------------------------------------------------------------------
// episode state

EpisodeState EpisodeState::start(const TokenSeq& q0) {
    EpisodeState s;
    s.q0 = q0;
    s.current = q0;
    return s;
}

bool EpisodeState::prepended() const {
    return std::any_of(history.begin(), history.end(),
                       [](const EditAction& a) { return a.kind == EditKind::Prepend; });
}

std::uint64_t EpisodeState::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    for (const auto& t : current.tokens) {
        for (char c : t) mix(static_cast<unsigned char>(c));
        mix(0x1f);
    }
    for (std::size_t i = 0; i < sizeof(step); ++i) mix(static_cast<unsigned char>(step >> (8 * i)));
    return h;
}

std::vector<EditAction> enumerate_actions(const EpisodeState& state, const Catalogs& catalogs) {
    std::vector<EditAction> out;
    const std::size_t n = state.current.size();
    for (std::size_t p = 0; p < n; ++p) out.push_back(EditAction::del(p));
    for (std::size_t p = 0; p < n; ++p) out.push_back(EditAction::duplicate(p));
    for (std::size_t p = 0; p < n; ++p)
        if (stem(state.current[p]) != state.current[p]) out.push_back(EditAction::stem_at(p));
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t v = 0; v < catalogs.suffixes.size(); ++v)
            if (!substitute_variant(state.current[p], catalogs.suffixes[v]).empty())
                out.push_back(EditAction::substitute(p, v));
    if (!state.prepended())
        for (std::size_t t = 0; t < catalogs.templates.size(); ++t)
            out.push_back(EditAction::prepend(t));
    out.push_back(EditAction::submit());
    return out;
}

void apply_action(EpisodeState& state, const EditAction& action, const Catalogs& catalogs) {
    auto& toks = state.current.tokens;
    auto illegal = [&] { return Error(ErrorKind::invalid_argument, "illegal action " + to_string(action)); };
    const bool positional = action.kind != EditKind::Prepend && action.kind != EditKind::Submit;
    if (positional && action.pos >= toks.size()) throw illegal();
    const auto at = toks.begin() + static_cast<std::ptrdiff_t>(action.pos);
    switch (action.kind) {
        case EditKind::Delete: toks.erase(at); break;
        case EditKind::Duplicate: toks.insert(at + 1, *at); break;
        case EditKind::Stem: {
            std::string s = stem(*at);
            if (s == *at) throw illegal();
            *at = std::move(s);
            break;
        }
        case EditKind::Substitute: {
            if (action.variant_id >= catalogs.suffixes.size()) throw illegal();
            std::string v = substitute_variant(*at, catalogs.suffixes[action.variant_id]);
            if (v.empty()) throw illegal();
            *at = std::move(v);
            break;
        }
        case EditKind::Prepend: {
            if (state.prepended() || action.template_id >= catalogs.templates.size()) throw illegal();
            const auto& tpl = catalogs.templates[action.template_id];
            toks.insert(toks.begin(), tpl.begin(), tpl.end());
            break;
        }
        case EditKind::Submit: throw illegal();
    }
    state.history.push_back(action);
    ++state.step;
}

// ---------------------------------------------------------------------------
// features

BackgroundStats BackgroundStats::from_index(const CorpusIndex& index) {
    return BackgroundStats{index.num_docs(), index.df_table()};
}

std::size_t BackgroundStats::df_of(const std::string& token) const {
    auto it = df.find(token);
    return it == df.end() ? 0 : it->second;
}

std::size_t BackgroundStats::df_bucket(const std::string& token) const {
    std::size_t d = df_of(token);
    if (d == 0 || num_docs == 0) return 0;
    double r = static_cast<double>(d) / static_cast<double>(num_docs);
    if (r <= 0.01) return 1;
    if (r <= 0.05) return 2;
    if (r <= 0.20) return 3;
    if (r <= 0.50) return 4;
    return 5;
}

namespace {

constexpr EditKind kAllKinds[] = {EditKind::Delete,  EditKind::Duplicate,  EditKind::Stem,
                                  EditKind::Prepend, EditKind::Substitute, EditKind::Submit};
constexpr EditKind kPositional[] = {EditKind::Delete, EditKind::Duplicate, EditKind::Stem,
                                    EditKind::Substitute};
constexpr std::size_t kStepBuckets = 4;
constexpr std::size_t kQlenBuckets = 5;
constexpr std::size_t kCountBuckets = 3;
constexpr std::size_t kTlenBuckets = 3;

std::size_t step_bucket(std::size_t step) { return std::min<std::size_t>(step, kStepBuckets - 1); }

std::size_t qlen_bucket(std::size_t n) {
    if (n == 0) return 0;
    if (n <= 3) return 1;
    if (n <= 6) return 2;
    if (n <= 9) return 3;
    return 4;
}

std::size_t count_bucket(std::size_t c) { return std::min<std::size_t>(c, kCountBuckets) - 1; }

std::size_t tlen_bucket(std::size_t len) {
    if (len <= 3) return 0;
    if (len <= 6) return 1;
    return 2;
}

std::string kind_name(EditKind k) { return std::string(to_string(k)); }

bool is_positional(EditKind k) {
    return std::find(std::begin(kPositional), std::end(kPositional), k) != std::end(kPositional);
}

}  // namespace

FeatureSpace::FeatureSpace(const Catalogs& catalogs) {
    for (auto k : kAllKinds) {
        const auto kn = kind_name(k);
        add("kind=" + kn);
        for (std::size_t s = 0; s < kStepBuckets; ++s) add(kn + "|step=" + std::to_string(s));
        for (std::size_t l = 0; l < kQlenBuckets; ++l) add(kn + "|qlen=" + std::to_string(l));
    }
    for (std::size_t b = 0; b < kNumDfBuckets; ++b) add("df=" + std::to_string(b));
    for (std::size_t c = 0; c < kCountBuckets; ++c) add("count=" + std::to_string(c + 1));
    for (std::size_t l = 0; l < kTlenBuckets; ++l) add("tlen=" + std::to_string(l));
    add("stop");
    for (auto k : kPositional) {
        const auto kn = kind_name(k);
        for (std::size_t b = 0; b < kNumDfBuckets; ++b) add(kn + "|df=" + std::to_string(b));
        for (std::size_t c = 0; c < kCountBuckets; ++c) add(kn + "|count=" + std::to_string(c + 1));
        add(kn + "|stop");
    }
    for (std::size_t v = 0; v < catalogs.suffixes.size(); ++v)
        add("SUBSTITUTE|suffix=" + std::to_string(v));
    for (std::size_t t = 0; t < catalogs.templates.size(); ++t)
        add("PREPEND|tpl=" + std::to_string(t));
}

void FeatureSpace::add(std::string name) {
    ids_.emplace(name, static_cast<std::uint32_t>(names_.size()));
    names_.push_back(std::move(name));
}

std::uint32_t FeatureSpace::id(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw Error(ErrorKind::invalid_argument, "unknown feature: " + name);
    return it->second;
}

// ---------------------------------------------------------------------------
// policy

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double Trajectory::logprob() const {
    double s = 0.0;
    for (const auto& st : actions) s += st.logprob;
    return s;
}

Reformulator::Reformulator(Catalogs catalogs, BackgroundStats background, StopwordSet stopwords)
    : catalogs_(std::move(catalogs)),
      background_(std::move(background)),
      stopwords_(std::move(stopwords)),
      space_(catalogs_) {}

PolicyParams Reformulator::warm_start(double submit_bias, double temperature) const {
    if (!(temperature > 0.0)) throw Error(ErrorKind::config, "temperature must be > 0");
    PolicyParams p{std::vector<double>(space_.dim(), 0.0), temperature};
    p.weights[space_.id("kind=SUBMIT")] = submit_bias;
    return p;
}

std::vector<EditAction> Reformulator::enumerate_actions(const EpisodeState& state) const {
    return aqa::enumerate_actions(state, catalogs_);
}

SparseVec Reformulator::action_features(const EpisodeState& state, const EditAction& action) const {
    SparseVec phi;
    const auto kn = kind_name(action.kind);
    auto on = [&](const std::string& name) { phi.emplace_back(space_.id(name), 1.0); };
    on("kind=" + kn);
    on(kn + "|step=" + std::to_string(step_bucket(state.step)));
    on(kn + "|qlen=" + std::to_string(qlen_bucket(state.current.size())));
    if (is_positional(action.kind)) {
        const auto& tok = state.current[action.pos];
        const auto dfb = std::to_string(background_.df_bucket(tok));
        const auto cnt = static_cast<std::size_t>(
            std::count(state.current.tokens.begin(), state.current.tokens.end(), tok));
        const auto cb = std::to_string(count_bucket(cnt) + 1);
        const bool stop = stopwords_.contains(tok);
        on("df=" + dfb);
        on("count=" + cb);
        on("tlen=" + std::to_string(tlen_bucket(tok.size())));
        if (stop) on("stop");
        on(kn + "|df=" + dfb);
        on(kn + "|count=" + cb);
        if (stop) on(kn + "|stop");
    }
    if (action.kind == EditKind::Substitute) on("SUBSTITUTE|suffix=" + std::to_string(action.variant_id));
    if (action.kind == EditKind::Prepend) on("PREPEND|tpl=" + std::to_string(action.template_id));
    std::sort(phi.begin(), phi.end());
    return phi;
}

void Reformulator::check_dim(const PolicyParams& params) const {
    if (params.weights.size() != space_.dim())
        throw Error(ErrorKind::invalid_argument,
                    "feature dimension mismatch: params have " + std::to_string(params.weights.size()) +
                        ", feature space has " + std::to_string(space_.dim()));
    if (!(params.temperature > 0.0)) throw Error(ErrorKind::invalid_argument, "temperature must be > 0");
}

double Reformulator::dot(const PolicyParams& params, const SparseVec& phi) const {
    double s = 0.0;
    for (const auto& [id, v] : phi) s += params.weights[id] * v;
    return s;
}

namespace {

// Softmax over logits; returns probabilities and log-probabilities.
void softmax(std::span<const double> logits, std::vector<double>& probs, std::vector<double>& logp) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    const double lz = mx + std::log(z);
    probs.resize(logits.size());
    logp.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        logp[i] = logits[i] - lz;
        probs[i] = std::exp(logp[i]);
    }
}

struct StepEval {
    std::vector<EditAction> actions;
    std::vector<SparseVec> phis;
    std::vector<double> probs;
    std::vector<double> logp;
};

}  // namespace

std::vector<double> Reformulator::policy_distribution(const PolicyParams& params,
                                                      const EpisodeState& state,
                                                      std::span<const EditAction> actions) const {
    check_dim(params);
    if (actions.empty()) throw Error(ErrorKind::invalid_argument, "policy_distribution: no actions");
    std::vector<double> logits;
    logits.reserve(actions.size());
    for (const auto& a : actions) logits.push_back(dot(params, action_features(state, a)) / params.temperature);
    std::vector<double> probs, logp;
    softmax(logits, probs, logp);
    return probs;
}

Trajectory Reformulator::rollout(const PolicyParams& params, const TokenSeq& q0,
                                 std::size_t max_steps, std::uint64_t seed) const {
    check_dim(params);
    std::mt19937_64 rng(seed);
    Trajectory traj;
    traj.q0 = q0;
    EpisodeState state = EpisodeState::start(q0);
    std::vector<double> logits, probs, logp;
    while (true) {
        if (state.step >= max_steps) {
            traj.actions.push_back({state.hash(), EditAction::submit(), 0.0, true});
            break;
        }
        auto actions = enumerate_actions(state);
        logits.clear();
        for (const auto& a : actions)
            logits.push_back(dot(params, action_features(state, a)) / params.temperature);
        softmax(logits, probs, logp);
        double u = uniform01(rng);
        std::size_t pick = actions.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            acc += probs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        traj.actions.push_back({state.hash(), actions[pick], logp[pick], false});
        if (actions[pick].kind == EditKind::Submit) break;
        apply_action(state, actions[pick], catalogs_);
    }
    traj.final_question = state.current;
    return traj;
}

Trajectory Reformulator::sample_trajectory(const PolicyParams& params, const QAExample& example,
                                           const Environment& env, std::size_t max_steps,
                                           std::uint64_t seed) const {
    if (max_steps < 1) throw Error(ErrorKind::invalid_argument, "max_steps must be >= 1");
    Trajectory traj = rollout(params, example.question, max_steps, seed);
    traj.q0_id = example.id;
    traj.candidate = env.answer_question(traj.final_question, example.id);
    traj.reward = traj.candidate.reward;
    return traj;
}

Trajectory Reformulator::greedy_trajectory(const PolicyParams& params, const TokenSeq& q0,
                                           std::size_t max_steps) const {
    check_dim(params);
    Trajectory traj;
    traj.q0 = q0;
    EpisodeState state = EpisodeState::start(q0);
    std::vector<double> logits, probs, logp;
    while (true) {
        if (state.step >= max_steps) {
            traj.actions.push_back({state.hash(), EditAction::submit(), 0.0, true});
            break;
        }
        auto actions = enumerate_actions(state);
        logits.clear();
        for (const auto& a : actions)
            logits.push_back(dot(params, action_features(state, a)) / params.temperature);
        softmax(logits, probs, logp);
        auto pick = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
        traj.actions.push_back({state.hash(), actions[pick], logp[pick], false});
        if (actions[pick].kind == EditKind::Submit) break;
        apply_action(state, actions[pick], catalogs_);
    }
    traj.final_question = state.current;
    return traj;
}

TokenSeq Reformulator::replay(const Trajectory& traj) const {
    EpisodeState state = EpisodeState::start(traj.q0);
    for (const auto& st : traj.actions) {
        if (st.action.kind == EditKind::Submit) break;
        apply_action(state, st.action, catalogs_);
    }
    return state.current;
}

double Reformulator::trajectory_logprob(const PolicyParams& params, const Trajectory& traj) const {
    check_dim(params);
    EpisodeState state = EpisodeState::start(traj.q0);
    std::vector<double> logits, probs, logp;
    double total = 0.0;
    for (const auto& st : traj.actions) {
        if (st.forced) break;
        auto actions = enumerate_actions(state);
        logits.clear();
        std::size_t chosen = actions.size();
        for (std::size_t i = 0; i < actions.size(); ++i) {
            logits.push_back(dot(params, action_features(state, actions[i])) / params.temperature);
            if (actions[i] == st.action) chosen = i;
        }
        if (chosen == actions.size())
            throw Error(ErrorKind::invalid_argument, "trajectory action not legal on replay");
        softmax(logits, probs, logp);
        total += logp[chosen];
        if (st.action.kind == EditKind::Submit) break;
        apply_action(state, st.action, catalogs_);
    }
    return total;
}

std::vector<double> Reformulator::grad_logprob(const PolicyParams& params, const Trajectory& traj) const {
    check_dim(params);
    std::vector<double> grad(space_.dim(), 0.0);
    EpisodeState state = EpisodeState::start(traj.q0);
    std::vector<double> logits, probs, logp;
    std::vector<SparseVec> phis;
    for (const auto& st : traj.actions) {
        if (st.forced) break;
        auto actions = enumerate_actions(state);
        phis.clear();
        logits.clear();
        std::size_t chosen = actions.size();
        for (std::size_t i = 0; i < actions.size(); ++i) {
            phis.push_back(action_features(state, actions[i]));
            logits.push_back(dot(params, phis.back()) / params.temperature);
            if (actions[i] == st.action) chosen = i;
        }
        if (chosen == actions.size())
            throw Error(ErrorKind::invalid_argument, "trajectory action not legal on replay");
        softmax(logits, probs, logp);
        const double inv_t = 1.0 / params.temperature;
        for (const auto& [id, v] : phis[chosen]) grad[id] += v * inv_t;
        for (std::size_t i = 0; i < actions.size(); ++i)
            for (const auto& [id, v] : phis[i]) grad[id] -= probs[i] * v * inv_t;
        if (st.action.kind == EditKind::Submit) break;
        apply_action(state, st.action, catalogs_);
    }
    return grad;
}

std::vector<TokenSeq> Reformulator::generate_rewrites(const PolicyParams& params, const TokenSeq& q0,
                                                      std::size_t n, std::uint64_t seed, bool dedupe,
                                                      bool include_identity,
                                                      std::size_t max_steps) const {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
    std::vector<TokenSeq> out;
    auto push = [&](TokenSeq q) {
        if (dedupe && std::find(out.begin(), out.end(), q) != out.end()) return;
        out.push_back(std::move(q));
    };
    for (std::size_t i = 0; i < n; ++i)
        push(rollout(params, q0, max_steps, derive_seed(seed, i)).final_question);
    if (include_identity) push(q0);
    return out;
}

// ---------------------------------------------------------------------------
// batched rollouts and training

std::vector<Trajectory> rollout_batch(const Reformulator& agent, const PolicyParams& params,
                                      const Environment& env,
                                      std::span<const QAExample* const> examples,
                                      std::span<const std::uint64_t> seeds, std::size_t max_steps,
                                      Exec exec) {
    if (examples.size() != seeds.size())
        throw Error(ErrorKind::invalid_argument, "rollout_batch: examples/seeds size mismatch");
    std::vector<Trajectory> out(examples.size());
    const auto n = static_cast<std::ptrdiff_t>(examples.size());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = agent.sample_trajectory(
                params, *examples[static_cast<std::size_t>(i)], env, max_steps, seeds[static_cast<std::size_t>(i)]);
        return out;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = agent.sample_trajectory(
                params, *examples[static_cast<std::size_t>(i)], env, max_steps, seeds[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

TrainResult reinforce_train(const Reformulator& agent, const Environment& env,
                            std::span<const QAExample> dataset, const TrainConfig& config,
                            PolicyParams init, Exec exec) {
    if (dataset.empty()) throw Error(ErrorKind::invalid_argument, "reinforce_train: empty dataset");
    if (config.max_steps < 1) throw Error(ErrorKind::config, "max_steps must be >= 1");
    if (config.batch_size < 1) throw Error(ErrorKind::config, "batch_size must be >= 1");
    if (config.baseline_decay < 0.0 || config.baseline_decay > 1.0)
        throw Error(ErrorKind::config, "baseline_decay must be in [0, 1]");

    TrainResult result{std::move(init), {}};
    auto& w = result.params.weights;
    const std::size_t n = dataset.size();
    const std::size_t epochs = (config.episodes + n - 1) / n;

    double baseline = 0.0;
    std::unordered_map<std::string, double> per_question;
    std::vector<std::size_t> order(n);
    std::vector<const QAExample*> batch_ex;
    std::vector<std::uint64_t> batch_seeds;
    std::vector<double> step(w.size());

    std::size_t episode = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 shuffler(derive_seed(config.seed ^ 0x5eedULL, epoch));
        for (std::size_t i = n; i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform01(shuffler) * static_cast<double>(i));
            std::swap(order[i - 1], order[j]);
        }
        const std::size_t in_epoch = std::min(n, config.episodes - epoch * n);
        double reward_sum = 0.0;
        for (std::size_t start = 0; start < in_epoch; start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, in_epoch - start);
            batch_ex.clear();
            batch_seeds.clear();
            for (std::size_t i = 0; i < len; ++i) {
                batch_ex.push_back(&dataset[order[start + i]]);
                batch_seeds.push_back(derive_seed(config.seed, episode + i));
            }
            auto trajs = rollout_batch(agent, result.params, env, batch_ex, batch_seeds,
                                       config.max_steps, exec);
            std::fill(step.begin(), step.end(), 0.0);
            for (const auto& traj : trajs) {
                double& b = config.per_question_baseline ? per_question[traj.q0_id] : baseline;
                const double advantage = traj.reward - b;
                b = config.baseline_decay * b + (1.0 - config.baseline_decay) * traj.reward;
                if (config.per_question_baseline)
                    baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * traj.reward;
                reward_sum += traj.reward;
                if (config.lr == 0.0 || advantage == 0.0) continue;
                auto g = agent.grad_logprob(result.params, traj);
                for (std::size_t k = 0; k < w.size(); ++k) step[k] += config.lr * advantage * g[k];
            }
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] += step[k];
                if (!std::isfinite(w[k]))
                    throw Error(ErrorKind::numeric, "non-finite weight '" + agent.features().name(
                                                        static_cast<std::uint32_t>(k)) +
                                                        "' after episode " + std::to_string(episode + len));
            }
            episode += len;
        }
        result.curve.push_back({epoch + 1, reward_sum / static_cast<double>(in_epoch), baseline});
    }
    return result;
}

}  // namespace aqa
