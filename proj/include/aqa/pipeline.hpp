#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/agent.hpp"
#include "aqa/analysis.hpp"
#include "aqa/environment.hpp"
#include "aqa/selection.hpp"

namespace aqa {

/// Everything a run needs. Loaded from one JSON file; CLI flags override.
struct ExperimentConfig {
    std::string train_path;
    std::string dev_path;
    std::string out_dir = "out";

    EnvParams env;

    // agent
    double lr = 0.05;
    std::size_t episodes = 20000;
    std::size_t max_steps = 6;
    double temperature = 1.0;
    double baseline_decay = 0.95;
    bool per_question_baseline = false;
    double submit_bias = 3.0;
    std::size_t batch_size = 1;
    std::size_t num_rewrites = 10;
    bool include_identity = true;
    bool dedupe = false;
    std::optional<std::uint64_t> seed;

    // selection
    SelectionMode selection = SelectionMode::vote;
    std::string selection_weights_path;

    // text and analysis
    std::string stopword_file;
    bool keep_punct_tokens = false;
    int lm_order = 3;
    double lm_k = 0.1;
    std::size_t prefix_k = 3;
    /// Per-set prefix removed before LM scoring.
    std::map<std::string, std::vector<std::string>> prefix_strip;

    Exec exec = Exec::serial;
};

/// Parses and validates. Unknown keys are rejected.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Range checks; throws Error(config) naming the offending field.
void validate(const ExperimentConfig& cfg);

/// Reads a JSON-lines dataset with keys id, question, answer, context.
[[nodiscard]] std::vector<QAExample> ingest(const std::string& path, const StopwordSet& stopwords,
                                            const TokenizerOptions& opts = {});

/// Writes a dataset in the ingest format.
void write_dataset(const std::vector<QAExample>& examples, const std::string& path);

[[nodiscard]] nlohmann::json params_to_json(const PolicyParams& params, const FeatureSpace& space);
[[nodiscard]] PolicyParams params_from_json(const nlohmann::json& j, const FeatureSpace& space);
[[nodiscard]] nlohmann::json selection_weights_to_json(const SelectionFeatures& w);
[[nodiscard]] SelectionFeatures selection_weights_from_json(const nlohmann::json& j);

/// Loaded datasets plus the environment, the agent and its background priors.
class Experiment {
public:
    explicit Experiment(ExperimentConfig cfg);

    [[nodiscard]] const ExperimentConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const std::vector<QAExample>& train() const noexcept { return train_; }
    [[nodiscard]] const std::vector<QAExample>& dev() const noexcept { return dev_; }
    [[nodiscard]] const Environment& env() const noexcept { return *env_; }
    [[nodiscard]] const Reformulator& agent() const noexcept { return *agent_; }
    [[nodiscard]] const StopwordSet& stopwords() const noexcept { return stopwords_; }

    [[nodiscard]] PolicyParams warm_start() const;
    [[nodiscard]] TrainConfig train_config() const;
    [[nodiscard]] SelectionModel selection_model() const;

private:
    ExperimentConfig cfg_;
    StopwordSet stopwords_;
    std::vector<QAExample> train_;
    std::vector<QAExample> dev_;
    std::optional<Environment> env_;
    std::optional<Reformulator> agent_;
};

struct EvalMetrics {
    double identity_f1 = 0.0;
    double top_hyp_f1 = 0.0;
    double aqa_full_f1 = 0.0;
};

/// Per-question outcome of one evaluation.
struct EvalRecord {
    AnswerCandidate identity;
    AnswerCandidate top_hyp;
    AnswerCandidate full;
};

[[nodiscard]] std::vector<EvalRecord> evaluate(const Experiment& exp, const PolicyParams& params);
[[nodiscard]] EvalMetrics summarize_eval(const std::vector<EvalRecord>& records);

/// Writes config.resolved.json into the output directory.
void write_resolved_config(const ExperimentConfig& cfg);

/// Trains and writes params.json and curve.csv.
TrainResult run_train(const ExperimentConfig& cfg);
/// Evaluates on dev and writes metrics.json.
EvalMetrics run_eval(const ExperimentConfig& cfg, const std::string& params_path);

enum class RewriteMode { sample, top };
/// Writes one JSON line per rewrite: id, source, rewrite, answer, env_score, reward.
void run_rewrite(const ExperimentConfig& cfg, const std::string& params_path, RewriteMode mode,
                 const std::string& out_path);

struct SetSource {
    std::string name;
    std::string path;
    /// JSON key read from each line; empty selects "rewrite", else "question".
    std::string field;
};

/// Parses "name=path" or "name=path@field".
[[nodiscard]] SetSource parse_set_source(const std::string& spec);

/// Loads the sets, compares them against dev contexts and the LM trained on
/// train contexts, and writes the report files.
AnalysisReport run_analyze(const ExperimentConfig& cfg, const std::vector<SetSource>& sets);

/// Renders metrics.json and report.json from the output directory to report.md.
void run_report(const ExperimentConfig& cfg);

}  // namespace aqa
