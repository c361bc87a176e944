#include "aqa/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "aqa/error.hpp"

namespace aqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, path + ": " + e.what());
    }
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Exec parse_exec(const std::string& s) {
    if (s == "serial") return Exec::serial;
    if (s == "omp") return Exec::omp;
    throw Error(ErrorKind::config, "exec must be 'serial' or 'omp', got '" + s + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
    ExperimentConfig c;
    static const std::set<std::string> known = {
        "train_path", "dev_path", "out_dir", "k1", "b", "lambda", "theta", "window", "answer_max",
        "expose_env_score", "lr", "episodes", "max_steps", "temperature", "baseline_decay",
        "per_question_baseline", "submit_bias", "batch_size", "num_rewrites", "include_identity",
        "dedupe", "seed", "selection", "selection_weights_path", "stopword_file", "keep_punct_tokens",
        "lm_order", "lm_k", "prefix_k", "prefix_strip", "exec"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw Error(ErrorKind::config, "unknown config key: " + key);
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("train_path", c.train_path);
        get("dev_path", c.dev_path);
        get("out_dir", c.out_dir);
        get("k1", c.env.k1);
        get("b", c.env.b);
        get("lambda", c.env.lambda);
        get("theta", c.env.theta);
        get("window", c.env.window);
        get("answer_max", c.env.answer_max);
        get("expose_env_score", c.env.expose_env_score);
        get("lr", c.lr);
        get("episodes", c.episodes);
        get("max_steps", c.max_steps);
        get("temperature", c.temperature);
        get("baseline_decay", c.baseline_decay);
        get("per_question_baseline", c.per_question_baseline);
        get("submit_bias", c.submit_bias);
        get("batch_size", c.batch_size);
        get("num_rewrites", c.num_rewrites);
        get("include_identity", c.include_identity);
        get("dedupe", c.dedupe);
        if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("selection")) c.selection = parse_selection_mode(j.at("selection").get<std::string>());
        get("selection_weights_path", c.selection_weights_path);
        get("stopword_file", c.stopword_file);
        get("keep_punct_tokens", c.keep_punct_tokens);
        get("lm_order", c.lm_order);
        get("lm_k", c.lm_k);
        get("prefix_k", c.prefix_k);
        get("prefix_strip", c.prefix_strip);
        if (j.contains("exec")) c.exec = parse_exec(j.at("exec").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("bad config value: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["train_path"] = c.train_path;
    j["dev_path"] = c.dev_path;
    j["out_dir"] = c.out_dir;
    j["k1"] = c.env.k1;
    j["b"] = c.env.b;
    j["lambda"] = c.env.lambda;
    j["theta"] = c.env.theta;
    j["window"] = c.env.window;
    j["answer_max"] = c.env.answer_max;
    j["expose_env_score"] = c.env.expose_env_score;
    j["lr"] = c.lr;
    j["episodes"] = c.episodes;
    j["max_steps"] = c.max_steps;
    j["temperature"] = c.temperature;
    j["baseline_decay"] = c.baseline_decay;
    j["per_question_baseline"] = c.per_question_baseline;
    j["submit_bias"] = c.submit_bias;
    j["batch_size"] = c.batch_size;
    j["num_rewrites"] = c.num_rewrites;
    j["include_identity"] = c.include_identity;
    j["dedupe"] = c.dedupe;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["selection"] = std::string(to_string(c.selection));
    j["selection_weights_path"] = c.selection_weights_path;
    j["stopword_file"] = c.stopword_file;
    j["keep_punct_tokens"] = c.keep_punct_tokens;
    j["lm_order"] = c.lm_order;
    j["lm_k"] = c.lm_k;
    j["prefix_k"] = c.prefix_k;
    j["prefix_strip"] = c.prefix_strip;
    j["exec"] = c.exec == Exec::serial ? "serial" : "omp";
    return j;
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& field, const std::string& rule) {
        throw Error(ErrorKind::config, field + " " + rule);
    };
    if (!c.seed) fail("seed", "is required");
    if (c.train_path.empty()) fail("train_path", "is required");
    if (!(c.env.k1 >= 0.0)) fail("k1", "must be >= 0");
    if (!(c.env.b >= 0.0 && c.env.b <= 1.0)) fail("b", "must be in [0, 1]");
    if (!(c.env.lambda >= 0.0 && c.env.lambda <= 1.0)) fail("lambda", "must be in [0, 1]");
    if (!(c.env.theta >= 0.0 && c.env.theta <= 1.0)) fail("theta", "must be in [0, 1]");
    if (c.env.window < 1) fail("window", "must be >= 1");
    if (c.env.answer_max < 1) fail("answer_max", "must be >= 1");
    if (!(c.lr >= 0.0) || !std::isfinite(c.lr)) fail("lr", "must be finite and >= 0");
    if (c.max_steps < 1) fail("max_steps", "must be >= 1");
    if (!(c.temperature > 0.0)) fail("temperature", "must be > 0");
    if (!(c.baseline_decay >= 0.0 && c.baseline_decay <= 1.0)) fail("baseline_decay", "must be in [0, 1]");
    if (!std::isfinite(c.submit_bias)) fail("submit_bias", "must be finite");
    if (c.batch_size < 1) fail("batch_size", "must be >= 1");
    if (c.num_rewrites < 1) fail("num_rewrites", "must be >= 1");
    if (c.lm_order < 1) fail("lm_order", "must be >= 1");
    if (!(c.lm_k > 0.0)) fail("lm_k", "must be > 0");
    if (c.prefix_k < 1) fail("prefix_k", "must be >= 1");
    if (c.selection == SelectionMode::linear && c.selection_weights_path.empty())
        fail("selection_weights_path", "is required for linear selection");
}

void write_resolved_config(const ExperimentConfig& cfg) {
    auto out = open_out(fs::path(cfg.out_dir) / "config.resolved.json");
    out << config_to_json(cfg).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// datasets

std::vector<QAExample> ingest(const std::string& path, const StopwordSet& stopwords,
                              const TokenizerOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open dataset " + path);
    std::vector<QAExample> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            throw Error(ErrorKind::data, where + ": malformed JSON line");
        }
        if (!j.is_object()) throw Error(ErrorKind::data, where + ": line is not a JSON object");
        auto field = [&](const char* key) {
            if (!j.contains(key)) throw Error(ErrorKind::data, where + ": missing key \"" + key + "\"");
            if (!j.at(key).is_string())
                throw Error(ErrorKind::data, where + ": key \"" + std::string(key) + "\" must be a string");
            return j.at(key).get<std::string>();
        };
        QAExample ex;
        ex.id = field("id");
        ex.question_raw = field("question");
        std::string answer = field("answer");
        std::string context = field("context");
        if (!ids.insert(ex.id).second) throw Error(ErrorKind::data, where + ": duplicate id \"" + ex.id + "\"");
        ex.question = preprocess(ex.question_raw, stopwords, opts);
        ex.question.source_id = ex.id;
        ex.answer_gold = preprocess(answer, stopwords, opts);
        ex.context = preprocess(context, stopwords, opts);
        if (ex.answer_gold.empty()) throw Error(ErrorKind::data, where + ": answer is empty after preprocessing");
        if (ex.context.empty()) throw Error(ErrorKind::data, where + ": context is empty after preprocessing");
        out.push_back(std::move(ex));
    }
    return out;
}

void write_dataset(const std::vector<QAExample>& examples, const std::string& path) {
    auto out = open_out(path);
    for (const auto& ex : examples) {
        json j{{"id", ex.id},
               {"question", ex.question_raw.empty() ? ex.question.join() : ex.question_raw},
               {"answer", ex.answer_gold.join()},
               {"context", ex.context.join()}};
        out << j.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// parameter files

json params_to_json(const PolicyParams& params, const FeatureSpace& space) {
    if (params.weights.size() != space.dim())
        throw Error(ErrorKind::invalid_argument, "params do not match the feature space");
    json w = json::object();
    for (std::size_t i = 0; i < space.dim(); ++i) w[space.name(static_cast<std::uint32_t>(i))] = params.weights[i];
    return json{{"feature_dim", space.dim()}, {"temperature", params.temperature}, {"weights", w}};
}

PolicyParams params_from_json(const json& j, const FeatureSpace& space) {
    try {
        auto dim = j.at("feature_dim").get<std::size_t>();
        if (dim != space.dim())
            throw Error(ErrorKind::data, "params feature_dim " + std::to_string(dim) +
                                             " does not match feature space " + std::to_string(space.dim()));
        PolicyParams p{std::vector<double>(dim, 0.0), j.at("temperature").get<double>()};
        for (const auto& [name, v] : j.at("weights").items()) {
            if (!space.contains(name)) throw Error(ErrorKind::data, "unknown feature in params: " + name);
            p.weights[space.id(name)] = v.get<double>();
        }
        return p;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed params JSON: ") + e.what());
    }
}

json selection_weights_to_json(const SelectionFeatures& w) {
    json m = json::object();
    for (std::size_t i = 0; i < kNumSelectionFeatures; ++i) m[std::string(kSelectionFeatureNames[i])] = w[i];
    return json{{"feature_dim", kNumSelectionFeatures}, {"temperature", 1.0}, {"weights", m}};
}

SelectionFeatures selection_weights_from_json(const json& j) {
    try {
        if (j.at("feature_dim").get<std::size_t>() != kNumSelectionFeatures)
            throw Error(ErrorKind::data, "selection weights feature_dim mismatch");
        SelectionFeatures w{};
        for (const auto& [name, v] : j.at("weights").items()) {
            auto it = std::find(kSelectionFeatureNames.begin(), kSelectionFeatureNames.end(), name);
            if (it == kSelectionFeatureNames.end())
                throw Error(ErrorKind::data, "unknown selection feature: " + name);
            w[static_cast<std::size_t>(it - kSelectionFeatureNames.begin())] = v.get<double>();
        }
        return w;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed selection weights: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// experiment

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    stopwords_ = cfg_.stopword_file.empty() ? default_stopwords() : load_stopwords(cfg_.stopword_file);
    TokenizerOptions topts{cfg_.keep_punct_tokens};
    train_ = ingest(cfg_.train_path, stopwords_, topts);
    if (train_.empty()) throw Error(ErrorKind::data, "training set is empty: " + cfg_.train_path);
    dev_ = cfg_.dev_path.empty() ? train_ : ingest(cfg_.dev_path, stopwords_, topts);
    if (dev_.empty()) throw Error(ErrorKind::data, "dev set is empty: " + cfg_.dev_path);

    std::vector<QAExample> all = train_;
    if (!cfg_.dev_path.empty()) all.insert(all.end(), dev_.begin(), dev_.end());
    env_.emplace(std::move(all), cfg_.env);
    agent_.emplace(Catalogs::defaults(), BackgroundStats::from_index(CorpusIndex(train_)), stopwords_);
}

PolicyParams Experiment::warm_start() const { return agent_->warm_start(cfg_.submit_bias, cfg_.temperature); }

TrainConfig Experiment::train_config() const {
    return TrainConfig{cfg_.episodes,    cfg_.lr,        cfg_.baseline_decay, cfg_.per_question_baseline,
                       cfg_.max_steps,   *cfg_.seed,     cfg_.batch_size};
}

SelectionModel Experiment::selection_model() const {
    SelectionModel m{cfg_.selection, {}};
    if (m.mode == SelectionMode::linear) m.weights = selection_weights_from_json(read_json_file(cfg_.selection_weights_path));
    return m;
}

// ---------------------------------------------------------------------------
// evaluation

std::vector<EvalRecord> evaluate(const Experiment& exp, const PolicyParams& params) {
    const auto& cfg = exp.config();
    const auto& dev = exp.dev();
    const auto model = exp.selection_model();
    std::vector<EvalRecord> out(dev.size());
    auto one = [&](std::size_t i) {
        const auto& ex = dev[i];
        EvalRecord r;
        r.identity = exp.env().answer_question(ex.question, ex.id);
        auto top = exp.agent().greedy_trajectory(params, ex.question, cfg.max_steps);
        r.top_hyp = exp.env().answer_question(top.final_question, ex.id);
        auto rewrites = exp.agent().generate_rewrites(params, ex.question, cfg.num_rewrites,
                                                      derive_seed(*cfg.seed ^ 0xe7a1ULL, i), cfg.dedupe,
                                                      cfg.include_identity, cfg.max_steps);
        std::vector<AnswerCandidate> cands;
        cands.reserve(rewrites.size());
        for (const auto& q : rewrites) cands.push_back(exp.env().answer_question(q, ex.id));
        r.full = select_answer(model, cands);
        out[i] = std::move(r);
    };
    const auto n = static_cast<std::ptrdiff_t>(dev.size());
    if (cfg.exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                one(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    return out;
}

EvalMetrics summarize_eval(const std::vector<EvalRecord>& records) {
    EvalMetrics m;
    if (records.empty()) return m;
    for (const auto& r : records) {
        m.identity_f1 += r.identity.reward;
        m.top_hyp_f1 += r.top_hyp.reward;
        m.aqa_full_f1 += r.full.reward;
    }
    const auto n = static_cast<double>(records.size());
    m.identity_f1 /= n;
    m.top_hyp_f1 /= n;
    m.aqa_full_f1 /= n;
    return m;
}

// ---------------------------------------------------------------------------
// subcommands

TrainResult run_train(const ExperimentConfig& cfg) {
    Experiment exp(cfg);
    write_resolved_config(cfg);
    auto result = reinforce_train(exp.agent(), exp.env(), exp.train(), exp.train_config(), exp.warm_start(),
                                  cfg.exec);
    const fs::path dir(cfg.out_dir);
    {
        auto out = open_out(dir / "params.json");
        out << params_to_json(result.params, exp.agent().features()).dump(2) << '\n';
    }
    auto out = open_out(dir / "curve.csv");
    out << "epoch,mean_reward,baseline\n";
    for (const auto& e : result.curve) out << e.epoch << ',' << num(e.mean_reward) << ',' << num(e.baseline) << '\n';
    return result;
}

EvalMetrics run_eval(const ExperimentConfig& cfg, const std::string& params_path) {
    Experiment exp(cfg);
    write_resolved_config(cfg);
    auto params = params_from_json(read_json_file(params_path), exp.agent().features());
    auto metrics = summarize_eval(evaluate(exp, params));
    auto out = open_out(fs::path(cfg.out_dir) / "metrics.json");
    json j{{"identity_f1", metrics.identity_f1},
           {"top_hyp_f1", metrics.top_hyp_f1},
           {"aqa_full_f1", metrics.aqa_full_f1}};
    out << j.dump(2) << '\n';
    return metrics;
}

void run_rewrite(const ExperimentConfig& cfg, const std::string& params_path, RewriteMode mode,
                 const std::string& out_path) {
    Experiment exp(cfg);
    write_resolved_config(cfg);
    auto params = params_from_json(read_json_file(params_path), exp.agent().features());
    auto out = open_out(out_path);
    for (std::size_t i = 0; i < exp.dev().size(); ++i) {
        const auto& ex = exp.dev()[i];
        std::vector<TokenSeq> rewrites;
        if (mode == RewriteMode::top) {
            rewrites.push_back(exp.agent().greedy_trajectory(params, ex.question, cfg.max_steps).final_question);
        } else {
            rewrites = exp.agent().generate_rewrites(params, ex.question, cfg.num_rewrites,
                                                     derive_seed(*cfg.seed ^ 0xe7a1ULL, i), cfg.dedupe,
                                                     cfg.include_identity, cfg.max_steps);
        }
        for (const auto& q : rewrites) {
            auto cand = exp.env().answer_question(q, ex.id);
            json j{{"id", ex.id},           {"source", ex.question.join()}, {"rewrite", q.join()},
                   {"answer", cand.ai.join()}, {"env_score", cand.env_score}, {"reward", cand.reward}};
            out << j.dump() << '\n';
        }
    }
}

SetSource parse_set_source(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw Error(ErrorKind::config, "set must be name=path[@field], got '" + spec + "'");
    SetSource s{spec.substr(0, eq), spec.substr(eq + 1), ""};
    if (auto at = s.path.rfind('@'); at != std::string::npos) {
        s.field = s.path.substr(at + 1);
        s.path = s.path.substr(0, at);
    }
    return s;
}

namespace {

NamedSet load_set(const SetSource& src, const StopwordSet& stopwords, const TokenizerOptions& opts) {
    std::ifstream in(src.path);
    if (!in) throw Error(ErrorKind::io, "set '" + src.name + "': cannot open " + src.path);
    NamedSet set;
    set.name = src.name;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            throw Error(ErrorKind::data, "set '" + src.name + "' line " + std::to_string(lineno) + ": malformed JSON");
        }
        std::string field = src.field;
        if (field.empty()) field = j.contains("rewrite") ? "rewrite" : "question";
        if (!j.contains(field) || !j.at(field).is_string())
            throw Error(ErrorKind::data, "set '" + src.name + "' line " + std::to_string(lineno) +
                                             ": missing string key \"" + field + "\"");
        const auto text = j.at(field).get<std::string>();
        // Raw dataset questions go through the full preprocessing; rewrites are
        // already token sequences and keep their template words.
        TokenSeq q = field == "question" ? preprocess(text, stopwords, opts) : tokenize(text, opts);
        if (j.contains("id") && j.at("id").is_string()) q.source_id = j.at("id").get<std::string>();
        set.questions.push_back(std::move(q));
    }
    return set;
}

}  // namespace

AnalysisReport run_analyze(const ExperimentConfig& cfg, const std::vector<SetSource>& sources) {
    if (sources.size() < 2) throw Error(ErrorKind::config, "analyze needs at least 2 sets");
    validate(cfg);
    auto stopwords = cfg.stopword_file.empty() ? default_stopwords() : load_stopwords(cfg.stopword_file);
    TokenizerOptions topts{cfg.keep_punct_tokens};
    std::vector<NamedSet> sets;
    std::set<std::string> names;
    for (const auto& src : sources) {
        if (!names.insert(src.name).second) throw Error(ErrorKind::config, "duplicate set name: " + src.name);
        sets.push_back(load_set(src, stopwords, topts));
        if (auto it = cfg.prefix_strip.find(src.name); it != cfg.prefix_strip.end())
            sets.back().strip_prefix = it->second;
    }
    for (const auto& [name, _] : cfg.prefix_strip)
        if (!names.contains(name)) throw Error(ErrorKind::config, "prefix_strip names unknown set: " + name);

    auto train = ingest(cfg.train_path, stopwords, topts);
    auto dev = cfg.dev_path.empty() ? train : ingest(cfg.dev_path, stopwords, topts);
    CorpusIndex index(dev);
    std::vector<TokenSeq> lm_corpus;
    for (const auto& ex : train) lm_corpus.push_back(ex.context);
    LanguageModel lm(lm_corpus, cfg.lm_order, cfg.lm_k);

    write_resolved_config(cfg);
    auto report = compare_corpora(sets, index, lm, AnalysisOptions{cfg.prefix_k, cfg.exec});
    write_report(report, cfg.out_dir);
    return report;
}

namespace {

std::string brief(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

std::string cell(const json& v) { return v.is_string() ? v.get<std::string>() : brief(v.get<double>()); }

}  // namespace

void run_report(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    write_resolved_config(cfg);
    std::ostringstream md;
    md << "# Experiment report\n\n";
    if (fs::exists(dir / "metrics.json")) {
        auto m = read_json_file((dir / "metrics.json").string());
        md << "## Answer F1 on dev\n\n| system | F1 |\n|---|---|\n";
        for (const char* key : {"identity_f1", "top_hyp_f1", "aqa_full_f1"})
            md << "| " << key << " | " << brief(m.at(key).get<double>()) << " |\n";
        md << '\n';
    }
    if (fs::exists(dir / "report.json")) {
        auto r = read_json_file((dir / "report.json").string());
        md << "## Question statistics\n\n| set | metric | n | mean | q1 | median | q3 |\n|---|---|---|---|---|---|---|\n";
        for (const auto& s : r.at("summary"))
            md << "| " << s.at("set").get<std::string>() << " | " << s.at("metric").get<std::string>() << " | "
               << s.at("n").get<std::size_t>() << " | " << brief(s.at("mean").get<double>()) << " | "
               << brief(s.at("q1").get<double>()) << " | " << brief(s.at("median").get<double>()) << " | "
               << brief(s.at("q3").get<double>()) << " |\n";
        md << "\n## Welch t-tests\n\n| metric | a | b | t | df | p |\n|---|---|---|---|---|---|\n";
        for (const auto& t : r.at("ttests"))
            md << "| " << t.at("metric").get<std::string>() << " | " << t.at("set_a").get<std::string>() << " | "
               << t.at("set_b").get<std::string>() << " | " << cell(t.at("t")) << " | "
               << brief(t.at("df").get<double>()) << " | " << brief(t.at("p").get<double>()) << " |\n";
        md << "\n## Morphology\n\n| set | variant rate | same-stem rate |\n|---|---|---|\n";
        for (const auto& m : r.at("morphology"))
            md << "| " << m.at("set").get<std::string>() << " | " << brief(m.at("variant_rate").get<double>())
               << " | " << brief(m.at("same_stem_rate").get<double>()) << " |\n";
    }
    if (!fs::exists(dir / "metrics.json") && !fs::exists(dir / "report.json"))
        throw Error(ErrorKind::io, "nothing to report in " + cfg.out_dir + " (run eval or analyze first)");
    auto out = open_out(dir / "report.md");
    out << md.str();
}

}  // namespace aqa
