// Command-line driver: ingest-check, train, eval, rewrite, analyze, report.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqa/error.hpp"
#include "aqa/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> train, dev, out, selection, exec, stopwords;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> episodes, max_steps, num_rewrites, batch_size;
    std::optional<double> lr, temperature;

    void attach(CLI::App& app) {
        app.add_option("-c,--config", config_path, "JSON config file");
        app.add_option("--train", train, "training JSONL");
        app.add_option("--dev", dev, "dev JSONL");
        app.add_option("-o,--out", out, "output directory");
        app.add_option("--seed", seed);
        app.add_option("--episodes", episodes);
        app.add_option("--lr", lr);
        app.add_option("--max-steps", max_steps);
        app.add_option("--temperature", temperature);
        app.add_option("--num-rewrites", num_rewrites, "N rewrites per question");
        app.add_option("--batch-size", batch_size);
        app.add_option("--selection", selection, "max_env | vote | linear");
        app.add_option("--exec", exec, "serial | omp");
        app.add_option("--stopwords", stopwords, "stopword file");
    }

    aqa::ExperimentConfig resolve() const {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) j = aqa::config_to_json(aqa::load_config(config_path));
        auto set = [&](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        set("train_path", train);
        set("dev_path", dev);
        set("out_dir", out);
        set("selection", selection);
        set("exec", exec);
        set("stopword_file", stopwords);
        set("seed", seed);
        set("episodes", episodes);
        set("max_steps", max_steps);
        set("num_rewrites", num_rewrites);
        set("batch_size", batch_size);
        set("lr", lr);
        set("temperature", temperature);
        return aqa::config_from_json(j);
    }
};

int fail(const char* category, const std::string& msg) {
    std::string line = msg;
    for (auto& ch : line)
        if (ch == '\n' || ch == '\r') ch = ' ';
    std::cerr << "error " << category << ": " << line << '\n';
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active question reformulation toolkit"};
    app.require_subcommand(1);

    Overrides ov;

    auto* ingest_cmd = app.add_subcommand("ingest-check", "parse and validate datasets");
    std::vector<std::string> inputs;
    ingest_cmd->add_option("inputs", inputs, "JSONL files (defaults to the config's datasets)");
    ov.attach(*ingest_cmd);

    auto* train_cmd = app.add_subcommand("train", "train the reformulation policy");
    ov.attach(*train_cmd);

    std::string params_path;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate on dev");
    ov.attach(*eval_cmd);
    eval_cmd->add_option("-p,--params", params_path, "params.json")->required();

    auto* rewrite_cmd = app.add_subcommand("rewrite", "dump rewrites for the dev set");
    ov.attach(*rewrite_cmd);
    std::string mode = "sample", rewrite_out;
    rewrite_cmd->add_option("-p,--params", params_path, "params.json")->required();
    rewrite_cmd->add_option("--mode", mode, "sample | top")->check(CLI::IsMember({"sample", "top"}));
    rewrite_cmd->add_option("--output", rewrite_out, "JSONL path (default <out>/rewrites.jsonl)");

    auto* analyze_cmd = app.add_subcommand("analyze", "compare question sets");
    ov.attach(*analyze_cmd);
    std::vector<std::string> set_specs;
    analyze_cmd->add_option("-s,--set", set_specs, "name=path[@field]")->required();

    auto* report_cmd = app.add_subcommand("report", "render report.md from run outputs");
    ov.attach(*report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        auto cfg = ov.resolve();
        if (ingest_cmd->parsed()) {
            if (inputs.empty()) {
                if (!cfg.train_path.empty()) inputs.push_back(cfg.train_path);
                if (!cfg.dev_path.empty()) inputs.push_back(cfg.dev_path);
            }
            if (inputs.empty()) return fail("config", "no dataset given");
            auto stopwords = cfg.stopword_file.empty() ? aqa::default_stopwords() : aqa::load_stopwords(cfg.stopword_file);
            for (const auto& path : inputs) {
                auto ex = aqa::ingest(path, stopwords, aqa::TokenizerOptions{cfg.keep_punct_tokens});
                std::cout << path << ": " << ex.size() << " examples\n";
            }
            aqa::write_resolved_config(cfg);
        } else if (train_cmd->parsed()) {
            auto res = aqa::run_train(cfg);
            for (const auto& e : res.curve) std::printf("epoch %zu mean_reward %.6f\n", e.epoch, e.mean_reward);
        } else if (eval_cmd->parsed()) {
            auto m = aqa::run_eval(cfg, params_path);
            std::printf("identity_f1 %.6f\ntop_hyp_f1 %.6f\naqa_full_f1 %.6f\n", m.identity_f1, m.top_hyp_f1,
                        m.aqa_full_f1);
        } else if (rewrite_cmd->parsed()) {
            if (rewrite_out.empty()) rewrite_out = cfg.out_dir + "/rewrites.jsonl";
            aqa::run_rewrite(cfg, params_path, mode == "top" ? aqa::RewriteMode::top : aqa::RewriteMode::sample,
                             rewrite_out);
        } else if (analyze_cmd->parsed()) {
            std::vector<aqa::SetSource> sets;
            for (const auto& s : set_specs) sets.push_back(aqa::parse_set_source(s));
            auto report = aqa::run_analyze(cfg, sets);
            std::cout << "wrote " << report.sets.size() << " set summaries and " << report.ttests.size()
                      << " t-tests to " << cfg.out_dir << '\n';
        } else if (report_cmd->parsed()) {
            aqa::run_report(cfg);
        }
    } catch (const aqa::Error& e) {
        return fail(std::string(aqa::to_string(e.kind())).c_str(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
