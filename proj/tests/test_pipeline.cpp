#include <gtest/gtest.h>

#include "aqa/error.hpp"
#include "aqa/pipeline.hpp"
#include "workdir.hpp"

using namespace aqa;
using namespace testing_support;

namespace {

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string error_of(const std::string& path) {
    try {
        (void)ingest(path, default_stopwords());
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST(Ingest, ValidFile) {
    auto dir = fresh_dir("ingest_ok");
    write(dir / "d.jsonl",
          R"({"id":"1","question":"Gandhi was deeply influenced by this count","answer":"Tolstoy","context":"Leo Tolstoy wrote War and Peace"})"
          "\n\n"
          R"({"id":"2","question":"war","answer":"peace","context":"peace"})"
          "\n");
    auto ex = ingest((dir / "d.jsonl").string(), default_stopwords());
    ASSERT_EQ(ex.size(), 2u);
    EXPECT_EQ(ex[0].question.join(), "gandhi deeply influenced count");
    EXPECT_EQ(ex[0].context.join(), "leo tolstoy wrote war peace");
    EXPECT_EQ(ex[0].answer_gold.join(), "tolstoy");
}

TEST(Ingest, Errors) {
    auto dir = fresh_dir("ingest_err");
    const std::string row = R"({"id":"1","question":"war","answer":"peace","context":"peace"})";
    write(dir / "dup.jsonl", row + "\n" + row + "\n");
    EXPECT_NE(error_of((dir / "dup.jsonl").string()).find("duplicate id \"1\""), std::string::npos);
    write(dir / "missing.jsonl", row + "\n" + R"({"id":"2","question":"war","answer":"peace"})" + "\n");
    auto msg = error_of((dir / "missing.jsonl").string());
    EXPECT_NE(msg.find("missing key \"context\""), std::string::npos) << msg;
    EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
    write(dir / "bad.jsonl", "{not json\n");
    EXPECT_NE(error_of((dir / "bad.jsonl").string()).find(":1: malformed"), std::string::npos);
    EXPECT_NE(error_of((dir / "absent.jsonl").string()).find("cannot open"), std::string::npos);
}

TEST(Config, RoundTripAndValidation) {
    auto j = nlohmann::json::parse(R"({"train_path":"t","seed":3,"selection":"max_env","k1":1.5,"prefix_strip":{"trained":["what","is","name"]}})");
    auto cfg = config_from_json(j);
    EXPECT_EQ(cfg.env.k1, 1.5);
    EXPECT_EQ(cfg.selection, SelectionMode::max_env);
    EXPECT_EQ(config_to_json(config_from_json(config_to_json(cfg))), config_to_json(cfg));
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_THROW((void)config_from_json(nlohmann::json::parse(R"({"sed":3})")), Error);
    cfg.seed.reset();
    EXPECT_THROW(validate(cfg), Error);
    cfg.seed = 1;
    cfg.env.b = 1.5;
    EXPECT_THROW(validate(cfg), Error);
}

TEST(Train, DeterministicArtifacts) {
    auto dir = fresh_dir("train_det");
    auto cfg = synthetic_config(dir, 40, 300);
    auto first = run_train(cfg);
    auto params = slurp(dir / "out" / "params.json");
    auto curve = slurp(dir / "out" / "curve.csv");
    auto second = run_train(cfg);
    EXPECT_EQ(first.params, second.params);
    EXPECT_EQ(slurp(dir / "out" / "params.json"), params);
    EXPECT_EQ(slurp(dir / "out" / "curve.csv"), curve);
    // 300 episodes over 30 training questions
    EXPECT_EQ(first.curve.size(), 10u);
    EXPECT_EQ(line_count(dir / "out" / "curve.csv"), 11u);
    EXPECT_TRUE(fs::exists(dir / "out" / "config.resolved.json"));
}

TEST(Train, ZeroEpisodesIsWarmStart) {
    auto dir = fresh_dir("train_zero");
    auto cfg = synthetic_config(dir, 20, 0);
    auto res = run_train(cfg);
    Experiment exp(cfg);
    EXPECT_EQ(res.params, exp.warm_start());
    auto loaded = params_from_json(nlohmann::json::parse(slurp(dir / "out" / "params.json")), exp.agent().features());
    EXPECT_EQ(loaded, exp.warm_start());
}

TEST(Eval, SubmitForcingMetricsAgree) {
    auto dir = fresh_dir("eval_forcing");
    auto cfg = synthetic_config(dir, 40, 0);
    cfg.submit_bias = 100.0;
    run_train(cfg);
    auto m = run_eval(cfg, (dir / "out" / "params.json").string());
    EXPECT_DOUBLE_EQ(m.identity_f1, m.top_hyp_f1);
    EXPECT_DOUBLE_EQ(m.identity_f1, m.aqa_full_f1);
    auto j = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
    for (const char* k : {"identity_f1", "top_hyp_f1", "aqa_full_f1"}) {
        EXPECT_GE(j.at(k).get<double>(), 0.0);
        EXPECT_LE(j.at(k).get<double>(), 1.0);
    }
}

TEST(Analyze, OriginalVersusTrainedRewrites) {
    auto dir = fresh_dir("analyze");
    auto cfg = synthetic_config(dir, 40, 600);
    cfg.out_dir = (dir / "fresh" / "out").string();
    run_train(cfg);
    const auto params = (fs::path(cfg.out_dir) / "params.json").string();
    run_rewrite(cfg, params, RewriteMode::top, (dir / "top.jsonl").string());
    EXPECT_EQ(line_count(dir / "top.jsonl"), 10u);
    auto first = nlohmann::json::parse(slurp(dir / "top.jsonl").substr(0, slurp(dir / "top.jsonl").find('\n')));
    for (const char* k : {"id", "source", "rewrite", "answer", "env_score", "reward"}) EXPECT_TRUE(first.contains(k)) << k;
    run_rewrite(cfg, params, RewriteMode::sample, (dir / "sample.jsonl").string());
    EXPECT_EQ(line_count(dir / "sample.jsonl"), 10u * (cfg.num_rewrites + 1));

    auto report = run_analyze(cfg, {parse_set_source("original=" + cfg.dev_path), parse_set_source("trained=" + (dir / "top.jsonl").string())});
    EXPECT_EQ(report.ttests.size(), 4u);
    for (const char* name : {"summary.csv", "ttests.csv", "prefixes.csv", "morphology.csv", "report.json"})
        EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / name)) << name;
    run_report(cfg);
    EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "report.md"));
}

TEST(Analyze, MissingSetNamesTheSet) {
    auto dir = fresh_dir("analyze_missing");
    auto cfg = synthetic_config(dir, 20, 0);
    try {
        (void)run_analyze(cfg, {parse_set_source("original=" + cfg.dev_path), parse_set_source("trained=/nonexistent.jsonl")});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("set 'trained'"), std::string::npos) << e.what();
    }
}

TEST(SetSource, Parse) {
    auto s = parse_set_source("trained=out/r.jsonl@rewrite");
    EXPECT_EQ(s.name, "trained");
    EXPECT_EQ(s.path, "out/r.jsonl");
    EXPECT_EQ(s.field, "rewrite");
    EXPECT_EQ(parse_set_source("a=b").field, "");
    EXPECT_THROW((void)parse_set_source("nopath"), Error);
}

TEST(Synthetic, Construction) {
    SyntheticSpec spec;
    spec.num_examples = 200;
    auto all = generate_synthetic(spec);
    ASSERT_EQ(all.size(), 200u);
    std::size_t inflected = 0;
    for (const auto& ex : all) {
        EXPECT_TRUE(is_valid_token_seq(ex.question));
        EXPECT_EQ(preprocess(ex.question_raw, default_stopwords()), ex.question);
        EXPECT_EQ(ex.question.size(), spec.topic_terms + 2);
        bool absent = false;
        for (const auto& t : ex.question.tokens)
            absent |= std::count(ex.context.tokens.begin(), ex.context.tokens.end(), t) == 0;
        inflected += absent;
    }
    EXPECT_GT(inflected, 40u);
    EXPECT_LT(inflected, 80u);
    auto again = generate_synthetic(spec);
    EXPECT_EQ(again[17].context, all[17].context);
}
