// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   usage: aqa_acceptance <work-dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../oracle.hpp"
#include "../workdir.hpp"
#include "aqa/agent.hpp"
#include "aqa/analysis.hpp"
#include "aqa/environment.hpp"
#include "aqa/error.hpp"
#include "aqa/pipeline.hpp"
#include "aqa/synthetic.hpp"

using namespace aqa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

/// Records a failed sub-check without stopping the criterion.
struct Checker {
    Outcome out;
    int failures = 0;
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        out.pass = false;
        if (++failures <= 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
    }
};

bool close(double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; }

// ---------------------------------------------------------------------------

double oracle_quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Outcome a1_oracles() {
    auto t0 = Clock::now();
    Checker ck;
    const std::vector<TokenSeq> questions{
        {"gandhi", "deeply", "influenced", "count", "wrote", "war", "peace"},
        {"what", "is", "name", "gandhi", "gandhi", "influence", "wrote", "peace", "peace"},
        {"a", "a", "a"},
        {"war", "peace", "war"},
        {"tolstoy", "novel"},
        {"what", "is", "name", "tolstoy"},
        {"what", "country", "is", "india"},
        {"what", "is", "name", "war", "war", "war"},
        {"peace"},
        {"india", "gandhi", "india", "gandhi"},
        {"what", "state", "india"},
        {"what", "is", "name", "novel", "peace"},
    };
    // mean_tf
    std::vector<double> tf;
    for (const auto& q : questions) {
        std::map<std::string, int> c;
        for (const auto& t : q.tokens) ++c[t];
        double ref = static_cast<double>(q.size()) / static_cast<double>(c.size());
        ck.expect(close(mean_tf(q), ref), "mean_tf " + q.join());
        tf.push_back(ref);
    }
    ck.expect(close(mean_tf(questions[1]), 9.0 / 7.0), "mean_tf 9/7");

    // median_df over a hand-built index
    std::vector<QAExample> docs;
    for (int d = 0; d < 20; ++d) {
        QAExample ex;
        ex.id = std::to_string(d);
        ex.answer_gold = TokenSeq{"x"};
        ex.context = TokenSeq{"pad"};
        if (d < 1) ex.context.tokens.push_back("gandhi");
        if (d < 3) ex.context.tokens.push_back("tolstoy");
        if (d < 5) ex.context.tokens.push_back("war");
        if (d < 12) ex.context.tokens.push_back("peace");
        if (d % 2) ex.context.tokens.push_back("india");
        if (d < 20) ex.context.tokens.push_back("novel");
        docs.push_back(ex);
    }
    CorpusIndex index(docs);
    auto st = oracle::stats([&] {
        std::vector<std::vector<std::string>> v;
        for (const auto& d : docs) v.push_back(d.context.tokens);
        return v;
    }());
    for (const auto& q : questions) {
        std::vector<double> d;
        for (const auto& t : q.tokens) d.push_back(st.df.contains(t) ? st.df.at(t) : 0.0);
        ck.expect(close(median_df(q, index), oracle_quantile(d, 0.5)), "median_df " + q.join());
    }
    ck.expect(close(median_df(TokenSeq{"gandhi", "tolstoy", "war", "novel"}, index), 4.0), "median_df even");

    // summarize
    for (const auto& values : {tf, std::vector<double>{1, 2, 3, 4}, std::vector<double>{5}}) {
        auto s = summarize(values, "m");
        double mean = 0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        ck.expect(close(s.mean, mean) && close(s.q1, oracle_quantile(values, 0.25)) &&
                      close(s.median, oracle_quantile(values, 0.5)) && close(s.q3, oracle_quantile(values, 0.75)) &&
                      close(s.min, *std::min_element(values.begin(), values.end())) &&
                      close(s.max, *std::max_element(values.begin(), values.end())),
                  "summarize");
    }
    auto s4 = summarize(std::vector<double>{1, 2, 3, 4}, "m");
    ck.expect(close(s4.q1, 1.75) && close(s4.median, 2.5) && close(s4.q3, 3.25), "summarize [1,2,3,4]");

    // token_f1
    for (std::size_t i = 0; i < questions.size(); ++i)
        for (std::size_t j = 0; j < questions.size(); ++j)
            ck.expect(close(token_f1(questions[i], questions[j]), oracle::f1(questions[i].tokens, questions[j].tokens)),
                      "token_f1");
    ck.expect(close(token_f1(TokenSeq{"leo", "tolstoy"}, TokenSeq{"tolstoy"}), 2.0 / 3.0), "token_f1 2/3");

    // prefix_histogram
    for (std::size_t k : {1, 2, 3}) {
        std::map<std::string, std::size_t> counts;
        for (const auto& q : questions) {
            if (q.size() < k) continue;
            counts[TokenSeq(std::vector<std::string>(q.tokens.begin(), q.tokens.begin() + static_cast<long>(k))).join()]++;
        }
        std::vector<PrefixCount> ref(counts.begin(), counts.end());
        std::stable_sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        ck.expect(prefix_histogram(questions, k) == ref, "prefix_histogram k=" + std::to_string(k));
    }

    // welch_ttest: frozen reference values, then the closed form on random samples
    auto w = welch_ttest(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
    ck.expect(close(w.t, -3.6742346141747673) && close(w.df, 4.0) && close(w.p, 0.021311641128756727), "welch ref 1");
    auto w2 = welch_ttest(std::vector<double>{1.0, 2.5, 2.0, 4.0, 3.0}, std::vector<double>{2.0, 2.0, 3.5, 5.0, 4.5, 6.0});
    ck.expect(close(w2.t, -1.6) && close(w2.df, 8.747375787263822) && close(w2.p, 0.1450362237088017), "welch ref 2");
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    for (int c = 0; c < 20; ++c) {
        std::vector<double> a(3 + c % 7), b(4 + c % 5);
        for (auto& x : a) x = nd(rng);
        for (auto& x : b) x = 2 * nd(rng) + 1;
        auto mv = [](const std::vector<double>& v) {
            double m = 0, s = 0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            for (double x : v) s += (x - m) * (x - m);
            return std::pair{m, s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())};
        };
        auto [ma, va] = mv(a);
        auto [mb, vb] = mv(b);
        double t = (ma - mb) / std::sqrt(va + vb);
        double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
        auto r = welch_ttest(a, b);
        ck.expect(close(r.t, t) && close(r.df, df) && r.p > 0 && r.p <= 1, "welch closed form");
    }
    double secs = seconds_since(t0);
    ck.expect(secs < 5.0, "runtime");
    if (ck.out.pass) ck.out.detail = fmt("all oracle checks agree, %.2f s", secs);
    return ck.out;
}

// ---------------------------------------------------------------------------

Outcome a2_gradient() {
    auto t0 = Clock::now();
    BackgroundStats bg;
    bg.num_docs = 100;
    bg.df = {{"war", 3}, {"peace", 40}, {"gandhi", 1}, {"the", 90}, {"count", 40}, {"wrote", 12}, {"novel", 7}};
    Reformulator agent(Catalogs::defaults(), bg, StopwordSet{"the"});
    const std::vector<std::string> vocab{"war", "peace", "gandhi", "the", "count", "wrote", "wars", "dense", "novel"};
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd(0.0, 0.5);
    std::uniform_real_distribution<double> temp(0.5, 2.0);
    double worst = 0;
    for (int c = 0; c < 100; ++c) {
        auto params = agent.warm_start(0.3, temp(rng));
        for (auto& x : params.weights) x += nd(rng);
        TokenSeq q0;
        for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) q0.tokens.push_back(vocab[rng() % vocab.size()]);
        auto traj = agent.rollout(params, q0, 4, rng());
        auto g = agent.grad_logprob(params, traj);
        const double h = 1e-5;
        double num = 0, den = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto up = params, dn = params;
            up.weights[k] += h;
            dn.weights[k] -= h;
            double fd = (agent.trajectory_logprob(up, traj) - agent.trajectory_logprob(dn, traj)) / (2 * h);
            num += (g[k] - fd) * (g[k] - fd);
            den += g[k] * g[k] + fd * fd;
        }
        if (den > 0) worst = std::max(worst, std::sqrt(num) / std::sqrt(den));
    }
    double secs = seconds_since(t0);
    Outcome o{worst < 1e-4 && secs < 10.0, fmt("max relative error %.3g over 100 cases, %.2f s", worst, secs)};
    return o;
}

// ---------------------------------------------------------------------------

Outcome a3_environment() {
    Checker ck;
    std::mt19937_64 rng(77);
    const std::vector<std::string> vocab{"war",  "wars",  "peace", "peaces", "tolstoy", "novel",  "count",
                                         "dens", "dense", "densey", "gandhi", "leo",    "moscow", "india"};
    std::vector<QAExample> ex;
    for (int d = 0; d < 50; ++d) {
        QAExample e;
        e.id = std::to_string(d);
        for (std::size_t i = 0, n = 1 + rng() % 30; i < n; ++i) e.context.tokens.push_back(vocab[rng() % vocab.size()]);
        e.answer_gold = TokenSeq{vocab[rng() % vocab.size()]};
        ex.push_back(e);
    }
    EnvParams p;
    p.window = 5;
    p.answer_max = 3;
    Environment env(ex, p);
    std::vector<std::vector<std::string>> docs;
    for (const auto& e : ex) docs.push_back(e.context.tokens);
    auto st = oracle::stats(docs);
    for (const auto& e : ex) {
        TokenSeq q;
        for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) q.tokens.push_back(vocab[rng() % vocab.size()]);
        auto ref = oracle::answer(st, q.tokens, e.context.tokens, p);
        auto pick = env.locate(q, e.id);
        auto cand = env.answer_question(q, e.id);
        std::vector<std::string> span(e.context.tokens.begin() + static_cast<long>(ref.span_start),
                                      e.context.tokens.begin() + static_cast<long>(ref.span_start + ref.span_len));
        ck.expect(pick.window_start == ref.window_start && pick.span_start == ref.span_start &&
                      pick.span_len == ref.span_len && close(pick.window_score, ref.score) &&
                      close(cand.reward, oracle::f1(span, e.answer_gold.tokens)),
                  "exhaustive mismatch on context " + e.id);
    }
    int linear = 0;
    for (int c = 0; c < 100; ++c) {
        const auto& ctx = ex[rng() % ex.size()].context.tokens;
        std::string term = vocab[rng() % vocab.size()];
        TokenSeq rest;
        for (std::size_t i = 0, n = rng() % 3; i < n; ++i) rest.tokens.push_back(vocab[rng() % vocab.size()]);
        std::erase(rest.tokens, term);
        double one = score_window(env.index(), TokenSeq{term}, ctx, p);
        double two = score_window(env.index(), TokenSeq{term, term}, ctx, p);
        TokenSeq with = rest, with2 = rest;
        with.tokens.push_back(term);
        with2.tokens.push_back(term);
        with2.tokens.push_back(term);
        double base = score_window(env.index(), rest, ctx, p);
        double c1 = score_window(env.index(), with, ctx, p) - base;
        double c2 = score_window(env.index(), with2, ctx, p) - base;
        bool ok = two == 2.0 * one && close(c2, 2.0 * c1, 1e-12 * std::max(1.0, std::fabs(c2)));
        linear += ok;
        ck.expect(ok, "qtf linearity");
    }
    if (ck.out.pass) ck.out.detail = "50/50 contexts match exhaustive search; qtf linear on " + std::to_string(linear) + "/100";
    return ck.out;
}

// ---------------------------------------------------------------------------

/// One full train + eval + rewrite + analyze pass on the planted corpus.
struct PlantedRun {
    fs::path dir;
    EvalMetrics metrics;
    AnalysisReport report;
    double train_seconds = 0;
    std::size_t train_size = 0, dev_size = 0;
};

PlantedRun planted_run(const fs::path& dir) {
    PlantedRun r;
    r.dir = dir;
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto corpus = generate_synthetic_split(SyntheticSpec{}, 0.25);
    r.train_size = corpus.train.size();
    r.dev_size = corpus.dev.size();
    write_dataset(corpus.train, (dir / "train.jsonl").string());
    write_dataset(corpus.dev, (dir / "dev.jsonl").string());
    ExperimentConfig cfg;
    cfg.train_path = (dir / "train.jsonl").string();
    cfg.dev_path = (dir / "dev.jsonl").string();
    cfg.out_dir = (dir / "out").string();
    cfg.seed = 1;
    auto t0 = Clock::now();
    (void)run_train(cfg);
    r.train_seconds = seconds_since(t0);
    const auto params = (dir / "out" / "params.json").string();
    r.metrics = run_eval(cfg, params);
    run_rewrite(cfg, params, RewriteMode::top, (dir / "out" / "rewrites_top.jsonl").string());
    r.report = run_analyze(cfg, {parse_set_source("original=" + cfg.dev_path),
                                 parse_set_source("trained=" + (dir / "out" / "rewrites_top.jsonl").string())});
    return r;
}

const PairTest& find_test(const AnalysisReport& r, const std::string& metric) {
    for (const auto& t : r.ttests)
        if (t.metric == metric) return t;
    throw Error(ErrorKind::data, "no t-test for " + metric);
}

Outcome a4_learning(const PlantedRun& r) {
    double lift = r.metrics.top_hyp_f1 - r.metrics.identity_f1;
    bool ok = r.train_size + r.dev_size >= 200 && lift >= 0.10 && r.train_seconds < 300.0;
    return {ok, fmt("identity %.4f, top hypothesis %.4f, lift %+.4f, training %.1f s", r.metrics.identity_f1,
                    r.metrics.top_hyp_f1, lift, r.train_seconds)};
}

Outcome a5_emergence(const PlantedRun& r) {
    const auto& orig = r.report.sets.at(0).summaries;
    const auto& trained = r.report.sets.at(1).summaries;
    double tf0 = orig.at("mean_tf").mean, tf1 = trained.at("mean_tf").mean;
    double df0 = orig.at("median_df").mean, df1 = trained.at("median_df").mean;
    double p = find_test(r.report, "mean_tf").result.p;
    bool ok = tf1 > tf0 && df1 < df0 && p < 0.05;
    return {ok, fmt("mean_tf %.4f -> %.4f (p=%.3g), median_df %.4f", tf0, tf1, p, df0) + fmt(" -> %.4f", df1)};
}

Outcome a6_selection(const PlantedRun& r) {
    const auto& m = r.metrics;
    bool ok = m.aqa_full_f1 >= m.top_hyp_f1 - 0.01 && m.aqa_full_f1 >= m.identity_f1;
    return {ok, fmt("full %.4f vs top hypothesis %.4f and identity %.4f", m.aqa_full_f1, m.top_hyp_f1, m.identity_f1)};
}

Outcome a7_goldens() {
    Checker ck;
    auto q = preprocess("Gandhi was deeply influenced by this count who wrote \"War and Peace\"", default_stopwords());
    ck.expect(q.join() == "gandhi deeply influenced count wrote war peace", "Gandhi clue: " + q.join());
    const char* rows[] = {
        "What is name did people nation aka nippon wrote brush expression?",
        "What is name is name is name michael caine steve martin teamed lawrence freddy and title 1988 film?",
        "What is name is used under water with ammonia gelatin water waterproof type explosive?",
        "What is name is cleveland peninsula state northwest state state state?",
        "What is name tess ocean tinker bell link charlotte spider?",
        "What is name were tertiary period in india plowed eurasia?",
        "What is name melody heard opera serse is better persian king?",
        "What is name is name humorous poem poem bear city city city?",
    };
    std::vector<TokenSeq> corpus;
    for (const char* r : rows) corpus.push_back(tokenize(r));
    auto h = prefix_histogram(corpus, 3);
    ck.expect(!h.empty() && h.front() == PrefixCount{"what is name", 8}, "prefix histogram top entry");
    ck.expect(morph_flags(TokenSeq{"influence", "influenced"}) == MorphFlags{true, true}, "morph flags");
    if (ck.out.pass) ck.out.detail = "Gandhi clue, fixture prefix (what is name, 8), morph flags (true, true)";
    return ck.out;
}

Outcome a8_reproducible(const PlantedRun& a, const PlantedRun& b) {
    Checker ck;
    const char* payload[] = {"params.json",  "curve.csv",     "metrics.json",   "rewrites_top.jsonl", "summary.csv",
                             "ttests.csv",   "prefixes.csv",  "morphology.csv", "report.json"};
    for (const char* name : payload) {
        auto pa = a.dir / "out" / name, pb = b.dir / "out" / name;
        ck.expect(fs::exists(pa) && fs::exists(pb) && testing_support::slurp(pa) == testing_support::slurp(pb),
                  std::string(name) + " differs");
    }
    if (ck.out.pass) ck.out.detail = std::to_string(std::size(payload)) + " payload files byte-identical across two runs";
    return ck.out;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "aqa_acceptance";
    int failed = 0;
    auto report = [&](const char* id, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    };
    report("A1", a1_oracles);
    report("A2", a2_gradient);
    report("A3", a3_environment);

    std::optional<PlantedRun> run1, run2;
    std::string run_error;
    try {
        run1 = planted_run(work / "run1");
        run2 = planted_run(work / "run2");
    } catch (const std::exception& e) {
        run_error = e.what();
    }
    auto need = [&](auto fn) {
        return [&, fn]() -> Outcome {
            if (!run1 || !run2) return {false, "planted run failed: " + run_error};
            return fn();
        };
    };
    report("A4", need([&] { return a4_learning(*run1); }));
    report("A5", need([&] { return a5_emergence(*run1); }));
    report("A6", need([&] { return a6_selection(*run1); }));
    report("A7", a7_goldens);
    report("A8", need([&] { return a8_reproducible(*run1, *run2); }));
    return failed == 0 ? 0 : 1;
}
