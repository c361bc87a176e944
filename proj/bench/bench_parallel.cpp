// Serial reference vs OpenMP for the batched kernels.
//   aqa_bench [--benchmark_filter=...]   (OMP_NUM_THREADS sets the team size)
#include <filesystem>

#include <benchmark/benchmark.h>

#include "aqa/agent.hpp"
#include "aqa/analysis.hpp"
#include "aqa/pipeline.hpp"
#include "aqa/synthetic.hpp"

using namespace aqa;
namespace fs = std::filesystem;

namespace {

const SyntheticCorpus& corpus() {
    static const SyntheticCorpus c = generate_synthetic_split(SyntheticSpec{}, 0.25);
    return c;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::omp : Exec::serial; }

void BM_RolloutBatch(benchmark::State& state) {
    const auto& c = corpus();
    Environment env(c.train);
    Reformulator agent(Catalogs::defaults(), BackgroundStats::from_index(env.index()), default_stopwords());
    auto params = agent.warm_start(1.0);
    std::vector<const QAExample*> exs;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < c.train.size(); ++i) {
        exs.push_back(&c.train[i]);
        seeds.push_back(derive_seed(9, i));
    }
    for (auto _ : state) benchmark::DoNotOptimize(rollout_batch(agent, params, env, exs, seeds, 6, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(exs.size()));
}

void BM_QuestionStats(benchmark::State& state) {
    const auto& c = corpus();
    CorpusIndex index(c.dev);
    std::vector<TokenSeq> contexts, questions;
    for (const auto& ex : c.train) contexts.push_back(ex.context);
    for (int rep = 0; rep < 10; ++rep)
        for (const auto& ex : c.dev) questions.push_back(ex.question);
    LanguageModel lm(contexts, 3, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(question_stats_batch(questions, index, lm, {}, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(questions.size()));
}

void BM_Evaluate(benchmark::State& state) {
    const auto& c = corpus();
    auto dir = fs::temp_directory_path() / "aqa_bench";
    fs::create_directories(dir);
    write_dataset(c.train, (dir / "train.jsonl").string());
    write_dataset(c.dev, (dir / "dev.jsonl").string());
    ExperimentConfig cfg;
    cfg.train_path = (dir / "train.jsonl").string();
    cfg.dev_path = (dir / "dev.jsonl").string();
    cfg.out_dir = (dir / "out").string();
    cfg.seed = 1;
    cfg.exec = exec_of(state);
    Experiment exp(cfg);
    auto params = exp.warm_start();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(exp, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.dev.size()));
}

}  // namespace

BENCHMARK(BM_RolloutBatch)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuestionStats)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
