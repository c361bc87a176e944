#include "aqa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "aqa/error.hpp"

namespace aqa {

double mean_tf(const TokenSeq& q) {
    if (q.empty()) throw Error(ErrorKind::invalid_argument, "mean_tf: empty question");
    std::set<std::string> distinct(q.tokens.begin(), q.tokens.end());
    return static_cast<double>(q.size()) / static_cast<double>(distinct.size());
}

double median_df(const TokenSeq& q, const CorpusIndex& index) {
    if (q.empty()) throw Error(ErrorKind::invalid_argument, "median_df: empty question");
    std::vector<double> dfs;
    dfs.reserve(q.size());
    for (const auto& t : q.tokens) dfs.push_back(static_cast<double>(index.df(t)));
    std::sort(dfs.begin(), dfs.end());
    const std::size_t n = dfs.size();
    return n % 2 ? dfs[n / 2] : 0.5 * (dfs[n / 2 - 1] + dfs[n / 2]);
}

MorphFlags morph_flags(const TokenSeq& q) {
    std::map<std::string, std::set<std::string>> forms;
    std::map<std::string, std::size_t> counts;
    for (const auto& t : q.tokens) {
        auto s = stem(t);
        forms[s].insert(t);
        ++counts[s];
    }
    MorphFlags f;
    for (const auto& [s, surf] : forms) f.has_morph_variant |= surf.size() >= 2;
    for (const auto& [s, c] : counts) f.same_stem_multi |= c >= 2;
    return f;
}

std::vector<PrefixCount> prefix_histogram(std::span<const TokenSeq> corpus, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::invalid_argument, "prefix_histogram: k must be >= 1");
    std::map<std::string, std::size_t> counts;
    for (const auto& q : corpus) {
        if (q.size() < k) continue;
        TokenSeq head(std::vector<std::string>(q.tokens.begin(), q.tokens.begin() + static_cast<std::ptrdiff_t>(k)));
        ++counts[head.join()];
    }
    std::vector<PrefixCount> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorKind::invalid_argument, "quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

StatsSummary summarize(std::span<const double> values, const std::string& metric) {
    if (values.empty()) throw Error(ErrorKind::invalid_argument, "summarize: no values for " + metric);
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return StatsSummary{metric,
                        v.size(),
                        sum / static_cast<double>(v.size()),
                        v.front(),
                        quantile_sorted(v, 0.25),
                        quantile_sorted(v, 0.5),
                        quantile_sorted(v, 0.75),
                        v.back()};
}

namespace {

std::pair<double, double> mean_var(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, ss / static_cast<double>(x.size() - 1)};
}

}  // namespace

TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw Error(ErrorKind::invalid_argument, "welch_ttest: each sample needs at least 2 values");
    auto [ma, va] = mean_var(a);
    auto [mb, vb] = mean_var(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double sa = va / na;
    const double sb = vb / nb;
    const double se2 = sa + sb;
    if (se2 == 0.0) {
        // Both samples constant.
        const double df = na + nb - 2.0;
        if (ma == mb) return {0.0, df, 1.0};
        const double inf = std::numeric_limits<double>::infinity();
        return {ma > mb ? inf : -inf, df, 0.0};
    }
    TTestResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    boost::math::students_t dist(r.df);
    r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
    return r;
}

QuestionStats question_stats(const TokenSeq& q, const CorpusIndex& index, const LanguageModel& lm,
                             std::span<const std::string> strip_prefix) {
    QuestionStats s;
    s.id = q.source_id.value_or("");
    s.length = q.size();
    s.mean_tf = mean_tf(q);
    s.median_df = median_df(q, index);
    try {
        s.lm_nll = lm_word_logp(lm, q, strip_prefix);
    } catch (const Error&) {
        s.lm_nll.reset();
    }
    auto m = morph_flags(q);
    s.has_morph_variant = m.has_morph_variant;
    s.same_stem_multi = m.same_stem_multi;
    return s;
}

std::vector<QuestionStats> question_stats_batch(std::span<const TokenSeq> questions,
                                                const CorpusIndex& index, const LanguageModel& lm,
                                                std::span<const std::string> strip_prefix, Exec exec) {
    std::vector<const TokenSeq*> nonempty;
    for (const auto& q : questions)
        if (!q.empty()) nonempty.push_back(&q);
    std::vector<QuestionStats> out(nonempty.size());
    const auto n = static_cast<std::ptrdiff_t>(nonempty.size());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] =
                question_stats(*nonempty[static_cast<std::size_t>(i)], index, lm, strip_prefix);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            question_stats(*nonempty[static_cast<std::size_t>(i)], index, lm, strip_prefix);
    return out;
}

namespace {

std::vector<double> metric_values(const std::vector<QuestionStats>& stats, const std::string& metric) {
    std::vector<double> v;
    v.reserve(stats.size());
    for (const auto& s : stats) {
        if (metric == "length") v.push_back(static_cast<double>(s.length));
        else if (metric == "mean_tf") v.push_back(s.mean_tf);
        else if (metric == "median_df") v.push_back(s.median_df);
        else if (s.lm_nll) v.push_back(*s.lm_nll);
    }
    return v;
}

}  // namespace

AnalysisReport compare_corpora(std::span<const NamedSet> sets, const CorpusIndex& index,
                               const LanguageModel& lm, const AnalysisOptions& opts) {
    if (sets.size() < 2) throw Error(ErrorKind::invalid_argument, "compare_corpora needs at least 2 sets");
    AnalysisReport report;
    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    for (const auto& set : sets) {
        SetReport sr;
        sr.name = set.name;
        sr.num_questions = set.questions.size();
        sr.stats = question_stats_batch(set.questions, index, lm, set.strip_prefix, opts.exec);
        sr.skipped_empty = sr.num_questions - sr.stats.size();
        if (sr.stats.size() < 2)
            throw Error(ErrorKind::data, "set '" + set.name + "' has fewer than 2 nonempty questions");
        for (const char* metric : kAnalysisMetrics) {
            auto v = metric_values(sr.stats, metric);
            if (std::string(metric) == "lm_nll" && v.size() < 2)
                throw Error(ErrorKind::data, "set '" + set.name + "' failed language-model scoring");
            sr.summaries.emplace(metric, summarize(v, metric));
            values[set.name][metric] = std::move(v);
        }
        std::size_t variant = 0, same = 0;
        for (const auto& s : sr.stats) {
            variant += s.has_morph_variant;
            same += s.same_stem_multi;
        }
        sr.variant_rate = static_cast<double>(variant) / static_cast<double>(sr.stats.size());
        sr.same_stem_rate = static_cast<double>(same) / static_cast<double>(sr.stats.size());
        sr.prefixes = prefix_histogram(set.questions, opts.prefix_k);
        report.sets.push_back(std::move(sr));
    }
    for (const char* metric : kAnalysisMetrics)
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = i + 1; j < sets.size(); ++j)
                report.ttests.push_back({metric, sets[i].name, sets[j].name,
                                         welch_ttest(values[sets[i].name][metric],
                                                     values[sets[j].name][metric])});
    return report;
}

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
    return out;
}

nlohmann::json json_num(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

}  // namespace

void write_report(const AnalysisReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    nlohmann::json j;

    {
        auto out = open_out(dir / "summary.csv");
        out << "set,metric,n,mean,min,q1,median,q3,max\n";
        for (const auto& s : report.sets)
            for (const char* metric : kAnalysisMetrics) {
                const auto& m = s.summaries.at(metric);
                out << csv_field(s.name) << ',' << m.metric << ',' << m.n << ',' << num(m.mean) << ','
                    << num(m.min) << ',' << num(m.q1) << ',' << num(m.median) << ',' << num(m.q3) << ','
                    << num(m.max) << '\n';
                j["summary"].push_back({{"set", s.name}, {"metric", m.metric}, {"n", m.n},
                                        {"mean", m.mean}, {"min", m.min}, {"q1", m.q1},
                                        {"median", m.median}, {"q3", m.q3}, {"max", m.max}});
            }
    }
    {
        auto out = open_out(dir / "ttests.csv");
        out << "metric,set_a,set_b,t,df,p\n";
        for (const auto& t : report.ttests) {
            out << t.metric << ',' << csv_field(t.set_a) << ',' << csv_field(t.set_b) << ','
                << num(t.result.t) << ',' << num(t.result.df) << ',' << num(t.result.p) << '\n';
            j["ttests"].push_back({{"metric", t.metric}, {"set_a", t.set_a}, {"set_b", t.set_b},
                                   {"t", json_num(t.result.t)}, {"df", t.result.df}, {"p", t.result.p}});
        }
    }
    {
        auto out = open_out(dir / "prefixes.csv");
        out << "set,prefix,count\n";
        for (const auto& s : report.sets)
            for (const auto& [prefix, count] : s.prefixes) {
                out << csv_field(s.name) << ',' << csv_field(prefix) << ',' << count << '\n';
                j["prefixes"].push_back({{"set", s.name}, {"prefix", prefix}, {"count", count}});
            }
    }
    {
        auto out = open_out(dir / "morphology.csv");
        out << "set,variant_rate,same_stem_rate\n";
        for (const auto& s : report.sets) {
            out << csv_field(s.name) << ',' << num(s.variant_rate) << ',' << num(s.same_stem_rate) << '\n';
            j["morphology"].push_back(
                {{"set", s.name}, {"variant_rate", s.variant_rate}, {"same_stem_rate", s.same_stem_rate}});
        }
    }
    for (const auto& s : report.sets)
        j["sets"].push_back({{"name", s.name}, {"num_questions", s.num_questions},
                             {"skipped_empty", s.skipped_empty}});
    auto out = open_out(dir / "report.json");
    out << j.dump(2) << '\n';
}

}  // namespace aqa
