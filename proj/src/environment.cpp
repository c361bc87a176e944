#include "aqa/environment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aqa/error.hpp"

namespace aqa {

CorpusIndex::CorpusIndex(std::span<const QAExample> examples) {
    if (examples.empty()) throw Error(ErrorKind::invalid_argument, "cannot index an empty example list");
    double total = 0.0;
    for (const auto& ex : examples) {
        doc_lengths_[ex.id] = ex.context.size();
        total += static_cast<double>(ex.context.size());
        std::map<std::string, std::size_t> tf;
        for (const auto& t : ex.context.tokens) ++tf[t];
        for (const auto& [t, c] : tf) {
            ++df_[t];
            postings_[t][ex.id] = c;
        }
    }
    avg_doc_len_ = total / static_cast<double>(doc_lengths_.size());
}

std::size_t CorpusIndex::df(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
}

double CorpusIndex::idf(const std::string& token) const {
    const double n = static_cast<double>(num_docs());
    const double d = static_cast<double>(df(token));
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::size_t CorpusIndex::doc_length(const std::string& id) const {
    auto it = doc_lengths_.find(id);
    if (it == doc_lengths_.end()) throw Error(ErrorKind::invalid_argument, "unknown document id: " + id);
    return it->second;
}

std::size_t CorpusIndex::tf(const std::string& token, const std::string& doc_id) const {
    auto it = postings_.find(token);
    if (it == postings_.end()) return 0;
    auto jt = it->second.find(doc_id);
    return jt == it->second.end() ? 0 : jt->second;
}

CorpusIndex build_index(std::span<const QAExample> examples) { return CorpusIndex(examples); }

double match_weight(std::string_view q_token, std::string_view d_token, double lambda, double theta) {
    if (q_token == d_token) return 1.0;
    double j = trigram_jaccard(q_token, d_token);
    return j >= theta ? lambda * j : 0.0;
}

namespace {

/// Scores closer than this are ties, so equal sums taken in a different order
/// still resolve leftmost first.
bool beats(double a, double b) { return a > b + 1e-12 * std::max(1.0, std::fabs(b)); }

double bm25_term(double idf, double qtf, double tfs, double window_len, double avgdl,
                 const EnvParams& p) {
    if (tfs <= 0.0) return 0.0;
    double sat = (tfs * (p.k1 + 1.0)) / (tfs + p.k1 * (1.0 - p.b + p.b * window_len / avgdl));
    return qtf * idf * sat;
}

std::map<std::string, std::size_t> query_tf(const TokenSeq& q) {
    std::map<std::string, std::size_t> out;
    for (const auto& t : q.tokens) ++out[t];
    return out;
}

}  // namespace

double score_window(const CorpusIndex& index, const TokenSeq& query,
                    std::span<const std::string> window, const EnvParams& params) {
    double score = 0.0;
    const double wlen = static_cast<double>(window.size());
    for (const auto& [term, qtf] : query_tf(query)) {
        double tfs = 0.0;
        for (const auto& tok : window) tfs += match_weight(term, tok, params.lambda, params.theta);
        score += bm25_term(index.idf(term), static_cast<double>(qtf), tfs, wlen, index.avg_doc_len(),
                           params);
    }
    return score;
}

double token_f1(const TokenSeq& pred, const TokenSeq& gold) {
    if (gold.empty()) throw Error(ErrorKind::invalid_argument, "token_f1: empty gold answer");
    if (pred.empty()) return 0.0;
    auto pc = query_tf(pred);
    auto gc = query_tf(gold);
    std::size_t overlap = 0;
    for (const auto& [t, c] : pc)
        if (auto it = gc.find(t); it != gc.end()) overlap += std::min(c, it->second);
    if (overlap == 0) return 0.0;
    double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
    double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return 2.0 * p * r / (p + r);
}

Environment::Environment(std::vector<QAExample> examples, EnvParams params)
    : Environment(examples, CorpusIndex(examples), params) {}

Environment::Environment(std::vector<QAExample> examples, CorpusIndex index, EnvParams params)
    : examples_(std::move(examples)), index_(std::move(index)), params_(params) {
    if (params_.window == 0) throw Error(ErrorKind::config, "window must be >= 1");
    if (params_.answer_max == 0) throw Error(ErrorKind::config, "answer_max must be >= 1");
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        if (examples_[i].context.empty())
            throw Error(ErrorKind::data, "empty context for example " + examples_[i].id);
        if (!by_id_.emplace(examples_[i].id, i).second)
            throw Error(ErrorKind::data, "duplicate example id: " + examples_[i].id);
    }
}

const QAExample& Environment::example(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw Error(ErrorKind::invalid_argument, "unknown example id: " + id);
    return examples_[it->second];
}

SpanPick Environment::locate(const TokenSeq& question, const std::string& example_id) const {
    const auto& ctx = example(example_id).context.tokens;
    const std::size_t n = ctx.size();
    const std::size_t wlen = std::min(params_.window, n);
    const std::size_t nwin = n - wlen + 1;

    // Per-term, per-position match weights; each window then sums its slice in
    // token order so the result is bit-identical to score_window.
    auto qtf = query_tf(question);
    struct TermRow {
        double idf;
        double qtf;
        std::vector<double> w;
    };
    std::vector<TermRow> rows;
    rows.reserve(qtf.size());
    for (const auto& [term, c] : qtf) {
        TermRow row{index_.idf(term), static_cast<double>(c), std::vector<double>(n)};
        for (std::size_t p = 0; p < n; ++p)
            row.w[p] = match_weight(term, ctx[p], params_.lambda, params_.theta);
        rows.push_back(std::move(row));
    }

    SpanPick pick;
    pick.window_len = wlen;
    double best = -1.0;
    for (std::size_t s = 0; s < nwin; ++s) {
        double score = 0.0;
        for (const auto& row : rows) {
            double tfs = 0.0;
            for (std::size_t p = s; p < s + wlen; ++p) tfs += row.w[p];
            score += bm25_term(row.idf, row.qtf, tfs, static_cast<double>(wlen), index_.avg_doc_len(),
                               params_);
        }
        if (beats(score, best)) {
            best = score;
            pick.window_start = s;
        }
    }
    pick.window_score = best;

    std::vector<double> salience(wlen);
    for (std::size_t i = 0; i < wlen; ++i) {
        const auto& tok = ctx[pick.window_start + i];
        salience[i] = qtf.contains(tok) ? 0.0 : index_.idf(tok);
    }
    double best_span = -1.0;
    for (std::size_t s = 0; s < wlen; ++s) {
        double sum = 0.0;
        for (std::size_t len = 1; len <= params_.answer_max && s + len <= wlen; ++len) {
            sum += salience[s + len - 1];
            if (beats(sum, best_span)) {
                best_span = sum;
                pick.span_start = pick.window_start + s;
                pick.span_len = len;
            }
        }
    }
    return pick;
}

AnswerCandidate Environment::answer_question(const TokenSeq& question,
                                             const std::string& example_id) const {
    const auto& ex = example(example_id);
    SpanPick pick = locate(question, example_id);
    AnswerCandidate cand;
    cand.q0 = ex.question;
    cand.qi = question;
    auto first = ex.context.tokens.begin() + static_cast<std::ptrdiff_t>(pick.span_start);
    cand.ai = TokenSeq(std::vector<std::string>(first, first + static_cast<std::ptrdiff_t>(pick.span_len)));
    cand.env_score = pick.window_score;
    cand.reward = ex.answer_gold.empty() ? 0.0 : token_f1(cand.ai, ex.answer_gold);
    return cand;
}

}  // namespace aqa
