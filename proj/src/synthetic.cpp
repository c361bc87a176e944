#include "aqa/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "aqa/agent.hpp"
#include "aqa/error.hpp"

namespace aqa {

namespace {

/// Pseudo-words that are Porter fixed points, are not stopwords, and stay
/// below a trigram Jaccard of 0.3 with every earlier word, so distinct words
/// never soft-match each other at the default threshold.
class WordFactory {
public:
    explicit WordFactory(std::uint64_t seed) : rng_(seed) {}

    std::string next(std::size_t syllables) {
        static constexpr std::string_view kCons = "bdfgklmnprtvz";
        static constexpr std::string_view kVowels = "aiou";
        for (int attempt = 0; attempt < 100000; ++attempt) {
            std::string w;
            for (std::size_t s = 0; s < syllables; ++s) {
                w += kCons[rng_() % kCons.size()];
                w += kVowels[rng_() % kVowels.size()];
            }
            if (w.back() != 'i') w += kCons[rng_() % kCons.size()];
            if (!acceptable(w)) continue;
            accept(w);
            return w;
        }
        throw Error(ErrorKind::data, "synthetic vocabulary exhausted");
    }

private:
    static constexpr double kMaxJaccard = 0.3;

    bool acceptable(const std::string& w) const {
        if (used_.contains(w) || default_stopwords().contains(w)) return false;
        if (stem(w) != w || stem(w + "s") != w) return false;
        const auto grams = char_trigrams(w);
        std::unordered_map<std::string, int> shared;
        for (const auto& g : grams) {
            auto it = by_gram_.find(g);
            if (it == by_gram_.end()) continue;
            for (const auto& other : it->second) ++shared[other];
        }
        for (const auto& [other, s] : shared) {
            double uni = static_cast<double>(grams.size() + gram_count_.at(other)) - s;
            if (s / uni >= kMaxJaccard) return false;
        }
        return true;
    }

    void accept(const std::string& w) {
        used_.insert(w);
        gram_count_[w] = char_trigrams(w).size();
        for (const auto& g : char_trigrams(w)) by_gram_[g].push_back(w);
    }

    std::mt19937_64 rng_;
    std::set<std::string> used_;
    std::unordered_map<std::string, std::vector<std::string>> by_gram_;
    std::unordered_map<std::string, std::size_t> gram_count_;
};

template <class T>
void shuffle_with(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
}

std::string joined(const std::vector<std::string>& toks) { return TokenSeq(toks).join(); }

}  // namespace

std::vector<QAExample> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.num_examples == 0) throw Error(ErrorKind::invalid_argument, "num_examples must be >= 1");
    if (spec.topic_terms > spec.topic_vocab || spec.answer_topics > spec.topic_terms ||
        spec.distractor_vocab == 0 || spec.filler_vocab == 0 || spec.key_vocab == 0)
        throw Error(ErrorKind::invalid_argument, "inconsistent synthetic vocabulary sizes");
    WordFactory words(spec.seed);
    std::mt19937_64 rng(derive_seed(spec.seed, 1));
    auto pick = [&](const std::vector<std::string>& pool) {
        return pool[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size()))];
    };
    auto make_pool = [&](std::size_t n, std::size_t syl) {
        std::vector<std::string> pool;
        for (std::size_t i = 0; i < n; ++i) pool.push_back(words.next(syl));
        return pool;
    };
    const auto fillers = make_pool(spec.filler_vocab, 2);
    const auto distractors = make_pool(spec.distractor_vocab, 2);
    const auto topics = make_pool(spec.topic_vocab, 2);
    const auto keys = make_pool(spec.key_vocab, 3);

    std::vector<QAExample> out;
    out.reserve(spec.num_examples);
    for (std::size_t e = 0; e < spec.num_examples; ++e) {
        const std::string key = pick(keys);
        const std::string distractor = pick(distractors);
        std::vector<std::string> topic_pool = topics;
        shuffle_with(topic_pool, rng);
        topic_pool.resize(spec.topic_terms);

        const std::size_t gold_len = 3 + static_cast<std::size_t>(uniform01(rng) * 3.0);
        std::vector<std::string> gold, decoy;
        for (std::size_t i = 0; i < gold_len; ++i) gold.push_back(words.next(3));
        for (std::size_t i = 0; i < 3; ++i) decoy.push_back(words.next(3));

        std::vector<std::string> distractor_region = decoy;
        for (std::size_t i = 0; i < spec.distractor_repeats; ++i) distractor_region.push_back(distractor);
        for (const auto& t : topic_pool)
            for (std::size_t i = 0; i < spec.topic_repeats; ++i) distractor_region.push_back(t);
        shuffle_with(distractor_region, rng);

        std::vector<std::string> answer_region;
        for (std::size_t i = 0; i < 2; ++i) answer_region.push_back(pick(fillers));
        answer_region.insert(answer_region.end(), gold.begin(), gold.end());
        answer_region.push_back(key);
        for (std::size_t i = 0; i < spec.answer_topics; ++i) answer_region.push_back(topic_pool[i]);

        auto filler_run = [&](std::size_t n) {
            std::vector<std::string> r;
            for (std::size_t i = 0; i < n; ++i) r.push_back(pick(fillers));
            return r;
        };
        std::vector<std::string> context = filler_run(3);
        if (spec.echo) {
            std::vector<std::string> echo;
            for (std::size_t i = 0; i < 4; ++i) echo.push_back(words.next(3));
            echo.insert(echo.begin() + 2, key);
            context.insert(context.end(), echo.begin(), echo.end());
            auto gap = filler_run(spec.gap);
            context.insert(context.end(), gap.begin(), gap.end());
        }
        const bool distractor_first = uniform01(rng) < 0.5;
        const auto& first = distractor_first ? distractor_region : answer_region;
        const auto& second = distractor_first ? answer_region : distractor_region;
        context.insert(context.end(), first.begin(), first.end());
        auto gap = filler_run(spec.gap);
        context.insert(context.end(), gap.begin(), gap.end());
        context.insert(context.end(), second.begin(), second.end());
        auto tail_run = filler_run(3);
        context.insert(context.end(), tail_run.begin(), tail_run.end());

        std::string key_form = uniform01(rng) < spec.inflected_rate ? key + "s" : key;
        std::vector<std::string> question = topic_pool;
        question.push_back(distractor);
        question.push_back(key_form);
        shuffle_with(question, rng);

        QAExample ex;
        ex.id = "syn-" + std::to_string(e);
        ex.question_raw = joined(question);
        ex.question = TokenSeq(question);
        ex.answer_gold = TokenSeq(gold);
        ex.context = TokenSeq(context);
        out.push_back(std::move(ex));
    }
    return out;
}

SyntheticCorpus generate_synthetic_split(const SyntheticSpec& spec, double dev_fraction) {
    if (dev_fraction < 0.0 || dev_fraction >= 1.0)
        throw Error(ErrorKind::invalid_argument, "dev_fraction must be in [0, 1)");
    auto all = generate_synthetic(spec);
    auto ndev = static_cast<std::size_t>(dev_fraction * static_cast<double>(all.size()));
    SyntheticCorpus c;
    c.train.assign(std::make_move_iterator(all.begin()),
                   std::make_move_iterator(all.end() - static_cast<std::ptrdiff_t>(ndev)));
    c.dev.assign(std::make_move_iterator(all.end() - static_cast<std::ptrdiff_t>(ndev)),
                 std::make_move_iterator(all.end()));
    return c;
}

}  // namespace aqa
