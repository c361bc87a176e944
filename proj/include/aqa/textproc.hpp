#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace aqa {

/// A tokenized, normalized question or passage. Tokens are lowercase and
/// contain no whitespace.
struct TokenSeq {
    std::vector<std::string> tokens;
    std::optional<std::string> source_id;

    TokenSeq() = default;
    TokenSeq(std::vector<std::string> toks) : tokens(std::move(toks)) {}
    TokenSeq(std::initializer_list<std::string> toks) : tokens(toks) {}

    [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
    [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
    [[nodiscard]] const std::string& operator[](std::size_t i) const { return tokens[i]; }

    /// Tokens joined by single spaces.
    [[nodiscard]] std::string join() const;

    friend bool operator==(const TokenSeq& a, const TokenSeq& b) { return a.tokens == b.tokens; }
};

/// True when every token is nonempty, whitespace-free and lowercase.
[[nodiscard]] bool is_valid_token_seq(const TokenSeq& seq);

using StopwordSet = std::unordered_set<std::string>;

/// The built-in English stopword list (the same list as data/stopwords_en.txt).
[[nodiscard]] const StopwordSet& default_stopwords();

/// Reads one token per line; blank lines and surrounding whitespace ignored.
[[nodiscard]] StopwordSet load_stopwords(const std::string& path);

struct TokenizerOptions {
    /// Keep commas as standalone "," tokens (other punctuation is dropped).
    bool keep_punct_tokens = false;
};

/// Splits on whitespace, lowercases ASCII, strips punctuation. Hyphens and
/// apostrophes survive only between two alphanumeric characters; any other
/// punctuation separates tokens.
[[nodiscard]] TokenSeq tokenize(std::string_view raw, const TokenizerOptions& opts = {});

/// tokenize() followed by stopword removal. Order is preserved.
[[nodiscard]] TokenSeq preprocess(std::string_view raw, const StopwordSet& stopwords,
                                  const TokenizerOptions& opts = {});

/// Porter (1980) suffix-stripping stemmer. Tokens of length <= 2 are returned
/// unchanged.
[[nodiscard]] std::string stem(std::string_view token);

/// All contiguous 3-grams of "#token#".
[[nodiscard]] std::vector<std::string> char_trigrams(std::string_view token);

/// |A ∩ B| / |A ∪ B| over char_trigrams of the two tokens.
[[nodiscard]] double trigram_jaccard(std::string_view a, std::string_view b);

/// Order-n additive-smoothed n-gram model. Histories are padded with
/// `kBos`; unseen tokens are scored as `kUnk`, which carries its own
/// smoothed mass. No end-of-sentence event is modelled.
class LanguageModel {
public:
    static constexpr std::string_view kBos = "<s>";
    static constexpr std::string_view kUnk = "<unk>";

    LanguageModel(std::span<const TokenSeq> corpus, int order, double smoothing_k);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double smoothing_k() const noexcept { return k_; }
    /// Training vocabulary, excluding UNK.
    [[nodiscard]] const std::vector<std::string>& vocab() const noexcept { return vocab_; }
    /// |vocab| + 1 (UNK).
    [[nodiscard]] std::size_t support_size() const noexcept { return vocab_.size() + 1; }

    /// P(word | history). Only the last order-1 history tokens are used; a
    /// short history is left-padded with BOS. Out-of-vocabulary words and
    /// history tokens map to UNK.
    [[nodiscard]] double prob(std::span<const std::string> history, std::string_view word) const;

    /// Negative log probability (nats) of each token in sequence context.
    [[nodiscard]] std::vector<double> token_nll(const TokenSeq& seq) const;

private:
    using Key = std::vector<std::string>;
    [[nodiscard]] Key history_key(std::span<const std::string> history) const;
    [[nodiscard]] std::string canon(std::string_view w) const;

    int order_;
    double k_;
    std::vector<std::string> vocab_;
    std::unordered_set<std::string> vocab_set_;
    std::map<Key, std::map<std::string, double, std::less<>>> counts_;
    std::map<Key, double> history_totals_;
};

[[nodiscard]] LanguageModel build_lm(std::span<const TokenSeq> corpus, int order,
                                     double smoothing_k);

/// Mean per-token negative log probability (nats). When `strip_prefix` is
/// given and the sequence starts with it, those tokens are removed first.
[[nodiscard]] double lm_word_logp(const LanguageModel& lm, const TokenSeq& seq,
                                  std::span<const std::string> strip_prefix = {});

}  // namespace aqa
