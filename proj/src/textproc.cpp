#include "aqa/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "aqa/error.hpp"

namespace aqa {

namespace {

constexpr const char* kBuiltinStopwords[] = {
#include "aqa/stopwords_data.inc"
};

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

// Bytes >= 0x80 are treated as word characters so UTF-8 survives untouched.
bool is_word_char(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

bool is_joiner(unsigned char c) { return c == '-' || c == '\''; }

}  // namespace

std::string TokenSeq::join() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

bool is_valid_token_seq(const TokenSeq& seq) {
    return std::all_of(seq.tokens.begin(), seq.tokens.end(), [](const std::string& t) {
        if (t.empty()) return false;
        return std::none_of(t.begin(), t.end(), [](char ch) {
            auto c = static_cast<unsigned char>(ch);
            return is_space(c) || (c < 0x80 && std::isupper(c));
        });
    });
}

const StopwordSet& default_stopwords() {
    static const StopwordSet set(std::begin(kBuiltinStopwords), std::end(kBuiltinStopwords));
    return set;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open stopword file: " + path);
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r\n");
        out.insert(line.substr(b, e - b + 1));
    }
    return out;
}

TokenSeq tokenize(std::string_view raw, const TokenizerOptions& opts) {
    TokenSeq out;
    std::size_t i = 0;
    const std::size_t n = raw.size();
    while (i < n) {
        while (i < n && is_space(static_cast<unsigned char>(raw[i]))) ++i;
        std::size_t start = i;
        while (i < n && !is_space(static_cast<unsigned char>(raw[i]))) ++i;
        std::string_view chunk = raw.substr(start, i - start);

        std::string cur;
        for (std::size_t j = 0; j < chunk.size(); ++j) {
            auto c = static_cast<unsigned char>(chunk[j]);
            if (is_word_char(c)) {
                cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
                continue;
            }
            bool joins = is_joiner(c) && !cur.empty() && j + 1 < chunk.size() &&
                         is_word_char(static_cast<unsigned char>(chunk[j + 1]));
            if (joins) {
                cur += static_cast<char>(c);
                continue;
            }
            if (!cur.empty()) out.tokens.push_back(std::move(cur));
            cur.clear();
            if (c == ',' && opts.keep_punct_tokens) out.tokens.emplace_back(",");
        }
        if (!cur.empty()) out.tokens.push_back(std::move(cur));
    }
    return out;
}

TokenSeq preprocess(std::string_view raw, const StopwordSet& stopwords,
                    const TokenizerOptions& opts) {
    TokenSeq seq = tokenize(raw, opts);
    std::erase_if(seq.tokens, [&](const std::string& t) { return stopwords.contains(t); });
    return seq;
}

// ---------------------------------------------------------------------------
// Porter stemmer

namespace {

class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view w) : b_(w) { k_ = static_cast<int>(b_.size()) - 1; }

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    // consonant at position i
    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // number of VC sequences in b[0..j]
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return cons(j);
    }

    // cvc at i-2..i where the final c is not w, x or y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1),
                                        static_cast<std::size_t>(len)) != s)
            return false;
        j_ = k_ - len;
        return true;
    }

    void setto(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void r(std::string_view s) {
        if (m() > 0) setto(s);
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses")) k_ -= 2;
            else if (ends("ies")) setto("i");
            else if (b_[static_cast<std::size_t>(k_ - 1)] != 's') --k_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
            if (ends("at")) setto("ate");
            else if (ends("bl")) setto("ble");
            else if (ends("iz")) setto("ize");
            else if (doublec(k_)) {
                --k_;
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else {
                j_ = k_;
                if (m() == 1 && cvc(k_)) setto("e");
            }
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("ational")) { r("ate"); break; }
                if (ends("tional")) { r("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { r("ence"); break; }
                if (ends("anci")) { r("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { r("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { r("ble"); break; }
                if (ends("alli")) { r("al"); break; }
                if (ends("entli")) { r("ent"); break; }
                if (ends("eli")) { r("e"); break; }
                if (ends("ousli")) { r("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { r("ize"); break; }
                if (ends("ation")) { r("ate"); break; }
                if (ends("ator")) { r("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { r("al"); break; }
                if (ends("iveness")) { r("ive"); break; }
                if (ends("fulness")) { r("ful"); break; }
                if (ends("ousness")) { r("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { r("al"); break; }
                if (ends("iviti")) { r("ive"); break; }
                if (ends("biliti")) { r("ble"); break; }
                break;
            default: break;
        }
    }

    void step3() {
        switch (b_[static_cast<std::size_t>(k_)]) {
            case 'e':
                if (ends("icate")) { r("ic"); break; }
                if (ends("ative")) { r(""); break; }
                if (ends("alize")) { r("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { r("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { r("ic"); break; }
                if (ends("ful")) { r(""); break; }
                break;
            case 's':
                if (ends("ness")) { r(""); break; }
                break;
            default: break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance")) break;
                if (ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able")) break;
                if (ends("ible")) break;
                return;
            case 'n':
                if (ends("ant")) break;
                if (ends("ement")) break;
                if (ends("ment")) break;
                if (ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j_ >= 0 &&
                    (b_[static_cast<std::size_t>(j_)] == 's' || b_[static_cast<std::size_t>(j_)] == 't'))
                    break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate")) break;
                if (ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default: return;
        }
        if (m() > 1) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
        }
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && doublec(k_) && m() > 1) --k_;
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    std::string b_;
    int k_ = 0;
    int j_ = 0;
};

}  // namespace

std::string stem(std::string_view token) {
    if (token.size() <= 2) return std::string(token);
    return PorterStemmer(token).run();
}

// ---------------------------------------------------------------------------
// character trigrams

std::vector<std::string> char_trigrams(std::string_view token) {
    std::string padded;
    padded.reserve(token.size() + 2);
    padded += '#';
    padded += token;
    padded += '#';
    std::vector<std::string> grams;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) grams.push_back(padded.substr(i, 3));
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    return grams;
}

double trigram_jaccard(std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    auto ga = char_trigrams(a);
    auto gb = char_trigrams(b);
    std::vector<std::string> inter;
    std::set_intersection(ga.begin(), ga.end(), gb.begin(), gb.end(), std::back_inserter(inter));
    std::size_t uni = ga.size() + gb.size() - inter.size();
    return uni == 0 ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// n-gram language model

LanguageModel::LanguageModel(std::span<const TokenSeq> corpus, int order, double smoothing_k)
    : order_(order), k_(smoothing_k) {
    if (corpus.empty()) throw Error(ErrorKind::invalid_argument, "empty training corpus");
    if (order < 1) throw Error(ErrorKind::invalid_argument, "language model order must be >= 1");
    if (!(smoothing_k > 0.0)) throw Error(ErrorKind::invalid_argument, "smoothing_k must be > 0");

    std::set<std::string> v;
    for (const auto& s : corpus)
        for (const auto& t : s.tokens) v.insert(t);
    vocab_.assign(v.begin(), v.end());
    vocab_set_.insert(vocab_.begin(), vocab_.end());

    for (const auto& s : corpus) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto hist = std::span<const std::string>(s.tokens).first(i);
            Key key = history_key(hist);
            counts_[key][s.tokens[i]] += 1.0;
            history_totals_[key] += 1.0;
        }
    }
}

std::string LanguageModel::canon(std::string_view w) const {
    if (w == kBos) return std::string(kBos);
    if (vocab_set_.contains(std::string(w))) return std::string(w);
    return std::string(kUnk);
}

LanguageModel::Key LanguageModel::history_key(std::span<const std::string> history) const {
    const auto need = static_cast<std::size_t>(order_ - 1);
    Key key(need, std::string(kBos));
    std::size_t take = std::min(need, history.size());
    for (std::size_t i = 0; i < take; ++i)
        key[need - take + i] = canon(history[history.size() - take + i]);
    return key;
}

double LanguageModel::prob(std::span<const std::string> history, std::string_view word) const {
    Key key = history_key(history);
    const double v = static_cast<double>(support_size());
    double total = 0.0;
    double c = 0.0;
    if (auto it = history_totals_.find(key); it != history_totals_.end()) {
        total = it->second;
        const auto& row = counts_.at(key);
        if (auto jt = row.find(canon(word)); jt != row.end()) c = jt->second;
    }
    return (c + k_) / (total + k_ * v);
}

std::vector<double> LanguageModel::token_nll(const TokenSeq& seq) const {
    std::vector<double> out;
    out.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        auto hist = std::span<const std::string>(seq.tokens).first(i);
        out.push_back(-std::log(prob(hist, seq.tokens[i])));
    }
    return out;
}

LanguageModel build_lm(std::span<const TokenSeq> corpus, int order, double smoothing_k) {
    return LanguageModel(corpus, order, smoothing_k);
}

double lm_word_logp(const LanguageModel& lm, const TokenSeq& seq,
                    std::span<const std::string> strip_prefix) {
    std::size_t skip = 0;
    if (!strip_prefix.empty() && seq.size() >= strip_prefix.size() &&
        std::equal(strip_prefix.begin(), strip_prefix.end(), seq.tokens.begin()))
        skip = strip_prefix.size();
    if (seq.size() <= skip) throw Error(ErrorKind::data, "no scorable tokens");
    TokenSeq rest(std::vector<std::string>(seq.tokens.begin() + static_cast<std::ptrdiff_t>(skip),
                                           seq.tokens.end()));
    auto nll = lm.token_nll(rest);
    double sum = 0.0;
    for (double x : nll) sum += x;
    return sum / static_cast<double>(nll.size());
}

}  // namespace aqa
