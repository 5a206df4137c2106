// Fixture builders and independent oracles shared by the unit and acceptance tests.
#ifndef METCHANGE_TESTS_SUPPORT_HPP
#define METCHANGE_TESTS_SUPPORT_HPP

#include "metchange/corpus.hpp"
#include "metchange/matrix.hpp"
#include "metchange/normalize.hpp"
#include "metchange/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

using metchange::Corpus;
using metchange::Document;
using metchange::Sentence;
using metchange::Token;

inline std::string source_path(const std::string& relative) {
    return std::string(METCHANGE_SOURCE_DIR) + "/" + relative;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("metchange_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// A sentence of already-preprocessed keys such as "a:N".
inline Sentence keyed_sentence(const std::vector<std::string>& keys) {
    Sentence s;
    for (const auto& k : keys) {
        auto colon = k.rfind(':');
        s.tokens.push_back({k.substr(0, colon), k.substr(0, colon), k.substr(colon + 1)});
    }
    return s;
}

inline Document keyed_document(std::string id, int date, const std::vector<std::vector<std::string>>& sentences) {
    Document d{std::move(id), date, {}};
    for (const auto& s : sentences) d.sentences.push_back(keyed_sentence(s));
    return d;
}

inline metchange::TimeSlice keyed_slice(const std::vector<std::vector<std::string>>& sentences,
                                        std::string label = "1700-1800") {
    auto range = metchange::parse_year_range(label);
    Corpus c{keyed_document("d", range.start, sentences)};
    return metchange::slice(c, range, label);
}

// Brute-force co-occurrence counts: every ordered position pair within the
// window, enumerated over the whole sentence.
using PairCounts = std::map<std::pair<std::string, std::string>, std::uint64_t>;

inline PairCounts brute_force_pairs(const std::vector<std::vector<std::string>>& sentences, std::size_t window) {
    PairCounts out;
    for (const auto& s : sentences)
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j) {
                std::size_t dist = i > j ? i - j : j - i;
                if (dist >= 1 && dist <= window) ++out[{s[i], s[j]}];
            }
    return out;
}

inline double formula_entropy(const std::vector<double>& counts) {
    double total = 0;
    for (double c : counts) total += c;
    double h = 0;
    for (double c : counts)
        if (c > 0) h -= (c / total) * std::log2(c / total);
    return h;
}

inline std::map<std::string, double> brute_force_entropies(const PairCounts& pairs) {
    std::map<std::string, std::vector<double>> rows;
    for (const auto& [k, c] : pairs) rows[k.first].push_back(static_cast<double>(c));
    std::map<std::string, double> out;
    for (const auto& [w, counts] : rows) out[w] = formula_entropy(counts);
    return out;
}

// Mean entropy over every n-subset of occurrences, by explicit enumeration.
inline double exhaustive_mon(const std::vector<std::vector<std::string>>& occ, std::size_t n) {
    std::vector<bool> pick(occ.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(n), true);
    double sum = 0;
    std::size_t subsets = 0;
    do {
        std::map<std::string, double> counts;
        for (std::size_t i = 0; i < occ.size(); ++i)
            if (pick[i])
                for (const auto& k : occ[i]) counts[k] += 1;
        std::vector<double> v;
        for (const auto& [k, c] : counts) v.push_back(c);
        sum += formula_entropy(v);
        ++subsets;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return sum / double(subsets);
}

// Simple regression by Cramer's rule on the raw normal equations.
inline std::pair<double, double> cramer_fit(const std::vector<metchange::FrequencyPoint>& pts) {
    double n = double(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        double x = std::log(p.freq);
        sx += x;
        sy += p.entropy;
        sxx += x * x;
        sxy += x * p.entropy;
    }
    double det = n * sxx - sx * sx;
    return {(sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det};
}

// Mid-ranks by counting: rank = #smaller + (#equal + 1) / 2.
inline std::vector<double> counting_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double x : v) {
            if (x < v[i]) ++less;
            if (x == v[i]) ++equal;
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

inline double tie_term(const std::vector<double>& v) {
    std::map<double, double> groups;
    for (double x : v) groups[x] += 1;
    double t = 0;
    for (const auto& [_, c] : groups) t += (c * c * c - c) / 12.0;
    return t;
}

// Textbook tie-corrected Spearman: (Sx + Sy - Sd) / (2 sqrt(Sx Sy)) with
// Sx = (n^3 - n)/12 - sum (t^3 - t)/12.
inline double textbook_spearman(const std::vector<double>& a, const std::vector<double>& b) {
    double n = double(a.size());
    auto ra = counting_ranks(a), rb = counting_ranks(b);
    double d2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    double sx = (n * n * n - n) / 12.0 - tie_term(a);
    double sy = (n * n * n - n) / 12.0 - tie_term(b);
    return (sx + sy - d2) / (2.0 * std::sqrt(sx * sy));
}

// Random keyed sentences over a small vocabulary.
inline std::vector<std::vector<std::string>> random_sentences(std::size_t count, std::uint64_t seed,
                                                              std::size_t vocab = 12, std::size_t max_len = 9) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t len = 1 + rng() % max_len;
        std::vector<std::string> s;
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t w = rng() % vocab;
            s.push_back("w" + std::to_string(w) + (w % 3 == 0 ? ":N" : w % 3 == 1 ? ":V" : ":AD"));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Vertical-format text for a corpus of raw tokens.
inline std::string to_vertical(const Corpus& corpus) {
    std::ostringstream out;
    for (const auto& d : corpus) {
        out << "#doc id=" << d.id << " date=" << d.date << "\n";
        for (const auto& s : d.sentences) {
            for (const auto& t : s.tokens) out << t.surface << '\t' << t.lemma << '\t' << t.pos << '\n';
            out << '\n';
        }
    }
    return out.str();
}

// Synthetic diachronic corpus. Every target occurs equally often in two
// periods (1700-1800 and 1850-1926). In period 1 it draws its four window
// neighbours from its own block of 3 context words. In period 2 the first
// `stable` targets keep that distribution; target i beyond them draws half
// of its neighbours from a disjoint uniform block of about 2 * 1.5^i fresh
// words. The constructed change is the fresh block size (0 for stable words).
struct SyntheticTarget {
    std::string lemma;
    std::size_t fresh = 0; // size of the period-2 context block
};

struct SyntheticCorpus {
    Corpus corpus;
    std::vector<SyntheticTarget> targets;
};

inline SyntheticCorpus synthetic_diachronic(std::uint64_t seed, std::size_t n_targets = 10,
                                            std::size_t occurrences = 100, std::size_t stable = 2) {
    metchange::SplitMix64 rng(seed);
    SyntheticCorpus out;
    auto pick = [&](const std::vector<std::string>& pool) { return pool[metchange::uniform_below(rng, pool.size())]; };
    auto token = [](const std::string& lemma, const std::string& pos) { return Token{lemma, lemma, pos}; };
    const std::vector<std::string> filler{"gehen", "sehen", "stehen"};

    for (std::size_t t = 0; t < n_targets; ++t) {
        SyntheticTarget target{"tgt" + std::to_string(t), 0};
        if (t >= stable) target.fresh = static_cast<std::size_t>(std::lround(2.0 * std::pow(1.5, double(t - stable))));
        std::vector<std::string> own, fresh;
        for (int i = 0; i < 3; ++i) own.push_back(target.lemma + "own" + std::to_string(i));
        for (std::size_t i = 0; i < target.fresh; ++i) fresh.push_back(target.lemma + "new" + std::to_string(i));

        for (int period = 0; period < 2; ++period) {
            Document doc{target.lemma + (period ? "_late" : "_early"), period ? 1880 : 1750, {}};
            for (std::size_t k = 0; k < occurrences; ++k) {
                auto neighbor = [&] {
                    bool from_new = period == 1 && !fresh.empty() && metchange::uniform_below(rng, 2) == 1;
                    return token(from_new ? pick(fresh) : pick(own), "NN");
                };
                Sentence s;
                s.tokens.push_back(neighbor());
                s.tokens.push_back(neighbor());
                s.tokens.push_back(token(target.lemma, "NN"));
                s.tokens.push_back(neighbor());
                s.tokens.push_back(neighbor());
                s.tokens.push_back(token("der", "ART"));
                s.tokens.push_back(token(pick(filler), "VVFIN"));
                doc.sentences.push_back(std::move(s));
            }
            out.corpus.push_back(std::move(doc));
        }
        out.targets.push_back(target);
    }
    return out;
}

inline std::string synthetic_test_set(const std::vector<SyntheticTarget>& targets) {
    std::ostringstream out;
    out << "lexeme\tpos\ttype\tgloss\tdate\tfreq\n";
    for (const auto& t : targets) out << t.lemma << "\tN\tmet\tsynthetic\t1800\t0\n";
    return out.str();
}

// Gold file whose delta orders targets by their fresh block size.
inline std::string synthetic_gold(const std::vector<SyntheticTarget>& targets) {
    std::size_t largest = 1;
    for (const auto& t : targets) largest = std::max(largest, t.fresh);
    std::ostringstream out;
    for (const auto& t : targets) {
        double share = double(t.fresh) / double(largest);
        out << t.lemma << "\tmet\t1700-1800\t0\t1\t-\t1850-1926\t" << share << "\t1\t-\t" << share << "\n";
    }
    return out.str();
}

// 28 targets with `per_period` long sentences in each of two periods, for
// annotation sampling.
inline Corpus annotation_corpus(std::size_t n_targets = 28, std::size_t per_period = 30) {
    Corpus corpus;
    for (std::size_t t = 0; t < n_targets; ++t) {
        std::string lemma = "ziel" + std::to_string(t);
        for (int period = 0; period < 2; ++period)
            for (std::size_t k = 0; k < per_period; ++k) {
                Document d{lemma + (period ? "_L" : "_E") + std::to_string(k), (period ? 1850 : 1700) + int(k), {}};
                Sentence s;
                for (int w = 0; w < 12; ++w)
                    s.tokens.push_back(w == 5 ? Token{lemma, lemma, "NN"}
                                              : Token{"wort" + std::to_string(w), "wort" + std::to_string(w), "NN"});
                d.sentences.push_back(std::move(s));
                corpus.push_back(std::move(d));
            }
    }
    return corpus;
}

} // namespace testsupport

#endif
