// Acceptance suite: one PASS/FAIL line per criterion.
#include "metchange/annotation.hpp"
#include "metchange/commands.hpp"
#include "metchange/config.hpp"
#include "metchange/eval.hpp"
#include "metchange/matrix.hpp"
#include "metchange/measures.hpp"
#include "metchange/normalize.hpp"
#include "support.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace metchange;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome entropy_oracle() {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    auto sentences = testsupport::random_sentences(20, 11);
    auto m = build_matrix(testsupport::keyed_slice(sentences));
    auto expected = testsupport::brute_force_entropies(testsupport::brute_force_pairs(sentences, 2));
    double worst = 0;
    for (const auto& [word, h] : expected) {
        double got = entropy(m, word);
        worst = std::max(worst, std::abs(got - h));
        auto id = m.find(word);
        double bound = std::log2(double(m.row(*id).size()));
        o.require(got >= 0 && got <= bound + 1e-12, word + " outside [0, log2 types]");
    }
    o.require(worst <= 1e-12, fmt::format("max error {:.3g}", worst));

    auto uniform = build_matrix(testsupport::keyed_slice({{"a:N", "b:N", "t:N", "c:N", "d:N"}}));
    o.require(entropy(uniform, "t:N") == 2.0, "uniform 4-context row is not 2 bits");
    double elapsed = seconds_since(start);
    o.require(elapsed < 1.0, fmt::format("took {:.2f} s", elapsed));
    if (o.pass) o.detail = fmt::format("{} words, max error {:.1e}, {:.3f} s", expected.size(), worst, elapsed);
    return o;
}

Outcome scale_invariance() {
    Outcome o;
    auto m = build_matrix(testsupport::keyed_slice(testsupport::random_sentences(20, 11)));
    auto m7 = m.scaled(7);
    std::size_t words = 0;
    for (KeyId id = 0; id < m.vocabulary_size(); ++id) {
        const auto& w = m.key(id);
        if (m.row(id).empty()) continue;
        ++words;
        o.require(std::abs(entropy(m, w) - entropy(m7, w)) <= 1e-12, "H changed for " + w);

        auto ppmi = association(m, w, Association::PPMI);
        auto ppmi7 = association(m7, w, Association::PPMI);
        o.require(ppmi.size() == ppmi7.size(), "PPMI support changed for " + w);
        for (std::size_t i = 0; i < std::min(ppmi.size(), ppmi7.size()); ++i) {
            o.require(ppmi[i].context == ppmi7[i].context, "PPMI order changed for " + w);
            o.require(std::abs(ppmi[i].value - ppmi7[i].value) <= 1e-12, "PPMI changed for " + w);
        }

        // PMI of every observed pair, recovered as PLMI / P(w,c).
        auto plmi = association(m, w, Association::PLMI);
        auto plmi7 = association(m7, w, Association::PLMI);
        o.require(plmi.size() == plmi7.size(), "PLMI support changed for " + w);
        for (std::size_t i = 0; i < std::min(plmi.size(), plmi7.size()); ++i) {
            o.require(plmi[i].context == plmi7[i].context, "PLMI ranking changed for " + w);
            double p = double(m.count(w, plmi[i].context)) / double(m.total_pairs());
            double p7 = double(m7.count(w, plmi7[i].context)) / double(m7.total_pairs());
            o.require(std::abs(plmi[i].value / p - plmi7[i].value / p7) <= 1e-12, "PMI changed for " + w);
        }

        o.require(std::abs(second_order_entropy(m, w) - second_order_entropy(m7, w)) <= 1e-12,
                  "H2 changed for " + w);
    }
    if (o.pass) o.detail = fmt::format("{} words, counts x7", words);
    return o;
}

Outcome mon_oracle() {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    auto ts = testsupport::keyed_slice({{"a:N", "b:N", "t:N", "c:N", "d:N"},
                                        {"t:N", "a:N", "a:N"},
                                        {"e:N", "t:N"},
                                        {"b:N", "b:N", "t:N", "f:N"},
                                        {"g:N", "h:N", "t:N", "a:N"},
                                        {"c:N", "t:N", "c:N", "e:N", "i:N"}});
    auto occ = occurrence_contexts(ts, "t:N");
    o.require(occ.size() == 6, "fixture does not have 6 occurrences");
    double exact = testsupport::exhaustive_mon(occ, 2);
    double sampled = mon_entropy(ts, "t:N", MonConfig{2, 50000, 1, 1});
    o.require(std::abs(sampled - exact) <= 0.01, fmt::format("sampled {:.4f} vs exact {:.4f}", sampled, exact));
    double full = mon_entropy(ts, "t:N", MonConfig{6, 1000, 1, 1});
    o.require(full == entropy(build_matrix(ts), "t:N"), "n = occurrences differs from full-row H");
    double elapsed = seconds_since(start);
    o.require(elapsed < 10.0, fmt::format("took {:.2f} s", elapsed));
    if (o.pass) o.detail = fmt::format("sampled {:.4f}, exact {:.4f}, {:.2f} s", sampled, exact, elapsed);
    return o;
}

Outcome ols_recovery() {
    Outcome o;
    std::vector<FrequencyPoint> exact;
    for (int f = 1; f <= 300; ++f)
        exact.push_back({fmt::format("w{:03}:N", f), double(f), 1.3 + 0.42 * std::log(double(f))});
    auto fit = fit_log_linear(exact);
    o.require(std::abs(fit.alpha - 1.3) <= 1e-9 && std::abs(fit.beta - 0.42) <= 1e-9,
              fmt::format("fit ({}, {})", fit.alpha, fit.beta));
    double worst = 0;
    for (const auto& p : exact) worst = std::max(worst, std::abs(ols_delta(exact, p.key, 50).delta));
    o.require(worst <= 1e-9, fmt::format("largest delta {:.3g}", worst));

    std::mt19937_64 rng(5);
    double worst_random = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FrequencyPoint> pts;
        for (int i = 0; i < 200; ++i)
            pts.push_back({fmt::format("r{}:N", i), double(1 + rng() % 100000), double(rng() % 100000) / 10000.0});
        auto got = fit_log_linear(pts);
        auto [alpha, beta] = testsupport::cramer_fit(pts);
        worst_random = std::max({worst_random, std::abs(got.alpha - alpha), std::abs(got.beta - beta)});
    }
    o.require(worst_random <= 1e-10, fmt::format("random fits differ by {:.3g}", worst_random));
    if (o.pass) o.detail = fmt::format("max delta {:.1e}, max oracle gap {:.1e}", worst, worst_random);
    return o;
}

Outcome spearman_check() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::size_t compared = 0;
    double worst = 0;
    while (compared < 1000) {
        std::size_t n = 3 + rng() % 30;
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = double(rng() % 8);
        for (auto& x : b) x = double(rng() % 40);
        double full = double(n * n * n - n);
        if (testsupport::tie_term(a) * 12 == full || testsupport::tie_term(b) * 12 == full) continue;
        worst = std::max(worst, std::abs(spearman_rho(a, b) - testsupport::textbook_spearman(a, b)));
        ++compared;
    }
    o.require(worst <= 1e-12, fmt::format("max error {:.3g}", worst));
    std::vector<double> up{1, 2, 3, 4, 5, 6, 7}, down{7, 6, 5, 4, 3, 2, 1};
    o.require(spearman_rho(up, up) == 1.0, "identical rankings are not 1");
    o.require(spearman_rho(up, down) == -1.0, "reversed rankings are not -1");
    if (o.pass) o.detail = fmt::format("{} tied samples, max error {:.1e}", compared, worst);
    return o;
}

Outcome kappa_check() {
    Outcome o;
    auto rows = [](std::initializer_list<std::initializer_list<int>> in) {
        std::vector<std::vector<std::optional<int>>> out;
        for (auto r : in) out.emplace_back(r.begin(), r.end());
        return out;
    };
    // P-bar = 2/3, Pe = 41/81, kappa = 13/40.
    auto k = fleiss_kappa(rows({{1, 1, 1}, {0, 0, 0}, {1, 1, 0}, {0, 0, 1}, {1, 0, 0}, {1, 1, 1}}));
    o.require(k.has_value() && std::abs(*k - 13.0 / 40.0) <= 1e-12, "hand oracle mismatch");
    o.require(!fleiss_kappa(rows({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}})).has_value(), "all-0 input has a kappa");
    o.require(!fleiss_kappa(rows({{1, 1}, {1, 1}})).has_value(), "all-1 input has a kappa");
    if (o.pass) o.detail = fmt::format("kappa {:.12f}, undefined on one category", *k);
    return o;
}

Outcome gold_round_trip() {
    Outcome o;
    std::ifstream items(testsupport::source_path("data/fixtures/donnerwetter_items.tsv"));
    std::ifstream judged(testsupport::source_path("data/fixtures/donnerwetter_judgments.tsv"));
    auto stats = tally_judgments(read_judgments(judged), read_display_orders(items), {"A1", "A2"});
    auto gold = read_gold_file(testsupport::source_path("data/gold.tsv"));
    const GoldEntry* row = nullptr;
    for (const auto& g : gold)
        if (g.lexeme == "Donnerwetter") row = &g;
    o.require(row != nullptr, "Donnerwetter missing from the gold file");
    o.require(stats.count("Donnerwetter:N") == 1, "no tally for Donnerwetter");
    if (!o.pass) return o;
    const auto& s = stats.at("Donnerwetter:N");
    auto near = [](std::optional<double> got, double want) { return got && std::abs(*got - want) <= 0.005; };
    o.require(near(s.later.pct_plus, row->pct_plus_late), "later %+ differs");
    o.require(std::abs(s.later.pct_agree - row->pct_agree_late) <= 0.005, "later %A differs");
    o.require(near(s.later.kappa, *row->kappa_late), "later kappa differs");
    o.require(near(s.earlier.pct_plus, row->pct_plus_early), "earlier %+ differs");
    o.require(std::abs(s.earlier.pct_agree - row->pct_agree_early) <= 0.005, "earlier %A differs");
    o.require(!s.earlier.kappa && !row->kappa_early, "earlier kappa should be undefined");

    auto order = gold_order(gold);
    for (std::size_t i = 0; i < order.size(); ++i) o.require(order[i] == i, "gold order differs from the table");
    o.require(gold.size() == 28, "gold file does not have 28 rows");
    if (o.pass)
        o.detail = fmt::format("%+ {:.2f}, %A {:.2f}, kappa {:.2f}; 28 rows in table order", *s.later.pct_plus,
                               s.later.pct_agree, *s.later.kappa);
    return o;
}

Outcome synthetic_detection() {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    double lowest = 1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto synth = testsupport::synthetic_diachronic(seed, 10, 100);
        auto corpus = preprocess(synth.corpus);
        auto early = build_matrix(slice(corpus, {1700, 1800}));
        auto late = build_matrix(slice(corpus, {1850, 1926}));
        std::vector<double> predicted, gold;
        for (const auto& t : synth.targets) {
            std::string key = t.lemma + ":N";
            predicted.push_back(entropy(late, key) - entropy(early, key));
            gold.push_back(double(t.fresh));
        }
        double rho = spearman_rho(predicted, gold);
        lowest = std::min(lowest, rho);
        o.require(rho > 0.8, fmt::format("seed {}: rho {:.3f}", seed, rho));
    }
    double elapsed = seconds_since(start);
    o.require(elapsed < 30.0, fmt::format("took {:.2f} s", elapsed));
    if (o.pass) o.detail = fmt::format("10 seeds x 10 targets, lowest rho {:.3f}, {:.2f} s", lowest, elapsed);
    return o;
}

Outcome determinism() {
    Outcome o;
    auto dir = testsupport::scratch_dir("acceptance_determinism");
    auto synth = testsupport::synthetic_diachronic(4, 10, 60);
    std::ofstream(dir / "corpus.vrt") << testsupport::to_vertical(synth.corpus);
    std::ofstream(dir / "test_set.tsv") << testsupport::synthetic_test_set(synth.targets);
    std::ofstream(dir / "gold.tsv") << testsupport::synthetic_gold(synth.targets);
    Config c;
    c.set("corpus", (dir / "corpus.vrt").string());
    c.set("test_set", (dir / "test_set.tsv").string());
    c.set("gold", (dir / "gold.tsv").string());
    c.set("output_dir", (dir / "out").string());
    c.set("mon.k", "300");
    c.set("ols.window_n", "30");
    c.set("spearman.resamples", "2000");
    c.set("threads", "4");

    auto run = [&] {
        std::ostringstream log;
        run_build(c, log);
        run_score(c, log);
        run_eval(c, log);
        std::map<std::string, std::string> files;
        for (const auto& entry : fs::recursive_directory_iterator(dir / "out"))
            if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
        return files;
    };
    auto first = run();
    auto second = run();
    o.require(first.size() >= 8, fmt::format("only {} output files", first.size()));
    for (const auto& [name, bytes] : first) {
        auto it = second.find(name);
        o.require(it != second.end() && it->second == bytes, name + " differs between runs");
    }
    o.require(first.size() == second.size(), "different file sets");
    if (o.pass) o.detail = fmt::format("{} files byte-identical", first.size());
    return o;
}

Outcome annotation_sampling() {
    Outcome o;
    auto corpus = testsupport::annotation_corpus(28, 30);
    auto early = slice(corpus, {1600, 1800});
    auto late = slice(corpus, {1800, 1926});
    std::vector<AnnotationTarget> targets;
    for (int t = 0; t < 28; ++t) targets.push_back({"ziel" + std::to_string(t) + ":N", &early, &late});
    auto set = sample_annotation_set(targets, {}, 17);
    o.require(set.size() == 560, fmt::format("{} pairs", set.size()));

    std::map<std::string, std::vector<const ContextPair*>> by_target;
    for (const auto& p : set) {
        by_target[p.target].push_back(&p);
        o.require(p.earlier.date < p.later.date, fmt::format("item {} is not chronological", p.item_id));
    }
    for (auto& [target, pairs] : by_target) {
        // Pairs of a target in sampling order follow the later context's date.
        std::sort(pairs.begin(), pairs.end(), [](auto* a, auto* b) { return a->later.date < b->later.date; });
        for (std::size_t i = 0; i < pairs.size(); ++i)
            o.require(pairs[i]->display_order == (i % 2 ? DisplayOrder::LE : DisplayOrder::EL),
                      target + " does not alternate display order");
    }

    std::ostringstream a, b;
    write_annotation_sheet(a, set);
    write_annotation_sheet(b, sample_annotation_set(targets, {}, 17));
    o.require(a.str() == b.str(), "same seed gives a different sheet");
    std::ostringstream other;
    write_annotation_sheet(other, sample_annotation_set(targets, {}, 18));
    o.require(a.str() != other.str(), "seed has no effect");
    if (o.pass) o.detail = "560 pairs, alternating order, chronological, seeded";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 entropy oracle", entropy_oracle},
        {"AC2 scale invariance", scale_invariance},
        {"AC3 MON exhaustive oracle", mon_oracle},
        {"AC4 OLS recovery", ols_recovery},
        {"AC5 Spearman correctness", spearman_check},
        {"AC6 Fleiss kappa", kappa_check},
        {"AC7 gold row round-trip", gold_round_trip},
        {"AC8 synthetic change detection", synthetic_detection},
        {"AC9 determinism", determinism},
        {"AC10 annotation sampling", annotation_sampling},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        fmt::print("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
