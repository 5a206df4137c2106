#include "metchange/eval.hpp"

#include "metchange/error.hpp"
#include "metchange/rng.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>

namespace metchange {

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

std::vector<double> centered(std::vector<double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
    return v;
}

double sum_squares(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double pearson_centered(const std::vector<double>& a, const std::vector<double>& b, double norm) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return std::clamp(s / norm, -1.0, 1.0);
}

struct RankPair {
    std::vector<double> a, b;
    double norm;
};

RankPair prepare(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("spearman: sequences differ in length");
    if (a.size() < 2) throw UndefinedMeasure("spearman: fewer than two pairs");
    RankPair rp{centered(average_ranks(a)), centered(average_ranks(b)), 0.0};
    const double sa = sum_squares(rp.a), sb = sum_squares(rp.b);
    if (sa == 0.0 || sb == 0.0) throw UndefinedMeasure("spearman: one side has no rank variance");
    rp.norm = std::sqrt(sa * sb);
    return rp;
}

} // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    RankPair rp = prepare(a, b);
    return pearson_centered(rp.a, rp.b, rp.norm);
}

SpearmanResult spearman(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                        std::uint64_t seed, std::size_t threads) {
    RankPair rp = prepare(a, b);
    SpearmanResult r;
    r.rho = pearson_centered(rp.a, rp.b, rp.norm);
    r.resamples = resamples;
    if (resamples == 0) return r;

    const double threshold = std::abs(r.rho) - 1e-12;
    auto count_range = [&](std::size_t begin, std::size_t end, std::size_t& hits) {
        std::vector<double> perm;
        for (std::size_t s = begin; s < end; ++s) {
            perm = rp.b;
            SplitMix64 rng(derive_seed(seed, s));
            shuffle(perm, rng);
            if (std::abs(pearson_centered(rp.a, perm, rp.norm)) >= threshold) ++hits;
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, resamples));
    std::vector<std::size_t> hits(threads, 0);
    if (threads == 1) {
        count_range(0, resamples, hits[0]);
    } else {
        std::vector<std::thread> workers;
        std::size_t chunk = (resamples + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t b0 = std::min(resamples, t * chunk), e0 = std::min(resamples, b0 + chunk);
            workers.emplace_back([&, t, b0, e0] { count_range(b0, e0, hits[t]); });
        }
        for (auto& w : workers) w.join();
    }
    std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
    r.p_value = static_cast<double>(1 + total) / static_cast<double>(1 + resamples);
    return r;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<std::optional<int>>>& ratings) {
    std::vector<const std::vector<std::optional<int>>*> complete;
    for (const auto& item : ratings)
        if (std::all_of(item.begin(), item.end(), [](const auto& v) { return v.has_value(); }))
            complete.push_back(&item);
    if (complete.empty()) throw UndefinedMeasure("Fleiss' kappa: every item has a skipped judgment");
    const std::size_t raters = complete.front()->size();
    if (raters < 2) throw UndefinedMeasure("Fleiss' kappa needs at least two annotators");
    if (complete.size() < 2) throw UndefinedMeasure("Fleiss' kappa needs at least two items");
    for (auto* item : complete)
        if (item->size() != raters) throw Error("Fleiss' kappa: items rated by different numbers of annotators");

    std::map<int, double> category_totals;
    double p_bar = 0.0;
    const double m = static_cast<double>(raters);
    for (auto* item : complete) {
        std::map<int, double> counts;
        for (const auto& v : *item) counts[*v] += 1.0;
        double agree = 0.0;
        for (const auto& [cat, n] : counts) {
            agree += n * n;
            category_totals[cat] += n;
        }
        p_bar += (agree - m) / (m * (m - 1.0));
    }
    const double items = static_cast<double>(complete.size());
    p_bar /= items;
    double p_e = 0.0;
    for (const auto& [cat, n] : category_totals) {
        double p = n / (items * m);
        p_e += p * p;
    }
    if (p_e >= 1.0 - 1e-12) return std::nullopt;
    return (p_bar - p_e) / (1.0 - p_e);
}

AnnotationStats annotation_stats(const std::vector<std::vector<std::optional<int>>>& ratings) {
    AnnotationStats s;
    for (const auto& item : ratings) {
        if (item.empty() || !std::all_of(item.begin(), item.end(), [](const auto& v) { return v.has_value(); }))
            continue;
        ++s.items;
        bool same = std::all_of(item.begin(), item.end(), [&](const auto& v) { return *v == *item.front(); });
        if (same) {
            ++s.perfect_agreement;
            if (*item.front() == 1) ++s.perfect_plus;
        }
    }
    if (s.items == 0) throw UndefinedMeasure("no item has a complete set of judgments");
    s.pct_agree = static_cast<double>(s.perfect_agreement) / static_cast<double>(s.items);
    if (s.perfect_agreement > 0)
        s.pct_plus = static_cast<double>(s.perfect_plus) / static_cast<double>(s.perfect_agreement);
    try {
        s.kappa = fleiss_kappa(ratings);
    } catch (const UndefinedMeasure&) {
        s.kappa = std::nullopt;
    }
    return s;
}

std::string_view to_string(Direction d) { return d == Direction::M2_of_M1 ? "M2_of_M1" : "M1_of_M2"; }

Direction parse_direction(std::string_view s) {
    if (s == "M2_of_M1") return Direction::M2_of_M1;
    if (s == "M1_of_M2") return Direction::M1_of_M2;
    throw FormatError("direction must be M2_of_M1 or M1_of_M2, got '" + std::string(s) + "'");
}

std::string_view to_string(DisplayOrder o) { return o == DisplayOrder::EL ? "EL" : "LE"; }

DisplayOrder parse_display_order(std::string_view s) {
    if (s == "EL") return DisplayOrder::EL;
    if (s == "LE") return DisplayOrder::LE;
    throw FormatError("display order must be EL or LE, got '" + std::string(s) + "'");
}

std::vector<Judgment> read_judgments(std::istream& in) {
    std::vector<Judgment> out;
    std::set<std::tuple<long long, std::string, Direction>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (line.empty() || line.starts_with("#") || line.starts_with("item_id\t")) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 5) throw FormatError("judgment rows need 5 columns", line_no);
        try {
            Judgment j;
            j.item_id = text::parse_int(f[0], "item_id");
            j.target = f[1];
            j.annotator = f[2];
            j.direction = parse_direction(f[3]);
            auto v = text::trim(f[4]);
            if (v != "-") {
                auto n = text::parse_int(v, "judgment");
                if (n != 0 && n != 1) throw FormatError("judgment must be 0, 1 or '-'");
                j.value = static_cast<int>(n);
            }
            if (!seen.emplace(j.item_id, j.annotator, j.direction).second)
                throw FormatError("duplicate judgment for item " + std::to_string(j.item_id));
            out.push_back(std::move(j));
        } catch (const FormatError& e) {
            throw FormatError(e.message(), line_no);
        }
    }
    return out;
}

namespace {

bool is_later(Direction d, DisplayOrder o) {
    // EL: context 2 is the later one, so "M2 of M1" judges the later context.
    return (d == Direction::M2_of_M1) == (o == DisplayOrder::EL);
}

using Ratings = std::vector<std::vector<std::optional<int>>>;

struct Grouped {
    // item -> annotator -> value
    std::map<long long, std::map<std::string, std::optional<int>>> earlier, later;
};

Ratings to_ratings(const std::map<long long, std::map<std::string, std::optional<int>>>& items,
                   const std::vector<std::string>& annotators) {
    Ratings r;
    for (const auto& [id, by_annotator] : items) {
        std::vector<std::optional<int>> row;
        for (const auto& a : annotators) {
            auto it = by_annotator.find(a);
            row.push_back(it == by_annotator.end() ? std::nullopt : it->second);
        }
        r.push_back(std::move(row));
    }
    return r;
}

std::vector<std::string> included_annotators(const std::vector<Judgment>& judgments,
                                             const std::vector<std::string>& annotators) {
    if (!annotators.empty()) return annotators;
    std::set<std::string> all;
    for (const auto& j : judgments) all.insert(j.annotator);
    return {all.begin(), all.end()};
}

template <class KeyFn>
std::map<std::string, Grouped> group(const std::vector<Judgment>& judgments,
                                     const std::map<long long, DisplayOrder>& orders,
                                     const std::vector<std::string>& annotators, KeyFn key) {
    std::set<std::string> keep(annotators.begin(), annotators.end());
    std::map<std::string, Grouped> groups;
    for (const auto& j : judgments) {
        if (!keep.count(j.annotator)) continue;
        auto it = orders.find(j.item_id);
        if (it == orders.end()) throw KeyMismatch("judged item " + std::to_string(j.item_id) + " has no display order");
        auto& g = groups[key(j)];
        (is_later(j.direction, it->second) ? g.later : g.earlier)[j.item_id][j.annotator] = j.value;
    }
    return groups;
}

PeriodStats stats_of(const Grouped& g, const std::vector<std::string>& annotators) {
    return {annotation_stats(to_ratings(g.earlier, annotators)), annotation_stats(to_ratings(g.later, annotators))};
}

} // namespace

std::map<std::string, PeriodStats> tally_judgments(const std::vector<Judgment>& judgments,
                                                   const std::map<long long, DisplayOrder>& orders,
                                                   const std::vector<std::string>& annotators) {
    auto included = included_annotators(judgments, annotators);
    std::map<std::string, PeriodStats> out;
    for (const auto& [target, g] : group(judgments, orders, included, [](const Judgment& j) { return j.target; }))
        out.emplace(target, stats_of(g, included));
    return out;
}

PeriodStats pooled_stats(const std::vector<Judgment>& judgments, const std::map<long long, DisplayOrder>& orders,
                         const std::vector<std::string>& annotators) {
    auto included = included_annotators(judgments, annotators);
    auto groups = group(judgments, orders, included, [](const Judgment&) { return std::string("all"); });
    if (groups.empty()) throw UndefinedMeasure("no judgments from the included annotators");
    return stats_of(groups.at("all"), included);
}

namespace {

std::optional<double> parse_optional(const std::string& s, std::string_view what) {
    if (text::trim(s) == "-") return std::nullopt;
    return text::parse_double(s, what);
}

std::string render_optional(const std::optional<double>& v) { return v ? text::fixed(*v) : "-"; }

} // namespace

std::vector<GoldEntry> read_gold(std::istream& in, double delta_tolerance) {
    std::vector<GoldEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (line.empty() || line.starts_with("#") || line.starts_with("lexeme\t")) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 11) throw FormatError("gold rows need 11 columns", line_no);
        try {
            GoldEntry g;
            g.lexeme = std::string(text::trim(f[0]));
            g.type = parse_target_type(text::trim(f[1]));
            g.earlier_period = parse_year_range(f[2]);
            g.pct_plus_early = text::parse_double(f[3], "early %+");
            g.pct_agree_early = text::parse_double(f[4], "early %A");
            g.kappa_early = parse_optional(f[5], "early kappa");
            g.later_period = parse_year_range(f[6]);
            g.pct_plus_late = text::parse_double(f[7], "late %+");
            g.pct_agree_late = text::parse_double(f[8], "late %A");
            g.kappa_late = parse_optional(f[9], "late kappa");
            g.delta_pct_plus = text::parse_double(f[10], "delta %+");
            for (double v : {g.pct_plus_early, g.pct_agree_early, g.pct_plus_late, g.pct_agree_late})
                if (v < 0.0 || v > 1.0) throw FormatError("shares must lie in [0, 1]");
            if (std::abs(g.delta_pct_plus - (g.pct_plus_late - g.pct_plus_early)) > delta_tolerance + 1e-12)
                throw FormatError("delta %+ of '" + g.lexeme + "' disagrees with late - early");
            out.push_back(std::move(g));
        } catch (const FormatError& e) {
            throw FormatError(e.message(), line_no);
        }
    }
    return out;
}

std::vector<GoldEntry> read_gold_file(const std::string& path, double delta_tolerance) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open gold file: " + path);
    try {
        return read_gold(in, delta_tolerance);
    } catch (const FormatError& e) {
        throw FormatError(e.message(), e.line(), path);
    }
}

void write_gold_header(std::ostream& out) {
    out << "lexeme\ttype\tearly_time\tearly_pct_plus\tearly_pct_agree\tearly_kappa\t"
           "late_time\tlate_pct_plus\tlate_pct_agree\tlate_kappa\tdelta_pct_plus\n";
}

void write_gold_row(std::ostream& out, const GoldEntry& e) {
    out << e.lexeme << '\t' << to_string(e.type) << '\t' << e.earlier_period.label() << '\t'
        << text::fixed(e.pct_plus_early) << '\t' << text::fixed(e.pct_agree_early) << '\t'
        << render_optional(e.kappa_early) << '\t' << e.later_period.label() << '\t' << text::fixed(e.pct_plus_late)
        << '\t' << text::fixed(e.pct_agree_late) << '\t' << render_optional(e.kappa_late) << '\t'
        << text::fixed(e.delta_pct_plus) << '\n';
}

std::vector<std::size_t> gold_order(const std::vector<GoldEntry>& gold) {
    std::vector<std::size_t> idx(gold.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return gold[a].delta_pct_plus > gold[b].delta_pct_plus; });
    return idx;
}

std::vector<EvalCell> evaluate(const std::vector<ChangeScore>& predictions, const std::vector<GoldEntry>& gold,
                               const EvalOptions& options) {
    std::map<std::string, const GoldEntry*> by_lemma;
    for (const auto& g : gold) by_lemma[g.lexeme] = &g;

    std::vector<std::string> unknown;
    for (const auto& p : predictions)
        if (!by_lemma.count(p.target.lemma)) unknown.push_back(p.target.key());
    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
        throw KeyMismatch("predicted targets missing from the gold standard: " + text::join(unknown, ", "));
    }

    std::vector<EvalCell> cells;
    for (Measure m : all_measures()) {
        std::vector<ChangeScore> for_measure;
        for (const auto& p : predictions)
            if (p.measure == m) for_measure.push_back(p);
        if (for_measure.empty()) continue;

        for (const auto& subset : options.subsets) {
            auto ranked = rank_targets(for_measure, subset, options.subset_by);
            EvalCell cell;
            cell.measure = m;
            cell.subset = subset;
            cell.n = ranked.size();

            std::set<std::string> predicted;
            std::vector<double> d, delta;
            for (const auto& s : ranked) {
                predicted.insert(s.target.lemma);
                d.push_back(s.d);
                delta.push_back(by_lemma.at(s.target.lemma)->delta_pct_plus);
            }
            if (subset == "all" || options.subset_by == SubsetBy::period1)
                for (const auto& g : gold)
                    if ((subset == "all" || g.earlier_period.label() == subset) && !predicted.count(g.lexeme))
                        cell.missing.push_back(g.lexeme);
            try {
                auto r = spearman(d, delta, options.resamples,
                                  derive_seed(options.seed, std::string(to_string(m)) + "/" + subset),
                                  options.threads);
                cell.rho = r.rho;
                cell.p_value = r.p_value;
            } catch (const UndefinedMeasure&) {
                cell.rho = std::nullopt;
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_eval_tsv(std::ostream& out, const std::vector<EvalCell>& cells) {
    out << "measure\tsubset\tn\trho\tp_value\tstars\tmissing\n";
    for (const auto& c : cells) {
        out << to_string(c.measure) << '\t' << c.subset << '\t' << c.n << '\t' << (c.rho ? text::fixed(*c.rho) : "-")
            << '\t' << (c.rho ? text::fixed(c.p_value) : "-") << '\t' << (c.rho ? significance_stars(c.p_value) : "")
            << '\t' << (c.missing.empty() ? "-" : text::join(c.missing, ",")) << '\n';
    }
}


void write_eval_text(std::ostream& out, const std::vector<EvalCell>& cells, const std::vector<std::string>& subsets) {
    const int first = 8, width = 12;
    out << fmt::format("{:<{}}", "", first);
    for (const auto& s : subsets) out << fmt::format("{:>{}}", s, width);
    out << '\n';
    for (Measure m : all_measures()) {
        bool any = std::any_of(cells.begin(), cells.end(), [&](const EvalCell& c) { return c.measure == m; });
        if (!any) continue;
        out << fmt::format("{:<{}}", to_string(m), first);
        for (const auto& s : subsets) {
            auto it = std::find_if(cells.begin(), cells.end(),
                                   [&](const EvalCell& c) { return c.measure == m && c.subset == s; });
            std::string v = "-";
            if (it != cells.end() && it->rho) v = text::short_decimal(*it->rho) + significance_stars(it->p_value);
            out << fmt::format("{:>{}}", v, width);
        }
        out << '\n';
    }
}

} // namespace metchange
