#include "metchange/change.hpp"

#include "metchange/error.hpp"
#include "metchange/rng.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <fstream>

namespace metchange {

std::string_view to_string(TargetType t) { return t == TargetType::met ? "met" : "sta"; }

TargetType parse_target_type(std::string_view s) {
    if (s == "met") return TargetType::met;
    if (s == "sta") return TargetType::sta;
    throw FormatError("target type must be met or sta, got '" + std::string(s) + "'");
}

std::pair<YearRange, YearRange> periods_for(int change_date, const PeriodRule& rule) {
    int century = (change_date / 100) * 100;
    YearRange p1{century - 100, century};
    YearRange p2{century + 100, century + 200};
    if (p2.end > rule.corpus_end) p2 = YearRange{century + 50, rule.corpus_end};
    if (p2.start >= p2.end) throw Error("change date " + std::to_string(change_date) + " leaves no later period");
    return {p1, p2};
}

std::vector<TargetSpec> read_test_set(std::istream& in, const PeriodRule& rule) {
    std::vector<TargetSpec> targets;
    std::optional<std::pair<YearRange, YearRange>> last_met;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (text::trim(line).empty() || line.starts_with("#") || line.starts_with("lexeme\t")) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 6 && f.size() != 8) throw FormatError("test set rows need 6 or 8 columns", line_no);
        try {
            TargetSpec t;
            t.lemma = std::string(text::trim(f[0]));
            t.pos = std::string(text::trim(f[1]));
            t.type = parse_target_type(text::trim(f[2]));
            t.gloss = f[3];
            t.change_date = static_cast<int>(text::parse_int(f[4], "date"));
            t.freq = text::parse_int(f[5], "freq");
            if (t.lemma.empty() || !coarse_tag(t.pos) || *coarse_tag(t.pos) != t.pos)
                throw FormatError("lexeme and a coarse POS (N, V, AD) are required");
            if (f.size() == 8) {
                t.period1 = parse_year_range(f[6]);
                t.period2 = parse_year_range(f[7]);
            } else if (t.type == TargetType::met) {
                std::tie(t.period1, t.period2) = periods_for(t.change_date, rule);
            } else if (last_met) {
                std::tie(t.period1, t.period2) = *last_met;
            } else {
                throw FormatError("stable target '" + t.lemma + "' has no preceding metaphoric partner");
            }
            if (t.type == TargetType::met) {
                if (t.period1.end > t.change_date || t.period2.end <= t.change_date)
                    throw FormatError("periods of '" + t.lemma + "' do not bracket its change date");
                last_met = std::make_pair(t.period1, t.period2);
            }
            if (t.period1.end > t.period2.start) throw FormatError("period1 of '" + t.lemma + "' overlaps period2");
            targets.push_back(std::move(t));
        } catch (const FormatError& e) {
            throw FormatError(e.message(), line_no);
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i].key() == targets[j].key()) throw FormatError("duplicate test set entry " + targets[i].key());
    return targets;
}

std::vector<TargetSpec> read_test_set_file(const std::string& path, const PeriodRule& rule) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open test set: " + path);
    try {
        return read_test_set(in, rule);
    } catch (const FormatError& e) {
        throw FormatError(e.message(), e.line(), path);
    }
}

double measure_value(const TargetSpec& target, const PeriodData& period, Measure measure, const ScoringConfig& cfg,
                     std::optional<std::size_t> h2_cap) {
    const CoocMatrix& m = *period.matrix;
    const std::string key = target.key();
    switch (measure) {
    case Measure::H: return entropy(m, key);
    case Measure::FREQ_N: return freq_n(m, key);
    case Measure::H2: {
        SecondOrderOptions opts = cfg.h2;
        if (h2_cap) opts.cap = opts.cap ? std::min(*opts.cap, *h2_cap) : *h2_cap;
        return second_order_entropy(m, key, opts);
    }
    case Measure::H_MON: {
        if (!period.slice) throw Error("MON needs the corpus slice for " + m.slice_label());
        MonConfig mon = cfg.mon;
        mon.seed = derive_seed(derive_seed(cfg.mon.seed, key), period.slice->label);
        return mon_entropy(*period.slice, key, mon, cfg.window);
    }
    case Measure::H_OLS: {
        if (period.ols_points) return ols_delta(*period.ols_points, key, cfg.ols_window_n).delta;
        return ols_delta(m, key, cfg.ols_window_n).delta;
    }
    }
    throw Error("unhandled measure");
}

ChangeScore score_target(const TargetSpec& target, const PeriodData& p1, const PeriodData& p2, Measure measure,
                         const ScoringConfig& cfg) {
    if (!p1.matrix || !p2.matrix) throw Error("missing matrix for " + target.key());
    std::optional<std::size_t> cap;
    if (measure == Measure::H2 && cfg.h2_symmetric_cap) {
        const std::string key = target.key();
        std::size_t m1 = positive_context_count(*p1.matrix, key, cfg.h2.metric);
        std::size_t m2 = positive_context_count(*p2.matrix, key, cfg.h2.metric);
        if (m1 == 0 || m2 == 0)
            throw UndefinedMeasure("second-order entropy undefined for '" + key + "': no positive contexts in " +
                                   (m1 == 0 ? p1.matrix->slice_label() : p2.matrix->slice_label()));
        cap = std::min({cfg.h2.top_n, m1, m2});
    }
    ChangeScore s;
    s.target = target;
    s.measure = measure;
    s.value_p1 = measure_value(target, p1, measure, cfg, cap);
    s.value_p2 = measure_value(target, p2, measure, cfg, cap);
    s.d = measure == Measure::H_OLS ? ols_change(s.value_p1, s.value_p2) : s.value_p2 - s.value_p1;
    return s;
}

ScoringOutcome score_targets(const std::vector<TargetSpec>& targets, const PeriodLookup& lookup, Measure measure,
                             const ScoringConfig& cfg) {
    ScoringOutcome out;
    for (const auto& t : targets) {
        try {
            out.scores.push_back(score_target(t, lookup(t.period1), lookup(t.period2), measure, cfg));
        } catch (const UndefinedMeasure& e) {
            out.excluded.push_back({t, measure, e.what()});
        } catch (const InsufficientData& e) {
            out.excluded.push_back({t, measure, e.what()});
        } catch (const DegenerateFit& e) {
            out.excluded.push_back({t, measure, e.what()});
        }
    }
    return out;
}

std::string_view to_string(SubsetBy s) { return s == SubsetBy::period1 ? "period1" : "change_century"; }

SubsetBy parse_subset_by(std::string_view s) {
    if (s == "period1") return SubsetBy::period1;
    if (s == "change_century") return SubsetBy::change_century;
    throw ConfigError("subset_by must be period1 or change_century, got '" + std::string(s) + "'");
}

std::string subset_label(const TargetSpec& target, SubsetBy by) {
    if (by == SubsetBy::period1) return target.period1.label();
    int century = (target.change_date / 100) * 100;
    return YearRange{century, century + 100}.label();
}

std::vector<ChangeScore> rank_targets(std::vector<ChangeScore> scores, std::string_view subset, SubsetBy by) {
    if (subset != "all")
        std::erase_if(scores, [&](const ChangeScore& s) { return subset_label(s.target, by) != subset; });
    std::sort(scores.begin(), scores.end(), [](const ChangeScore& a, const ChangeScore& b) {
        if (a.d != b.d) return a.d > b.d;
        return a.target.key() < b.target.key();
    });
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;
    return scores;
}

void write_change_header(std::ostream& out) { out << "lexeme\ttype\tmeasure\tv1\tv2\td\trank\n"; }

void write_change_rows(std::ostream& out, const std::vector<ChangeScore>& ranked) {
    for (const auto& s : ranked)
        out << s.target.key() << '\t' << to_string(s.target.type) << '\t' << to_string(s.measure) << '\t'
            << text::fixed(s.value_p1) << '\t' << text::fixed(s.value_p2) << '\t' << text::fixed(s.d) << '\t'
            << s.rank << '\n';
}

void write_exclusions(std::ostream& out, const std::vector<Exclusion>& excluded) {
    out << "lexeme\tmeasure\treason\n";
    for (const auto& e : excluded) out << e.target.key() << '\t' << to_string(e.measure) << '\t' << e.reason << '\n';
}

std::vector<ChangeReportRow> read_change_report(std::istream& in) {
    std::vector<ChangeReportRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (line.empty() || line.starts_with("#") || line.starts_with("lexeme\t")) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 7) throw FormatError("change report rows need 7 columns", line_no);
        try {
            ChangeReportRow r;
            r.lexeme = f[0];
            r.type = parse_target_type(f[1]);
            r.measure = parse_measure(f[2]);
            r.v1 = text::parse_double(f[3], "v1");
            r.v2 = text::parse_double(f[4], "v2");
            r.d = text::parse_double(f[5], "d");
            r.rank = static_cast<std::size_t>(text::parse_int(f[6], "rank"));
            rows.push_back(std::move(r));
        } catch (const ConfigError& e) {
            throw FormatError(e.what(), line_no);
        } catch (const FormatError& e) {
            throw FormatError(e.message(), line_no);
        }
    }
    return rows;
}

} // namespace metchange
