#ifndef METCHANGE_CHANGE_HPP
#define METCHANGE_CHANGE_HPP

#include "metchange/corpus.hpp"
#include "metchange/matrix.hpp"
#include "metchange/measures.hpp"
#include "metchange/normalize.hpp"

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

enum class TargetType { met, sta };
std::string_view to_string(TargetType t);
TargetType parse_target_type(std::string_view s);

struct TargetSpec {
    std::string lemma;
    std::string pos; // coarse tag as listed in the test set: N, V, AD
    TargetType type = TargetType::sta;
    std::string gloss;
    int change_date = 0;
    long long freq = 0;
    YearRange period1;
    YearRange period2;

    std::string key() const { return make_key(lemma, pos); }
};

// How comparison periods are derived from a change date: the century before
// and the century after the century of change. A second period running past
// the end of the corpus is replaced by [century + 50, corpus_end).
struct PeriodRule {
    int corpus_end = 1926;
};

std::pair<YearRange, YearRange> periods_for(int change_date, const PeriodRule& rule = {});

// Test set TSV: lexeme, pos, type, gloss, date, freq, optionally followed by
// explicit period1 and period2 columns. A stable word without explicit
// periods is compared in the periods of the nearest preceding metaphoric row.
// A metaphoric row needs period1 to end by its change date and period2 to end
// after it (Feder, 1852, is compared in 1850-1926).
// A header row starting with "lexeme" and '#' comment lines are skipped.
std::vector<TargetSpec> read_test_set(std::istream& in, const PeriodRule& rule = {});
std::vector<TargetSpec> read_test_set_file(const std::string& path, const PeriodRule& rule = {});

struct ChangeScore {
    TargetSpec target;
    Measure measure = Measure::H;
    double value_p1 = 0.0;
    double value_p2 = 0.0;
    double d = 0.0; // value_p2 - value_p1
    std::size_t rank = 0;
};

struct Exclusion {
    TargetSpec target;
    Measure measure = Measure::H;
    std::string reason;
};

// Everything a measure may need from one period.
struct PeriodData {
    const CoocMatrix* matrix = nullptr;
    const TimeSlice* slice = nullptr;                  // H_MON only
    const std::vector<FrequencyPoint>* ols_points = nullptr; // H_OLS; computed on demand if null
};

struct ScoringConfig {
    WindowOptions window;
    SecondOrderOptions h2;
    // Cap H2's context count for both periods at the smaller available count.
    bool h2_symmetric_cap = true;
    // seed here is the MON root; each (target, period) derives its own stream.
    MonConfig mon;
    std::size_t ols_window_n = 1000;
};

// Measure value of one target in one period.
double measure_value(const TargetSpec& target, const PeriodData& period, Measure measure, const ScoringConfig& cfg,
                     std::optional<std::size_t> h2_cap = std::nullopt);

// Throws UndefinedMeasure, InsufficientData or DegenerateFit when the measure
// is undefined in either period.
ChangeScore score_target(const TargetSpec& target, const PeriodData& p1, const PeriodData& p2, Measure measure,
                         const ScoringConfig& cfg);

struct ScoringOutcome {
    std::vector<ChangeScore> scores;
    std::vector<Exclusion> excluded;
};

using PeriodLookup = std::function<PeriodData(const YearRange&)>;

// Scores every target; targets whose measure is undefined land in `excluded`.
ScoringOutcome score_targets(const std::vector<TargetSpec>& targets, const PeriodLookup& lookup, Measure measure,
                             const ScoringConfig& cfg);

enum class SubsetBy { period1, change_century };
std::string_view to_string(SubsetBy s);
SubsetBy parse_subset_by(std::string_view s);

std::string subset_label(const TargetSpec& target, SubsetBy by = SubsetBy::period1);

// Sorted by d descending, ties by lexeme key ascending, ranks 1..n.
// subset "all" keeps every score; otherwise only targets whose subset label
// matches.
std::vector<ChangeScore> rank_targets(std::vector<ChangeScore> scores, std::string_view subset = "all",
                                      SubsetBy by = SubsetBy::period1);

// lexeme<TAB>type<TAB>measure<TAB>v1<TAB>v2<TAB>d<TAB>rank
void write_change_header(std::ostream& out);
void write_change_rows(std::ostream& out, const std::vector<ChangeScore>& ranked);
void write_exclusions(std::ostream& out, const std::vector<Exclusion>& excluded);

struct ChangeReportRow {
    std::string lexeme;
    TargetType type = TargetType::sta;
    Measure measure = Measure::H;
    double v1 = 0.0, v2 = 0.0, d = 0.0;
    std::size_t rank = 0;
};

std::vector<ChangeReportRow> read_change_report(std::istream& in);

} // namespace metchange

#endif
