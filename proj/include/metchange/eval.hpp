#ifndef METCHANGE_EVAL_HPP
#define METCHANGE_EVAL_HPP

#include "metchange/change.hpp"
#include "metchange/corpus.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

// ---------------------------------------------------------------------------
// Rank correlation
// ---------------------------------------------------------------------------

// 1-based ranks, tied values share the average of their positions.
// Larger values get larger ranks.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho: Pearson correlation of the average-rank vectors.
// Throws UndefinedMeasure for fewer than two pairs or a constant side.
double spearman_rho(std::span<const double> a, std::span<const double> b);

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0; // two-sided permutation test
    std::size_t resamples = 0;
};

// Permutation p-value: (1 + #{|rho_perm| >= |rho|}) / (1 + resamples).
// Resample r shuffles with its own stream derive_seed(seed, r), so the result
// does not depend on the thread count.
SpearmanResult spearman(std::span<const double> a, std::span<const double> b, std::size_t resamples = 100000,
                        std::uint64_t seed = 0, std::size_t threads = 1);

// "*", "**", "***" for p < .05, .01, .001; empty otherwise.
std::string significance_stars(double p_value);

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

// ratings[item][annotator]; nullopt marks a skipped judgment. Items with any
// skipped judgment are dropped. Returns nullopt when expected agreement is 1
// (every judgment in one category), where kappa is undefined.
std::optional<double> fleiss_kappa(const std::vector<std::vector<std::optional<int>>>& ratings);

struct AnnotationStats {
    std::size_t items = 0;            // items with a complete set of judgments
    std::size_t perfect_agreement = 0;
    std::size_t perfect_plus = 0;     // perfect agreement on label 1
    std::optional<double> pct_plus;   // undefined without perfect-agreement items
    double pct_agree = 0.0;
    std::optional<double> kappa;
};

// %+, %A and kappa over 0/1 ratings of one (target, period) group.
AnnotationStats annotation_stats(const std::vector<std::vector<std::optional<int>>>& ratings);

// ---------------------------------------------------------------------------
// Judgments and the gold standard
// ---------------------------------------------------------------------------

enum class Direction { M2_of_M1, M1_of_M2 };
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct Judgment {
    long long item_id = 0;
    std::string target;
    std::string annotator;
    Direction direction = Direction::M2_of_M1;
    std::optional<int> value; // nullopt = skipped
};

// item_id<TAB>target<TAB>annotator<TAB>direction<TAB>value ('-' = skipped)
std::vector<Judgment> read_judgments(std::istream& in);

// Display order of a context pair: EL shows the earlier context first.
enum class DisplayOrder { EL, LE };
std::string_view to_string(DisplayOrder o);
DisplayOrder parse_display_order(std::string_view s);

struct PeriodStats {
    AnnotationStats earlier;
    AnnotationStats later;
};

// Groups judgments by target and chronological period. For an item shown EL,
// "M2 is metaphorically related to M1" is a judgment on the later context;
// for LE it is one on the earlier context. Annotators outside `annotators`
// are ignored (empty = everyone).
std::map<std::string, PeriodStats> tally_judgments(const std::vector<Judgment>& judgments,
                                                   const std::map<long long, DisplayOrder>& orders,
                                                   const std::vector<std::string>& annotators);

// Pooled over every item of every target.
PeriodStats pooled_stats(const std::vector<Judgment>& judgments, const std::map<long long, DisplayOrder>& orders,
                         const std::vector<std::string>& annotators);

struct GoldEntry {
    std::string lexeme; // lemma as printed
    TargetType type = TargetType::sta;
    YearRange earlier_period, later_period;
    double pct_plus_early = 0.0, pct_agree_early = 0.0;
    std::optional<double> kappa_early;
    double pct_plus_late = 0.0, pct_agree_late = 0.0;
    std::optional<double> kappa_late;
    double delta_pct_plus = 0.0;
};

// Gold TSV columns: lexeme type early_time early_pct_plus early_pct_agree
// early_kappa late_time late_pct_plus late_pct_agree late_kappa delta_pct_plus.
// delta must equal late - early within `delta_tolerance` (printed tables round
// each cell, so the default allows for three rounding errors of 0.005).
std::vector<GoldEntry> read_gold(std::istream& in, double delta_tolerance = 0.015);
std::vector<GoldEntry> read_gold_file(const std::string& path, double delta_tolerance = 0.015);
void write_gold_header(std::ostream& out);
void write_gold_row(std::ostream& out, const GoldEntry& e);

// Indices of `gold` ordered by delta_pct_plus descending; ties keep file order.
std::vector<std::size_t> gold_order(const std::vector<GoldEntry>& gold);

// ---------------------------------------------------------------------------
// Evaluation against the gold standard
// ---------------------------------------------------------------------------

struct EvalCell {
    Measure measure = Measure::H;
    std::string subset;
    std::size_t n = 0;
    std::optional<double> rho; // undefined for < 2 targets or constant ranks
    double p_value = 1.0;
    std::vector<std::string> missing; // gold targets in the subset without a prediction
};

struct EvalOptions {
    std::vector<std::string> subsets{"all"};
    SubsetBy subset_by = SubsetBy::period1;
    std::size_t resamples = 100000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// For each (measure, subset): Spearman's rho between predicted d and gold
// delta_pct_plus, both average-ranked. Predictions are matched to gold by
// lemma. Throws KeyMismatch listing predicted targets without gold entries.
std::vector<EvalCell> evaluate(const std::vector<ChangeScore>& predictions, const std::vector<GoldEntry>& gold,
                               const EvalOptions& options);

void write_eval_tsv(std::ostream& out, const std::vector<EvalCell>& cells);
// Measures as rows, subsets as columns.
void write_eval_text(std::ostream& out, const std::vector<EvalCell>& cells, const std::vector<std::string>& subsets);

} // namespace metchange

#endif
