#ifndef METCHANGE_NORMALIZE_HPP
#define METCHANGE_NORMALIZE_HPP

#include "metchange/corpus.hpp"
#include "metchange/matrix.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

// ---------------------------------------------------------------------------
// Matching occurrence number (MON)
//
// A word's entropy grows with the number of occurrences its vector is built
// from. MON removes that effect by building every vector from the same number
// of occurrences: draw n occurrences without replacement, sum their context
// windows, take the entropy, and average over k such draws.
// ---------------------------------------------------------------------------

struct MonConfig {
    std::size_t n_contexts = 29;
    std::size_t k_samples = 10000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Sample s draws from its own generator seeded with derive_seed(cfg.seed, s),
// so the result is the same for any thread count.
double mon_entropy(const std::vector<std::vector<std::string>>& occurrences, const MonConfig& cfg);

double mon_entropy(const TimeSlice& slice, std::string_view target, const MonConfig& cfg, WindowOptions window = {});

struct OccurrenceCount {
    std::string target;
    std::size_t period1 = 0;
    std::size_t period2 = 0;
};

struct MonChoice {
    std::size_t n = 0;
    // Targets missing from one of their slices; not considered for n.
    std::vector<std::string> insufficient;
};

// Lowest occurrence count of any target in either of its two periods.
MonChoice mon_choose_n(std::span<const OccurrenceCount> counts);

// ---------------------------------------------------------------------------
// OLS normalization
//
// Fit entropy = alpha + beta * ln(freq) on the window_n vocabulary words whose
// frequency is closest to the target's, and report the target's residual.
// ---------------------------------------------------------------------------

struct FrequencyPoint {
    std::string key;
    double freq = 0.0;
    double entropy = 0.0;
};

struct OlsFit {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t window_n = 0; // points actually used
    double anchor_freq = 0.0;
};

struct OlsResult {
    OlsFit fit;
    double entropy = 0.0;
    double predicted = 0.0;
    double delta = 0.0;
};

// Least-squares fit of entropy on ln(freq). Throws DegenerateFit when every
// point has the same frequency.
OlsFit fit_log_linear(std::span<const FrequencyPoint> points);

// Residual of `target` against a fit on its window_n nearest neighbours in
// frequency (ties by key; the target itself is never part of its own fit).
OlsResult ols_delta(std::span<const FrequencyPoint> points, std::string_view target, std::size_t window_n = 1000);

// (token frequency, entropy) for every word with a non-empty row.
std::vector<FrequencyPoint> frequency_points(const CoocMatrix& matrix);

OlsResult ols_delta(const CoocMatrix& matrix, std::string_view target, std::size_t window_n = 1000);

// Change in residual from the reference period to the focus period.
inline double ols_change(double reference, double focus) { return focus - reference; }

// target<TAB>slice<TAB>alpha<TAB>beta<TAB>window_n<TAB>freq<TAB>entropy<TAB>predicted<TAB>delta
void write_ols_header(std::ostream& out);
void write_ols_row(std::ostream& out, std::string_view target, std::string_view slice, const OlsResult& r);

} // namespace metchange

#endif
