#ifndef METCHANGE_MEASURES_HPP
#define METCHANGE_MEASURES_HPP

#include "metchange/matrix.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

enum class Measure { H, H2, FREQ_N, H_MON, H_OLS };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view s);
const std::vector<Measure>& all_measures();

enum class Association { PPMI, PLMI };
std::string_view to_string(Association a);
Association parse_association(std::string_view s);

enum class Aggregate { median, mean };
std::string_view to_string(Aggregate a);
Aggregate parse_aggregate(std::string_view s);

struct MeasureValue {
    std::string target;
    std::string slice_label;
    Measure measure;
    double value;
};

struct AssociationScore {
    std::string target;
    std::string context;
    Association metric;
    double value;
};

// Shannon entropy in bits of the distribution proportional to `counts`,
// summed in the given order. Zero entries contribute nothing.
double entropy_of_counts(std::span<const std::uint64_t> counts);

// Word entropy: -sum_c p(c|w) log2 p(c|w), p(c|w) = Freq(w,c) / row_sum(w).
// Throws UndefinedMeasure when the row is empty.
double entropy(const CoocMatrix& matrix, std::string_view target);
double entropy(const CoocMatrix& matrix, KeyId target);

// Token frequency over the slice's token count N. Absent target -> 0.
double freq_n(const CoocMatrix& matrix, std::string_view target);

// Positive associations of target's contexts, sorted by (score desc, key asc).
std::vector<AssociationScore> association(const CoocMatrix& matrix, std::string_view target, Association metric);

struct SecondOrderOptions {
    std::size_t top_n = 100;
    Aggregate aggregate = Aggregate::median;
    Association metric = Association::PLMI;
    // Further limit on the number of contexts (the pairwise M of a comparison).
    std::optional<std::size_t> cap;
};

// Aggregate (median by default) of the entropies of the target's top
// positively associated contexts.
double second_order_entropy(const CoocMatrix& matrix, std::string_view target, const SecondOrderOptions& options = {});

// Number of positively associated contexts of target (0 if absent).
std::size_t positive_context_count(const CoocMatrix& matrix, std::string_view target, Association metric);

// Measure dumps: target<TAB>slice<TAB>measure<TAB>value, six decimals.
void write_measure_values(std::ostream& out, const std::vector<MeasureValue>& values);

} // namespace metchange

#endif
