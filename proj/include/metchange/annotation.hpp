#ifndef METCHANGE_ANNOTATION_HPP
#define METCHANGE_ANNOTATION_HPP

#include "metchange/corpus.hpp"
#include "metchange/eval.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

struct ContextRef {
    std::string doc_id;
    int date = 0;
    std::string text; // sentence surface forms; target occurrences in **bold**
};

struct ContextPair {
    long long item_id = 0;
    std::string target;
    ContextRef earlier;
    ContextRef later;
    DisplayOrder display_order = DisplayOrder::EL;
};

struct SamplingOptions {
    std::size_t per_period = 20;
    // Sentences with fewer words (punctuation excluded) are not eligible.
    std::size_t min_len = 10;
    PreprocessOptions punctuation;
};

// Sentences of a raw (unpreprocessed) slice containing target, ordered by
// document date (corpus order within a date).
std::vector<ContextRef> eligible_contexts(const TimeSlice& slice, std::string_view target,
                                          const SamplingOptions& options = {});

// floor(i * n / per_period) for i = 0 .. per_period-1.
std::vector<std::size_t> stride_indices(std::size_t n, std::size_t per_period);

// per_period context pairs for one target: evenly strided contexts from each
// slice, earlier ones permuted before pairing, every second pair shown
// later-first. Throws InsufficientData if either slice has too few contexts.
std::vector<ContextPair> sample_annotation_pairs(const TimeSlice& early, const TimeSlice& late,
                                                 std::string_view target, const SamplingOptions& options,
                                                 std::uint64_t seed);

struct AnnotationTarget {
    std::string key;
    const TimeSlice* early = nullptr;
    const TimeSlice* late = nullptr;
};

// Pairs for every target, shuffled together and numbered 1..N.
std::vector<ContextPair> sample_annotation_set(const std::vector<AnnotationTarget>& targets,
                                               const SamplingOptions& options, std::uint64_t seed);

// One row per pair in annotation-sheet layout (target, context 1, context 2,
// two judgment columns, comments) followed by the columns needed to restore
// chronology: order, doc/date of both contexts.
void write_annotation_sheet(std::ostream& out, const std::vector<ContextPair>& pairs);

// item_id -> display order, read back from an annotation sheet.
std::map<long long, DisplayOrder> read_display_orders(std::istream& in);

} // namespace metchange

#endif
