#include "metchange/measures.hpp"

#include "metchange/error.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace metchange {

std::string_view to_string(Measure m) {
    switch (m) {
    case Measure::H: return "H";
    case Measure::H2: return "H2";
    case Measure::FREQ_N: return "FREQ_N";
    case Measure::H_MON: return "H_MON";
    case Measure::H_OLS: return "H_OLS";
    }
    return "?";
}

Measure parse_measure(std::string_view s) {
    for (Measure m : all_measures())
        if (to_string(m) == s) return m;
    throw ConfigError("unknown measure '" + std::string(s) + "'");
}

const std::vector<Measure>& all_measures() {
    static const std::vector<Measure> all{Measure::H, Measure::H_MON, Measure::H_OLS, Measure::H2, Measure::FREQ_N};
    return all;
}

std::string_view to_string(Association a) { return a == Association::PPMI ? "PPMI" : "PLMI"; }

Association parse_association(std::string_view s) {
    if (s == "PPMI") return Association::PPMI;
    if (s == "PLMI") return Association::PLMI;
    throw ConfigError("association metric must be PPMI or PLMI, got '" + std::string(s) + "'");
}

std::string_view to_string(Aggregate a) { return a == Aggregate::median ? "median" : "mean"; }

Aggregate parse_aggregate(std::string_view s) {
    if (s == "median") return Aggregate::median;
    if (s == "mean") return Aggregate::mean;
    throw ConfigError("aggregate must be median or mean, got '" + std::string(s) + "'");
}

double entropy_of_counts(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw UndefinedMeasure("entropy of an empty distribution");
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double entropy(const CoocMatrix& matrix, KeyId target) {
    if (matrix.row_sum(target) == 0)
        throw UndefinedMeasure("entropy undefined for '" + matrix.key(target) + "' in " + matrix.slice_label() +
                               ": no co-occurrences");
    auto row = matrix.row(target);
    std::vector<std::uint64_t> counts;
    counts.reserve(row.size());
    for (const auto& e : row) counts.push_back(e.count);
    return entropy_of_counts(counts);
}

double entropy(const CoocMatrix& matrix, std::string_view target) {
    auto id = matrix.find(target);
    if (!id)
        throw UndefinedMeasure("entropy undefined for '" + std::string(target) + "' in " + matrix.slice_label() +
                               ": not in vocabulary");
    return entropy(matrix, *id);
}

double freq_n(const CoocMatrix& matrix, std::string_view target) {
    if (matrix.token_count() == 0) throw UndefinedMeasure("normalized frequency undefined: slice " +
                                                          matrix.slice_label() + " has no tokens");
    return static_cast<double>(matrix.token_freq(target)) / static_cast<double>(matrix.token_count());
}

std::vector<AssociationScore> association(const CoocMatrix& matrix, std::string_view target, Association metric) {
    std::vector<AssociationScore> out;
    auto id = matrix.find(target);
    if (!id || matrix.row_sum(*id) == 0)
        throw UndefinedMeasure("association undefined for '" + std::string(target) + "' in " +
                               matrix.slice_label() + ": no co-occurrences");
    const double total = static_cast<double>(matrix.total_pairs());
    const double p_w = static_cast<double>(matrix.row_sum(*id)) / total;
    for (const auto& e : matrix.row(*id)) {
        const double p_wc = static_cast<double>(e.count) / total;
        const double p_c = static_cast<double>(matrix.row_sum(e.context)) / total;
        const double pmi = std::log2(p_wc / (p_w * p_c));
        const double score = metric == Association::PPMI ? pmi : p_wc * pmi;
        if (score > 0.0) out.push_back({std::string(target), matrix.key(e.context), metric, score});
    }
    std::sort(out.begin(), out.end(), [](const AssociationScore& a, const AssociationScore& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.context < b.context;
    });
    return out;
}

std::size_t positive_context_count(const CoocMatrix& matrix, std::string_view target, Association metric) {
    auto id = matrix.find(target);
    if (!id || matrix.row_sum(*id) == 0) return 0;
    return association(matrix, target, metric).size();
}

double second_order_entropy(const CoocMatrix& matrix, std::string_view target, const SecondOrderOptions& options) {
    auto scores = association(matrix, target, options.metric);
    std::size_t take = std::min(options.top_n, scores.size());
    if (options.cap) take = std::min(take, *options.cap);
    if (take == 0)
        throw UndefinedMeasure("second-order entropy undefined for '" + std::string(target) + "' in " +
                               matrix.slice_label() + ": no positively associated contexts");

    std::vector<double> values;
    values.reserve(take);
    for (std::size_t i = 0; i < take; ++i) values.push_back(entropy(matrix, scores[i].context));

    if (options.aggregate == Aggregate::mean) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

void write_measure_values(std::ostream& out, const std::vector<MeasureValue>& values) {
    for (const auto& v : values)
        out << v.target << '\t' << v.slice_label << '\t' << to_string(v.measure) << '\t' << text::fixed(v.value)
            << '\n';
}

} // namespace metchange
