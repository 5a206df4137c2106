#include "metchange/normalize.hpp"

#include "metchange/error.hpp"
#include "metchange/measures.hpp"
#include "metchange/rng.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace metchange {

namespace {

// Occurrence windows re-keyed to dense ids that follow lexicographic key
// order, so a summed sample is visited in the same order as a matrix row.
struct LocalOccurrences {
    std::size_t vocabulary = 0;
    std::vector<std::vector<std::uint32_t>> windows;
};

LocalOccurrences localize(const std::vector<std::vector<std::string>>& occurrences) {
    std::vector<std::string> keys;
    for (const auto& occ : occurrences) keys.insert(keys.end(), occ.begin(), occ.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < keys.size(); ++i) index.emplace(keys[i], i);

    LocalOccurrences out;
    out.vocabulary = keys.size();
    out.windows.reserve(occurrences.size());
    for (const auto& occ : occurrences) {
        std::vector<std::uint32_t> ids;
        ids.reserve(occ.size());
        for (const auto& k : occ) ids.push_back(index.at(k));
        out.windows.push_back(std::move(ids));
    }
    return out;
}

void run_samples(const LocalOccurrences& occ, const MonConfig& cfg, std::size_t begin, std::size_t end,
                 std::vector<double>& values) {
    std::vector<std::uint64_t> counts(occ.vocabulary, 0);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint64_t> gathered;
    std::vector<std::uint32_t> pool(occ.windows.size());
    for (std::size_t s = begin; s < end; ++s) {
        std::iota(pool.begin(), pool.end(), 0u);
        SplitMix64 rng(derive_seed(cfg.seed, s));
        partial_shuffle(pool, cfg.n_contexts, rng);

        touched.clear();
        for (std::size_t i = 0; i < cfg.n_contexts; ++i)
            for (auto id : occ.windows[pool[i]]) {
                if (counts[id]++ == 0) touched.push_back(id);
            }
        if (touched.empty()) {
            // Every drawn occurrence had an empty window.
            values[s] = 0.0;
            continue;
        }
        std::sort(touched.begin(), touched.end());
        gathered.clear();
        for (auto id : touched) {
            gathered.push_back(counts[id]);
            counts[id] = 0;
        }
        values[s] = entropy_of_counts(gathered);
    }
}

} // namespace

double mon_entropy(const std::vector<std::vector<std::string>>& occurrences, const MonConfig& cfg) {
    if (cfg.n_contexts < 1 || cfg.k_samples < 1) throw Error("MON needs n_contexts >= 1 and k_samples >= 1");
    if (occurrences.size() < cfg.n_contexts)
        throw InsufficientData("too few occurrences for MON", cfg.n_contexts, occurrences.size());
    bool any_context = std::any_of(occurrences.begin(), occurrences.end(), [](const auto& o) { return !o.empty(); });
    if (!any_context) throw UndefinedMeasure("MON entropy undefined: no occurrence has any context");

    LocalOccurrences occ = localize(occurrences);
    std::vector<double> values(cfg.k_samples, 0.0);
    std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.k_samples));
    if (threads == 1) {
        run_samples(occ, cfg, 0, cfg.k_samples, values);
    } else {
        std::vector<std::thread> workers;
        std::size_t chunk = (cfg.k_samples + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t b = std::min(cfg.k_samples, t * chunk), e = std::min(cfg.k_samples, b + chunk);
            workers.emplace_back(run_samples, std::cref(occ), std::cref(cfg), b, e, std::ref(values));
        }
        for (auto& w : workers) w.join();
    }

    // Mean shifted by the first value: exact when all samples coincide.
    const double ref = values[0];
    double acc = 0.0;
    for (double v : values) acc += v - ref;
    return ref + acc / static_cast<double>(values.size());
}

double mon_entropy(const TimeSlice& slice, std::string_view target, const MonConfig& cfg, WindowOptions window) {
    auto occurrences = occurrence_contexts(slice, target, window);
    if (occurrences.size() < cfg.n_contexts)
        throw InsufficientData("'" + std::string(target) + "' occurs too rarely in " + slice.label + " for MON",
                               cfg.n_contexts, occurrences.size());
    return mon_entropy(occurrences, cfg);
}

MonChoice mon_choose_n(std::span<const OccurrenceCount> counts) {
    MonChoice choice;
    bool found = false;
    for (const auto& c : counts) {
        if (c.period1 == 0 || c.period2 == 0) {
            choice.insufficient.push_back(c.target);
            continue;
        }
        std::size_t low = std::min(c.period1, c.period2);
        choice.n = found ? std::min(choice.n, low) : low;
        found = true;
    }
    if (!found) throw InsufficientData("no target occurs in both of its periods", 1, 0);
    return choice;
}

OlsFit fit_log_linear(std::span<const FrequencyPoint> points) {
    if (points.size() < 2) throw DegenerateFit("OLS needs at least two data points");
    bool distinct = std::any_of(points.begin(), points.end(),
                                [&](const FrequencyPoint& p) { return p.freq != points.front().freq; });
    if (!distinct) throw DegenerateFit("OLS data points all share one frequency");

    const double n = static_cast<double>(points.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& p : points) {
        if (!(p.freq > 0.0)) throw DegenerateFit("OLS frequency must be positive for '" + p.key + "'");
        mean_x += std::log(p.freq);
        mean_y += p.entropy;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.freq) - mean_x;
        sxx += dx * dx;
        sxy += dx * (p.entropy - mean_y);
    }
    OlsFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = mean_y - fit.beta * mean_x;
    fit.window_n = points.size();
    return fit;
}

OlsResult ols_delta(std::span<const FrequencyPoint> points, std::string_view target, std::size_t window_n) {
    auto self = std::find_if(points.begin(), points.end(), [&](const FrequencyPoint& p) { return p.key == target; });
    if (self == points.end())
        throw UndefinedMeasure("OLS residual undefined: '" + std::string(target) + "' has no data point");
    if (window_n < 2) throw DegenerateFit("OLS window must hold at least two points");

    std::vector<const FrequencyPoint*> others;
    others.reserve(points.size());
    for (const auto& p : points)
        if (p.key != target) others.push_back(&p);

    const double anchor = self->freq;
    auto closer = [anchor](const FrequencyPoint* a, const FrequencyPoint* b) {
        double da = std::abs(a->freq - anchor), db = std::abs(b->freq - anchor);
        if (da != db) return da < db;
        return a->key < b->key;
    };
    if (others.size() > window_n) {
        std::nth_element(others.begin(), others.begin() + window_n, others.end(), closer);
        others.resize(window_n);
    }
    // Fixed order so the floating-point sums are reproducible.
    std::sort(others.begin(), others.end(), closer);
    std::vector<FrequencyPoint> window;
    window.reserve(others.size());
    for (auto* p : others) window.push_back(*p);

    OlsResult r;
    r.fit = fit_log_linear(window);
    r.fit.anchor_freq = anchor;
    r.entropy = self->entropy;
    r.predicted = r.fit.alpha + r.fit.beta * std::log(anchor);
    r.delta = r.entropy - r.predicted;
    return r;
}

std::vector<FrequencyPoint> frequency_points(const CoocMatrix& matrix) {
    std::vector<FrequencyPoint> points;
    for (KeyId id = 0; id < matrix.vocabulary_size(); ++id) {
        if (matrix.row_sum(id) == 0 || matrix.token_freq(id) == 0) continue;
        points.push_back({matrix.key(id), static_cast<double>(matrix.token_freq(id)), entropy(matrix, id)});
    }
    return points;
}

OlsResult ols_delta(const CoocMatrix& matrix, std::string_view target, std::size_t window_n) {
    auto points = frequency_points(matrix);
    return ols_delta(points, target, window_n);
}

void write_ols_header(std::ostream& out) {
    out << "target\tslice\talpha\tbeta\twindow_n\tfreq\tentropy\tpredicted\tdelta\n";
}

void write_ols_row(std::ostream& out, std::string_view target, std::string_view slice, const OlsResult& r) {
    out << target << '\t' << slice << '\t' << text::fixed(r.fit.alpha) << '\t' << text::fixed(r.fit.beta) << '\t'
        << r.fit.window_n << '\t' << text::fixed(r.fit.anchor_freq, 0) << '\t' << text::fixed(r.entropy) << '\t'
        << text::fixed(r.predicted) << '\t' << text::fixed(r.delta) << '\n';
}

} // namespace metchange
