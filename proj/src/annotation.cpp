#include "metchange/annotation.hpp"

#include "metchange/error.hpp"
#include "metchange/rng.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <numeric>

namespace metchange {

namespace {

std::string render_sentence(const Sentence& s, std::string_view target) {
    std::string out;
    for (const auto& t : s.tokens) {
        if (!out.empty()) out += ' ';
        if (t.key() == target)
            out += "**" + t.surface + "**";
        else
            out += t.surface;
    }
    return out;
}

} // namespace

std::vector<ContextRef> eligible_contexts(const TimeSlice& slice, std::string_view target,
                                          const SamplingOptions& options) {
    std::vector<ContextRef> out;
    for (const auto& doc : slice.documents) {
        for (const auto& s : doc.sentences) {
            std::size_t words = 0;
            bool has_target = false;
            for (const auto& t : s.tokens) {
                if (!is_punctuation(t.pos, options.punctuation)) ++words;
                if (t.key() == target) has_target = true;
            }
            if (has_target && words >= options.min_len) out.push_back({doc.id, doc.date, render_sentence(s, target)});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const ContextRef& a, const ContextRef& b) { return a.date < b.date; });
    return out;
}

std::vector<std::size_t> stride_indices(std::size_t n, std::size_t per_period) {
    std::vector<std::size_t> idx;
    idx.reserve(per_period);
    for (std::size_t i = 0; i < per_period; ++i) idx.push_back(i * n / per_period);
    return idx;
}

std::vector<ContextPair> sample_annotation_pairs(const TimeSlice& early, const TimeSlice& late,
                                                 std::string_view target, const SamplingOptions& options,
                                                 std::uint64_t seed) {
    if (options.per_period == 0) throw Error("per_period must be positive");
    auto e = eligible_contexts(early, target, options);
    auto l = eligible_contexts(late, target, options);
    if (e.size() < options.per_period)
        throw InsufficientData("'" + std::string(target) + "' has too few eligible contexts in " + early.label,
                               options.per_period, e.size());
    if (l.size() < options.per_period)
        throw InsufficientData("'" + std::string(target) + "' has too few eligible contexts in " + late.label,
                               options.per_period, l.size());

    std::vector<ContextRef> early_pick, late_pick;
    for (auto i : stride_indices(e.size(), options.per_period)) early_pick.push_back(e[i]);
    for (auto i : stride_indices(l.size(), options.per_period)) late_pick.push_back(l[i]);

    std::vector<std::size_t> sigma(options.per_period);
    std::iota(sigma.begin(), sigma.end(), 0);
    SplitMix64 rng(seed);
    shuffle(sigma, rng);

    std::vector<ContextPair> pairs;
    for (std::size_t i = 0; i < options.per_period; ++i) {
        ContextPair p;
        p.target = std::string(target);
        p.earlier = early_pick[sigma[i]];
        p.later = late_pick[i];
        p.display_order = i % 2 == 1 ? DisplayOrder::LE : DisplayOrder::EL;
        if (p.earlier.date >= p.later.date)
            throw Error("context pair for '" + p.target + "' is not chronological (" + std::to_string(p.earlier.date) +
                        " vs " + std::to_string(p.later.date) + ")");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<ContextPair> sample_annotation_set(const std::vector<AnnotationTarget>& targets,
                                               const SamplingOptions& options, std::uint64_t seed) {
    std::vector<ContextPair> all;
    for (const auto& t : targets) {
        auto pairs = sample_annotation_pairs(*t.early, *t.late, t.key, options, derive_seed(seed, t.key));
        all.insert(all.end(), pairs.begin(), pairs.end());
    }
    SplitMix64 rng(derive_seed(seed, "shuffle"));
    shuffle(all, rng);
    for (std::size_t i = 0; i < all.size(); ++i) all[i].item_id = static_cast<long long>(i + 1);
    return all;
}

void write_annotation_sheet(std::ostream& out, const std::vector<ContextPair>& pairs) {
    out << "item_id\ttarget\tcontext1\tcontext2\tM1 is metaphorically related to M2\t"
           "M2 is metaphorically related to M1\tcomments\torder\tdoc1\tdate1\tdoc2\tdate2\n";
    for (const auto& p : pairs) {
        const ContextRef& first = p.display_order == DisplayOrder::EL ? p.earlier : p.later;
        const ContextRef& second = p.display_order == DisplayOrder::EL ? p.later : p.earlier;
        out << p.item_id << '\t' << p.target << '\t' << first.text << '\t' << second.text << "\t\t\t\t"
            << to_string(p.display_order) << '\t' << first.doc_id << '\t' << first.date << '\t' << second.doc_id
            << '\t' << second.date << '\n';
    }
}

std::map<long long, DisplayOrder> read_display_orders(std::istream& in) {
    std::map<long long, DisplayOrder> orders;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (line.empty() || line.starts_with("item_id\t") || line.starts_with("#")) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 12) throw FormatError("annotation sheet rows need 12 columns", line_no);
        try {
            orders[text::parse_int(f[0], "item_id")] = parse_display_order(f[7]);
        } catch (const FormatError& e) {
            throw FormatError(e.message(), line_no);
        }
    }
    return orders;
}

} // namespace metchange
