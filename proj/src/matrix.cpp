#include "metchange/matrix.hpp"

#include "metchange/error.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

namespace metchange {

std::string_view to_string(WindowScope scope) {
    return scope == WindowScope::sentence ? "sentence" : "document";
}

WindowScope parse_window_scope(std::string_view s) {
    if (s == "sentence") return WindowScope::sentence;
    if (s == "document") return WindowScope::document;
    throw ConfigError("window scope must be 'sentence' or 'document', got '" + std::string(s) + "'");
}

std::size_t CoocMatrix::nonzero() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
}

std::optional<KeyId> CoocMatrix::find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t CoocMatrix::count(std::string_view target, std::string_view context) const {
    auto w = find(target);
    auto c = find(context);
    if (!w || !c) return 0;
    const auto& r = rows_[*w];
    auto it = std::lower_bound(r.begin(), r.end(), *c, [](const Entry& e, KeyId id) { return e.context < id; });
    return it != r.end() && it->context == *c ? it->count : 0;
}

std::uint64_t CoocMatrix::row_sum(std::string_view key) const {
    auto id = find(key);
    return id ? row_sums_[*id] : 0;
}

std::uint64_t CoocMatrix::token_freq(std::string_view key) const {
    auto id = find(key);
    return id ? token_freq_[*id] : 0;
}

void CoocMatrix::finalize_marginals() {
    row_sums_.assign(keys_.size(), 0);
    total_pairs_ = 0;
    for (std::size_t w = 0; w < rows_.size(); ++w) {
        for (const auto& e : rows_[w]) row_sums_[w] += e.count;
        total_pairs_ += row_sums_[w];
    }
}

CoocMatrix CoocMatrix::scaled(std::uint64_t factor) const {
    CoocMatrix m = *this;
    for (auto& r : m.rows_)
        for (auto& e : r) e.count *= factor;
    for (auto& f : m.token_freq_) f *= factor;
    m.token_count_ *= factor;
    m.finalize_marginals();
    return m;
}

void CoocMatrix::check_invariants() const {
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < rows_.size(); ++w) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < rows_[w].size(); ++i) {
            if (i && rows_[w][i - 1].context >= rows_[w][i].context) throw Error("row " + keys_[w] + " is not sorted");
            if (rows_[w][i].count == 0) throw Error("row " + keys_[w] + " stores a zero count");
            sum += rows_[w][i].count;
        }
        if (sum != row_sums_[w]) throw Error("row sum mismatch for " + keys_[w]);
        total += sum;
    }
    if (total != total_pairs_) throw Error("total_pairs mismatch");
}

MatrixBuilder::MatrixBuilder(std::string slice_label, WindowOptions window)
    : slice_label_(std::move(slice_label)), window_(window) {}

void MatrixBuilder::add(const std::string& target, const std::string& context, std::uint64_t count) {
    if (count == 0) return;
    counts_[target][context] += count;
}

void MatrixBuilder::add_token(const std::string& key, std::uint64_t count) { freq_[key] += count; }

CoocMatrix MatrixBuilder::finish() && {
    CoocMatrix m;
    m.slice_label_ = std::move(slice_label_);
    m.window_ = window_.window;
    m.scope_ = window_.scope;

    std::vector<std::string> keys;
    for (const auto& [k, _] : freq_) keys.push_back(k);
    for (const auto& [w, row] : counts_) {
        keys.push_back(w);
        for (const auto& [c, _] : row) keys.push_back(c);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    m.keys_ = std::move(keys);
    for (KeyId i = 0; i < m.keys_.size(); ++i) m.index_.emplace(m.keys_[i], i);
    m.rows_.resize(m.keys_.size());
    m.token_freq_.assign(m.keys_.size(), 0);
    std::uint64_t freq_total = 0;
    for (const auto& [k, f] : freq_) {
        m.token_freq_[m.index_.at(k)] = f;
        freq_total += f;
    }
    for (const auto& [w, row] : counts_) {
        auto& r = m.rows_[m.index_.at(w)];
        for (const auto& [c, n] : row) r.push_back({m.index_.at(c), n});
    }
    m.token_count_ = token_count_.value_or(freq_total);
    m.finalize_marginals();
    return m;
}

namespace {

using PairCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

void count_windows(const std::vector<std::vector<KeyId>>& units, std::size_t begin, std::size_t end,
                   std::size_t window, PairCounts& out) {
    for (std::size_t u = begin; u < end; ++u) {
        const auto& seq = units[u];
        for (std::size_t i = 0; i < seq.size(); ++i) {
            std::size_t lo = i >= window ? i - window : 0;
            std::size_t hi = std::min(seq.size(), i + window + 1);
            for (std::size_t j = lo; j < hi; ++j)
                if (j != i) ++out[(std::uint64_t(seq[i]) << 32) | seq[j]];
        }
    }
}

// Keyed units over which windows slide: sentences, or whole documents.
template <class Fn>
void for_each_unit(const TimeSlice& slice, WindowScope scope, Fn&& fn) {
    for (const auto& doc : slice.documents) {
        if (scope == WindowScope::document) {
            std::vector<const Token*> unit;
            for (const auto& s : doc.sentences)
                for (const auto& t : s.tokens) unit.push_back(&t);
            fn(unit);
        } else {
            for (const auto& s : doc.sentences) {
                std::vector<const Token*> unit;
                unit.reserve(s.tokens.size());
                for (const auto& t : s.tokens) unit.push_back(&t);
                fn(unit);
            }
        }
    }
}

} // namespace

CoocMatrix build_matrix(const TimeSlice& slice, WindowOptions window, std::size_t threads) {
    if (window.window < 1) throw Error("window must be at least 1");

    std::vector<std::vector<std::string>> keyed;
    for_each_unit(slice, window.scope, [&](const std::vector<const Token*>& unit) {
        std::vector<std::string> keys;
        keys.reserve(unit.size());
        for (const Token* t : unit)
            if (auto k = t->key(); !k.empty()) keys.push_back(std::move(k));
        keyed.push_back(std::move(keys));
    });

    CoocMatrix m;
    m.slice_label_ = slice.label;
    m.window_ = window.window;
    m.scope_ = window.scope;

    for (const auto& unit : keyed) m.keys_.insert(m.keys_.end(), unit.begin(), unit.end());
    std::sort(m.keys_.begin(), m.keys_.end());
    m.keys_.erase(std::unique(m.keys_.begin(), m.keys_.end()), m.keys_.end());
    for (KeyId i = 0; i < m.keys_.size(); ++i) m.index_.emplace(m.keys_[i], i);

    std::vector<std::vector<KeyId>> units;
    units.reserve(keyed.size());
    m.token_freq_.assign(m.keys_.size(), 0);
    for (const auto& unit : keyed) {
        std::vector<KeyId> ids;
        ids.reserve(unit.size());
        for (const auto& k : unit) {
            KeyId id = m.index_.at(k);
            ++m.token_freq_[id];
            ids.push_back(id);
        }
        m.token_count_ += ids.size();
        units.push_back(std::move(ids));
    }

    // Shard by unit; partial maps merge by addition, so the result does not
    // depend on the shard count.
    threads = std::max<std::size_t>(1, std::min(threads, units.size()));
    std::vector<PairCounts> partial(threads);
    std::size_t chunk = threads ? (units.size() + threads - 1) / threads : 0;
    if (threads == 1) {
        count_windows(units, 0, units.size(), window.window, partial[0]);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t b = std::min(units.size(), t * chunk), e = std::min(units.size(), b + chunk);
            workers.emplace_back(count_windows, std::cref(units), b, e, window.window, std::ref(partial[t]));
        }
        for (auto& w : workers) w.join();
    }
    for (std::size_t t = 1; t < threads; ++t)
        for (const auto& [k, v] : partial[t]) partial[0][k] += v;

    m.rows_.resize(m.keys_.size());
    for (const auto& [k, v] : partial[0]) m.rows_[k >> 32].push_back({KeyId(k & 0xffffffffu), v});
    for (auto& r : m.rows_)
        std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.context < b.context; });
    m.finalize_marginals();
    return m;
}

std::vector<std::pair<std::string, std::uint64_t>> contexts_of(const CoocMatrix& matrix, std::string_view target) {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    auto id = matrix.find(target);
    if (!id) return out;
    for (const auto& e : matrix.row(*id)) out.emplace_back(matrix.key(e.context), e.count);
    return out;
}

std::vector<std::vector<std::string>> occurrence_contexts(const TimeSlice& slice, std::string_view target,
                                                          WindowOptions window) {
    if (window.window < 1) throw Error("window must be at least 1");
    std::vector<std::vector<std::string>> out;
    for_each_unit(slice, window.scope, [&](const std::vector<const Token*>& unit) {
        std::vector<std::string> keys;
        for (const Token* t : unit)
            if (auto k = t->key(); !k.empty()) keys.push_back(std::move(k));
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i] != target) continue;
            std::size_t lo = i >= window.window ? i - window.window : 0;
            std::size_t hi = std::min(keys.size(), i + window.window + 1);
            std::vector<std::string> ctx;
            for (std::size_t j = lo; j < hi; ++j)
                if (j != i) ctx.push_back(keys[j]);
            out.push_back(std::move(ctx));
        }
    });
    return out;
}

void write_matrix(const CoocMatrix& matrix, const std::string& prefix) {
    std::ofstream tsv(prefix + ".tsv", std::ios::binary);
    if (!tsv) throw Error("cannot write " + prefix + ".tsv");
    for (KeyId w = 0; w < matrix.vocabulary_size(); ++w)
        for (const auto& e : matrix.row(w))
            tsv << matrix.key(w) << '\t' << matrix.key(e.context) << '\t' << e.count << '\n';

    std::ofstream meta(prefix + ".meta", std::ios::binary);
    if (!meta) throw Error("cannot write " + prefix + ".meta");
    meta << "slice\t" << matrix.slice_label() << '\n'
         << "N\t" << matrix.token_count() << '\n'
         << "total_pairs\t" << matrix.total_pairs() << '\n'
         << "window\t" << matrix.window() << '\n'
         << "scope\t" << to_string(matrix.scope()) << '\n'
         << "vocabulary\t" << matrix.vocabulary_size() << '\n';
    for (KeyId w = 0; w < matrix.vocabulary_size(); ++w)
        if (matrix.token_freq(w)) meta << "freq\t" << matrix.key(w) << '\t' << matrix.token_freq(w) << '\n';
}

CoocMatrix read_matrix(const std::string& prefix) {
    std::ifstream meta(prefix + ".meta");
    if (!meta) throw Error("cannot open matrix metadata " + prefix + ".meta");
    std::string label;
    std::optional<std::uint64_t> n, total_pairs, vocabulary;
    WindowOptions window;
    std::vector<std::pair<std::string, std::uint64_t>> freqs;
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(meta, line)) {
            ++line_no;
            text::chomp(line);
            if (line.empty()) continue;
            auto f = text::split(line, '\t');
            if (f[0] == "freq" && f.size() == 3) {
                freqs.emplace_back(f[1], text::parse_int(f[2], "freq"));
            } else if (f.size() != 2) {
                throw FormatError("malformed metadata line", line_no);
            } else if (f[0] == "slice") {
                label = f[1];
            } else if (f[0] == "N") {
                n = text::parse_int(f[1], "N");
            } else if (f[0] == "total_pairs") {
                total_pairs = text::parse_int(f[1], "total_pairs");
            } else if (f[0] == "window") {
                window.window = text::parse_int(f[1], "window");
            } else if (f[0] == "scope") {
                window.scope = parse_window_scope(f[1]);
            } else if (f[0] == "vocabulary") {
                vocabulary = text::parse_int(f[1], "vocabulary");
            } else {
                throw FormatError("unknown metadata key '" + f[0] + "'", line_no);
            }
        }
    } catch (const FormatError& e) {
        throw FormatError(prefix + ".meta: " + e.what(), e.line());
    }
    if (!n || !total_pairs) throw FormatError(prefix + ".meta: missing N or total_pairs");

    MatrixBuilder builder(label, window);
    builder.set_token_count(*n);
    for (const auto& [k, f] : freqs) builder.add_token(k, f);

    std::ifstream tsv(prefix + ".tsv");
    if (!tsv) throw Error("cannot open matrix " + prefix + ".tsv");
    line_no = 0;
    while (std::getline(tsv, line)) {
        ++line_no;
        text::chomp(line);
        if (line.empty()) continue;
        auto f = text::split(line, '\t');
        if (f.size() != 3) throw FormatError(prefix + ".tsv: expected 3 columns", line_no);
        builder.add(f[0], f[1], text::parse_int(f[2], "count"));
    }
    CoocMatrix m = std::move(builder).finish();
    if (m.total_pairs() != *total_pairs) throw FormatError(prefix + ": total_pairs does not match the counts");
    if (vocabulary && *vocabulary != m.vocabulary_size())
        throw FormatError(prefix + ": vocabulary size does not match the counts");
    return m;
}

} // namespace metchange
