#ifndef METCHANGE_MATRIX_HPP
#define METCHANGE_MATRIX_HPP

#include "metchange/corpus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace metchange {

enum class WindowScope { sentence, document };

std::string_view to_string(WindowScope scope);
WindowScope parse_window_scope(std::string_view s);

struct WindowOptions {
    std::size_t window = 2; // tokens on each side
    WindowScope scope = WindowScope::sentence;
};

using KeyId = std::uint32_t;

class CoocMatrix;
CoocMatrix build_matrix(const TimeSlice& slice, WindowOptions window, std::size_t threads);

// Sparse target x context count matrix for one time slice. Targets and
// contexts share one vocabulary whose ids follow lexicographic key order, so
// iterating ids (or a row) visits keys in sorted order.
class CoocMatrix {
  public:
    struct Entry {
        KeyId context;
        std::uint64_t count;
    };

    const std::string& slice_label() const { return slice_label_; }
    std::size_t window() const { return window_; }
    WindowScope scope() const { return scope_; }
    // N: tokens in the slice.
    std::uint64_t token_count() const { return token_count_; }
    std::uint64_t total_pairs() const { return total_pairs_; }
    std::size_t vocabulary_size() const { return keys_.size(); }
    std::size_t nonzero() const;

    std::optional<KeyId> find(std::string_view key) const;
    const std::string& key(KeyId id) const { return keys_[id]; }
    const std::vector<std::string>& keys() const { return keys_; }

    std::span<const Entry> row(KeyId id) const { return rows_[id]; }
    std::uint64_t row_sum(KeyId id) const { return row_sums_[id]; }
    std::uint64_t token_freq(KeyId id) const { return token_freq_[id]; }

    std::uint64_t count(std::string_view target, std::string_view context) const;
    std::uint64_t row_sum(std::string_view key) const;
    std::uint64_t token_freq(std::string_view key) const;

    // Same matrix with every count and frequency (and N) multiplied by factor.
    CoocMatrix scaled(std::uint64_t factor) const;

    // Throws Error if a marginal disagrees with the counts.
    void check_invariants() const;

  private:
    friend class MatrixBuilder;
    friend CoocMatrix build_matrix(const TimeSlice&, WindowOptions, std::size_t);
    void finalize_marginals();

    std::string slice_label_;
    std::size_t window_ = 2;
    WindowScope scope_ = WindowScope::sentence;
    std::uint64_t token_count_ = 0;
    std::uint64_t total_pairs_ = 0;
    std::vector<std::string> keys_;
    std::unordered_map<std::string, KeyId> index_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<std::uint64_t> row_sums_;
    std::vector<std::uint64_t> token_freq_;
};

// Assembles a CoocMatrix from keyed counts. Used by the corpus counter, the
// file reader, and for constructing matrices directly in tests.
class MatrixBuilder {
  public:
    MatrixBuilder(std::string slice_label, WindowOptions window = {});

    void add(const std::string& target, const std::string& context, std::uint64_t count = 1);
    void add_token(const std::string& key, std::uint64_t count = 1);
    // Defaults to the sum of token frequencies.
    void set_token_count(std::uint64_t n) { token_count_ = n; }

    CoocMatrix finish() &&;

  private:
    std::string slice_label_;
    WindowOptions window_;
    std::optional<std::uint64_t> token_count_;
    std::map<std::string, std::map<std::string, std::uint64_t>> counts_;
    std::map<std::string, std::uint64_t> freq_;
};

// Counts, for every token position i, each position j with 0 < |i-j| <= window
// inside the same sentence (or document, for WindowScope::document).
// Each position contributes to its own row only.
CoocMatrix build_matrix(const TimeSlice& slice, WindowOptions window = {}, std::size_t threads = 1);

// The target's row keyed by context; empty if the target is absent.
std::vector<std::pair<std::string, std::uint64_t>> contexts_of(const CoocMatrix& matrix, std::string_view target);

// One multiset of windowed neighbour keys per occurrence of target, in corpus
// order. Summing them reproduces contexts_of.
std::vector<std::vector<std::string>> occurrence_contexts(const TimeSlice& slice, std::string_view target,
                                                          WindowOptions window = {});

// Persistence: `<prefix>.tsv` holds sorted target<TAB>context<TAB>count rows;
// `<prefix>.meta` holds slice label, N, total_pairs, window and the token
// frequency table. write(read(x)) is byte-identical to x.
void write_matrix(const CoocMatrix& matrix, const std::string& prefix);
CoocMatrix read_matrix(const std::string& prefix);

} // namespace metchange

#endif
