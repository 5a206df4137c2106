#ifndef METCHANGE_CORPUS_HPP
#define METCHANGE_CORPUS_HPP

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace metchange {

// Coarse part of speech kept by preprocessing: the leading "N", "V" or "AD"
// block of a fine-grained tag (STTS: NN -> N, VVFIN -> V, ADJA -> AD).
// Returns nullopt for function-word tags.
std::optional<std::string_view> coarse_tag(std::string_view pos);

// Builds the "lemma:P" key used for every vocabulary entry.
std::string make_key(std::string_view lemma, std::string_view coarse);

struct Token {
    std::string surface;
    std::string lemma;
    std::string pos;

    // "lemma:P" for content words, empty for everything else.
    std::string key() const;
};

struct Sentence {
    std::vector<Token> tokens;
};

struct Document {
    std::string id;
    int date = 0;
    std::vector<Sentence> sentences;
};

using Corpus = std::vector<Document>;

// Reads the vertical format:
//   #doc id=<text> date=<year>
//   surface<TAB>lemma<TAB>pos
//   (blank line ends a sentence)
// Throws FormatError with the offending line number.
Corpus parse_corpus(std::istream& in);
Corpus read_corpus_file(const std::string& path);

struct PreprocessOptions {
    std::size_t min_corpus_freq = 5;
    // Extra punctuation tags; any tag starting with '$' is punctuation anyway.
    std::set<std::string> punctuation_tags;
};

bool is_punctuation(std::string_view pos, const PreprocessOptions& options);

// Drops function words, punctuation, and lemma:POS units rarer than
// min_corpus_freq over the whole input. Surviving tokens get their tag
// replaced by the coarse tag, so token.key() is the vocabulary key.
// Empty sentences are kept (they contribute nothing downstream).
Corpus preprocess(const Corpus& documents, const PreprocessOptions& options = {});

struct YearRange {
    int start = 0; // inclusive
    int end = 0;   // exclusive

    bool contains(int year) const { return start <= year && year < end; }
    std::string label() const;
    auto operator<=>(const YearRange&) const = default;
};

// Parses "1700-1800".
YearRange parse_year_range(std::string_view label);

struct TimeSlice {
    std::string label;
    YearRange range;
    std::vector<Document> documents;
    // Number of tokens in the slice; for a preprocessed corpus this is the
    // count of retained lemma:POS units.
    std::size_t token_count = 0;

    bool empty() const { return token_count == 0; }
};

// Documents with start <= date < end. Slices may overlap.
TimeSlice slice(const Corpus& documents, YearRange range, std::string label = {});

std::size_t count_tokens(const Corpus& documents);

} // namespace metchange

#endif
