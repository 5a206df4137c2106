#include "metchange/corpus.hpp"

#include "metchange/error.hpp"
#include "metchange/text.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace metchange {

std::optional<std::string_view> coarse_tag(std::string_view pos) {
    if (pos.starts_with("AD")) return std::string_view("AD");
    if (pos.starts_with("N")) return std::string_view("N");
    if (pos.starts_with("V")) return std::string_view("V");
    return std::nullopt;
}

std::string make_key(std::string_view lemma, std::string_view coarse) {
    std::string key;
    key.reserve(lemma.size() + coarse.size() + 1);
    key.append(lemma).append(":").append(coarse);
    return key;
}

std::string Token::key() const {
    auto coarse = coarse_tag(pos);
    if (!coarse || lemma.empty()) return {};
    return make_key(lemma, *coarse);
}

namespace {

Document parse_header(const std::string& line, std::size_t line_no) {
    Document doc;
    bool have_date = false;
    std::string fields = line.substr(4);
    std::replace(fields.begin(), fields.end(), '\t', ' ');
    for (const auto& field : text::split(fields, ' ')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw FormatError("malformed header field '" + field + "'", line_no);
        std::string name = field.substr(0, eq);
        std::string value = field.substr(eq + 1);
        if (name == "id") {
            doc.id = value;
        } else if (name == "date") {
            try {
                doc.date = static_cast<int>(text::parse_int(value, "date"));
            } catch (const FormatError& e) {
                throw FormatError(e.message(), line_no);
            }
            if (doc.date <= 0) throw FormatError("document date must be positive", line_no);
            have_date = true;
        }
    }
    if (!have_date) throw FormatError("document header without date", line_no);
    return doc;
}

} // namespace

Corpus parse_corpus(std::istream& in) {
    Corpus docs;
    Sentence current;
    auto close_sentence = [&] {
        if (!current.tokens.empty()) {
            docs.back().sentences.push_back(std::move(current));
            current = Sentence{};
        }
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        text::chomp(line);
        if (line.starts_with("#doc") && (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
            if (!docs.empty()) close_sentence();
            docs.push_back(parse_header(line, line_no));
            continue;
        }
        if (text::trim(line).empty()) {
            if (!docs.empty()) close_sentence();
            continue;
        }
        if (docs.empty()) throw FormatError("token line before first document header", line_no);
        auto fields = text::split(line, '\t');
        if (fields.size() < 3) throw FormatError("token line needs 3 tab-separated fields", line_no);
        current.tokens.push_back(Token{std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
    }
    if (!docs.empty()) close_sentence();
    return docs;
}

Corpus read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    try {
        return parse_corpus(in);
    } catch (const FormatError& e) {
        throw FormatError(e.message(), e.line(), path);
    }
}

bool is_punctuation(std::string_view pos, const PreprocessOptions& options) {
    return pos.starts_with("$") || options.punctuation_tags.count(std::string(pos)) > 0;
}

Corpus preprocess(const Corpus& documents, const PreprocessOptions& options) {
    auto retained_key = [&](const Token& t) -> std::string {
        if (t.lemma.empty() || is_punctuation(t.pos, options)) return {};
        return t.key();
    };

    // Corpus-wide frequencies first; the threshold is applied before slicing.
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& doc : documents)
        for (const auto& s : doc.sentences)
            for (const auto& t : s.tokens)
                if (auto k = retained_key(t); !k.empty()) ++freq[k];

    Corpus out;
    out.reserve(documents.size());
    for (const auto& doc : documents) {
        Document d{doc.id, doc.date, {}};
        d.sentences.reserve(doc.sentences.size());
        for (const auto& s : doc.sentences) {
            Sentence kept;
            for (const auto& t : s.tokens) {
                auto k = retained_key(t);
                if (k.empty() || freq[k] < options.min_corpus_freq) continue;
                kept.tokens.push_back(Token{t.surface, t.lemma, std::string(*coarse_tag(t.pos))});
            }
            d.sentences.push_back(std::move(kept));
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string YearRange::label() const { return std::to_string(start) + "-" + std::to_string(end); }

YearRange parse_year_range(std::string_view label) {
    auto s = text::trim(label);
    auto dash = s.find('-', 1);
    if (dash == std::string_view::npos) throw FormatError("period must look like 1700-1800: '" + std::string(s) + "'");
    YearRange r{static_cast<int>(text::parse_int(s.substr(0, dash), "period start")),
                static_cast<int>(text::parse_int(s.substr(dash + 1), "period end"))};
    if (r.start >= r.end) throw FormatError("period start must precede its end: '" + std::string(s) + "'");
    return r;
}

TimeSlice slice(const Corpus& documents, YearRange range, std::string label) {
    if (range.start >= range.end) throw Error("slice start must precede its end");
    TimeSlice ts;
    ts.label = label.empty() ? range.label() : std::move(label);
    ts.range = range;
    for (const auto& doc : documents)
        if (range.contains(doc.date)) ts.documents.push_back(doc);
    ts.token_count = count_tokens(ts.documents);
    return ts;
}

std::size_t count_tokens(const Corpus& documents) {
    std::size_t n = 0;
    for (const auto& doc : documents)
        for (const auto& s : doc.sentences) n += s.tokens.size();
    return n;
}

} // namespace metchange
