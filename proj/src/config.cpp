#include "metchange/config.hpp"

#include "metchange/error.hpp"
#include "metchange/text.hpp"

#include <fstream>

namespace metchange {

const std::vector<std::pair<std::string, std::string>>& Config::defaults() {
    static const std::vector<std::pair<std::string, std::string>> d{
        {"annotation.min_len", "10"},
        {"annotation.per_period", "20"},
        {"annotators", ""},
        {"corpus", ""},
        {"corpus_end", "1926"},
        {"gold", ""},
        {"h2.aggregate", "median"},
        {"h2.cap", "symmetric"},
        {"h2.metric", "PLMI"},
        {"h2.top_n", "100"},
        {"items", ""},
        {"judgments", ""},
        {"measures", "H,H_MON,H_OLS,H2,FREQ_N"},
        {"min_corpus_freq", "5"},
        {"mon.k", "1000"},
        {"mon.n", "auto"},
        {"ols.window_n", "1000"},
        {"output_dir", "out"},
        {"predictions", ""},
        {"punctuation_tags", ""},
        {"seed", "1"},
        {"slices", "auto"},
        {"spearman.resamples", "100000"},
        {"subset_by", "period1"},
        {"subsets", "auto"},
        {"test_set", ""},
        {"threads", "1"},
        {"window", "2"},
        {"window_scope", "sentence"},
    };
    return d;
}

Config::Config() {
    for (const auto& [k, v] : defaults()) values_.emplace(k, v);
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = std::string(text::trim(value));
}

void Config::apply_override(std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must be key=value: '" + std::string(assignment) + "'");
    set(std::string(text::trim(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
}

Config Config::parse(std::istream& in) {
    Config c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            c.apply_override(t);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
}

Config Config::from_header(std::istream& in) {
    Config c;
    std::string line;
    while (std::getline(in, line) && line.starts_with("# ")) {
        auto body = std::string_view(line).substr(2);
        if (body.find(" = ") == std::string_view::npos) continue;
        c.apply_override(body);
    }
    return c;
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

long long Config::get_int(const std::string& key) const {
    try {
        return text::parse_int(get(key), key);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

std::uint64_t Config::get_uint(const std::string& key) const {
    long long v = get_int(key);
    if (v < 0) throw ConfigError(key + " must not be negative");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    std::vector<std::string> out;
    const auto& v = get(key);
    if (text::trim(v).empty()) return out;
    for (const auto& item : text::split(v, ',')) {
        auto t = text::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::string Config::header() const {
    std::string out;
    for (const auto& [k, v] : values_) out += "# " + k + " = " + v + "\n";
    return out;
}

} // namespace metchange
