#ifndef METCHANGE_CONFIG_HPP
#define METCHANGE_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace metchange {

// Run configuration: a flat set of `key = value` entries. Every key has a
// default, and the resolved set is printed into report headers as
// `# key = value` lines, which parse back into an identical Config.
class Config {
  public:
    Config(); // all defaults

    static const std::vector<std::pair<std::string, std::string>>& defaults();

    // `key = value` lines; '#' starts a comment line. Unknown keys are errors.
    static Config parse(std::istream& in);
    static Config load_file(const std::string& path);
    // Reads the `# key = value` block at the top of a report.
    static Config from_header(std::istream& in);

    void set(const std::string& key, const std::string& value);
    // "key=value"
    void apply_override(std::string_view assignment);

    const std::string& get(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;

    std::string header() const;

    const std::map<std::string, std::string>& values() const { return values_; }
    bool operator==(const Config&) const = default;

  private:
    std::map<std::string, std::string> values_;
};

} // namespace metchange

#endif
