#pragma once

// Strict parser for the experiment-config format: a flat TOML-compatible
// grammar of [section] headers and key = value lines.  Values are booleans,
// integers, floats, quoted strings, or arrays of numbers.  Unknown sections
// or keys are rejected so a config file is always lossless provenance.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkm::cli {

struct ConfigError : std::runtime_error {
    std::string field;  // "section.key" or "section"
    ConfigError(std::string field_name, const std::string& what)
        : std::runtime_error(what), field(std::move(field_name)) {}
};

struct Value {
    enum class Kind { boolean, integer, real, text, array } kind;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;
    std::vector<double> a;
};

class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<config>");

    [[nodiscard]] const std::string& raw_text() const { return raw_; }

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] bool has_key(const std::string& section, const std::string& key) const;

    [[nodiscard]] bool get_bool(const std::string& section, const std::string& key) const;
    [[nodiscard]] long long get_int(const std::string& section, const std::string& key) const;
    [[nodiscard]] double get_real(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<double> get_array(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<int> get_int_array(const std::string& section, const std::string& key) const;

    template <typename T>
    T get_or(const std::string& section, const std::string& key, T fallback) const;

    // Validates every present section/key against the full schema; throws
    // ConfigError naming the offending field.
    void check_schema() const;
    // Requires the named sections to exist with all their required keys.
    void require_sections(const std::vector<std::string>& sections) const;

private:
    const Value& lookup(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, Value>> sections_;
    std::string raw_;
};

} // namespace dkm::cli
