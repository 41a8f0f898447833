#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dkm::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& text, Value& v) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    if (t.find_first_of(".eE") == std::string::npos || (t.size() > 2 && t.rfind("0x", 0) == 0)) {
        errno = 0;
        const long long i = std::strtoll(t.c_str(), &end, 10);
        if (end == t.c_str() + t.size() && errno == 0) {
            v.kind = Value::Kind::integer;
            v.i = i;
            v.d = static_cast<double>(i);
            return true;
        }
    }
    errno = 0;
    const double d = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size() && errno == 0) {
        v.kind = Value::Kind::real;
        v.d = d;
        return true;
    }
    return false;
}

Value parse_value(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    Value v{};
    if (t == "true" || t == "false") {
        v.kind = Value::Kind::boolean;
        v.b = t == "true";
        return v;
    }
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        v.kind = Value::Kind::text;
        v.s = t.substr(1, t.size() - 2);
        return v;
    }
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') throw ConfigError(field, field + ": unterminated array");
        v.kind = Value::Kind::array;
        std::string inner = t.substr(1, t.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            Value elem{};
            if (trim(item).empty()) throw ConfigError(field, field + ": empty array element");
            if (!parse_number(item, elem)) throw ConfigError(field, field + ": non-numeric array element '" + trim(item) + "'");
            v.a.push_back(elem.d);
        }
        return v;
    }
    if (parse_number(t, v)) return v;
    throw ConfigError(field, field + ": cannot parse value '" + t + "'");
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_text(text, path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError(stripped, origin + ":" + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) throw ConfigError(stripped, origin + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(stripped, origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) throw ConfigError(stripped, origin + ": empty key");
        const std::string field = section.empty() ? key : section + "." + key;
        if (cfg.sections_[section].count(key) > 0) {
            throw ConfigError(field, origin + ": duplicate key " + field);
        }
        cfg.sections_[section][key] = parse_value(field, stripped.substr(eq + 1));
    }
    return cfg;
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool Config::has_key(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

const Value& Config::lookup(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    const std::string field = section.empty() ? key : section + "." + key;
    if (it == sections_.end()) throw ConfigError(section, "missing section [" + section + "]");
    const auto kt = it->second.find(key);
    if (kt == it->second.end()) throw ConfigError(field, "missing field " + field);
    return kt->second;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    const std::string field = section + "." + key;
    if (v.kind != Value::Kind::boolean) throw ConfigError(field, field + " must be true or false");
    return v.b;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    const std::string field = section + "." + key;
    if (v.kind != Value::Kind::integer) throw ConfigError(field, field + " must be an integer");
    return v.i;
}

double Config::get_real(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    const std::string field = section + "." + key;
    if (v.kind != Value::Kind::real && v.kind != Value::Kind::integer) {
        throw ConfigError(field, field + " must be a number");
    }
    return v.d;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    const std::string field = section + "." + key;
    if (v.kind != Value::Kind::text) throw ConfigError(field, field + " must be a quoted string");
    return v.s;
}

std::vector<double> Config::get_array(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    const std::string field = section + "." + key;
    if (v.kind != Value::Kind::array) throw ConfigError(field, field + " must be an array");
    return v.a;
}

std::vector<int> Config::get_int_array(const std::string& section, const std::string& key) const {
    const auto a = get_array(section, key);
    std::vector<int> out;
    out.reserve(a.size());
    const std::string field = section + "." + key;
    for (double d : a) {
        if (d != std::floor(d)) throw ConfigError(field, field + " must contain integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

template <>
long long Config::get_or(const std::string& section, const std::string& key, long long fallback) const {
    return has_key(section, key) ? get_int(section, key) : fallback;
}
template <>
double Config::get_or(const std::string& section, const std::string& key, double fallback) const {
    return has_key(section, key) ? get_real(section, key) : fallback;
}
template <>
bool Config::get_or(const std::string& section, const std::string& key, bool fallback) const {
    return has_key(section, key) ? get_bool(section, key) : fallback;
}

namespace {

struct KeySpec {
    const char* name;
    bool required;
};

const std::map<std::string, std::vector<KeySpec>>& schema() {
    static const std::map<std::string, std::vector<KeySpec>> s = {
        {"", {{"seed", false}}},
        {"solution",
         {{"kind", true}, {"dim", true}, {"horizon", true}, {"kappa", true}, {"direction", false}, {"variance", false}}},
        {"box", {{"t0", true}, {"t1", true}, {"lo", true}, {"hi", true}}},
        {"train",
         {{"widths", true},
          {"radius", true},
          {"optimizer", true},
          {"learning_rate", true},
          {"steps", true},
          {"m1", true},
          {"m2", true},
          {"activation", true},
          {"fresh_batch", true},
          {"restarts", false},
          {"quad_points", false}}},
        {"rates",
         {{"m1_list", true},
          {"width_list", true},
          {"theta_samples", true},
          {"theta_radius", true},
          {"gap_m2", true},
          {"gap_reps", false},
          {"sweep_steps", true},
          {"sweep_seeds", true},
          {"svg", false}}},
        {"bounds", {{"trials", true}, {"points_per_case", false}}},
        {"fk", {{"samples", true}, {"trials", true}, {"t", false}, {"x", false}}},
        {"mc", {{"p", true}, {"n_list", true}, {"trials", true}}},
        {"embed",
         {{"deep_widths", true}, {"source", true}, {"shallow_widths", false}, {"points", false}}},
    };
    return s;
}

} // namespace

void Config::check_schema() const {
    for (const auto& [name, keys] : sections_) {
        const auto it = schema().find(name);
        if (it == schema().end()) throw ConfigError(name, "unknown section [" + name + "]");
        for (const auto& [key, value] : keys) {
            const bool known = std::any_of(it->second.begin(), it->second.end(),
                                           [&](const KeySpec& ks) { return key == ks.name; });
            if (!known) {
                const std::string field = name.empty() ? key : name + "." + key;
                throw ConfigError(field, "unknown field " + field);
            }
        }
    }
}

void Config::require_sections(const std::vector<std::string>& names) const {
    for (const auto& name : names) {
        const auto it = sections_.find(name);
        if (it == sections_.end()) throw ConfigError(name, "missing section [" + name + "]");
        for (const KeySpec& ks : schema().at(name)) {
            if (ks.required && it->second.count(ks.name) == 0) {
                throw ConfigError(name + "." + ks.name, "missing field " + name + "." + ks.name);
            }
        }
    }
}

} // namespace dkm::cli
