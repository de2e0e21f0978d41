#include "walkholes/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "walkholes/errors.hpp"

namespace walkholes {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::int64_t parse_int(std::string_view s, const std::string& key)
{
    s = trim(s);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ArgumentError(key + ": '" + std::string(s) + "' is not an integer");
    }
    return v;
}

double parse_real(std::string_view s, const std::string& key)
{
    s = trim(s);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ArgumentError(key + ": '" + std::string(s) + "' is not a real number");
    }
    return v;
}

template <class T, class F>
std::vector<T> parse_list(std::string_view s, F parse_one)
{
    std::vector<T> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(parse_one(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

const char* to_string(ValueType t) noexcept
{
    switch (t) {
    case ValueType::integer: return "int";
    case ValueType::real: return "real";
    case ValueType::string: return "string";
    case ValueType::boolean: return "bool";
    case ValueType::int_list: return "int_list";
    case ValueType::real_list: return "real_list";
    }
    return "?";
}

ValueType type_of(const ConfigValue& v) noexcept { return static_cast<ValueType>(v.index()); }

std::map<std::string, ConfigValue> parse_config(std::string_view text)
{
    std::map<std::string, ConfigValue> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        const auto colon = line.find(':');
        const auto eq = line.find('=');
        if (colon == std::string_view::npos || eq == std::string_view::npos || eq < colon) {
            throw ArgumentError(where + ": expected 'key: type = value'");
        }
        const std::string key(trim(line.substr(0, colon)));
        const std::string type(trim(line.substr(colon + 1, eq - colon - 1)));
        const std::string_view raw = trim(line.substr(eq + 1));
        if (key.empty()) throw ArgumentError(where + ": missing key");
        if (out.count(key)) throw ArgumentError(key + ": given more than once");

        ConfigValue value;
        if (type == "int") {
            value = parse_int(raw, key);
        } else if (type == "real") {
            value = parse_real(raw, key);
        } else if (type == "string") {
            std::string_view s = raw;
            if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
            value = std::string(s);
        } else if (type == "bool") {
            if (raw == "true") {
                value = true;
            } else if (raw == "false") {
                value = false;
            } else {
                throw ArgumentError(key + ": '" + std::string(raw) + "' is not true or false");
            }
        } else if (type == "int_list") {
            value = parse_list<std::int64_t>(raw, [&](std::string_view s) { return parse_int(s, key); });
        } else if (type == "real_list") {
            value = parse_list<double>(raw, [&](std::string_view s) { return parse_real(s, key); });
        } else {
            throw ArgumentError(key + ": unknown type '" + type + "'");
        }
        out.emplace(key, std::move(value));
        if (nl == text.size()) break;
    }
    return out;
}

std::map<std::string, ConfigValue> load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ArgumentError("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Params::Params(const std::map<std::string, ConfigValue>& given, const std::vector<KeySpec>& schema)
{
    for (const auto& spec : schema) values_[spec.name] = spec.fallback;
    for (const auto& [key, value] : given) {
        const KeySpec* spec = nullptr;
        for (const auto& s : schema) {
            if (s.name == key) spec = &s;
        }
        if (!spec) throw ArgumentError(key + ": unknown key");
        const ValueType t = type_of(value);
        if (t == spec->type) {
            values_[key] = value;
        } else if (spec->type == ValueType::real && t == ValueType::integer) {
            values_[key] = static_cast<double>(std::get<std::int64_t>(value));
        } else if (spec->type == ValueType::real_list && t == ValueType::int_list) {
            const auto& ints = std::get<std::vector<std::int64_t>>(value);
            values_[key] = std::vector<double>(ints.begin(), ints.end());
        } else {
            throw ArgumentError(key + ": expected type " + to_string(spec->type) + ", got " + to_string(t));
        }
    }
}

const ConfigValue& Params::at(const std::string& key, ValueType type) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ArgumentError(key + ": not set");
    if (type_of(it->second) != type) throw ArgumentError(key + ": is not of type " + std::string(to_string(type)));
    return it->second;
}

std::int64_t Params::integer(const std::string& key) const { return std::get<std::int64_t>(at(key, ValueType::integer)); }
double Params::real(const std::string& key) const { return std::get<double>(at(key, ValueType::real)); }
const std::string& Params::string(const std::string& key) const { return std::get<std::string>(at(key, ValueType::string)); }
bool Params::boolean(const std::string& key) const { return std::get<bool>(at(key, ValueType::boolean)); }
const std::vector<std::int64_t>& Params::int_list(const std::string& key) const
{
    return std::get<std::vector<std::int64_t>>(at(key, ValueType::int_list));
}
const std::vector<double>& Params::real_list(const std::string& key) const
{
    return std::get<std::vector<double>>(at(key, ValueType::real_list));
}

}  // namespace walkholes
