#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace walkholes {

enum class ValueType : std::uint8_t { integer, real, string, boolean, int_list, real_list };

const char* to_string(ValueType t) noexcept;

using ConfigValue =
    std::variant<std::int64_t, double, std::string, bool, std::vector<std::int64_t>, std::vector<double>>;

ValueType type_of(const ConfigValue& v) noexcept;

/// One `key: type = value` line per entry; `#` starts a comment. Types are
/// int, real, string, bool, int_list, real_list; lists are comma separated.
/// Throws ArgumentError naming the line or key on malformed input or a
/// repeated key.
std::map<std::string, ConfigValue> parse_config(std::string_view text);

std::map<std::string, ConfigValue> load_config(const std::string& path);

struct KeySpec {
    std::string name;
    ValueType type;
    ConfigValue fallback;
};

/// A config checked against a key schema, with defaults filled in.
class Params {
public:
    Params() = default;
    /// Throws ArgumentError for unknown keys and type mismatches (an int is
    /// accepted where a real is expected).
    Params(const std::map<std::string, ConfigValue>& given, const std::vector<KeySpec>& schema);

    std::int64_t integer(const std::string& key) const;
    double real(const std::string& key) const;
    const std::string& string(const std::string& key) const;
    bool boolean(const std::string& key) const;
    const std::vector<std::int64_t>& int_list(const std::string& key) const;
    const std::vector<double>& real_list(const std::string& key) const;

    const std::map<std::string, ConfigValue>& values() const noexcept { return values_; }
    void set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }

private:
    const ConfigValue& at(const std::string& key, ValueType type) const;

    std::map<std::string, ConfigValue> values_;
};

}  // namespace walkholes
