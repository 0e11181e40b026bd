#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace raf {

/// Flat key/value configuration in a TOML subset: `key = value` lines,
/// `[section]` headers (keys become "section.key"), `#` comments, values that
/// are numbers, booleans, "strings" or [arrays] of those (arrays may span lines).
class KeyValueConfig {
public:
    struct Value {
        enum class Kind { Number, Bool, String, Array };
        Kind kind = Kind::Number;
        double number = 0.0;
        bool integral = false;
        bool boolean = false;
        std::string text;
        std::vector<Value> items;
    };

    static KeyValueConfig parse(std::string_view text, const std::string& source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::vector<std::string> keys() const;

    std::optional<double> real(const std::string& key) const;
    std::optional<long long> integer(const std::string& key) const;
    std::optional<bool> boolean(const std::string& key) const;
    std::optional<std::string> string(const std::string& key) const;
    std::optional<std::vector<double>> reals(const std::string& key) const;
    std::optional<std::vector<long long>> integers(const std::string& key) const;
    std::optional<std::vector<std::string>> strings(const std::string& key) const;

    /// InvalidArgument naming the first key outside `known`; keys under a
    /// listed "prefix." are accepted when the prefix ends with '.'.
    void reject_unknown(std::span<const std::string_view> known) const;

    void set(const std::string& key, Value value) { values_[key] = std::move(value); }

private:
    const Value* find(const std::string& key) const;

    std::string source_;
    std::map<std::string, Value> values_;
};

} // namespace raf
