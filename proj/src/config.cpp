#include "raf/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "raf/error.hpp"

namespace raf {

namespace {

using Value = KeyValueConfig::Value;

class ValueParser {
public:
    ValueParser(std::string_view text, std::string where) : text_(text), where_(std::move(where)) {}

    Value parse_all()
    {
        Value v = parse_value();
        skip_space();
        if (pos_ != text_.size()) {
            fail("trailing characters after value");
        }
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::ParseError, where_ + ": " + what); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    Value parse_value()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("missing value");
        }
        const char c = text_[pos_];
        if (c == '[') {
            return parse_array();
        }
        if (c == '"') {
            return parse_string();
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            Value v;
            v.kind = Value::Kind::Bool;
            v.boolean = true;
            return v;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            Value v;
            v.kind = Value::Kind::Bool;
            return v;
        }
        return parse_number();
    }

    Value parse_array()
    {
        ++pos_;
        Value v;
        v.kind = Value::Kind::Array;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return v;
        }
        for (;;) {
            v.items.push_back(parse_value());
            skip_space();
            if (pos_ >= text_.size()) {
                fail("unterminated array");
            }
            if (text_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (text_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail("expected ',' or ']' in array");
        }
    }

    Value parse_string()
    {
        ++pos_;
        Value v;
        v.kind = Value::Kind::String;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\\') {
                if (pos_ >= text_.size()) {
                    fail("dangling escape");
                }
                const char e = text_[pos_++];
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            v.text.push_back(c);
        }
        if (pos_ >= text_.size()) {
            fail("unterminated string");
        }
        ++pos_;
        return v;
    }

    Value parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                       text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string token;
        for (char c : text_.substr(start, pos_ - start)) {
            if (c != '_') {
                token.push_back(c);
            }
        }
        Value v;
        v.kind = Value::Kind::Number;
        const char* first = token.data();
        const char* last = token.data() + token.size();
        if (!token.empty() && token.front() == '+') {
            ++first;
        }
        const auto res = std::from_chars(first, last, v.number);
        if (token.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v.number)) {
            fail("cannot parse value '" + token + "'");
        }
        v.integral = token.find_first_of(".eE") == std::string::npos;
        return v;
    }

    std::string_view text_;
    std::string where_;
    std::size_t pos_ = 0;
};

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) {
            in_string = !in_string;
        } else if (line[i] == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

int bracket_balance(const std::string& s)
{
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) {
            in_string = !in_string;
        } else if (!in_string) {
            depth += s[i] == '[' ? 1 : (s[i] == ']' ? -1 : 0);
        }
    }
    return depth;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& source)
{
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(strip_comment(line));
        if (body.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (body.front() == '[' && body.find('=') == std::string::npos) {
            if (body.back() != ']') {
                throw Error(ErrorCode::ParseError, where + ": malformed section header");
            }
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, where + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') {
            key = key.substr(1, key.size() - 2);
        }
        if (key.empty()) {
            throw Error(ErrorCode::ParseError, where + ": empty key");
        }
        std::string value_text = body.substr(eq + 1);
        while (bracket_balance(value_text) > 0 && std::getline(in, line)) {
            ++line_no;
            value_text += "\n" + strip_comment(line);
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full_key) != 0) {
            throw Error(ErrorCode::ParseError, where + ": duplicate key '" + full_key + "'");
        }
        cfg.values_[full_key] = ValueParser(value_text, where).parse_all();
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::vector<std::string> KeyValueConfig::keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        out.push_back(k);
    }
    return out;
}

const KeyValueConfig::Value* KeyValueConfig::find(const std::string& key) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

namespace {

[[noreturn]] void type_error(const std::string& key, const char* expected)
{
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be " + expected);
}

double as_real(const Value& v, const std::string& key)
{
    if (v.kind != Value::Kind::Number) {
        type_error(key, "a number");
    }
    return v.number;
}

long long as_integer(const Value& v, const std::string& key)
{
    if (v.kind != Value::Kind::Number || !v.integral) {
        type_error(key, "an integer");
    }
    return static_cast<long long>(v.number);
}

std::string as_string(const Value& v, const std::string& key)
{
    if (v.kind != Value::Kind::String) {
        type_error(key, "a string");
    }
    return v.text;
}

template <typename T, typename F>
std::optional<std::vector<T>> as_list(const Value* v, const std::string& key, F convert)
{
    if (v == nullptr) {
        return std::nullopt;
    }
    std::vector<T> out;
    if (v->kind != Value::Kind::Array) {
        out.push_back(convert(*v, key));
        return out;
    }
    for (const auto& item : v->items) {
        out.push_back(convert(item, key));
    }
    return out;
}

} // namespace

std::optional<double> KeyValueConfig::real(const std::string& key) const
{
    const auto* v = find(key);
    return v ? std::optional<double>(as_real(*v, key)) : std::nullopt;
}

std::optional<long long> KeyValueConfig::integer(const std::string& key) const
{
    const auto* v = find(key);
    return v ? std::optional<long long>(as_integer(*v, key)) : std::nullopt;
}

std::optional<bool> KeyValueConfig::boolean(const std::string& key) const
{
    const auto* v = find(key);
    if (v == nullptr) {
        return std::nullopt;
    }
    if (v->kind != Value::Kind::Bool) {
        type_error(key, "true or false");
    }
    return v->boolean;
}

std::optional<std::string> KeyValueConfig::string(const std::string& key) const
{
    const auto* v = find(key);
    return v ? std::optional<std::string>(as_string(*v, key)) : std::nullopt;
}

std::optional<std::vector<double>> KeyValueConfig::reals(const std::string& key) const
{
    return as_list<double>(find(key), key, as_real);
}

std::optional<std::vector<long long>> KeyValueConfig::integers(const std::string& key) const
{
    return as_list<long long>(find(key), key, as_integer);
}

std::optional<std::vector<std::string>> KeyValueConfig::strings(const std::string& key) const
{
    return as_list<std::string>(find(key), key, as_string);
}

void KeyValueConfig::reject_unknown(std::span<const std::string_view> known) const
{
    for (const auto& [key, value] : values_) {
        bool ok = false;
        for (const auto k : known) {
            if (k == key || (!k.empty() && k.back() == '.' && key.rfind(k, 0) == 0)) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw Error(ErrorCode::InvalidArgument, source_ + ": unknown config key '" + key + "'");
        }
    }
}

} // namespace raf
