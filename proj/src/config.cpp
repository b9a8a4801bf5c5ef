#include "slimegate/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

namespace slimegate {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + (field.empty() ? "" : " (" + field + ")") + ": " +
                         message),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Drops a trailing comment, respecting quoted strings.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && quoted) {
            ++i;
            continue;
        }
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool valid_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

ConfigValue parse_value(std::string_view raw, int line, const std::string& key) {
    const std::string_view s = trim(raw);
    if (s.empty()) throw ConfigError(line, key, "missing value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < s.size(); ++i) {
            if (s[i] == '\\') {
                if (i + 1 >= s.size()) break;
                const char next = s[++i];
                if (next == 'n') {
                    out.push_back('\n');
                } else if (next == '"' || next == '\\') {
                    out.push_back(next);
                } else {
                    throw ConfigError(line, key, "unsupported escape sequence");
                }
            } else if (s[i] == '"') {
                break;
            } else {
                out.push_back(s[i]);
            }
        }
        if (i != s.size() - 1) throw ConfigError(line, key, "unterminated or trailing characters after string");
        return out;
    }
    if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(line, key, "unterminated array");
        std::vector<double> values;
        std::string_view body = trim(s.substr(1, s.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const std::string_view item = trim(body.substr(0, comma));
            double v = 0.0;
            if (!parse_double(item, v)) throw ConfigError(line, key, "array items must be numbers");
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
            if (body.empty()) throw ConfigError(line, key, "trailing comma in array");
        }
        return values;
    }
    double v = 0.0;
    if (!parse_double(s, v)) throw ConfigError(line, key, "expected a number, boolean, string or array");
    return v;
}

}  // namespace

const ConfigEntry* ConfigBlock::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

double ConfigBlock::number(std::string_view key, double fallback) const {
    const ConfigEntry* e = find(key);
    if (e == nullptr) return fallback;
    if (const auto* v = std::get_if<double>(&e->value)) return *v;
    throw ConfigError(e->line, e->key, "expected a number");
}

double ConfigBlock::required_number(std::string_view key) const {
    if (find(key) == nullptr) throw ConfigError(line, std::string(key), "missing required number in [[" + kind + "]]");
    return number(key, 0.0);
}

bool ConfigBlock::boolean(std::string_view key, bool fallback) const {
    const ConfigEntry* e = find(key);
    if (e == nullptr) return fallback;
    if (const auto* v = std::get_if<bool>(&e->value)) return *v;
    throw ConfigError(e->line, e->key, "expected true or false");
}

std::string ConfigBlock::text(std::string_view key, const std::string& fallback) const {
    const ConfigEntry* e = find(key);
    if (e == nullptr) return fallback;
    if (const auto* v = std::get_if<std::string>(&e->value)) return *v;
    throw ConfigError(e->line, e->key, "expected a quoted string");
}

std::string ConfigBlock::required_text(std::string_view key) const {
    if (find(key) == nullptr) throw ConfigError(line, std::string(key), "missing required string in [[" + kind + "]]");
    return text(key, {});
}

Vec2 ConfigBlock::point(std::string_view key, Vec2 fallback) const {
    const ConfigEntry* e = find(key);
    if (e == nullptr) return fallback;
    const auto* v = std::get_if<std::vector<double>>(&e->value);
    if (v == nullptr || v->size() != 2) throw ConfigError(e->line, e->key, "expected a [x, y] pair");
    return {(*v)[0], (*v)[1]};
}

Vec2 ConfigBlock::required_point(std::string_view key) const {
    if (find(key) == nullptr) throw ConfigError(line, std::string(key), "missing required point in [[" + kind + "]]");
    return point(key, {});
}

void ConfigBlock::expect_only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& e : entries) {
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
            throw ConfigError(e.line, e.key, "unknown key" + (kind.empty() ? std::string() : " in [[" + kind + "]]"));
        }
    }
}

ConfigDocument parse_config(std::string_view text) {
    ConfigDocument doc;
    ConfigBlock* current = &doc.root;
    int line_no = 0;
    bool any_content = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        any_content = true;

        if (line.starts_with("[[")) {
            if (!line.ends_with("]]")) throw ConfigError(line_no, {}, "malformed block header");
            const std::string_view kind = trim(line.substr(2, line.size() - 4));
            if (!valid_key(kind)) throw ConfigError(line_no, std::string(kind), "invalid block name");
            doc.blocks.push_back(ConfigBlock{std::string(kind), line_no, {}});
            current = &doc.blocks.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, {}, "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (!valid_key(key)) throw ConfigError(line_no, key, "invalid key");
        if (current->find(key) != nullptr) throw ConfigError(line_no, key, "duplicate key");
        current->entries.push_back({key, parse_value(line.substr(eq + 1), line_no, key), line_no});
    }
    if (!any_content) throw ConfigError(line_no, {}, "empty document");
    return doc;
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), ptr);
    // Keep integral values recognisably numeric for TOML readers.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void ConfigWriter::block(std::string_view kind) {
    if (!out_.empty()) out_ += '\n';
    out_ += "[[";
    out_ += kind;
    out_ += "]]\n";
}

void ConfigWriter::number(std::string_view key, double v) {
    out_ += key;
    out_ += " = ";
    out_ += format_number(v);
    out_ += '\n';
}

void ConfigWriter::boolean(std::string_view key, bool v) {
    out_ += key;
    out_ += v ? " = true\n" : " = false\n";
}

void ConfigWriter::text(std::string_view key, std::string_view v) {
    out_ += key;
    out_ += " = \"";
    for (char c : v) {
        if (c == '"' || c == '\\') out_ += '\\';
        if (c == '\n') {
            out_ += "\\n";
            continue;
        }
        out_ += c;
    }
    out_ += "\"\n";
}

void ConfigWriter::point(std::string_view key, Vec2 p) {
    out_ += key;
    out_ += " = [";
    out_ += format_number(p.x);
    out_ += ", ";
    out_ += format_number(p.y);
    out_ += "]\n";
}

void ConfigWriter::comment(std::string_view line) {
    out_ += "# ";
    out_ += line;
    out_ += '\n';
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

}  // namespace slimegate
