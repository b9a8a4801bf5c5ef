#pragma once

// Minimal reader/writer for the key/value + object-list documents used for
// scenes and calibrations. The accepted syntax is a subset of TOML:
//
//   key = 1.5
//   flag = true
//   name = "text"
//   point = [1.0, -2.5]
//
//   [[electrode]]
//   id = "X"
//
// Comments start with '#'. Keys before the first block header belong to the
// root block.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slimegate/geometry.hpp"

namespace slimegate {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string field, const std::string& message);

    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

struct ConfigEntry {
    std::string key;
    ConfigValue value;
    int line = 0;
};

struct ConfigBlock {
    std::string kind;  // empty for the root block
    int line = 0;
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(std::string_view key) const;

    double number(std::string_view key, double fallback) const;
    double required_number(std::string_view key) const;
    bool boolean(std::string_view key, bool fallback) const;
    std::string text(std::string_view key, const std::string& fallback) const;
    std::string required_text(std::string_view key) const;
    Vec2 point(std::string_view key, Vec2 fallback) const;
    Vec2 required_point(std::string_view key) const;
    /// Throws on any key not in `allowed`.
    void expect_only(std::initializer_list<std::string_view> allowed) const;
};

struct ConfigDocument {
    ConfigBlock root;
    std::vector<ConfigBlock> blocks;
};

ConfigDocument parse_config(std::string_view text);

/// Shortest decimal form that parses back to the identical double.
std::string format_number(double v);

/// Incremental writer producing documents parse_config accepts.
class ConfigWriter {
public:
    void block(std::string_view kind);
    void number(std::string_view key, double v);
    void boolean(std::string_view key, bool v);
    void text(std::string_view key, std::string_view v);
    void point(std::string_view key, Vec2 p);
    void comment(std::string_view line);
    const std::string& str() const { return out_; }

private:
    std::string out_;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace slimegate
