#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace omni::toml {

// Minimal TOML reader covering the subset used by this project's config
// files: tables, arrays of tables, basic/literal strings, integers, floats,
// booleans, and single- or multi-line arrays of scalars. No datetimes, no
// dotted keys, no inline tables.

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line)
        : std::runtime_error("toml: line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

struct Value {
    std::variant<std::string, int64_t, double, bool, Array, Table> data;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_int() const { return std::holds_alternative<int64_t>(data); }
    bool is_float() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
    bool is_table() const { return std::holds_alternative<Table>(data); }

    const std::string& as_string() const { return std::get<std::string>(data); }
    int64_t as_int() const { return std::get<int64_t>(data); }
    // Accepts integer literals where a float is expected.
    double as_float() const {
        if (is_int()) return static_cast<double>(as_int());
        return std::get<double>(data);
    }
    bool as_bool() const { return std::get<bool>(data); }
    const Array& as_array() const { return std::get<Array>(data); }
    const Table& as_table() const { return std::get<Table>(data); }
    Table& as_table() { return std::get<Table>(data); }
};

Table parse(std::string_view text);
Table parse_file(const std::string& path);

// Lookup helpers; `find` returns nullptr when the key is absent.
const Value* find(const Table& table, const std::string& key);
std::string get_string(const Table& table, const std::string& key, const std::string& fallback);
int64_t get_int(const Table& table, const std::string& key, int64_t fallback);
double get_float(const Table& table, const std::string& key, double fallback);
bool get_bool(const Table& table, const std::string& key, bool fallback);
std::vector<std::string> get_string_array(const Table& table, const std::string& key);

}  // namespace omni::toml
