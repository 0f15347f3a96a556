#include "omniengine/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace omni::toml {

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line); }

    void skip_ws(bool include_newlines) {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (include_newlines && c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    std::string parse_key() {
        skip_ws(false);
        if (eof()) fail("expected key");
        if (peek() == '"' || peek() == '\'') return parse_string();
        std::string key;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                key += advance();
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected key");
        return key;
    }

    std::string parse_string() {
        char quote = advance();
        std::string out;
        if (quote == '\'') {
            while (!eof() && peek() != '\'') {
                if (peek() == '\n') fail("newline in literal string");
                out += advance();
            }
            if (eof()) fail("unterminated string");
            advance();
            return out;
        }
        while (!eof() && peek() != '"') {
            char c = advance();
            if (c == '\n') fail("newline in string");
            if (c == '\\') {
                if (eof()) fail("dangling escape");
                char esc = advance();
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'u': {
                        unsigned code = 0;
                        for (int i = 0; i < 4; ++i) {
                            if (eof()) fail("truncated \\u escape");
                            char h = advance();
                            code <<= 4;
                            if (h >= '0' && h <= '9') code |= static_cast<unsigned>(h - '0');
                            else if (h >= 'a' && h <= 'f') code |= static_cast<unsigned>(h - 'a' + 10);
                            else if (h >= 'A' && h <= 'F') code |= static_cast<unsigned>(h - 'A' + 10);
                            else fail("bad hex digit in \\u escape");
                        }
                        // UTF-8 encode (BMP only).
                        if (code < 0x80) {
                            out += static_cast<char>(code);
                        } else if (code < 0x800) {
                            out += static_cast<char>(0xc0 | (code >> 6));
                            out += static_cast<char>(0x80 | (code & 0x3f));
                        } else {
                            out += static_cast<char>(0xe0 | (code >> 12));
                            out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
                            out += static_cast<char>(0x80 | (code & 0x3f));
                        }
                        break;
                    }
                    default: fail("unsupported escape");
                }
            } else {
                out += c;
            }
        }
        if (eof()) fail("unterminated string");
        advance();
        return out;
    }

    Value parse_scalar() {
        char c = peek();
        if (c == '"' || c == '\'') return Value{parse_string()};
        if (c == 't' || c == 'f') {
            if (text.substr(pos, 4) == "true") {
                pos += 4;
                return Value{true};
            }
            if (text.substr(pos, 5) == "false") {
                pos += 5;
                return Value{false};
            }
            fail("bad literal");
        }
        // Number: scan the token, decide int vs float.
        size_t start = pos;
        while (!eof()) {
            char d = peek();
            if (std::isdigit(static_cast<unsigned char>(d)) || d == '+' || d == '-' || d == '.' ||
                d == 'e' || d == 'E' || d == '_') {
                advance();
            } else {
                break;
            }
        }
        std::string token(text.substr(start, pos - start));
        std::erase(token, '_');
        if (token.empty()) fail("expected value");
        bool is_float = token.find_first_of(".eE") != std::string::npos;
        if (is_float) {
            double v = 0;
            auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || p != token.data() + token.size()) fail("bad float: " + token);
            return Value{v};
        }
        int64_t v = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || p != token.data() + token.size()) fail("bad integer: " + token);
        return Value{v};
    }

    Value parse_value() {
        skip_ws(false);
        if (eof()) fail("expected value");
        if (peek() == '[') {
            advance();
            Array array;
            skip_ws(true);
            while (!eof() && peek() != ']') {
                array.push_back(parse_value());
                skip_ws(true);
                if (!eof() && peek() == ',') {
                    advance();
                    skip_ws(true);
                }
            }
            if (eof()) fail("unterminated array");
            advance();
            return Value{array};
        }
        return parse_scalar();
    }

    // Walks (creating as needed) to the table named by the dotted path.
    Table* descend(Table& root, const std::vector<std::string>& path, bool array_of_tables) {
        Table* current = &root;
        for (size_t i = 0; i < path.size(); ++i) {
            const std::string& name = path[i];
            bool last = i + 1 == path.size();
            auto it = current->find(name);
            if (last && array_of_tables) {
                if (it == current->end()) {
                    it = current->emplace(name, Value{Array{}}).first;
                }
                if (!it->second.is_array()) fail("'" + name + "' is not an array of tables");
                auto& arr = std::get<Array>(it->second.data);
                arr.push_back(Value{Table{}});
                return &std::get<Table>(arr.back().data);
            }
            if (it == current->end()) {
                it = current->emplace(name, Value{Table{}}).first;
            }
            if (it->second.is_array()) {
                auto& arr = std::get<Array>(it->second.data);
                if (arr.empty() || !arr.back().is_table()) fail("'" + name + "' is not a table");
                current = &std::get<Table>(arr.back().data);
            } else if (it->second.is_table()) {
                current = &std::get<Table>(it->second.data);
            } else {
                fail("'" + name + "' is not a table");
            }
        }
        return current;
    }

    std::vector<std::string> parse_table_path() {
        std::vector<std::string> path;
        for (;;) {
            path.push_back(parse_key());
            skip_ws(false);
            if (!eof() && peek() == '.') {
                advance();
                continue;
            }
            break;
        }
        return path;
    }

    Table parse_document() {
        Table root;
        Table* current = &root;
        for (;;) {
            skip_ws(true);
            if (eof()) break;
            if (peek() == '[') {
                advance();
                bool array_of_tables = !eof() && peek() == '[';
                if (array_of_tables) advance();
                auto path = parse_table_path();
                skip_ws(false);
                if (eof() || advance() != ']') fail("expected ']'");
                if (array_of_tables) {
                    if (eof() || advance() != ']') fail("expected ']]'");
                }
                current = descend(root, path, array_of_tables);
                continue;
            }
            std::string key = parse_key();
            skip_ws(false);
            if (eof() || advance() != '=') fail("expected '=' after key '" + key + "'");
            Value value = parse_value();
            if (current->count(key)) fail("duplicate key '" + key + "'");
            current->emplace(std::move(key), std::move(value));
            skip_ws(false);
            if (!eof() && peek() != '\n') fail("trailing characters after value");
        }
        return root;
    }
};

}  // namespace

Table parse(std::string_view text) {
    Parser parser{text};
    return parser.parse_document();
}

Table parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    return parse(content);
}

const Value* find(const Table& table, const std::string& key) {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
}

std::string get_string(const Table& table, const std::string& key, const std::string& fallback) {
    const Value* v = find(table, key);
    return v && v->is_string() ? v->as_string() : fallback;
}

int64_t get_int(const Table& table, const std::string& key, int64_t fallback) {
    const Value* v = find(table, key);
    return v && v->is_int() ? v->as_int() : fallback;
}

double get_float(const Table& table, const std::string& key, double fallback) {
    const Value* v = find(table, key);
    return v && (v->is_float() || v->is_int()) ? v->as_float() : fallback;
}

bool get_bool(const Table& table, const std::string& key, bool fallback) {
    const Value* v = find(table, key);
    return v && v->is_bool() ? v->as_bool() : fallback;
}

std::vector<std::string> get_string_array(const Table& table, const std::string& key) {
    std::vector<std::string> out;
    const Value* v = find(table, key);
    if (v && v->is_array()) {
        for (const auto& item : v->as_array()) {
            if (item.is_string()) out.push_back(item.as_string());
        }
    }
    return out;
}

}  // namespace omni::toml
