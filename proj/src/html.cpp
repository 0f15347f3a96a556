#include "omniengine/html.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace omni {

const std::string* DomNode::attribute(std::string_view name) const {
    for (const auto& [key, value] : attributes) {
        if (key == name) return &value;
    }
    return nullptr;
}

namespace {

const std::unordered_set<std::string_view> kVoidElements = {
    "area", "base", "br", "col",  "embed",  "hr",    "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kRawTextElements = {"script", "style", "textarea"};

// Tags whose open implicitly closes a same-tag ancestor.
const std::unordered_set<std::string_view> kSelfNesting = {"p", "li", "td", "th", "tr", "option"};

std::string decode_entities(std::string_view in) {
    static const std::unordered_map<std::string, std::string> named = {
        {"amp", "&"},   {"lt", "<"},     {"gt", ">"},    {"quot", "\""}, {"apos", "'"},
        {"nbsp", " "},  {"copy", "\xc2\xa9"}, {"reg", "\xc2\xae"}, {"hellip", "\xe2\x80\xa6"},
        {"mdash", "\xe2\x80\x94"}, {"ndash", "\xe2\x80\x93"}, {"rsquo", "\xe2\x80\x99"},
        {"lsquo", "\xe2\x80\x98"}, {"rdquo", "\xe2\x80\x9d"}, {"ldquo", "\xe2\x80\x9c"},
    };
    std::string out;
    out.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out += in[i++];
            continue;
        }
        size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += in[i++];
            continue;
        }
        std::string_view body = in.substr(i + 1, semi - i - 1);
        if (!body.empty() && body[0] == '#') {
            unsigned code = 0;
            bool ok = body.size() > 1;
            if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
                for (size_t k = 2; k < body.size() && ok; ++k) {
                    char c = body[k];
                    code <<= 4;
                    if (c >= '0' && c <= '9') code |= static_cast<unsigned>(c - '0');
                    else if (c >= 'a' && c <= 'f') code |= static_cast<unsigned>(c - 'a' + 10);
                    else if (c >= 'A' && c <= 'F') code |= static_cast<unsigned>(c - 'A' + 10);
                    else ok = false;
                }
            } else {
                for (size_t k = 1; k < body.size() && ok; ++k) {
                    if (!std::isdigit(static_cast<unsigned char>(body[k]))) ok = false;
                    else code = code * 10 + static_cast<unsigned>(body[k] - '0');
                }
            }
            if (ok && code > 0 && code < 0x110000) {
                // UTF-8 encode.
                if (code < 0x80) {
                    out += static_cast<char>(code);
                } else if (code < 0x800) {
                    out += static_cast<char>(0xc0 | (code >> 6));
                    out += static_cast<char>(0x80 | (code & 0x3f));
                } else if (code < 0x10000) {
                    out += static_cast<char>(0xe0 | (code >> 12));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
                    out += static_cast<char>(0x80 | (code & 0x3f));
                } else {
                    out += static_cast<char>(0xf0 | (code >> 18));
                    out += static_cast<char>(0x80 | ((code >> 12) & 0x3f));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
                    out += static_cast<char>(0x80 | (code & 0x3f));
                }
                i = semi + 1;
                continue;
            }
        } else {
            auto it = named.find(std::string(body));
            if (it != named.end()) {
                out += it->second;
                i = semi + 1;
                continue;
            }
        }
        out += in[i++];
    }
    return out;
}

struct Parser {
    std::string_view html;
    size_t pos = 0;

    bool eof() const { return pos >= html.size(); }

    std::string lower(std::string_view s) {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    std::string read_tag_name() {
        size_t start = pos;
        while (pos < html.size() &&
               (std::isalnum(static_cast<unsigned char>(html[pos])) || html[pos] == '-' ||
                html[pos] == '_' || html[pos] == ':')) {
            ++pos;
        }
        return lower(html.substr(start, pos - start));
    }

    void skip_ws() {
        while (pos < html.size() && std::isspace(static_cast<unsigned char>(html[pos]))) ++pos;
    }

    std::vector<std::pair<std::string, std::string>> read_attributes() {
        std::vector<std::pair<std::string, std::string>> attrs;
        for (;;) {
            skip_ws();
            if (eof() || html[pos] == '>' || html[pos] == '/') break;
            size_t start = pos;
            while (pos < html.size() && html[pos] != '=' && html[pos] != '>' && html[pos] != '/' &&
                   !std::isspace(static_cast<unsigned char>(html[pos]))) {
                ++pos;
            }
            std::string name = lower(html.substr(start, pos - start));
            std::string value;
            skip_ws();
            if (!eof() && html[pos] == '=') {
                ++pos;
                skip_ws();
                if (!eof() && (html[pos] == '"' || html[pos] == '\'')) {
                    char quote = html[pos++];
                    size_t vstart = pos;
                    while (pos < html.size() && html[pos] != quote) ++pos;
                    value = decode_entities(html.substr(vstart, pos - vstart));
                    if (!eof()) ++pos;
                } else {
                    size_t vstart = pos;
                    while (pos < html.size() && html[pos] != '>' &&
                           !std::isspace(static_cast<unsigned char>(html[pos]))) {
                        ++pos;
                    }
                    value = decode_entities(html.substr(vstart, pos - vstart));
                }
            }
            if (!name.empty()) {
                bool seen = std::any_of(attrs.begin(), attrs.end(),
                                        [&](const auto& a) { return a.first == name; });
                if (!seen) attrs.emplace_back(std::move(name), std::move(value));
            }
        }
        return attrs;
    }

    // Raw text content of <script>/<style>: everything until the matching
    // close tag, unparsed.
    std::string read_raw_text(const std::string& tag) {
        std::string close = "</" + tag;
        size_t start = pos;
        while (pos < html.size()) {
            size_t candidate = html.find('<', pos);
            if (candidate == std::string_view::npos) {
                pos = html.size();
                return std::string(html.substr(start));
            }
            std::string ahead = lower(html.substr(candidate, close.size()));
            if (ahead == close) {
                std::string content(html.substr(start, candidate - start));
                pos = html.find('>', candidate);
                pos = pos == std::string_view::npos ? html.size() : pos + 1;
                return content;
            }
            pos = candidate + 1;
        }
        return std::string(html.substr(start));
    }

    std::unique_ptr<DomNode> parse() {
        auto root = std::make_unique<DomNode>();
        root->tag = "#document";
        std::vector<DomNode*> stack = {root.get()};

        auto open_of = [&](std::string_view tag) -> DomNode* {
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                if ((*it)->tag == tag) return *it;
            }
            return nullptr;
        };

        while (!eof()) {
            size_t lt = html.find('<', pos);
            if (lt == std::string_view::npos) lt = html.size();
            if (lt > pos) {
                std::string text = decode_entities(html.substr(pos, lt - pos));
                if (!text.empty()) {
                    auto node = std::make_unique<DomNode>();
                    node->text = std::move(text);
                    stack.back()->children.push_back(std::move(node));
                }
                pos = lt;
            }
            if (eof()) break;

            if (html.compare(pos, 4, "<!--") == 0) {
                size_t end = html.find("-->", pos + 4);
                pos = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            if (html.compare(pos, 2, "<!") == 0 || html.compare(pos, 2, "<?") == 0) {
                size_t end = html.find('>', pos);
                pos = end == std::string_view::npos ? html.size() : end + 1;
                continue;
            }
            if (html.compare(pos, 2, "</") == 0) {
                pos += 2;
                std::string tag = read_tag_name();
                size_t end = html.find('>', pos);
                pos = end == std::string_view::npos ? html.size() : end + 1;
                if (DomNode* target = open_of(tag)) {
                    while (stack.back() != target) stack.pop_back();
                    if (stack.size() > 1) stack.pop_back();
                }
                continue;
            }
            // Open tag.
            ++pos;
            if (eof() || !std::isalpha(static_cast<unsigned char>(html[pos]))) {
                // Stray '<' is literal text.
                auto node = std::make_unique<DomNode>();
                node->text = "<";
                stack.back()->children.push_back(std::move(node));
                continue;
            }
            std::string tag = read_tag_name();
            auto node = std::make_unique<DomNode>();
            node->tag = tag;
            node->attributes = read_attributes();
            bool self_closing = false;
            skip_ws();
            if (!eof() && html[pos] == '/') {
                self_closing = true;
                ++pos;
            }
            if (!eof() && html[pos] == '>') ++pos;

            if (kSelfNesting.count(tag)) {
                if (DomNode* open = open_of(tag)) {
                    while (stack.back() != open) stack.pop_back();
                    if (stack.size() > 1) stack.pop_back();
                }
            }

            DomNode* raw = node.get();
            stack.back()->children.push_back(std::move(node));
            if (self_closing || kVoidElements.count(tag)) continue;
            if (kRawTextElements.count(tag)) {
                std::string content = read_raw_text(tag);
                if (!content.empty()) {
                    auto text_node = std::make_unique<DomNode>();
                    text_node->text = std::move(content);
                    raw->children.push_back(std::move(text_node));
                }
                continue;
            }
            stack.push_back(raw);
        }
        return root;
    }
};

void score_walk(const DomNode& node, bool in_link, NodeScore& score) {
    for (const auto& child : node.children) {
        if (child->is_text()) {
            int64_t chars = std::count_if(child->text.begin(), child->text.end(), [](unsigned char c) {
                return !std::isspace(c);
            });
            score.text_chars += chars;
            if (in_link) score.link_chars += chars;
            continue;
        }
        if (child->tag == "script" || child->tag == "style") {
            ++score.descendant_tags;
            continue;
        }
        ++score.descendant_tags;
        score_walk(*child, in_link || child->tag == "a", score);
    }
}

void text_walk(const DomNode& node, std::string& out) {
    if (node.is_text()) {
        out += node.text;
        return;
    }
    if (node.tag == "script" || node.tag == "style") return;
    for (const auto& child : node.children) text_walk(*child, out);
}

}  // namespace

std::unique_ptr<DomNode> parse_html(std::string_view html) {
    Parser parser{html};
    return parser.parse();
}

NodeScore score_node(const DomNode& node) {
    NodeScore score;
    if (node.tag == "script" || node.tag == "style") return score;
    score_walk(node, node.tag == "a", score);
    score.density = static_cast<double>(score.text_chars) /
                    (1.0 + static_cast<double>(score.descendant_tags));
    return score;
}

std::string subtree_text(const DomNode& node, bool normalize) {
    std::string raw;
    text_walk(node, raw);
    if (!normalize) return raw;
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += static_cast<char>(c);
        }
    }
    return out;
}

}  // namespace omni
