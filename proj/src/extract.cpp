#include "omniengine/extract.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "omniengine/hash.hpp"
#include "omniengine/html.hpp"
#include "omniengine/url.hpp"

namespace omni {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool utf8_valid(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xe) extra = 2;
        else if ((c >> 3) == 0x1e) extra = 3;
        else return false;
        for (size_t k = 1; k <= extra; ++k) {
            if (i + k >= s.size() || (static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
        }
        i += extra + 1;
    }
    return true;
}

void append_codepoint(std::string& out, unsigned code) {
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
}

// Windows-1252 high range (0x80..0x9F); 0 entries fall back to U+FFFD.
constexpr unsigned kCp1252High[32] = {
    0x20ac, 0,      0x201a, 0x0192, 0x201e, 0x2026, 0x2020, 0x2021, 0x02c6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017d, 0,      0,      0x2018, 0x2019, 0x201c, 0x201d, 0x2022,
    0x2013, 0x2014, 0x02dc, 0x2122, 0x0161, 0x203a, 0x0153, 0,      0x017e, 0x0178};

std::string decode_single_byte(std::string_view bytes, bool cp1252) {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
        if (c < 0x80) {
            out += static_cast<char>(c);
        } else if (cp1252 && c < 0xa0) {
            unsigned code = kCp1252High[c - 0x80];
            append_codepoint(out, code ? code : 0xfffd);
        } else {
            append_codepoint(out, c);
        }
    }
    return out;
}

std::string decode_utf8_lossy(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xe) extra = 2;
        else if ((c >> 3) == 0x1e) extra = 3;
        else {
            out += "\xef\xbf\xbd";
            ++i;
            continue;
        }
        bool ok = i + extra < bytes.size();
        for (size_t k = 1; ok && k <= extra; ++k) {
            if ((static_cast<unsigned char>(bytes[i + k]) >> 6) != 0x2) ok = false;
        }
        if (!ok) {
            out += "\xef\xbf\xbd";
            ++i;
            continue;
        }
        out.append(bytes.substr(i, extra + 1));
        i += extra + 1;
    }
    return out;
}

// Tags removed wholesale before scoring: noise by structure or style.
const std::unordered_set<std::string_view> kNoiseTags = {"script", "style", "noscript", "nav",
                                                         "aside",  "footer", "form",    "iframe",
                                                         "template"};

const std::unordered_set<std::string_view> kListTags = {"ul", "ol", "menu"};

void prune_noise(DomNode& node, const ExtractConfig& config, const std::string& base_url) {
    auto& children = node.children;
    for (auto it = children.begin(); it != children.end();) {
        DomNode& child = **it;
        bool remove = false;
        if (child.is_element()) {
            if (kNoiseTags.count(child.tag)) {
                remove = true;
            } else if (kListTags.count(child.tag)) {
                NodeScore score = score_node(child);
                if (score.text_chars > 0 &&
                    static_cast<double>(score.link_chars) / static_cast<double>(score.text_chars) >
                        config.list_link_ratio) {
                    remove = true;
                }
            } else if (child.tag == "img") {
                const std::string* src = child.attribute("src");
                std::string resolved = src ? resolve_url(base_url, *src) : "";
                if (!src || matches_ad_pattern(resolved, config.ad_url_patterns)) remove = true;
            }
        }
        if (remove) {
            it = children.erase(it);
        } else {
            prune_noise(child, config, base_url);
            ++it;
        }
    }
}

// --- Tag mapping -------------------------------------------------------------

const std::unordered_set<std::string_view> kBlockBoundary = {
    "p",      "div",    "section", "article", "main",   "body", "html",  "header",
    "footer", "figure", "figcaption", "li",   "dd",     "dt",   "tr",    "fieldset",
    "address", "center"};

struct ElementBuilder {
    const ExtractConfig& config;
    const std::string& base_url;
    std::vector<Element> elements;
    std::string buffer;

    void flush() {
        std::string normalized;
        normalized.reserve(buffer.size());
        bool pending = false;
        for (unsigned char c : buffer) {
            if (std::isspace(c)) {
                pending = !normalized.empty();
            } else {
                if (pending) normalized += ' ';
                pending = false;
                normalized += static_cast<char>(c);
            }
        }
        buffer.clear();
        if (!normalized.empty()) elements.push_back({ElementTag::Text, std::move(normalized), std::nullopt});
    }

    void emit(ElementTag tag, std::string content) {
        flush();
        elements.push_back({tag, std::move(content), std::nullopt});
    }

    void emit_image(const DomNode& node) {
        const std::string* src = node.attribute("src");
        if (!src || src->empty()) return;
        flush();
        ImageRef ref;
        ref.url = resolve_url(base_url, *src);
        if (const std::string* w = node.attribute("width")) ref.width = std::max(0, atoi(w->c_str()));
        if (const std::string* h = node.attribute("height")) ref.height = std::max(0, atoi(h->c_str()));
        if (const std::string* alt = node.attribute("alt")) ref.alt = *alt;
        elements.push_back({ElementTag::Image, "", ref});
    }

    void list_items(const DomNode& node, std::vector<std::string>& items) {
        for (const auto& child : node.children) {
            if (!child->is_element()) continue;
            if (child->tag == "li") {
                std::string text = subtree_text(*child);
                if (!text.empty()) items.push_back(std::move(text));
            } else {
                list_items(*child, items);
            }
        }
    }

    std::string table_text(const DomNode& node) {
        std::string out;
        std::vector<const DomNode*> rows;
        std::function<void(const DomNode&)> collect = [&](const DomNode& n) {
            for (const auto& child : n.children) {
                if (!child->is_element()) continue;
                if (child->tag == "tr") rows.push_back(child.get());
                else collect(*child);
            }
        };
        collect(node);
        for (const DomNode* row : rows) {
            std::string cells;
            for (const auto& cell : row->children) {
                if (!cell->is_element() || (cell->tag != "td" && cell->tag != "th")) continue;
                std::string text = subtree_text(*cell);
                if (text.empty()) continue;
                if (!cells.empty()) cells += ' ';
                cells += text;
            }
            if (cells.empty()) continue;
            if (!out.empty()) out += '\n';
            out += cells;
        }
        return out;
    }

    void walk(const DomNode& node) {
        for (const auto& child : node.children) {
            if (child->is_text()) {
                buffer += child->text;
                continue;
            }
            const std::string& tag = child->tag;
            if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
                std::string text = subtree_text(*child);
                if (!text.empty()) emit(ElementTag::Header, std::move(text));
                continue;
            }
            if (tag == "pre" || tag == "code") {
                std::string text = subtree_text(*child, /*normalize=*/false);
                // Trim a leading/trailing newline but keep interior layout.
                while (!text.empty() && (text.front() == '\n' || text.front() == '\r'))
                    text.erase(text.begin());
                while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
                    text.pop_back();
                if (!text.empty()) emit(ElementTag::Code, std::move(text));
                continue;
            }
            if (tag == "blockquote") {
                std::string text = subtree_text(*child);
                if (!text.empty()) emit(ElementTag::Quote, std::move(text));
                continue;
            }
            if (tag == "table") {
                std::string text = table_text(*child);
                if (!text.empty()) emit(ElementTag::Table, std::move(text));
                continue;
            }
            if (kListTags.count(tag)) {
                std::vector<std::string> items;
                list_items(*child, items);
                if (!items.empty()) {
                    std::string content;
                    for (size_t i = 0; i < items.size(); ++i) {
                        if (i) content += "\n- ";
                        content += items[i];
                    }
                    emit(ElementTag::List, std::move(content));
                }
                continue;
            }
            if (tag == "details") {
                std::string text = subtree_text(*child);
                if (!text.empty()) emit(ElementTag::Detail, std::move(text));
                continue;
            }
            if (tag == "img") {
                emit_image(*child);
                continue;
            }
            if (tag == "video" || tag == "audio") {
                std::string text = subtree_text(*child);
                emit(tag == "video" ? ElementTag::Video : ElementTag::Audio, std::move(text));
                continue;
            }
            if (tag == "br") {
                flush();
                continue;
            }
            if (kBlockBoundary.count(tag)) {
                flush();
                walk(*child);
                flush();
                continue;
            }
            // Inline: text flows into the current paragraph.
            walk(*child);
        }
    }
};

const DomNode* find_first_tag(const DomNode& node, std::string_view tag) {
    if (node.tag == tag) return &node;
    for (const auto& child : node.children) {
        if (!child->is_element()) continue;
        if (const DomNode* found = find_first_tag(*child, tag)) return found;
    }
    return nullptr;
}

}  // namespace

std::string_view to_string(ExtractDrop drop) {
    switch (drop) {
        case ExtractDrop::NoImage: return "no_image";
        case ExtractDrop::EmptyBody: return "empty_body";
    }
    return "unknown";
}

std::string sniff_meta_charset(std::string_view html_prefix) {
    std::string head = lower(html_prefix.substr(0, std::min<size_t>(html_prefix.size(), 4096)));
    size_t pos = head.find("charset");
    if (pos == std::string::npos) return "";
    pos += 7;
    while (pos < head.size() && (head[pos] == '=' || head[pos] == '"' || head[pos] == '\'' ||
                                 std::isspace(static_cast<unsigned char>(head[pos])))) {
        ++pos;
    }
    std::string out;
    while (pos < head.size() && (std::isalnum(static_cast<unsigned char>(head[pos])) ||
                                 head[pos] == '-' || head[pos] == '_')) {
        out += head[pos++];
    }
    return out;
}

std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint) {
    if (bytes.find('\0') != std::string_view::npos)
        throw DecodeError("input contains NUL bytes; not text");

    std::string charset = sniff_meta_charset(bytes);
    if (charset.empty()) charset = lower(charset_hint);

    if (charset == "iso-8859-1" || charset == "latin1" || charset == "latin-1")
        return decode_single_byte(bytes, /*cp1252=*/false);
    if (charset == "windows-1252" || charset == "cp1252")
        return decode_single_byte(bytes, /*cp1252=*/true);

    // utf-8, us-ascii, unknown: UTF-8 with replacement.
    if (utf8_valid(bytes)) return std::string(bytes);
    return decode_utf8_lossy(bytes);
}

bool matches_ad_pattern(std::string_view url, const std::vector<std::string>& patterns) {
    auto parsed = parse_url(url);
    std::string path = lower(parsed ? parsed->path : std::string(url));
    size_t start = 0;
    while (start <= path.size()) {
        size_t end = path.find('/', start);
        if (end == std::string::npos) end = path.size();
        std::string_view segment(path.data() + start, end - start);
        for (const std::string& pattern : patterns) {
            if (segment.size() < pattern.size()) continue;
            if (segment.substr(0, pattern.size()) != pattern) continue;
            if (segment.size() == pattern.size() ||
                !std::isalpha(static_cast<unsigned char>(segment[pattern.size()]))) {
                return true;
            }
        }
        start = end + 1;
    }
    return false;
}

ExtractResult extract_document(std::string_view html_bytes, const std::string& url,
                               UtcTime timestamp, const ExtractConfig& config,
                               std::string_view charset_hint) {
    std::string html = decode_to_utf8(html_bytes, charset_hint);
    auto root = parse_html(html);

    std::string language = "und";
    if (const DomNode* html_node = find_first_tag(*root, "html")) {
        if (const std::string* lang = html_node->attribute("lang")) {
            std::string cleaned;
            for (char c : *lang) {
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') cleaned += c;
            }
            if (!cleaned.empty()) language = cleaned;
        }
    }

    prune_noise(*root, config, url);

    // Candidate scan: container nodes with enough text and a low link share;
    // ties go to the earliest node in document order. Restricting candidates
    // to containers keeps the selection from collapsing onto single leaf
    // paragraphs, which would strand sibling images.
    static const std::unordered_set<std::string_view> kContainerTags = {
        "article", "main", "section", "div", "body", "td", "blockquote"};
    struct Candidate {
        const DomNode* node;
        NodeScore score;
    };
    std::vector<Candidate> candidates;
    std::function<void(const DomNode&)> scan = [&](const DomNode& node) {
        for (const auto& child : node.children) {
            if (!child->is_element()) continue;
            if (kContainerTags.count(child->tag)) {
                NodeScore score = score_node(*child);
                if (score.text_chars >= config.min_candidate_text_chars) {
                    double link_ratio = static_cast<double>(score.link_chars) /
                                        static_cast<double>(score.text_chars);
                    if (link_ratio <= config.max_link_ratio) candidates.push_back({child.get(), score});
                }
            }
            scan(*child);
        }
    };
    scan(*root);

    if (candidates.empty()) return ExtractDrop::EmptyBody;
    const Candidate* winner = &candidates[0];
    for (const Candidate& c : candidates) {
        if (c.score.density > winner->score.density) winner = &c;
    }

    // Content roots: the winner, plus qualifying siblings when it is small.
    std::vector<const DomNode*> roots = {winner->node};
    if (winner->score.text_chars < config.merge_below_chars) {
        const DomNode* parent = nullptr;
        std::function<const DomNode*(const DomNode&)> find_parent = [&](const DomNode& node) -> const DomNode* {
            for (const auto& child : node.children) {
                if (child.get() == winner->node) return &node;
                if (!child->is_element()) continue;
                if (const DomNode* p = find_parent(*child)) return p;
            }
            return nullptr;
        };
        parent = find_parent(*root);
        if (parent) {
            std::function<bool(const DomNode&)> has_image = [&](const DomNode& n) {
                if (n.tag == "img") return true;
                for (const auto& c : n.children) {
                    if (c->is_element() && has_image(*c)) return true;
                }
                return false;
            };
            roots.clear();
            for (const auto& sibling : parent->children) {
                if (!sibling->is_element()) continue;
                if (sibling.get() == winner->node) {
                    roots.push_back(sibling.get());
                    continue;
                }
                NodeScore score = score_node(*sibling);
                // Image-bearing siblings always join the enhancement pass;
                // they carry no text, so the density bar cannot admit them.
                if (score.density >= config.merge_density_fraction * winner->score.density ||
                    has_image(*sibling)) {
                    roots.push_back(sibling.get());
                }
            }
        }
    }

    ElementBuilder builder{config, url};
    for (const DomNode* content : roots) {
        if (content->tag == "img") {
            builder.emit_image(*content);
            continue;
        }
        builder.walk(*content);
        builder.flush();
    }

    size_t images = 0, texts = 0;
    for (const Element& e : builder.elements) {
        images += e.tag == ElementTag::Image;
        texts += e.tag == ElementTag::Text;
    }
    if (images == 0) return ExtractDrop::NoImage;
    if (texts == 0) return ExtractDrop::EmptyBody;

    StreamDocument doc;
    char id[17];
    std::snprintf(id, sizeof(id), "%016llx",
                  static_cast<unsigned long long>(
                      hash64(url + "\n" + format_rfc3339(timestamp), 0)));
    doc.id = id;
    doc.elements = std::move(builder.elements);
    doc.meta.source_url = url;
    doc.meta.timestamp = timestamp;
    doc.meta.language = language;
    return doc;
}

std::vector<HtmlFileCapture> ingest_html_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> pages;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".html") {
            pages.push_back(entry.path());
        }
    }
    std::sort(pages.begin(), pages.end());

    std::vector<HtmlFileCapture> captures;
    for (const fs::path& page : pages) {
        fs::path meta_path = page;
        meta_path.replace_extension(".meta");
        std::ifstream meta(meta_path);
        if (!meta) continue;  // pages without sidecars are skipped
        std::string url, timestamp_text;
        std::getline(meta, url);
        std::getline(meta, timestamp_text);
        auto timestamp = parse_rfc3339(timestamp_text);
        if (url.empty() || !timestamp) continue;

        std::ifstream in(page, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        captures.push_back({url, *timestamp, buf.str(), page.string()});
    }
    return captures;
}

}  // namespace omni
