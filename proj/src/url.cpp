#include "omniengine/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace omni {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '-' || c == '.';
    });
}

}  // namespace

std::string Url::to_string(bool with_fragment) const {
    std::string out = scheme + "://" + host;
    if (port >= 0) out += ":" + std::to_string(port);
    out += path.empty() ? "/" : path;
    if (!query.empty()) out += "?" + query;
    if (with_fragment && !fragment.empty()) out += "#" + fragment;
    return out;
}

std::optional<Url> parse_url(std::string_view text) {
    size_t scheme_end = text.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    Url url;
    url.scheme = to_lower(text.substr(0, scheme_end));
    if (!valid_scheme(url.scheme)) return std::nullopt;

    std::string_view rest = text.substr(scheme_end + 3);
    size_t frag = rest.find('#');
    if (frag != std::string_view::npos) {
        url.fragment = std::string(rest.substr(frag + 1));
        rest = rest.substr(0, frag);
    }
    size_t q = rest.find('?');
    if (q != std::string_view::npos) {
        url.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    size_t path_start = rest.find('/');
    std::string_view authority = rest.substr(0, path_start);
    if (path_start != std::string_view::npos) url.path = std::string(rest.substr(path_start));

    // Drop userinfo, split host:port.
    size_t at = authority.rfind('@');
    if (at != std::string_view::npos) authority = authority.substr(at + 1);
    size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos &&
        authority.find(']') == std::string_view::npos) {  // no IPv6 literal handling
        std::string_view port_text = authority.substr(colon + 1);
        if (!port_text.empty() && std::all_of(port_text.begin(), port_text.end(), [](unsigned char c) {
                return std::isdigit(c);
            })) {
            url.port = 0;
            for (char c : port_text) url.port = url.port * 10 + (c - '0');
            authority = authority.substr(0, colon);
        }
    }
    if (authority.empty() && url.scheme != "file") return std::nullopt;
    url.host = to_lower(authority);
    return url;
}

std::string normalize_url(std::string_view text) {
    auto parsed = parse_url(text);
    if (!parsed) {
        size_t frag = text.find('#');
        return std::string(text.substr(0, frag));
    }
    Url url = *parsed;
    if ((url.scheme == "http" && url.port == 80) || (url.scheme == "https" && url.port == 443)) {
        url.port = -1;
    }
    return url.to_string(/*with_fragment=*/false);
}

std::string resolve_url(const std::string& base, const std::string& ref) {
    if (ref.empty()) return base;
    if (ref.find("://") != std::string::npos) return ref;
    auto parsed = parse_url(base);
    if (!parsed) return ref;
    if (ref.rfind("//", 0) == 0) return parsed->scheme + ":" + ref;
    Url out = *parsed;
    out.fragment.clear();
    out.query.clear();
    if (ref[0] == '/') {
        out.path = ref;
    } else {
        std::string dir = out.path;
        size_t slash = dir.rfind('/');
        dir = slash == std::string::npos ? "/" : dir.substr(0, slash + 1);
        out.path = dir + ref;
    }
    // Collapse "./" and "../" segments.
    std::string& p = out.path;
    std::string collapsed;
    size_t i = 0;
    std::vector<std::string> segments;
    while (i < p.size()) {
        size_t next = p.find('/', i + 1);
        std::string seg = p.substr(i, (next == std::string::npos ? p.size() : next) - i);
        if (seg == "/..") {
            if (!segments.empty()) segments.pop_back();
        } else if (seg != "/.") {
            segments.push_back(seg);
        }
        i = next == std::string::npos ? p.size() : next;
    }
    for (const auto& seg : segments) collapsed += seg;
    out.path = collapsed.empty() ? "/" : collapsed;
    size_t qpos = ref.find('?');
    if (qpos != std::string::npos) {
        std::string tail = ref.substr(qpos + 1);
        size_t fpos = tail.find('#');
        out.query = tail.substr(0, fpos);
    }
    return out.to_string(false);
}

std::string url_surrogate_text(std::string_view url) {
    auto parsed = parse_url(url);
    std::string path = parsed ? parsed->path : std::string(url);
    size_t slash = path.rfind('/');
    std::string segment = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = segment.rfind('.');
    if (dot != std::string::npos && dot > 0) segment = segment.substr(0, dot);
    for (char& c : segment) {
        if (c == '-' || c == '_' || c == '+' || c == '.' || c == '%') c = ' ';
    }
    // Collapse runs of spaces.
    std::string out;
    bool prev_space = true;
    for (char c : segment) {
        if (c == ' ') {
            if (!prev_space) out += ' ';
            prev_space = true;
        } else {
            out += c;
            prev_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace omni
