#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace omni {

struct Url {
    std::string scheme;  // lowercase
    std::string host;    // lowercase
    int port = -1;       // -1 = none given
    std::string path;    // begins with '/' (or empty)
    std::string query;   // without '?'
    std::string fragment;

    std::string to_string(bool with_fragment = true) const;
};

// Parses an absolute URL of the form scheme://host[:port][/path][?query][#frag].
// Returns nullopt when there is no scheme/authority.
std::optional<Url> parse_url(std::string_view text);

// Canonical form used for deduplication: lowercase scheme and host, default
// port stripped (http:80, https:443), fragment removed, query kept.
// Returns the input unchanged (minus fragment) when it does not parse.
std::string normalize_url(std::string_view text);

// Resolves `ref` against `base` (absolute refs pass through; handles
// scheme-relative, root-relative, and relative path references).
std::string resolve_url(const std::string& base, const std::string& ref);

// Final path segment with '-', '_', '+', '.' turned into spaces; empty when
// the URL has no usable segment. Used as surrogate text for images.
std::string url_surrogate_text(std::string_view url);

}  // namespace omni
