#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "omniengine/stream_format.hpp"

namespace omni {

struct ExtractConfig {
    // Main-content candidates need this much text and no more than
    // max_link_ratio of it inside links.
    int64_t min_candidate_text_chars = 100;
    double max_link_ratio = 0.5;
    // Winners below this size absorb sibling subtrees whose density reaches
    // merge_density_fraction of theirs.
    int64_t merge_below_chars = 200;
    double merge_density_fraction = 0.5;
    // list/nav subtrees with more than this fraction of text in links are
    // noise clusters.
    double list_link_ratio = 0.8;
    // Image URLs whose path carries one of these segment prefixes are ads or
    // trackers. Loaded from a config file by the CLI; these are the defaults.
    std::vector<std::string> ad_url_patterns = {"ad", "ads", "banner", "sponsor", "pixel", "track"};
};

enum class ExtractDrop {
    NoImage,    // no image element survived extraction
    EmptyBody,  // no main content subtree or no text element in it
};

std::string_view to_string(ExtractDrop drop);

using ExtractResult = std::variant<StreamDocument, ExtractDrop>;

class DecodeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Charset handling: <meta charset> wins, then the transport hint, then UTF-8
// with replacement. Returns UTF-8 text; inputs that look binary (NUL bytes)
// are DecodeErrors.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint = "");
std::string sniff_meta_charset(std::string_view html_prefix);

// True when any '/'-separated path segment equals a pattern or starts with
// it followed by a non-letter ("/ads/x.png", "/img/banner_3.jpg").
bool matches_ad_pattern(std::string_view url, const std::vector<std::string>& patterns);

// HTML bytes -> StreamDocument, or a drop decision. Deterministic: the id is
// derived from url + timestamp.
ExtractResult extract_document(std::string_view html_bytes, const std::string& url,
                               UtcTime timestamp, const ExtractConfig& config = {},
                               std::string_view charset_hint = "");

// Directory ingestion: every *.html file with a sidecar *.meta (line 1 URL,
// line 2 RFC 3339 timestamp), sorted by filename.
struct HtmlFileCapture {
    std::string url;
    UtcTime timestamp;
    std::string html;
    std::string path;
};
std::vector<HtmlFileCapture> ingest_html_dir(const std::string& dir);

}  // namespace omni
