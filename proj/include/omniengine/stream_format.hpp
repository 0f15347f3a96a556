#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "omniengine/time.hpp"

namespace omni {

// Sentinel for scores that have not been produced yet. Validation accepts it
// everywhere a score range is checked.
inline constexpr double kUnscored = -1.0;

// Closed set of element tags; parsing anything else is an error.
enum class ElementTag { Text, Image, Code, Header, Detail, Quote, Video, Audio, Table, List };

std::string_view to_string(ElementTag tag);
std::optional<ElementTag> parse_element_tag(std::string_view name);

enum class ImageStatusKind { Pending, Fetched, Failed, Dropped };

struct ImageStatus {
    ImageStatusKind kind = ImageStatusKind::Pending;
    std::string reason;  // set only for Dropped

    bool operator==(const ImageStatus&) const = default;

    static ImageStatus pending() { return {ImageStatusKind::Pending, {}}; }
    static ImageStatus fetched() { return {ImageStatusKind::Fetched, {}}; }
    static ImageStatus failed() { return {ImageStatusKind::Failed, {}}; }
    static ImageStatus dropped(std::string reason) { return {ImageStatusKind::Dropped, std::move(reason)}; }
};

std::string to_string(const ImageStatus& status);
std::optional<ImageStatus> parse_image_status(std::string_view text);

struct ImageRef {
    std::string url;
    int width = 0;   // pixels; 0 = unknown
    int height = 0;  // pixels; 0 = unknown
    double aesthetic = kUnscored;  // [0,10] once scored
    double nsfw = kUnscored;       // [0,1] once scored
    std::optional<uint64_t> phash;
    std::optional<uint64_t> dhash;
    ImageStatus status = ImageStatus::pending();

    // Alt text captured during extraction. A transient pairing hint only: it
    // is not part of the persisted schema and is excluded from equality.
    std::string alt;

    bool operator==(const ImageRef& other) const {
        return url == other.url && width == other.width && height == other.height &&
               aesthetic == other.aesthetic && nsfw == other.nsfw && phash == other.phash &&
               dhash == other.dhash && status == other.status;
    }
};

struct Element {
    ElementTag tag = ElementTag::Text;
    std::string content;            // empty for image elements
    std::optional<ImageRef> image;  // present iff tag == Image

    bool operator==(const Element&) const = default;
};

struct DocumentMeta {
    double nsfw_text = kUnscored;
    double political = kUnscored;
    double toxic = kUnscored;
    double advertisement = kUnscored;
    double fluency = kUnscored;
    std::string language = "und";  // BCP-47
    UtcTime timestamp;
    std::string source_url;

    bool operator==(const DocumentMeta&) const = default;
};

struct StreamDocument {
    std::string id;
    std::vector<Element> elements;  // top-to-bottom, left-to-right document order
    DocumentMeta meta;

    bool operator==(const StreamDocument&) const = default;
};

// --- Validation ----------------------------------------------------------

enum class ViolationCode {
    EmptyId,
    ImageTagMismatch,   // tag==image XOR image ref present
    ImageContent,       // image element with non-empty content
    ControlChars,       // raw control characters other than \n and \t
    BadUrl,             // image url not absolute
    NegativeDimension,
    ScoreOutOfRange,
    BadLanguage,
    NoImage,            // post-extraction documents must carry >=1 image
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

struct ValidationOptions {
    // When set, a document without any image element is a violation (the
    // extraction stage drops such pages, so none may appear downstream).
    bool require_image = false;
};

ValidationReport validate_document(const StreamDocument& doc, const ValidationOptions& options = {});

// --- JSONL serialization ---------------------------------------------------

class SerializeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class DocumentParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One document per line, UTF-8, no interior newlines. Field names and
// nesting are the on-disk contract; unknown fields are rejected on parse.
std::string serialize_document(const StreamDocument& doc);
StreamDocument parse_document(std::string_view jsonl_line);

// --- Degradations ----------------------------------------------------------

// Pure text view: contents of all non-image elements in element order,
// joined with single newlines.
std::string to_text_corpus(const StreamDocument& doc);

enum class PairStrategy { Natural, Retrieval };

struct ImageTextPair {
    ImageRef image;
    std::string text;
    PairStrategy strategy = PairStrategy::Natural;
    std::optional<double> score;  // present iff strategy == Retrieval
};

using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

// Natural: each image pairs with the nearest preceding text element, else the
// nearest following one. Retrieval: each image pairs with the text element
// maximizing similarity(surrogate, text); ties break to the earliest element.
std::vector<ImageTextPair> to_image_text_pairs(const StreamDocument& doc, PairStrategy strategy,
                                               const SimilarityFn& similarity = nullptr);

// Alt text when extraction captured it, else the URL's final path segment
// with separators turned into spaces.
std::string image_surrogate_text(const ImageRef& image);

// Word-set Jaccard similarity; the bundled deterministic stand-in for a
// learned text-similarity scorer.
double token_overlap_similarity(std::string_view a, std::string_view b);

}  // namespace omni
