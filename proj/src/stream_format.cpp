#include "omniengine/stream_format.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_set>

#include <json.hpp>

#include "omniengine/url.hpp"

namespace omni {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::pair<ElementTag, std::string_view>, 10> kTagNames = {{
    {ElementTag::Text, "text"},
    {ElementTag::Image, "image"},
    {ElementTag::Code, "code"},
    {ElementTag::Header, "header"},
    {ElementTag::Detail, "detail"},
    {ElementTag::Quote, "quote"},
    {ElementTag::Video, "video"},
    {ElementTag::Audio, "audio"},
    {ElementTag::Table, "table"},
    {ElementTag::List, "list"},
}};

bool has_bad_control_chars(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) {
        return (c < 0x20 && c != '\n' && c != '\t') || c == 0x7f;
    });
}

bool probability_ok(double v) { return v == kUnscored || (v >= 0.0 && v <= 1.0); }

std::string hash_to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

uint64_t hex_to_hash(const std::string& s) {
    if (s.size() != 16) throw DocumentParseError("fingerprint must be 16 hex digits: " + s);
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || p != s.data() + s.size())
        throw DocumentParseError("bad fingerprint hex: " + s);
    return v;
}

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw DocumentParseError(std::string("unknown field '") + key + "' in " + where);
        }
    }
}

double require_number(const Json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw DocumentParseError(std::string("missing or non-numeric '") + key + "' in " + where);
    return obj[key].get<double>();
}

std::string require_string(const Json& obj, const char* key, const char* where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw DocumentParseError(std::string("missing or non-string '") + key + "' in " + where);
    return obj[key].get<std::string>();
}

Json image_to_json(const ImageRef& image) {
    Json j;
    j["url"] = image.url;
    j["width"] = image.width;
    j["height"] = image.height;
    j["aesthetic"] = image.aesthetic;
    j["nsfw"] = image.nsfw;
    if (image.phash) j["phash"] = hash_to_hex(*image.phash);
    if (image.dhash) j["dhash"] = hash_to_hex(*image.dhash);
    j["status"] = to_string(image.status);
    return j;
}

ImageRef image_from_json(const Json& j) {
    if (!j.is_object()) throw DocumentParseError("image must be an object");
    reject_unknown_keys(j, {"url", "width", "height", "aesthetic", "nsfw", "phash", "dhash", "status"},
                        "image");
    ImageRef image;
    image.url = require_string(j, "url", "image");
    image.width = static_cast<int>(require_number(j, "width", "image"));
    image.height = static_cast<int>(require_number(j, "height", "image"));
    image.aesthetic = require_number(j, "aesthetic", "image");
    image.nsfw = require_number(j, "nsfw", "image");
    if (j.contains("phash")) image.phash = hex_to_hash(j["phash"].get<std::string>());
    if (j.contains("dhash")) image.dhash = hex_to_hash(j["dhash"].get<std::string>());
    auto status = parse_image_status(require_string(j, "status", "image"));
    if (!status) throw DocumentParseError("bad image status: " + j["status"].get<std::string>());
    image.status = *status;
    return image;
}

}  // namespace

std::string_view to_string(ElementTag tag) {
    for (const auto& [t, name] : kTagNames) {
        if (t == tag) return name;
    }
    return "text";
}

std::optional<ElementTag> parse_element_tag(std::string_view name) {
    for (const auto& [tag, tag_name] : kTagNames) {
        if (tag_name == name) return tag;
    }
    return std::nullopt;
}

std::string to_string(const ImageStatus& status) {
    switch (status.kind) {
        case ImageStatusKind::Pending: return "pending";
        case ImageStatusKind::Fetched: return "fetched";
        case ImageStatusKind::Failed: return "failed";
        case ImageStatusKind::Dropped: return "dropped:" + status.reason;
    }
    return "pending";
}

std::optional<ImageStatus> parse_image_status(std::string_view text) {
    if (text == "pending") return ImageStatus::pending();
    if (text == "fetched") return ImageStatus::fetched();
    if (text == "failed") return ImageStatus::failed();
    if (text.rfind("dropped:", 0) == 0) return ImageStatus::dropped(std::string(text.substr(8)));
    return std::nullopt;
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::EmptyId: return "EmptyId";
        case ViolationCode::ImageTagMismatch: return "ImageTagMismatch";
        case ViolationCode::ImageContent: return "ImageContent";
        case ViolationCode::ControlChars: return "ControlChars";
        case ViolationCode::BadUrl: return "BadUrl";
        case ViolationCode::NegativeDimension: return "NegativeDimension";
        case ViolationCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ViolationCode::BadLanguage: return "BadLanguage";
        case ViolationCode::NoImage: return "NoImage";
    }
    return "Unknown";
}

ValidationReport validate_document(const StreamDocument& doc, const ValidationOptions& options) {
    ValidationReport report;
    auto violate = [&](ViolationCode code, std::string detail) {
        report.violations.push_back({code, std::move(detail)});
    };

    if (doc.id.empty()) violate(ViolationCode::EmptyId, "document id is empty");

    size_t image_count = 0;
    for (size_t i = 0; i < doc.elements.size(); ++i) {
        const Element& element = doc.elements[i];
        const std::string at = "element " + std::to_string(i);
        bool is_image = element.tag == ElementTag::Image;
        if (is_image != element.image.has_value()) {
            violate(ViolationCode::ImageTagMismatch, at);
            continue;
        }
        if (has_bad_control_chars(element.content)) violate(ViolationCode::ControlChars, at);
        if (is_image) {
            ++image_count;
            if (!element.content.empty()) violate(ViolationCode::ImageContent, at);
            const ImageRef& image = *element.image;
            if (!parse_url(image.url)) violate(ViolationCode::BadUrl, at + ": " + image.url);
            if (image.width < 0 || image.height < 0) violate(ViolationCode::NegativeDimension, at);
            if (!(image.aesthetic == kUnscored || (image.aesthetic >= 0.0 && image.aesthetic <= 10.0)))
                violate(ViolationCode::ScoreOutOfRange, at + ": aesthetic");
            if (!probability_ok(image.nsfw)) violate(ViolationCode::ScoreOutOfRange, at + ": nsfw");
        }
    }

    const DocumentMeta& meta = doc.meta;
    const std::array<std::pair<const char*, double>, 5> scores = {{
        {"nsfw_text", meta.nsfw_text},
        {"political", meta.political},
        {"toxic", meta.toxic},
        {"advertisement", meta.advertisement},
        {"fluency", meta.fluency},
    }};
    for (const auto& [name, value] : scores) {
        if (!probability_ok(value)) violate(ViolationCode::ScoreOutOfRange, std::string("meta.") + name);
    }
    bool language_ok = !meta.language.empty() &&
                       std::all_of(meta.language.begin(), meta.language.end(), [](unsigned char c) {
                           return std::isalnum(c) || c == '-';
                       });
    if (!language_ok) violate(ViolationCode::BadLanguage, meta.language);

    if (options.require_image && image_count == 0) {
        violate(ViolationCode::NoImage, "post-extraction document has no image element");
    }
    return report;
}

std::string serialize_document(const StreamDocument& doc) {
    for (const Element& element : doc.elements) {
        if (element.content.find('\0') != std::string::npos)
            throw SerializeError("interior NUL in element content");
    }
    if (doc.id.find('\0') != std::string::npos) throw SerializeError("interior NUL in id");

    Json j;
    j["id"] = doc.id;
    j["url"] = doc.meta.source_url;
    j["timestamp"] = format_rfc3339(doc.meta.timestamp);
    j["language"] = doc.meta.language;
    Json elements = Json::array();
    for (const Element& element : doc.elements) {
        Json e;
        e["tag"] = to_string(element.tag);
        if (element.tag == ElementTag::Image) {
            e["image"] = image_to_json(*element.image);
        } else {
            e["content"] = element.content;
        }
        elements.push_back(std::move(e));
    }
    j["elements"] = std::move(elements);
    Json meta;
    meta["nsfw_text"] = doc.meta.nsfw_text;
    meta["political"] = doc.meta.political;
    meta["toxic"] = doc.meta.toxic;
    meta["advertisement"] = doc.meta.advertisement;
    meta["fluency"] = doc.meta.fluency;
    j["meta"] = std::move(meta);

    std::string line;
    try {
        line = j.dump();
    } catch (const Json::exception& e) {
        throw SerializeError(std::string("encoding error: ") + e.what());
    }
    if (line.find('\n') != std::string::npos)
        throw SerializeError("serialized document contains a newline");
    return line;
}

StreamDocument parse_document(std::string_view jsonl_line) {
    Json j;
    try {
        j = Json::parse(jsonl_line);
    } catch (const Json::exception& e) {
        throw DocumentParseError(std::string("bad json: ") + e.what());
    }
    if (!j.is_object()) throw DocumentParseError("document line is not a json object");
    reject_unknown_keys(j, {"id", "url", "timestamp", "language", "elements", "meta"}, "document");

    StreamDocument doc;
    doc.id = require_string(j, "id", "document");
    doc.meta.source_url = require_string(j, "url", "document");
    std::string timestamp = require_string(j, "timestamp", "document");
    auto parsed_time = parse_rfc3339(timestamp);
    if (!parsed_time) throw DocumentParseError("bad rfc3339 timestamp: " + timestamp);
    doc.meta.timestamp = *parsed_time;
    doc.meta.language = require_string(j, "language", "document");

    if (!j.contains("elements") || !j["elements"].is_array())
        throw DocumentParseError("missing elements array");
    for (const Json& e : j["elements"]) {
        if (!e.is_object()) throw DocumentParseError("element is not an object");
        reject_unknown_keys(e, {"tag", "content", "image"}, "element");
        Element element;
        std::string tag_name = require_string(e, "tag", "element");
        auto tag = parse_element_tag(tag_name);
        if (!tag) throw DocumentParseError("UnknownTag: " + tag_name);
        element.tag = *tag;
        if (element.tag == ElementTag::Image) {
            if (!e.contains("image")) throw DocumentParseError("image element without image object");
            if (e.contains("content")) throw DocumentParseError("image element with content field");
            element.image = image_from_json(e["image"]);
        } else {
            if (e.contains("image")) throw DocumentParseError("non-image element with image object");
            element.content = require_string(e, "content", "element");
        }
        doc.elements.push_back(std::move(element));
    }

    if (!j.contains("meta") || !j["meta"].is_object()) throw DocumentParseError("missing meta object");
    const Json& meta = j["meta"];
    reject_unknown_keys(meta, {"nsfw_text", "political", "toxic", "advertisement", "fluency"}, "meta");
    doc.meta.nsfw_text = require_number(meta, "nsfw_text", "meta");
    doc.meta.political = require_number(meta, "political", "meta");
    doc.meta.toxic = require_number(meta, "toxic", "meta");
    doc.meta.advertisement = require_number(meta, "advertisement", "meta");
    doc.meta.fluency = require_number(meta, "fluency", "meta");
    return doc;
}

std::string to_text_corpus(const StreamDocument& doc) {
    std::string out;
    bool first = true;
    for (const Element& element : doc.elements) {
        if (element.tag == ElementTag::Image) continue;
        if (!first) out += '\n';
        out += element.content;
        first = false;
    }
    return out;
}

std::string image_surrogate_text(const ImageRef& image) {
    if (!image.alt.empty()) return image.alt;
    return url_surrogate_text(image.url);
}

double token_overlap_similarity(std::string_view a, std::string_view b) {
    auto words = [](std::string_view s) {
        std::unordered_set<std::string> out;
        std::string word;
        for (char c : s) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!word.empty()) out.insert(word);
                word.clear();
            } else {
                word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
        }
        if (!word.empty()) out.insert(word);
        return out;
    };
    auto wa = words(a);
    auto wb = words(b);
    if (wa.empty() && wb.empty()) return 0.0;
    size_t common = 0;
    for (const auto& w : wa) common += wb.count(w);
    return static_cast<double>(common) / static_cast<double>(wa.size() + wb.size() - common);
}

std::vector<ImageTextPair> to_image_text_pairs(const StreamDocument& doc, PairStrategy strategy,
                                               const SimilarityFn& similarity) {
    std::vector<size_t> text_indices;
    for (size_t i = 0; i < doc.elements.size(); ++i) {
        if (doc.elements[i].tag == ElementTag::Text) text_indices.push_back(i);
    }

    std::vector<ImageTextPair> pairs;
    if (text_indices.empty()) return pairs;

    for (size_t i = 0; i < doc.elements.size(); ++i) {
        const Element& element = doc.elements[i];
        if (element.tag != ElementTag::Image) continue;
        if (strategy == PairStrategy::Natural) {
            // Nearest preceding text element, else nearest following.
            size_t chosen = text_indices.front();
            bool found = false;
            for (size_t t : text_indices) {
                if (t < i) {
                    chosen = t;
                    found = true;
                }
            }
            if (!found) {
                for (size_t t : text_indices) {
                    if (t > i) {
                        chosen = t;
                        break;
                    }
                }
            }
            pairs.push_back({*element.image, doc.elements[chosen].content, strategy, std::nullopt});
        } else {
            if (!similarity) throw std::invalid_argument("retrieval pairing needs a similarity scorer");
            std::string surrogate = image_surrogate_text(*element.image);
            double best = -1.0;
            size_t best_index = text_indices.front();
            for (size_t t : text_indices) {
                double s = similarity(surrogate, doc.elements[t].content);
                if (s > best) {
                    best = s;
                    best_index = t;
                }
            }
            pairs.push_back({*element.image, doc.elements[best_index].content, strategy, best});
        }
    }
    return pairs;
}

}  // namespace omni
