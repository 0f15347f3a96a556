// Python bindings for the core operations: the streaming document format,
// filtering, dedup, image fingerprints, metrics, the stage-ordering model,
// and the assembled pipeline.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "omniengine/dedup.hpp"
#include "omniengine/extract.hpp"
#include "omniengine/image.hpp"
#include "omniengine/image_pipeline.hpp"
#include "omniengine/metrics.hpp"
#include "omniengine/pipeline.hpp"
#include "omniengine/scheduler.hpp"
#include "omniengine/stream_format.hpp"
#include "omniengine/text_filters.hpp"

namespace py = pybind11;
using namespace omni;

namespace {

StreamDocument doc_from_json(const std::string& line) { return parse_document(line); }

py::dict verdict_to_dict(const FilterVerdict& verdict) {
    py::dict out;
    const char* decision = verdict.decision == FilterDecision::Keep      ? "keep"
                           : verdict.decision == FilterDecision::Drop    ? "drop"
                                                                         : "modified";
    out["decision"] = decision;
    out["reason"] = verdict.drop_reason;
    out["triggered"] = verdict.triggered_rules;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "image-text interleaved corpus engine";

    // --- stream format -------------------------------------------------------
    py::enum_<ElementTag>(m, "ElementTag")
        .value("text", ElementTag::Text)
        .value("image", ElementTag::Image)
        .value("code", ElementTag::Code)
        .value("header", ElementTag::Header)
        .value("detail", ElementTag::Detail)
        .value("quote", ElementTag::Quote)
        .value("video", ElementTag::Video)
        .value("audio", ElementTag::Audio)
        .value("table", ElementTag::Table)
        .value("list", ElementTag::List);

    py::class_<ImageRef>(m, "ImageRef")
        .def(py::init<>())
        .def_readwrite("url", &ImageRef::url)
        .def_readwrite("width", &ImageRef::width)
        .def_readwrite("height", &ImageRef::height)
        .def_readwrite("aesthetic", &ImageRef::aesthetic)
        .def_readwrite("nsfw", &ImageRef::nsfw)
        .def_readwrite("alt", &ImageRef::alt)
        .def_property(
            "status", [](const ImageRef& r) { return to_string(r.status); },
            [](ImageRef& r, const std::string& s) {
                auto parsed = parse_image_status(s);
                if (!parsed) throw py::value_error("bad image status: " + s);
                r.status = *parsed;
            })
        .def_property(
            "phash", [](const ImageRef& r) { return r.phash; },
            [](ImageRef& r, std::optional<uint64_t> v) { r.phash = v; })
        .def_property(
            "dhash", [](const ImageRef& r) { return r.dhash; },
            [](ImageRef& r, std::optional<uint64_t> v) { r.dhash = v; });

    py::class_<Element>(m, "Element")
        .def(py::init([](ElementTag tag, std::string content, std::optional<ImageRef> image) {
                 return Element{tag, std::move(content), std::move(image)};
             }),
             py::arg("tag"), py::arg("content") = "", py::arg("image") = std::nullopt)
        .def_readwrite("tag", &Element::tag)
        .def_readwrite("content", &Element::content)
        .def_readwrite("image", &Element::image);

    py::class_<DocumentMeta>(m, "DocumentMeta")
        .def(py::init<>())
        .def_readwrite("nsfw_text", &DocumentMeta::nsfw_text)
        .def_readwrite("political", &DocumentMeta::political)
        .def_readwrite("toxic", &DocumentMeta::toxic)
        .def_readwrite("advertisement", &DocumentMeta::advertisement)
        .def_readwrite("fluency", &DocumentMeta::fluency)
        .def_readwrite("language", &DocumentMeta::language)
        .def_readwrite("source_url", &DocumentMeta::source_url)
        .def_property(
            "timestamp", [](const DocumentMeta& m) { return m.timestamp.seconds_since_epoch; },
            [](DocumentMeta& m, int64_t v) { m.timestamp = UtcTime{v}; })
        .def_property(
            "timestamp_rfc3339",
            [](const DocumentMeta& m) { return format_rfc3339(m.timestamp); },
            [](DocumentMeta& m, const std::string& v) {
                auto t = parse_rfc3339(v);
                if (!t) throw py::value_error("bad rfc3339 timestamp: " + v);
                m.timestamp = *t;
            });

    py::class_<StreamDocument>(m, "StreamDocument")
        .def(py::init<>())
        .def_readwrite("id", &StreamDocument::id)
        .def_readwrite("elements", &StreamDocument::elements)
        .def_readwrite("meta", &StreamDocument::meta)
        .def("__eq__", [](const StreamDocument& a, const StreamDocument& b) { return a == b; });

    m.def("serialize_document", &serialize_document, py::arg("doc"));
    m.def("parse_document", &doc_from_json, py::arg("jsonl_line"));
    m.def(
        "validate_document",
        [](const StreamDocument& doc, bool require_image) {
            auto report = validate_document(doc, {.require_image = require_image});
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& v : report.violations)
                out.emplace_back(std::string(to_string(v.code)), v.detail);
            return out;
        },
        py::arg("doc"), py::arg("require_image") = false);
    m.def("to_text_corpus", &to_text_corpus, py::arg("doc"));
    m.def(
        "to_image_text_pairs",
        [](const StreamDocument& doc, const std::string& strategy, py::object similarity) {
            PairStrategy s;
            if (strategy == "natural") s = PairStrategy::Natural;
            else if (strategy == "retrieval") s = PairStrategy::Retrieval;
            else throw py::value_error("strategy must be natural|retrieval");
            SimilarityFn fn = nullptr;
            if (!similarity.is_none()) {
                fn = [similarity](std::string_view a, std::string_view b) {
                    return similarity(std::string(a), std::string(b)).cast<double>();
                };
            } else if (s == PairStrategy::Retrieval) {
                fn = token_overlap_similarity;
            }
            std::vector<py::dict> out;
            for (const auto& pair : to_image_text_pairs(doc, s, fn)) {
                py::dict d;
                d["image_url"] = pair.image.url;
                d["text"] = pair.text;
                d["strategy"] = strategy;
                d["score"] = pair.score;
                out.push_back(std::move(d));
            }
            return out;
        },
        py::arg("doc"), py::arg("strategy") = "natural", py::arg("similarity") = py::none());
    m.def("token_overlap_similarity",
          [](const std::string& a, const std::string& b) { return token_overlap_similarity(a, b); });

    // --- text filters ----------------------------------------------------------
    m.def(
        "preliminary_filter",
        [](const StreamDocument& doc) { return verdict_to_dict(preliminary_filter(doc)); },
        py::arg("doc"));

    py::class_<FilterRule>(m, "FilterRule")
        .def_readonly("id", &FilterRule::id)
        .def_readonly("language", &FilterRule::language)
        .def_readonly("type", &FilterRule::type)
        .def_property_readonly("kind", [](const FilterRule& rule) {
            return rule.kind == RuleKind::ParagraphTransform ? "paragraph_transform"
                                                             : "document_verdict";
        });
    m.def("builtin_english_rules", &builtin_english_rules);
    m.def("load_ruleset", [](const std::string& toml_text) { return load_ruleset(toml::parse(toml_text)); },
          py::arg("toml_text"));
    m.def(
        "apply_detailed_rules",
        [](const StreamDocument& doc, const RuleSet& rules) {
            auto [out, verdict] = apply_detailed_rules(doc, rules);
            return py::make_tuple(out, verdict_to_dict(verdict));
        },
        py::arg("doc"), py::arg("rules"));

    // --- dedup --------------------------------------------------------------------
    py::class_<MinHashSignature>(m, "MinHashSignature")
        .def_property_readonly("values",
                               [](const MinHashSignature& sig) { return sig.values; });
    m.def(
        "minhash_signature",
        [](const std::string& text, int k, int shingle_width, uint64_t seed) {
            return minhash_signature(text, {k, shingle_width, seed});
        },
        py::arg("text"), py::arg("k") = 256, py::arg("shingle_width") = 5, py::arg("seed") = 0);
    m.def("estimate_jaccard", &estimate_jaccard, py::arg("a"), py::arg("b"));
    m.def(
        "dedup_corpus",
        [](const std::vector<StreamDocument>& docs, double threshold, int k, int shingle_width,
           uint64_t seed) {
            DedupConfig config;
            config.threshold = threshold;
            config.minhash = {k, shingle_width, seed};
            auto result = dedup_corpus(docs, config);
            std::vector<py::dict> groups;
            for (const auto& group : result.groups) {
                py::dict g;
                g["component_id"] = group.component_id;
                g["member_ids"] = group.member_ids;
                g["survivor_id"] = group.survivor_id;
                groups.push_back(std::move(g));
            }
            return py::make_tuple(result.survivors, groups);
        },
        py::arg("docs"), py::arg("threshold") = 0.8, py::arg("k") = 256,
        py::arg("shingle_width") = 5, py::arg("seed") = 0);

    // --- images ----------------------------------------------------------------------
    py::class_<BloomFilter>(m, "BloomFilter")
        .def(py::init<uint64_t, int, uint64_t>(), py::arg("bit_count"), py::arg("hash_count"),
             py::arg("seed") = 0)
        .def("insert", [](BloomFilter& b, const std::string& s) { b.insert(s); })
        .def("possibly_present",
             [](const BloomFilter& b, const std::string& s) { return b.possibly_present(s); })
        .def_property_readonly("inserted", &BloomFilter::inserted)
        .def("theoretical_fpr", [](const BloomFilter& b) { return b.theoretical_fpr(); })
        .def_static(
            "fpr_formula",
            [](uint64_t n, uint64_t m, int k) { return BloomFilter::theoretical_fpr(n, m, k); },
            py::arg("n"), py::arg("m"), py::arg("k"));

    py::class_<PixelImage>(m, "PixelImage")
        .def(py::init([](int width, int height, const std::vector<uint8_t>& pixels) {
                 PixelImage img;
                 img.width = width;
                 img.height = height;
                 img.pixels = pixels;
                 if (img.pixels.size() != static_cast<size_t>(width) * height)
                     throw py::value_error("pixel count must be width*height");
                 return img;
             }),
             py::arg("width"), py::arg("height"), py::arg("pixels"))
        .def_readonly("width", &PixelImage::width)
        .def_readonly("height", &PixelImage::height)
        .def_readonly("pixels", &PixelImage::pixels);
    m.def("decode_pgm", [](py::bytes data) { return decode_pgm(std::string(data)); });
    m.def("encode_pgm", [](const PixelImage& img) { return py::bytes(encode_pgm(img)); });
    m.def("resize_area_average", &resize_area_average, py::arg("image"), py::arg("width"),
          py::arg("height"));
    m.def("phash", &phash, py::arg("image"));
    m.def("dhash", &dhash, py::arg("image"));
    m.def("hamming_distance", &hamming_distance, py::arg("a"), py::arg("b"));
    m.def(
        "filter_image",
        [](const ImageRef& ref) -> std::optional<std::string> {
            auto reason = filter_image(ref);
            if (!reason) return std::nullopt;
            return std::string(to_string(*reason));
        },
        py::arg("ref"));

    // --- extraction -------------------------------------------------------------------
    m.def(
        "extract_document",
        [](py::bytes html, const std::string& url, const std::string& timestamp_rfc3339)
            -> std::optional<StreamDocument> {
            auto t = parse_rfc3339(timestamp_rfc3339);
            if (!t) throw py::value_error("bad rfc3339 timestamp");
            auto result = extract_document(std::string(html), url, *t);
            if (auto* doc = std::get_if<StreamDocument>(&result)) return *doc;
            return std::nullopt;
        },
        py::arg("html"), py::arg("url"), py::arg("timestamp") = "1970-01-01T00:00:00Z");

    // --- metrics -------------------------------------------------------------------------
    py::class_<QualityMetrics>(m, "QualityMetrics")
        .def_readonly("line_number", &QualityMetrics::line_number)
        .def_readonly("line_lengths", &QualityMetrics::line_lengths)
        .def_readonly("token_length", &QualityMetrics::token_length)
        .def_readonly("non_alpha_fraction", &QualityMetrics::non_alpha_fraction)
        .def_readonly("unique_words_fraction", &QualityMetrics::unique_words_fraction)
        .def_readonly("mean_word_length", &QualityMetrics::mean_word_length)
        .def_readonly("sentence_number", &QualityMetrics::sentence_number)
        .def_readonly("stop_word_fraction", &QualityMetrics::stop_word_fraction)
        .def_readonly("symbol_to_word_ratio", &QualityMetrics::symbol_to_word_ratio)
        .def_readonly("image_count", &QualityMetrics::image_count)
        .def_readonly("degenerate", &QualityMetrics::degenerate);
    m.def("compute_metrics", &compute_metrics, py::arg("doc"));

    // --- scheduler ---------------------------------------------------------------------------
    m.def(
        "plan_table",
        [](double docs, const std::string& profiles_toml) {
            StageProfiles profiles = profiles_toml.empty()
                                         ? default_stage_profiles()
                                         : load_stage_profiles(toml::parse(profiles_toml));
            return plan_table_tsv(profiles, docs);
        },
        py::arg("docs") = 1e9, py::arg("profiles_toml") = "");
    m.def(
        "optimal_plan",
        [](double docs, const std::string& profiles_toml) {
            StageProfiles profiles = profiles_toml.empty()
                                         ? default_stage_profiles()
                                         : load_stage_profiles(toml::parse(profiles_toml));
            auto [plan, cost] = optimal_plan(profiles, docs);
            return py::make_tuple(plan.notation(), cost.total_hours);
        },
        py::arg("docs") = 1e9, py::arg("profiles_toml") = "");

    // --- pipeline ----------------------------------------------------------------------------
    m.def(
        "run_pipeline",
        [](std::vector<StreamDocument> docs, const std::string& image_root, unsigned workers,
           uint64_t seed, bool hard_drop) {
            PipelineConfig config;
            config.image_root = image_root;
            config.images = !image_root.empty();
            config.workers = workers;
            config.seed = seed;
            config.hard_drop = hard_drop;
            auto outcome = run_pipeline_on(std::move(docs), config);
            std::vector<py::dict> rejects;
            for (const auto& r : outcome.rejects) {
                py::dict d;
                d["doc_id"] = r.doc.id;
                d["stage"] = r.stage;
                d["reason"] = r.reason;
                rejects.push_back(std::move(d));
            }
            return py::make_tuple(outcome.output, rejects, outcome.report.to_json());
        },
        py::arg("docs"), py::arg("image_root") = "", py::arg("workers") = 1, py::arg("seed") = 0,
        py::arg("hard_drop") = false);

    m.attr("__version__") = "0.1.0";
}
