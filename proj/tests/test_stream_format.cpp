#include <doctest.h>

#include <random>

#include "omniengine/stream_format.hpp"

using namespace omni;

namespace {

StreamDocument make_doc(std::vector<Element> elements) {
    StreamDocument doc;
    doc.id = "d1";
    doc.meta.source_url = "http://ex.example/page";
    doc.meta.timestamp = *parse_rfc3339("2024-03-01T12:00:00Z");
    doc.meta.language = "en";
    doc.elements = std::move(elements);
    return doc;
}

Element text(std::string content) { return {ElementTag::Text, std::move(content), std::nullopt}; }

Element image(std::string url, std::string alt = "") {
    ImageRef ref;
    ref.url = std::move(url);
    ref.alt = std::move(alt);
    return {ElementTag::Image, "", ref};
}

// Randomized but valid documents for the round-trip property.
StreamDocument random_doc(std::mt19937_64& rng) {
    static const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta",
                                                   "eps",   "zeta",  "eta",   "theta"};
    std::uniform_int_distribution<int> tag_pick(0, 9);
    std::uniform_int_distribution<int> word_pick(0, static_cast<int>(vocab.size()) - 1);
    std::uniform_int_distribution<int> len_pick(0, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    StreamDocument doc;
    doc.id = "doc-" + std::to_string(rng());
    doc.meta.source_url = "http://site.example/p/" + std::to_string(rng() % 1000);
    doc.meta.timestamp = UtcTime{static_cast<int64_t>(rng() % 4102444800ULL)};
    doc.meta.language = rng() % 2 ? "en" : "und";
    if (rng() % 2) doc.meta.advertisement = unit(rng);
    if (rng() % 2) doc.meta.fluency = unit(rng);

    size_t count = 1 + rng() % 6;
    for (size_t i = 0; i < count; ++i) {
        ElementTag tag = static_cast<ElementTag>(tag_pick(rng));
        if (tag == ElementTag::Image) {
            ImageRef ref;
            ref.url = "http://img.example/" + std::to_string(rng() % 100) + ".png";
            ref.width = static_cast<int>(rng() % 2000);
            ref.height = static_cast<int>(rng() % 2000);
            if (rng() % 2) ref.aesthetic = 10.0 * unit(rng);
            if (rng() % 2) ref.nsfw = unit(rng);
            if (rng() % 2) ref.phash = rng();
            if (rng() % 2) ref.dhash = rng();
            switch (rng() % 4) {
                case 0: ref.status = ImageStatus::pending(); break;
                case 1: ref.status = ImageStatus::fetched(); break;
                case 2: ref.status = ImageStatus::failed(); break;
                default: ref.status = ImageStatus::dropped("min_dim"); break;
            }
            doc.elements.push_back({ElementTag::Image, "", ref});
        } else {
            std::string content;
            int words = len_pick(rng);
            for (int w = 0; w < words; ++w) {
                if (w) content += (rng() % 8 == 0) ? '\n' : ' ';
                content += vocab[static_cast<size_t>(word_pick(rng))];
            }
            doc.elements.push_back({tag, content, std::nullopt});
        }
    }
    return doc;
}

}  // namespace

TEST_SUITE("stream_format") {

TEST_CASE("tag set is closed") {
    CHECK(parse_element_tag("text") == ElementTag::Text);
    CHECK(parse_element_tag("detail") == ElementTag::Detail);
    CHECK_FALSE(parse_element_tag("banner").has_value());
    CHECK_FALSE(parse_element_tag("Text").has_value());
    CHECK_FALSE(parse_element_tag("").has_value());
}

// Golden line hand-written once against the schema, then frozen.
TEST_CASE("serialize matches the frozen golden line") {
    auto doc = make_doc({text("a"), image("http://ex.example/i.png")});
    const std::string golden =
        R"({"id":"d1","url":"http://ex.example/page","timestamp":"2024-03-01T12:00:00Z",)"
        R"("language":"en","elements":[{"tag":"text","content":"a"},{"tag":"image",)"
        R"("image":{"url":"http://ex.example/i.png","width":0,"height":0,"aesthetic":-1.0,)"
        R"("nsfw":-1.0,"status":"pending"}}],"meta":{"nsfw_text":-1.0,"political":-1.0,)"
        R"("toxic":-1.0,"advertisement":-1.0,"fluency":-1.0}})";
    CHECK(serialize_document(doc) == golden);
    CHECK(parse_document(golden) == doc);
}

TEST_CASE("round trip is identity on a 3-element doc") {
    auto doc = make_doc({text("hello world"), image("http://ex.example/a.png"), text("bye")});
    CHECK(parse_document(serialize_document(doc)) == doc);
}

TEST_CASE("unknown tag fails to parse") {
    auto doc = make_doc({text("a")});
    std::string line = serialize_document(doc);
    std::string bad = line;
    bad.replace(bad.find("\"text\""), 6, "\"banner\"");
    CHECK_THROWS_WITH_AS(parse_document(bad), doctest::Contains("UnknownTag"), DocumentParseError);
}

TEST_CASE("unknown top-level fields are rejected") {
    auto doc = make_doc({text("a")});
    std::string line = serialize_document(doc);
    std::string bad = line.substr(0, line.size() - 1) + R"(,"extra":1})";
    CHECK_THROWS_AS(parse_document(bad), DocumentParseError);
}

TEST_CASE("interior NUL is an encoding error") {
    auto doc = make_doc({text(std::string("a\0b", 3))});
    CHECK_THROWS_AS(serialize_document(doc), SerializeError);
}

TEST_CASE("validation reports score range violations") {
    auto doc = make_doc({text("a"), image("http://ex.example/i.png")});
    doc.elements[1].image->aesthetic = 11.0;
    auto report = validate_document(doc);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].code == ViolationCode::ScoreOutOfRange);

    // Sentinel -1 means not-yet-scored and is valid.
    doc.elements[1].image->aesthetic = kUnscored;
    CHECK(validate_document(doc).ok());
}

TEST_CASE("post-extraction documents must contain an image") {
    auto doc = make_doc({text("a")});
    CHECK(validate_document(doc).ok());
    auto report = validate_document(doc, {.require_image = true});
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].code == ViolationCode::NoImage);
}

TEST_CASE("well-formed doc validates clean") {
    auto doc = make_doc({text("a"), image("http://ex.example/i.png")});
    CHECK(validate_document(doc, {.require_image = true}).ok());
}

TEST_CASE("validation flags tag/image mismatch and control chars") {
    auto doc = make_doc({text("a")});
    doc.elements[0].image = ImageRef{.url = "http://x.example/i.png"};
    CHECK(validate_document(doc).violations[0].code == ViolationCode::ImageTagMismatch);

    auto doc2 = make_doc({text(std::string("bad\x01page", 8))});
    CHECK(validate_document(doc2).violations[0].code == ViolationCode::ControlChars);

    auto doc3 = make_doc({text("tabs\tand\nnewlines ok")});
    CHECK(validate_document(doc3).ok());
}

TEST_CASE("to_text_corpus drops images, keeps order") {
    CHECK(to_text_corpus(make_doc({text("a"), image("http://e.example/i.png"), text("b")})) ==
          "a\nb");
    CHECK(to_text_corpus(make_doc({image("http://e.example/i.png")})) == "");
    auto doc = make_doc({{ElementTag::Header, "T", std::nullopt}, text("p")});
    CHECK(to_text_corpus(doc) == "T\np");
}

TEST_CASE("natural pairing picks nearest preceding text, else following") {
    auto doc = make_doc({text("A"), image("http://e.example/i.png"), text("B")});
    auto pairs = to_image_text_pairs(doc, PairStrategy::Natural);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].text == "A");
    CHECK_FALSE(pairs[0].score.has_value());

    auto doc2 = make_doc({image("http://e.example/i.png"), text("B")});
    auto pairs2 = to_image_text_pairs(doc2, PairStrategy::Natural);
    REQUIRE(pairs2.size() == 1);
    CHECK(pairs2[0].text == "B");
}

TEST_CASE("retrieval pairing maximizes the scorer") {
    // Oracle: brute-force the overlap over both candidates by hand —
    // {red,car} vs {blue,sky} = 0; {red,car} vs {a,red,car,parked} = 2/4.
    CHECK(token_overlap_similarity("red car", "blue sky") == doctest::Approx(0.0));
    CHECK(token_overlap_similarity("red car", "a red car parked") == doctest::Approx(0.5));

    auto doc = make_doc({text("blue sky"), text("a red car parked"),
                         image("http://e.example/photos/red-car.jpg")});
    auto pairs = to_image_text_pairs(doc, PairStrategy::Retrieval, token_overlap_similarity);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].text == "a red car parked");
    REQUIRE(pairs[0].score.has_value());
    CHECK(*pairs[0].score == doctest::Approx(0.5));
}

TEST_CASE("retrieval with zero text elements yields empty result") {
    auto doc = make_doc({image("http://e.example/i.png")});
    CHECK(to_image_text_pairs(doc, PairStrategy::Retrieval, token_overlap_similarity).empty());
}

TEST_CASE("alt text wins over url surrogate") {
    ImageRef with_alt{.url = "http://e.example/x.png", .alt = "a brown fox"};
    CHECK(image_surrogate_text(with_alt) == "a brown fox");
    ImageRef no_alt{.url = "http://e.example/img/brown-fox.png"};
    CHECK(image_surrogate_text(no_alt) == "brown fox");
}

TEST_CASE("property: serialization round trip on random documents") {
    std::mt19937_64 rng(20240301);
    for (int i = 0; i < 200; ++i) {
        StreamDocument doc = random_doc(rng);
        std::string line = serialize_document(doc);
        CHECK(line.find('\n') == std::string::npos);
        StreamDocument back = parse_document(line);
        REQUIRE(back == doc);
        // Serialization is stable: a second pass gives identical bytes.
        CHECK(serialize_document(back) == line);
    }
}

TEST_CASE("property: to_text_corpus equals the subsequence of text contents") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 100; ++i) {
        StreamDocument doc = random_doc(rng);
        std::string expected;
        bool first = true;
        for (const auto& e : doc.elements) {
            if (e.tag == ElementTag::Image) continue;
            if (!first) expected += '\n';
            expected += e.content;
            first = false;
        }
        CHECK(to_text_corpus(doc) == expected);
    }
}

TEST_CASE("property: natural strategy pairs every image when text exists") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 100; ++i) {
        StreamDocument doc = random_doc(rng);
        size_t images = 0, texts = 0;
        for (const auto& e : doc.elements) {
            images += e.tag == ElementTag::Image;
            texts += e.tag == ElementTag::Text;
        }
        auto pairs = to_image_text_pairs(doc, PairStrategy::Natural);
        CHECK(pairs.size() == (texts > 0 ? images : 0));
    }
}

TEST_CASE("property: retrieval argmax is invariant under monotone transforms") {
    std::mt19937_64 rng(99);
    SimilarityFn base = token_overlap_similarity;
    SimilarityFn transformed = [](std::string_view a, std::string_view b) {
        return 0.25 + 0.5 * token_overlap_similarity(a, b);
    };
    for (int i = 0; i < 100; ++i) {
        StreamDocument doc = random_doc(rng);
        auto p1 = to_image_text_pairs(doc, PairStrategy::Retrieval, base);
        auto p2 = to_image_text_pairs(doc, PairStrategy::Retrieval, transformed);
        REQUIRE(p1.size() == p2.size());
        for (size_t k = 0; k < p1.size(); ++k) CHECK(p1[k].text == p2[k].text);
    }
}

}  // TEST_SUITE
