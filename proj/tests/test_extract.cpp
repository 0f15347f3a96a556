#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "omniengine/extract.hpp"
#include "omniengine/html.hpp"
#include "omniengine/warc.hpp"

using namespace omni;

namespace {

const std::string kDataDir = std::string(OMNI_TEST_DATA_DIR);

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExtractResult extract_page(const std::string& stem) {
    std::string html = read_file(kDataDir + "/extract/" + stem + ".html");
    return extract_document(html, "http://site.example/" + stem,
                            *parse_rfc3339("2024-05-01T00:00:00Z"));
}

StreamDocument require_doc(const ExtractResult& result) {
    REQUIRE(std::holds_alternative<StreamDocument>(result));
    return std::get<StreamDocument>(result);
}

}  // namespace

TEST_SUITE("extract") {

// --- HTML parsing and node scoring ---------------------------------------

TEST_CASE("dom parser basics") {
    auto root = parse_html("<div id='a'><p>Hello <b>world</b></p><img src=x.png></div>");
    REQUIRE(root->children.size() == 1);
    const DomNode& div = *root->children[0];
    CHECK(div.tag == "div");
    REQUIRE(div.attribute("id") != nullptr);
    CHECK(*div.attribute("id") == "a");
    REQUIRE(div.children.size() == 2);
    CHECK(div.children[0]->tag == "p");
    CHECK(div.children[1]->tag == "img");
    CHECK(subtree_text(div) == "Hello world");
}

TEST_CASE("dom parser entities, comments, and unclosed tags") {
    auto root = parse_html("<p>a &amp; b &lt;tag&gt; &#65;<!-- hidden --><p>second");
    REQUIRE(root->children.size() == 2);  // second <p> implicitly closes the first
    CHECK(subtree_text(*root->children[0]) == "a & b <tag> A");
    CHECK(subtree_text(*root->children[1]) == "second");
}

TEST_CASE("script and style bodies stay raw and unscored") {
    auto root = parse_html("<div><script>if (a < b) { x(); }</script><p>text</p></div>");
    const DomNode& div = *root->children[0];
    REQUIRE(div.children.size() == 2);
    CHECK(div.children[0]->tag == "script");
    CHECK(subtree_text(div) == "text");
}

TEST_CASE("score_node counts chars, tags, and link chars") {
    auto root = parse_html("<p>abcde</p>");
    NodeScore p = score_node(*root->children[0]);
    CHECK(p.text_chars == 5);
    CHECK(p.descendant_tags == 0);
    CHECK(p.density == doctest::Approx(5.0));

    std::string hundred(100, 'x');
    auto link_root = parse_html("<div><a>" + hundred + "</a></div>");
    NodeScore link = score_node(*link_root->children[0]);
    CHECK(link.text_chars == 100);
    CHECK(link.link_chars == 100);
    CHECK(link.descendant_tags == 1);

    auto empty = parse_html("<div></div>");
    CHECK(score_node(*empty->children[0]).density == doctest::Approx(0.0));
}

TEST_CASE("charset decoding: meta wins, then hint, then lossy utf-8") {
    CHECK(sniff_meta_charset("<meta charset=\"iso-8859-1\">") == "iso-8859-1");
    CHECK(sniff_meta_charset("<meta http-equiv=\"Content-Type\" content=\"text/html; "
                             "charset=windows-1252\">") == "windows-1252");
    // 0xE9 is é in latin-1.
    std::string latin1 = "<meta charset=\"iso-8859-1\">caf\xe9";
    CHECK(decode_to_utf8(latin1).find("caf\xc3\xa9") != std::string::npos);
    // Invalid utf-8 bytes become replacement chars rather than errors.
    std::string junk = "ok \xfe\xff bytes";
    CHECK(decode_to_utf8(junk).find("ok ") == 0);
    CHECK_THROWS_AS(decode_to_utf8(std::string("bin\0ary", 7)), DecodeError);
}

TEST_CASE("ad pattern matching is segment-anchored") {
    std::vector<std::string> patterns = {"ad", "ads", "banner", "sponsor", "pixel", "track"};
    CHECK(matches_ad_pattern("http://x.example/ads/top.gif", patterns));
    CHECK(matches_ad_pattern("http://x.example/static/banner_320.png", patterns));
    CHECK(matches_ad_pattern("http://x.example/track/p.gif", patterns));
    CHECK(matches_ad_pattern("http://x.example/img/pixel.gif", patterns));
    // "ad" must not fire inside unrelated segments.
    CHECK_FALSE(matches_ad_pattern("http://x.example/upload/photo.png", patterns));
    CHECK_FALSE(matches_ad_pattern("http://x.example/shadow/figure.png", patterns));
    CHECK_FALSE(matches_ad_pattern("http://x.example/radio/show.png", patterns));
}

// --- Golden extractions ----------------------------------------------------

// Frozen after a hand-checked first run; any byte drift is a regression.
TEST_CASE("golden pages extract byte-exactly") {
    const char* stems[] = {
        "page01_article_nav", "page03_headers",  "page04_list",          "page05_code_quote",
        "page06_table",       "page07_adimages", "page08_script_style",  "page09_linkfarm",
        "page10_sidebar_merge", "page11_latin1", "page12_details",
    };
    for (const char* stem : stems) {
        CAPTURE(stem);
        auto result = extract_page(stem);
        const StreamDocument doc = require_doc(result);
        std::string golden = read_file(kDataDir + "/extract/" + std::string(stem) + ".golden.jsonl");
        CHECK(serialize_document(doc) + "\n" == golden);
    }
}

TEST_CASE("image-less page drops with NoImage") {
    auto result = extract_page("page02_noimage");
    REQUIRE(std::holds_alternative<ExtractDrop>(result));
    CHECK(std::get<ExtractDrop>(result) == ExtractDrop::NoImage);
}

TEST_CASE("page without enough text drops with EmptyBody") {
    auto result = extract_page("page13_emptybody");
    REQUIRE(std::holds_alternative<ExtractDrop>(result));
    CHECK(std::get<ExtractDrop>(result) == ExtractDrop::EmptyBody);
}

TEST_CASE("nav content is absent from the article page") {
    const StreamDocument doc = require_doc(extract_page("page01_article_nav"));
    std::string line = serialize_document(doc);
    CHECK(line.find("Weather") == std::string::npos);
    CHECK(line.find("Home") == std::string::npos);
    REQUIRE(doc.elements.size() == 3);
    CHECK(doc.elements[0].tag == ElementTag::Text);
    CHECK(doc.elements[1].tag == ElementTag::Image);
    CHECK(doc.elements[1].image->width == 640);
    CHECK(doc.elements[2].tag == ElementTag::Text);
}

TEST_CASE("headings map to header elements") {
    const StreamDocument doc = require_doc(extract_page("page03_headers"));
    CHECK(doc.elements[0].tag == ElementTag::Header);
    CHECK(doc.elements[0].content == "Title");
}

TEST_CASE("no output text originates from script or style") {
    const StreamDocument doc = require_doc(extract_page("page08_script_style"));
    std::string line = serialize_document(doc);
    CHECK(line.find("SENTINEL") == std::string::npos);
}

TEST_CASE("ad-pattern images are removed, content image kept") {
    const StreamDocument doc = require_doc(extract_page("page07_adimages"));
    int images = 0;
    for (const auto& e : doc.elements) {
        if (e.tag == ElementTag::Image) {
            ++images;
            CHECK(e.image->url == "http://site.example/photos/mill-wheel.jpg");
        }
    }
    CHECK(images == 1);
}

TEST_CASE("link-dense list cluster is removed") {
    const StreamDocument doc = require_doc(extract_page("page09_linkfarm"));
    for (const auto& e : doc.elements) CHECK(e.tag != ElementTag::List);
    CHECK(serialize_document(doc).find("Browse by") == std::string::npos);
}

TEST_CASE("small winner merges qualifying siblings in document order") {
    const StreamDocument doc = require_doc(extract_page("page10_sidebar_merge"));
    REQUIRE(doc.elements.size() == 3);
    CHECK(doc.elements[0].content.find("harbour office posted") != std::string::npos);
    CHECK(doc.elements[1].content.find("last boat") != std::string::npos);
    CHECK(doc.elements[2].tag == ElementTag::Image);
}

TEST_CASE("extraction is deterministic: same bytes, same document") {
    auto a = require_doc(extract_page("page04_list"));
    auto b = require_doc(extract_page("page04_list"));
    CHECK(serialize_document(a) == serialize_document(b));
    CHECK(a.id == b.id);
}

TEST_CASE("every emitted document has at least one image and one text element") {
    const char* stems[] = {"page01_article_nav", "page03_headers", "page04_list",
                           "page05_code_quote",  "page06_table",   "page07_adimages",
                           "page08_script_style", "page09_linkfarm", "page10_sidebar_merge",
                           "page11_latin1",      "page12_details"};
    for (const char* stem : stems) {
        CAPTURE(stem);
        const StreamDocument doc = require_doc(extract_page(stem));
        int images = 0, texts = 0;
        for (const auto& e : doc.elements) {
            images += e.tag == ElementTag::Image;
            texts += e.tag == ElementTag::Text;
        }
        CHECK(images >= 1);
        CHECK(texts >= 1);
        CHECK(validate_document(doc, {.require_image = true}).ok());
    }
}

// --- WARC ingestion ---------------------------------------------------------

TEST_CASE("warc: response yields, request is skipped") {
    std::ifstream in(kDataDir + "/warc/sample.warc", std::ios::binary);
    WarcReader reader(in);
    auto capture = reader.next_html();
    REQUIRE(capture.has_value());
    CHECK(capture->url == "http://warc.example/page");
    CHECK(format_rfc3339(capture->timestamp) == "2024-04-05T06:07:08Z");
    CHECK(capture->html.find("<article>") != std::string::npos);
    CHECK(capture->http_charset == "utf-8");
    CHECK_FALSE(reader.next_html().has_value());  // exactly one
}

TEST_CASE("warc: gzipped members read identically") {
    std::ifstream plain_in(kDataDir + "/warc/sample.warc", std::ios::binary);
    std::ifstream gz_in(kDataDir + "/warc/sample.warc.gz", std::ios::binary);
    WarcReader plain(plain_in), gz(gz_in);
    auto a = plain.next_html();
    auto b = gz.next_html();
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->html == b->html);
    CHECK(a->url == b->url);
}

TEST_CASE("warc: archive with no response records is empty") {
    std::string req_only =
        "WARC/1.0\r\nWARC-Type: request\r\nWARC-Date: 2024-01-01T00:00:00Z\r\n"
        "Content-Length: 4\r\n\r\nGET \r\n\r\n";
    std::istringstream in(req_only);
    WarcReader reader(in);
    CHECK_FALSE(reader.next_html().has_value());
}

TEST_CASE("warc: truncated payload raises with byte offset") {
    std::ifstream in(kDataDir + "/warc/truncated.warc", std::ios::binary);
    WarcReader reader(in);
    CHECK_THROWS_AS(
        {
            while (reader.next_record()) {
            }
        },
        WarcParseError);
}

TEST_CASE("warc: missing mandatory header raises") {
    std::ifstream in(kDataDir + "/warc/missing_header.warc", std::ios::binary);
    WarcReader reader(in);
    try {
        reader.next_record();
        FAIL("expected error");
    } catch (const WarcParseError& e) {
        CHECK(std::string(e.what()).find("Content-Length") != std::string::npos);
    }
}

TEST_CASE("html directory ingestion with sidecar meta") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "omni_ingest_test";
    fs::create_directories(dir);
    {
        std::ofstream html(dir / "a.html");
        html << "<html><body>hi</body></html>";
        std::ofstream meta(dir / "a.meta");
        meta << "http://dir.example/a\n2024-02-02T00:00:00Z\n";
        std::ofstream orphan(dir / "b.html");
        orphan << "<html></html>";  // no sidecar: skipped
    }
    auto captures = ingest_html_dir(dir.string());
    REQUIRE(captures.size() == 1);
    CHECK(captures[0].url == "http://dir.example/a");
    CHECK(format_rfc3339(captures[0].timestamp) == "2024-02-02T00:00:00Z");
    fs::remove_all(dir);
}

}  // TEST_SUITE
