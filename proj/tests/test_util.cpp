#include <doctest.h>

#include "omniengine/hash.hpp"
#include "omniengine/stopwords.hpp"
#include "omniengine/time.hpp"
#include "omniengine/toml.hpp"
#include "omniengine/url.hpp"

using namespace omni;

TEST_SUITE("util") {

TEST_CASE("hash64 is deterministic and seed-sensitive") {
    CHECK(hash64("abc", 1) == hash64("abc", 1));
    CHECK(hash64("abc", 1) != hash64("abc", 2));
    CHECK(hash64("abc", 1) != hash64("abd", 1));
    CHECK(hash64_indexed(7, 0, "x") != hash64_indexed(7, 1, "x"));
}

TEST_CASE("rfc3339 round trip") {
    auto t = parse_rfc3339("2024-03-01T12:30:45Z");
    REQUIRE(t.has_value());
    CHECK(format_rfc3339(*t) == "2024-03-01T12:30:45Z");

    auto epoch = parse_rfc3339("1970-01-01T00:00:00Z");
    REQUIRE(epoch.has_value());
    CHECK(epoch->seconds_since_epoch == 0);

    auto offset = parse_rfc3339("2024-03-01T12:30:45+02:00");
    REQUIRE(offset.has_value());
    CHECK(offset->seconds_since_epoch == t->seconds_since_epoch - 7200);

    auto frac = parse_rfc3339("2024-03-01T12:30:45.123Z");
    REQUIRE(frac.has_value());
    CHECK(frac->seconds_since_epoch == t->seconds_since_epoch);

    CHECK_FALSE(parse_rfc3339("2024-13-01T00:00:00Z").has_value());
    CHECK_FALSE(parse_rfc3339("2024-02-30T00:00:00Z").has_value());
    CHECK_FALSE(parse_rfc3339("not a time").has_value());
    CHECK_FALSE(parse_rfc3339("2024-03-01T12:30:45").has_value());
}

TEST_CASE("rfc3339 dates far from epoch") {
    auto t = parse_rfc3339("1999-12-31T23:59:59Z");
    REQUIRE(t.has_value());
    CHECK(format_rfc3339(*t) == "1999-12-31T23:59:59Z");
    auto leap = parse_rfc3339("2024-02-29T00:00:00Z");
    REQUIRE(leap.has_value());
    CHECK(format_rfc3339(*leap) == "2024-02-29T00:00:00Z");
}

TEST_CASE("url normalization strips fragments and default ports") {
    CHECK(normalize_url("HTTP://Example.COM:80/a/b?x=1#frag") == "http://example.com/a/b?x=1");
    CHECK(normalize_url("https://example.com:443/") == "https://example.com/");
    CHECK(normalize_url("https://example.com:8443/p") == "https://example.com:8443/p");
    CHECK(normalize_url("http://example.com") == "http://example.com/");
    // Query is kept: it often selects the image variant.
    CHECK(normalize_url("http://cdn.example.com/img?id=4&s=2") == "http://cdn.example.com/img?id=4&s=2");
    CHECK_FALSE(parse_url("not-a-url").has_value());
    CHECK_FALSE(parse_url("/relative/path").has_value());
}

TEST_CASE("url resolution") {
    CHECK(resolve_url("http://a.example/dir/page.html", "img/x.png") ==
          "http://a.example/dir/img/x.png");
    CHECK(resolve_url("http://a.example/dir/page.html", "/abs.png") == "http://a.example/abs.png");
    CHECK(resolve_url("http://a.example/dir/page.html", "//cdn.example/x.png") ==
          "http://cdn.example/x.png");
    CHECK(resolve_url("http://a.example/dir/page.html", "https://b.example/y.png") ==
          "https://b.example/y.png");
    CHECK(resolve_url("http://a.example/a/b/c.html", "../up.png") == "http://a.example/a/up.png");
}

TEST_CASE("url surrogate text") {
    CHECK(url_surrogate_text("http://x.example/photos/red-car_parked.jpg") == "red car parked");
    CHECK(url_surrogate_text("http://x.example/") == "");
}

TEST_CASE("toml parses tables, arrays of tables, and scalars") {
    auto root = toml::parse(R"(
# comment
title = "demo"
count = 42
ratio = 0.8
flag = true
names = ["a", "b", "c"]

[section]
value = 7

[[rule]]
id = "one"
[[rule]]
id = "two"
)");
    CHECK(toml::get_string(root, "title", "") == "demo");
    CHECK(toml::get_int(root, "count", 0) == 42);
    CHECK(toml::get_float(root, "ratio", 0) == doctest::Approx(0.8));
    CHECK(toml::get_bool(root, "flag", false));
    CHECK(toml::get_string_array(root, "names") == std::vector<std::string>{"a", "b", "c"});
    const auto* section = toml::find(root, "section");
    REQUIRE(section != nullptr);
    CHECK(toml::get_int(section->as_table(), "value", 0) == 7);
    const auto* rules = toml::find(root, "rule");
    REQUIRE(rules != nullptr);
    REQUIRE(rules->as_array().size() == 2);
    CHECK(toml::get_string(rules->as_array()[1].as_table(), "id", "") == "two");
}

TEST_CASE("toml rejects malformed input with line numbers") {
    CHECK_THROWS_AS(toml::parse("key"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("key = "), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = 1\na = 2"), toml::ParseError);
    try {
        toml::parse("ok = 1\nbad = \"unterminated");
        FAIL("expected error");
    } catch (const toml::ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("stopword list is frozen at 150 entries") {
    CHECK(english_stopwords().size() == 150);
    CHECK(is_stopword("the"));
    CHECK(is_stopword("on"));
    CHECK_FALSE(is_stopword("cat"));
}

}  // TEST_SUITE
