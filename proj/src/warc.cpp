#include "omniengine/warc.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include <zlib.h>

namespace omni {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct HeaderBlock {
    std::vector<std::pair<std::string, std::string>> fields;  // lowercase names

    const std::string* get(std::string_view name) const {
        for (const auto& [key, value] : fields) {
            if (key == name) return &value;
        }
        return nullptr;
    }
};

// Parses "Name: value" lines until a blank line; returns bytes consumed or 0
// if the block is still incomplete.
size_t parse_headers(std::string_view text, HeaderBlock& out) {
    size_t pos = 0;
    for (;;) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) return 0;
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        if (line.empty()) return pos;
        size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;  // tolerate stray lines
        out.fields.emplace_back(lower(trim(line.substr(0, colon))),
                                std::string(trim(line.substr(colon + 1))));
    }
}

// Decompresses one complete gzip member from `in`; returns false when the
// stream does not start with a gzip member.
bool inflate_member(std::istream& in, std::string& out) {
    int first = in.peek();
    if (first != 0x1f) return false;

    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw WarcParseError("zlib init failed", 0);

    char raw[1 << 14];
    char inflated[1 << 15];
    int status = Z_OK;
    while (status != Z_STREAM_END) {
        if (zs.avail_in == 0) {
            in.read(raw, sizeof(raw));
            std::streamsize got = in.gcount();
            if (got <= 0) {
                inflateEnd(&zs);
                throw WarcParseError("truncated gzip member", 0);
            }
            zs.next_in = reinterpret_cast<Bytef*>(raw);
            zs.avail_in = static_cast<uInt>(got);
        }
        zs.next_out = reinterpret_cast<Bytef*>(inflated);
        zs.avail_out = sizeof(inflated);
        status = inflate(&zs, Z_NO_FLUSH);
        if (status != Z_OK && status != Z_STREAM_END) {
            inflateEnd(&zs);
            throw WarcParseError("corrupt gzip member", 0);
        }
        out.append(inflated, sizeof(inflated) - zs.avail_out);
    }
    // Put unread compressed bytes back for the next member. Requires a
    // seekable stream (WARC inputs are files).
    if (zs.avail_in > 0) {
        in.clear();
        in.seekg(-static_cast<std::streamoff>(zs.avail_in), std::ios::cur);
        if (!in) {
            inflateEnd(&zs);
            throw WarcParseError("input stream is not seekable across gzip members", 0);
        }
    }
    inflateEnd(&zs);
    return true;
}

}  // namespace

WarcReader::WarcReader(std::istream& in) : in_(in) {}

bool WarcReader::refill_chunk() {
    if (input_done_) return false;
    if (in_.peek() == EOF) {
        input_done_ = true;
        return false;
    }
    if (in_.peek() == 0x1f) {
        std::string member;
        if (inflate_member(in_, member)) {
            buffer_.append(member);
            return true;
        }
    }
    char raw[1 << 15];
    in_.read(raw, sizeof(raw));
    std::streamsize got = in_.gcount();
    if (got <= 0) {
        input_done_ = true;
        return false;
    }
    buffer_.append(raw, static_cast<size_t>(got));
    return true;
}

bool WarcReader::fill(size_t need) {
    while (buffer_.size() - consumed_ < need) {
        if (!refill_chunk()) return false;
    }
    return true;
}

std::optional<WarcRecord> WarcReader::next_record() {
    // Compact the buffer occasionally.
    if (consumed_ > (1u << 20)) {
        buffer_.erase(0, consumed_);
        consumed_ = 0;
    }

    // Skip inter-record newlines.
    for (;;) {
        if (!fill(1)) return std::nullopt;
        char c = buffer_[consumed_];
        if (c == '\r' || c == '\n') {
            ++consumed_;
            ++stream_offset_;
        } else {
            break;
        }
    }
    const uint64_t record_start = stream_offset_;

    // Header block: grow the buffer until the blank line shows up.
    HeaderBlock headers;
    size_t header_bytes = 0;
    for (;;) {
        std::string_view view(buffer_.data() + consumed_, buffer_.size() - consumed_);
        headers.fields.clear();
        header_bytes = parse_headers(view, headers);
        if (header_bytes > 0) break;
        if (!refill_chunk())
            throw WarcParseError("truncated record: header block never ends", record_start);
    }

    std::string_view version(buffer_.data() + consumed_,
                             std::min<size_t>(8, buffer_.size() - consumed_));
    if (version.rfind("WARC/", 0) != 0)
        throw WarcParseError("record does not start with a WARC/ version line", record_start);

    const std::string* type = headers.get("warc-type");
    const std::string* length_text = headers.get("content-length");
    if (!type) throw WarcParseError("missing mandatory WARC-Type header", record_start);
    if (!length_text) throw WarcParseError("missing mandatory Content-Length header", record_start);
    uint64_t length = 0;
    for (char c : *length_text) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw WarcParseError("malformed Content-Length", record_start);
        length = length * 10 + static_cast<uint64_t>(c - '0');
    }

    consumed_ += header_bytes;
    stream_offset_ += header_bytes;
    if (!fill(length)) throw WarcParseError("truncated record: payload shorter than Content-Length",
                                            record_start);

    WarcRecord record;
    record.record_type = *type;
    if (const std::string* uri = headers.get("warc-target-uri")) record.target_uri = *uri;
    if (const std::string* date = headers.get("warc-date")) {
        auto parsed = parse_rfc3339(*date);
        if (!parsed) throw WarcParseError("malformed WARC-Date: " + *date, record_start);
        record.warc_date = *parsed;
    }
    record.payload = buffer_.substr(consumed_, length);
    consumed_ += length;
    stream_offset_ += length;
    return record;
}

std::optional<HtmlCapture> WarcReader::next_html() {
    for (;;) {
        auto record = next_record();
        if (!record) return std::nullopt;
        if (record->record_type != "response") continue;

        // Payload is an HTTP response: status line, headers, body.
        std::string_view payload(record->payload);
        size_t line_end = payload.find('\n');
        if (line_end == std::string_view::npos) continue;
        std::string_view status_line = payload.substr(0, line_end);
        if (status_line.rfind("HTTP/", 0) != 0) continue;

        HeaderBlock http;
        size_t header_bytes = parse_headers(payload.substr(line_end + 1), http);
        if (header_bytes == 0) continue;

        const std::string* content_type = http.get("content-type");
        if (!content_type) continue;
        std::string type = lower(*content_type);
        if (type.find("text/html") == std::string::npos &&
            type.find("application/xhtml") == std::string::npos) {
            continue;
        }

        HtmlCapture capture;
        capture.url = record->target_uri;
        capture.timestamp = record->warc_date;
        capture.html = std::string(payload.substr(line_end + 1 + header_bytes));
        size_t charset_pos = type.find("charset=");
        if (charset_pos != std::string::npos) {
            std::string charset = type.substr(charset_pos + 8);
            charset.erase(std::remove_if(charset.begin(), charset.end(), [](unsigned char c) {
                              return c == '"' || c == '\'' || c == ';' || std::isspace(c);
                          }),
                          charset.end());
            capture.http_charset = charset;
        }
        return capture;
    }
}

}  // namespace omni
