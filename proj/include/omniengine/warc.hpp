#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniengine/time.hpp"

namespace omni {

struct WarcRecord {
    std::string record_type;  // response, request, warcinfo, ...
    std::string target_uri;
    UtcTime warc_date;
    std::string payload;
};

// One HTML page lifted out of a response record: URL, capture time, the HTTP
// body, and the charset named by the HTTP Content-Type (empty if none).
struct HtmlCapture {
    std::string url;
    UtcTime timestamp;
    std::string html;
    std::string http_charset;
};

class WarcParseError : public std::runtime_error {
public:
    WarcParseError(const std::string& message, uint64_t byte_offset)
        : std::runtime_error(message + " (at byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    uint64_t byte_offset() const { return byte_offset_; }

private:
    uint64_t byte_offset_;
};

// Sequential reader over a WARC/1.0 or / 1.1 stream, plain or as concatenated
// per-record gzip members. Offsets in errors refer to the decompressed
// stream. Single-producer: one reader feeds a queue of downstream workers.
class WarcReader {
public:
    explicit WarcReader(std::istream& in);

    // Next raw record of any type; nullopt at clean end of stream.
    std::optional<WarcRecord> next_record();

    // Next response record with an HTML content type; other records are
    // skipped silently.
    std::optional<HtmlCapture> next_html();

private:
    bool fill(size_t need);
    bool refill_chunk();

    std::istream& in_;
    std::string buffer_;
    size_t consumed_ = 0;       // bytes consumed from buffer_ front
    uint64_t stream_offset_ = 0;  // decompressed offset of buffer_[consumed_]
    bool input_done_ = false;
};

}  // namespace omni
