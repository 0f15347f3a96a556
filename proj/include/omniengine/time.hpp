#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace omni {

// UTC instant with second resolution. Fractional seconds are accepted on
// parse and discarded; formatting always emits the "Z" suffix form.
struct UtcTime {
    int64_t seconds_since_epoch = 0;

    bool operator==(const UtcTime&) const = default;
    auto operator<=>(const UtcTime&) const = default;
};

// Parses an RFC 3339 timestamp ("2024-01-02T03:04:05Z", offsets allowed).
// Returns nullopt on malformed input or out-of-range calendar fields.
std::optional<UtcTime> parse_rfc3339(std::string_view text);

std::string format_rfc3339(UtcTime t);

}  // namespace omni
