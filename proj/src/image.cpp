#include "omniengine/image.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>

namespace omni {

PixelImage PixelImage::filled(int width, int height, uint8_t value) {
    PixelImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<size_t>(width) * height, value);
    return img;
}

namespace {

void validate(const PixelImage& image) {
    if (image.width < 1 || image.height < 1) throw ImageError("image dimensions must be >= 1");
    if (image.pixels.size() != static_cast<size_t>(image.width) * image.height)
        throw ImageError("pixel count does not match dimensions");
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(std::string_view bytes, size_t& pos) {
    while (pos < bytes.size()) {
        char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
}

}  // namespace

PixelImage decode_pgm(std::string_view bytes) {
    size_t pos = 0;
    if (next_token(bytes, pos) != "P5") throw ImageError("not a binary PGM (P5) file");
    auto parse_int = [&](const char* what) {
        std::string token = next_token(bytes, pos);
        if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) {
                return std::isdigit(c);
            }))
            throw ImageError(std::string("bad PGM ") + what);
        return std::stoi(token);
    };
    int width = parse_int("width");
    int height = parse_int("height");
    int maxval = parse_int("maxval");
    if (width < 1 || height < 1) throw ImageError("bad PGM dimensions");
    if (maxval < 1 || maxval > 255) throw ImageError("only 8-bit PGM supported");
    if (pos >= bytes.size()) throw ImageError("truncated PGM header");
    ++pos;  // single whitespace after maxval
    size_t need = static_cast<size_t>(width) * height;
    if (bytes.size() - pos < need) throw ImageError("truncated PGM payload");

    PixelImage image;
    image.width = width;
    image.height = height;
    image.pixels.resize(need);
    for (size_t i = 0; i < need; ++i) {
        unsigned v = static_cast<unsigned char>(bytes[pos + i]);
        image.pixels[i] = static_cast<uint8_t>(maxval == 255 ? v : v * 255u / maxval);
    }
    return image;
}

std::string encode_pgm(const PixelImage& image) {
    validate(image);
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

ImageDecoder default_decoder() {
    return [](std::string_view bytes, std::string_view) -> std::optional<PixelImage> {
        try {
            return decode_pgm(bytes);
        } catch (const ImageError&) {
            return std::nullopt;
        }
    };
}

PixelImage resize_area_average(const PixelImage& image, int out_width, int out_height) {
    validate(image);
    if (out_width < 1 || out_height < 1) throw ImageError("target dimensions must be >= 1");

    PixelImage out;
    out.width = out_width;
    out.height = out_height;
    out.pixels.resize(static_cast<size_t>(out_width) * out_height);

    const double sx = static_cast<double>(image.width) / out_width;
    const double sy = static_cast<double>(image.height) / out_height;
    for (int r = 0; r < out_height; ++r) {
        const double y0 = r * sy, y1 = (r + 1) * sy;
        for (int c = 0; c < out_width; ++c) {
            const double x0 = c * sx, x1 = (c + 1) * sx;
            double sum = 0.0;
            for (int y = static_cast<int>(std::floor(y0)); y < std::ceil(y1); ++y) {
                const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0) continue;
                for (int x = static_cast<int>(std::floor(x0)); x < std::ceil(x1); ++x) {
                    const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx <= 0) continue;
                    sum += wx * wy * image.at(std::min(y, image.height - 1), std::min(x, image.width - 1));
                }
            }
            double mean = sum / (sx * sy);
            out.at(r, c) = static_cast<uint8_t>(std::clamp(std::lround(mean), 0L, 255L));
        }
    }
    return out;
}

std::vector<double> dct2d(const std::vector<double>& values, int n) {
    if (static_cast<int>(values.size()) != n * n) throw ImageError("dct input must be n*n");
    std::vector<double> out(static_cast<size_t>(n) * n, 0.0);
    const double pi = std::numbers::pi;
    // Separable: rows then columns, O(n^3); n is 32 here so this is exact
    // and fast enough.
    std::vector<double> rows(static_cast<size_t>(n) * n, 0.0);
    for (int y = 0; y < n; ++y) {
        for (int u = 0; u < n; ++u) {
            double sum = 0.0;
            for (int x = 0; x < n; ++x) {
                sum += values[static_cast<size_t>(y) * n + x] * std::cos((2 * x + 1) * u * pi / (2.0 * n));
            }
            rows[static_cast<size_t>(y) * n + u] = sum;
        }
    }
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            double sum = 0.0;
            for (int y = 0; y < n; ++y) {
                sum += rows[static_cast<size_t>(y) * n + u] * std::cos((2 * y + 1) * v * pi / (2.0 * n));
            }
            const double au = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            out[static_cast<size_t>(v) * n + u] = au * av * sum;
        }
    }
    return out;
}

uint64_t dhash(const PixelImage& image) {
    PixelImage small = resize_area_average(image, 9, 8);
    uint64_t bits = 0;
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            if (small.at(r, c + 1) > small.at(r, c)) {
                bits |= 1ULL << (63 - (r * 8 + c));
            }
        }
    }
    return bits;
}

uint64_t phash(const PixelImage& image) {
    PixelImage small = resize_area_average(image, 32, 32);
    std::vector<double> values(small.pixels.begin(), small.pixels.end());
    std::vector<double> coeffs = dct2d(values, 32);

    // Top-left 8x8 block in row-major order; slot 0 is the DC term. Values
    // below the double-rounding noise floor are snapped to zero so constant
    // regions compare as exact ties, not as sign dust.
    std::array<double, 64> block{};
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            double v = coeffs[static_cast<size_t>(r) * 32 + c];
            block[static_cast<size_t>(r) * 8 + c] = std::abs(v) < 1e-8 ? 0.0 : v;
        }
    }
    std::array<double, 63> ac{};
    std::copy(block.begin() + 1, block.end(), ac.begin());
    std::array<double, 63> sorted = ac;
    std::nth_element(sorted.begin(), sorted.begin() + 31, sorted.end());
    const double median = sorted[31];

    uint64_t bits = 0;
    for (int i = 1; i < 64; ++i) {
        if (block[static_cast<size_t>(i)] > median) bits |= 1ULL << (63 - i);
    }
    return bits;
}

int hamming_distance(uint64_t a, uint64_t b) { return std::popcount(a ^ b); }

}  // namespace omni
