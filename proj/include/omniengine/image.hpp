#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omni {

class ImageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Row-major grayscale pixel matrix, values in [0,255].
struct PixelImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // size = width * height

    uint8_t at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
    uint8_t& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }

    static PixelImage filled(int width, int height, uint8_t value);
};

// Binary PGM (P5, maxval <= 255) is the only built-in codec; everything else
// enters through a pluggable decoder so the core carries no codec deps.
PixelImage decode_pgm(std::string_view bytes);
std::string encode_pgm(const PixelImage& image);

using ImageDecoder = std::function<std::optional<PixelImage>(std::string_view bytes,
                                                             std::string_view content_type)>;
// Decoder trying PGM; returns nullopt for anything it cannot parse.
ImageDecoder default_decoder();

// Box-filter (area average) resize; the kernel both fingerprints depend on.
// Fractional source boxes are handled exactly, in double precision.
PixelImage resize_area_average(const PixelImage& image, int out_width, int out_height);

// Orthonormal 2-D DCT-II of a square image block, row-major coefficients.
std::vector<double> dct2d(const std::vector<double>& values, int n);

// Gradient-sign fingerprint: resize to 9x8, bit(r,c) = 1 iff the pixel right
// of (r,c) is brighter. Bit (r,c) occupies position 63 - (r*8 + c).
uint64_t dhash(const PixelImage& image);

// DCT fingerprint: resize to 32x32, DCT-II, keep the top-left 8x8 block
// minus the DC term; bit = 1 iff the coefficient exceeds the median of the
// 63 AC values (bit 0, the DC slot, is always 0). Same packing as dhash.
uint64_t phash(const PixelImage& image);

int hamming_distance(uint64_t a, uint64_t b);

}  // namespace omni
