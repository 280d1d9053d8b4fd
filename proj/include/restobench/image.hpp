#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "restobench/error.hpp"

namespace restobench {

// H x W x 3 image, row-major, channel order R,G,B. Values are display
// (sRGB-encoded) reals, nominal range [0,1]. Public pixel operations clamp
// their outputs to [0,1]; intermediates inside a pipeline may exceed range.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size = width * height * 3

    ImageBuffer() = default;

    ImageBuffer(int w, int h, double fill = 0.0)
        : width(w), height(h) {
        if (w < 1 || h < 1)
            fail(ErrorKind::InvalidArgument,
                 "image dimensions must be >= 1, got " + std::to_string(w) + "x" + std::to_string(h));
        data.assign(static_cast<size_t>(w) * h * 3, fill);
    }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t value_count() const { return pixel_count() * 3; }

    double* row(int y) { return data.data() + static_cast<size_t>(y) * width * 3; }
    const double* row(int y) const { return data.data() + static_cast<size_t>(y) * width * 3; }

    double& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

    bool same_dims(const ImageBuffer& other) const {
        return width == other.width && height == other.height;
    }

    bool bit_equal(const ImageBuffer& other) const {
        return same_dims(other) && data == other.data;
    }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline void clamp01_inplace(ImageBuffer& img) {
    for (double& v : img.data) v = clamp01(v);
}

inline void require_same_dims(const ImageBuffer& a, const ImageBuffer& b, const char* where) {
    if (!a.same_dims(b))
        fail(ErrorKind::InvalidArgument,
             std::string(where) + ": dimension mismatch, " + std::to_string(a.width) + "x" +
                 std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                 std::to_string(b.height));
}

// Square convolution kernel with odd side length. Weights are nonnegative
// and sum to 1 (within 1e-6); this is what every blur PSF in the toolchain
// looks like.
struct Kernel2D {
    int size = 1;                 // odd
    std::vector<double> weights;  // size * size, row-major

    Kernel2D() : weights(1, 1.0) {}

    Kernel2D(int k, std::vector<double> w) : size(k), weights(std::move(w)) {}

    double at(int dy, int dx) const { // dy, dx in [0, size)
        return weights[static_cast<size_t>(dy) * size + dx];
    }

    void validate() const {
        if (size < 1 || size % 2 == 0)
            fail(ErrorKind::InvalidArgument, "kernel side must be odd and >= 1, got " + std::to_string(size));
        if (weights.size() != static_cast<size_t>(size) * size)
            fail(ErrorKind::InvalidArgument, "kernel weight count does not match side length");
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0)
                fail(ErrorKind::InvalidArgument, "kernel weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            fail(ErrorKind::InvalidArgument, "kernel weights must sum to 1, got " + std::to_string(sum));
    }
};

} // namespace restobench
