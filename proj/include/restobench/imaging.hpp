#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "restobench/image.hpp"

// Core pixel operations: bicubic resize, 2-D convolution, Gaussian blur,
// directional motion-kernel synthesis, block-DCT quantization artifacts,
// and the sRGB transfer pair. All operations are pure functions; outputs
// are clamped to [0,1].

namespace restobench {

enum class Boundary { Clamp, Periodic };

namespace detail {

inline int wrap_index(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

// Catmull-Rom cubic (a = -0.5).
inline double cubic_weight(double x) {
    x = std::abs(x);
    if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
    if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
    return 0.0;
}

struct CubicTaps {
    int idx[4];
    double w[4];
};

// Center-aligned source mapping with edge-clamped indices.
inline std::vector<CubicTaps> cubic_taps(int in_size, int out_size) {
    std::vector<CubicTaps> taps(out_size);
    const double scale = static_cast<double>(in_size) / out_size;
    for (int o = 0; o < out_size; ++o) {
        double src = (o + 0.5) * scale - 0.5;
        double base = std::floor(src);
        double f = src - base;
        int b = static_cast<int>(base);
        CubicTaps& t = taps[o];
        t.w[0] = cubic_weight(f + 1.0);
        t.w[1] = cubic_weight(f);
        t.w[2] = cubic_weight(1.0 - f);
        t.w[3] = cubic_weight(2.0 - f);
        for (int j = 0; j < 4; ++j) t.idx[j] = std::clamp(b - 1 + j, 0, in_size - 1);
    }
    return taps;
}

} // namespace detail

// Bicubic resize (Catmull-Rom, a = -0.5), separable horizontal-then-vertical,
// edge-clamped sampling. Identity dimensions return the input bit-exactly.
inline ImageBuffer resize(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        fail(ErrorKind::InvalidArgument,
             "resize: target dimensions must be >= 1, got " + std::to_string(out_w) + "x" +
                 std::to_string(out_h));
    if (out_w == img.width && out_h == img.height) return img;

    const auto htaps = detail::cubic_taps(img.width, out_w);
    const auto vtaps = detail::cubic_taps(img.height, out_h);

    // Horizontal pass, unclamped intermediate.
    std::vector<double> mid(static_cast<size_t>(img.height) * out_w * 3);
    for (int y = 0; y < img.height; ++y) {
        const double* srow = img.row(y);
        double* drow = mid.data() + static_cast<size_t>(y) * out_w * 3;
        for (int x = 0; x < out_w; ++x) {
            const detail::CubicTaps& t = htaps[x];
            for (int c = 0; c < 3; ++c) {
                drow[x * 3 + c] = t.w[0] * srow[t.idx[0] * 3 + c] + t.w[1] * srow[t.idx[1] * 3 + c] +
                                  t.w[2] * srow[t.idx[2] * 3 + c] + t.w[3] * srow[t.idx[3] * 3 + c];
            }
        }
    }

    ImageBuffer out(out_w, out_h);
    const size_t rw = static_cast<size_t>(out_w) * 3;
    for (int y = 0; y < out_h; ++y) {
        const detail::CubicTaps& t = vtaps[y];
        const double* r0 = mid.data() + static_cast<size_t>(t.idx[0]) * rw;
        const double* r1 = mid.data() + static_cast<size_t>(t.idx[1]) * rw;
        const double* r2 = mid.data() + static_cast<size_t>(t.idx[2]) * rw;
        const double* r3 = mid.data() + static_cast<size_t>(t.idx[3]) * rw;
        double* drow = out.row(y);
        for (size_t i = 0; i < rw; ++i)
            drow[i] = clamp01(t.w[0] * r0[i] + t.w[1] * r1[i] + t.w[2] * r2[i] + t.w[3] * r3[i]);
    }
    return out;
}

namespace detail {

struct Tap {
    int dy, dx;
    double w;
};

inline std::vector<Tap> kernel_taps(const Kernel2D& kernel) {
    std::vector<Tap> taps;
    const int r = kernel.size / 2;
    for (int dy = 0; dy < kernel.size; ++dy)
        for (int dx = 0; dx < kernel.size; ++dx) {
            double w = kernel.at(dy, dx);
            if (w != 0.0) taps.push_back({dy - r, dx - r, w});
        }
    return taps;
}

// Correlation of the tap list against the image without output clamping.
// Sparse-aware: zero kernel cells never appear in the tap list, which keeps
// long thin motion kernels fast. The in-range x run is a straight
// vectorizable accumulate; only out-of-range columns pay for boundary
// handling.
inline ImageBuffer convolve_taps(const ImageBuffer& img, const std::vector<Tap>& taps,
                                 Boundary boundary) {
    const int w = img.width, h = img.height;
    ImageBuffer out(w, h);
    std::vector<double> acc(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const Tap& t : taps) {
            int sy = y + t.dy;
            sy = boundary == Boundary::Clamp ? std::clamp(sy, 0, h - 1) : wrap_index(sy, h);
            const double* srow = img.row(sy);
            const double wt = t.w;

            const int x_lo = std::clamp(-t.dx, 0, w);    // first x with x+dx >= 0
            const int x_hi = std::clamp(w - t.dx, 0, w); // first x with x+dx >= w
            for (int x = 0; x < x_lo; ++x) {
                int sx = boundary == Boundary::Clamp ? 0 : wrap_index(x + t.dx, w);
                for (int c = 0; c < 3; ++c) acc[x * 3 + c] += wt * srow[sx * 3 + c];
            }
            if (x_hi > x_lo) {
                const double* sp = srow + (static_cast<size_t>(x_lo) + t.dx) * 3;
                double* ap = acc.data() + static_cast<size_t>(x_lo) * 3;
                const size_t n = static_cast<size_t>(x_hi - x_lo) * 3;
                for (size_t i = 0; i < n; ++i) ap[i] += wt * sp[i];
            }
            for (int x = std::max(x_hi, x_lo); x < w; ++x) {
                int sx = boundary == Boundary::Clamp ? w - 1 : wrap_index(x + t.dx, w);
                for (int c = 0; c < 3; ++c) acc[x * 3 + c] += wt * srow[sx * 3 + c];
            }
        }
        double* orow = out.row(y);
        std::copy(acc.begin(), acc.end(), orow);
    }
    return out;
}

} // namespace detail

// Per-channel correlation with the kernel, output clamped to [0,1].
inline ImageBuffer convolve2d(const ImageBuffer& img, const Kernel2D& kernel, Boundary boundary) {
    kernel.validate();
    ImageBuffer out = detail::convolve_taps(img, detail::kernel_taps(kernel), boundary);
    clamp01_inplace(out);
    return out;
}

namespace detail {

inline std::vector<double> gaussian_weights(double sigma, int radius) {
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        w[i + radius] = v;
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

inline void gaussian_pass_h(const std::vector<double>& src, std::vector<double>& dst, int w, int h,
                            const std::vector<double>& weights, int radius, Boundary boundary) {
    for (int y = 0; y < h; ++y) {
        const double* srow = src.data() + static_cast<size_t>(y) * w * 3;
        double* drow = dst.data() + static_cast<size_t>(y) * w * 3;
        for (int x = 0; x < w; ++x) {
            double a0 = 0.0, a1 = 0.0, a2 = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int sx = boundary == Boundary::Clamp ? std::clamp(x + i, 0, w - 1)
                                                     : wrap_index(x + i, w);
                double wt = weights[i + radius];
                a0 += wt * srow[sx * 3 + 0];
                a1 += wt * srow[sx * 3 + 1];
                a2 += wt * srow[sx * 3 + 2];
            }
            drow[x * 3 + 0] = a0;
            drow[x * 3 + 1] = a1;
            drow[x * 3 + 2] = a2;
        }
    }
}

inline void gaussian_pass_v(const std::vector<double>& src, std::vector<double>& dst, int w, int h,
                            const std::vector<double>& weights, int radius, Boundary boundary) {
    const size_t rw = static_cast<size_t>(w) * 3;
    for (int y = 0; y < h; ++y) {
        double* drow = dst.data() + y * rw;
        std::fill(drow, drow + rw, 0.0);
        for (int i = -radius; i <= radius; ++i) {
            int sy = boundary == Boundary::Clamp ? std::clamp(y + i, 0, h - 1) : wrap_index(y + i, h);
            const double* srow = src.data() + sy * rw;
            const double wt = weights[i + radius];
            for (size_t j = 0; j < rw; ++j) drow[j] += wt * srow[j];
        }
    }
}

} // namespace detail

// Separable Gaussian blur, kernel radius ceil(3*sigma), normalized weights.
// sigma = 0 is the identity.
inline ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma,
                                 Boundary boundary = Boundary::Clamp) {
    if (sigma < 0.0)
        fail(ErrorKind::InvalidArgument, "gaussian_blur: sigma must be >= 0, got " + std::to_string(sigma));
    if (sigma == 0.0) return img;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const auto weights = detail::gaussian_weights(sigma, radius);

    std::vector<double> mid(img.data.size());
    detail::gaussian_pass_h(img.data, mid, img.width, img.height, weights, radius, boundary);
    ImageBuffer out(img.width, img.height);
    detail::gaussian_pass_v(mid, out.data, img.width, img.height, weights, radius, boundary);
    clamp01_inplace(out);
    return out;
}

// Directional motion PSF: the coverage of a length x 1 px rectangle through
// the kernel center, rasterized at 4x4 samples per cell and normalized.
// Kernel side = smallest odd integer >= length. The segment is symmetric
// under 180 degrees, so the angle is folded into [0,180) up front; this makes
// kernel(a) and kernel(a+180) bit-identical.
inline Kernel2D motion_kernel(int length, double angle_deg) {
    if (length < 1)
        fail(ErrorKind::InvalidArgument, "motion_kernel: length must be >= 1, got " + std::to_string(length));

    const int side = (length % 2 == 1) ? length : length + 1;
    double a = std::fmod(angle_deg, 180.0);
    if (a < 0.0) a += 180.0;
    const double theta = a * std::numbers::pi / 180.0;
    const double dir_x = std::cos(theta), dir_y = std::sin(theta);
    const double half_len = length / 2.0;
    const double half_width = 0.5;
    const double center = side / 2.0;

    std::vector<int> cover(static_cast<size_t>(side) * side, 0);
    long total = 0;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            int count = 0;
            for (int j = 0; j < 4; ++j) {
                const double py = r + (j + 0.5) / 4.0 - center;
                for (int i = 0; i < 4; ++i) {
                    const double px = c + (i + 0.5) / 4.0 - center;
                    const double u = px * dir_x + py * dir_y;
                    const double v = -px * dir_y + py * dir_x;
                    if (std::abs(u) <= half_len && std::abs(v) <= half_width) ++count;
                }
            }
            cover[static_cast<size_t>(r) * side + c] = count;
            total += count;
        }
    }

    std::vector<double> weights(cover.size());
    const double inv_total = 1.0 / static_cast<double>(total);
    for (size_t i = 0; i < cover.size(); ++i)
        weights[i] = cover[i] == 0 ? 0.0 : static_cast<double>(cover[i]) * inv_total;
    return Kernel2D(side, std::move(weights));
}

// --- Block-DCT quantization artifacts (JPEG-style, 4:4:4, no bitstream) ---

namespace detail {

// Annex K luminance / chrominance base tables.
inline constexpr std::array<int, 64> kLumaQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,  //
    12, 12, 14, 19, 26,  58,  60,  55,  //
    14, 13, 16, 24, 40,  57,  69,  56,  //
    14, 17, 22, 29, 51,  87,  80,  62,  //
    18, 22, 37, 56, 68,  109, 103, 77,  //
    24, 35, 55, 64, 81,  104, 113, 92,  //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
};

inline constexpr std::array<int, 64> kChromaQuant = {
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
};

inline std::array<double, 64> scaled_quant_table(const std::array<int, 64>& base, int quality) {
    const double scale = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
    std::array<double, 64> q;
    for (int i = 0; i < 64; ++i)
        q[i] = std::max(1.0, static_cast<double>(std::llround(base[i] * scale / 100.0)));
    return q;
}

struct DctBasis {
    double c[8][8]; // c[u][x] = C(u)/2 * cos((2x+1) u pi / 16)
    DctBasis() {
        for (int u = 0; u < 8; ++u) {
            const double cu = (u == 0 ? 1.0 / std::sqrt(2.0) : 1.0) / 2.0;
            for (int x = 0; x < 8; ++x) c[u][x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
        }
    }
};

inline const DctBasis& dct_basis() {
    static const DctBasis basis;
    return basis;
}

// In-place 8x8 forward DCT-II followed by quantize/dequantize and inverse.
inline void dct_round_trip(double block[64], const std::array<double, 64>& q) {
    const DctBasis& basis = dct_basis();
    double tmp[64], coef[64];
    // rows
    for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int x = 0; x < 8; ++x) s += basis.c[u][x] * block[y * 8 + x];
            tmp[y * 8 + u] = s;
        }
    // columns
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) s += basis.c[v][y] * tmp[y * 8 + u];
            coef[v * 8 + u] = s;
        }
    for (int i = 0; i < 64; ++i) coef[i] = static_cast<double>(std::llround(coef[i] / q[i])) * q[i];
    // inverse columns
    for (int u = 0; u < 8; ++u)
        for (int y = 0; y < 8; ++y) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += basis.c[v][y] * coef[v * 8 + u];
            tmp[y * 8 + u] = s;
        }
    // inverse rows
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += basis.c[u][x] * tmp[y * 8 + u];
            block[y * 8 + x] = s;
        }
}

inline void dct_plane(std::vector<double>& plane, int pw, int ph, const std::array<double, 64>& q) {
    double block[64];
    for (int by = 0; by < ph; by += 8)
        for (int bx = 0; bx < pw; bx += 8) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) block[y * 8 + x] = plane[static_cast<size_t>(by + y) * pw + bx + x];
            dct_round_trip(block, q);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) plane[static_cast<size_t>(by + y) * pw + bx + x] = block[y * 8 + x];
        }
}

} // namespace detail

// Deterministic block-compression round trip: BT.601 full-range YCbCr,
// 8x8 type-II DCT on centered 0..255-scale samples, quantization by the
// standard tables scaled with the conventional quality factor, inverse,
// and conversion back. Edges are replicated to block multiples and cropped.
// This simulates JPEG-style artifacts; it does not match any real codec.
inline ImageBuffer dct_artifact(const ImageBuffer& img, int quality) {
    if (quality < 1 || quality > 100)
        fail(ErrorKind::InvalidArgument, "dct_artifact: quality must be in 1..100, got " + std::to_string(quality));

    const int w = img.width, h = img.height;
    const int pw = (w + 7) / 8 * 8, ph = (h + 7) / 8 * 8;
    std::vector<double> yc(static_cast<size_t>(pw) * ph);
    std::vector<double> cb(yc.size()), cr(yc.size());

    for (int y = 0; y < ph; ++y) {
        const double* srow = img.row(std::min(y, h - 1));
        for (int x = 0; x < pw; ++x) {
            const double* p = srow + static_cast<size_t>(std::min(x, w - 1)) * 3;
            const double r = p[0], g = p[1], b = p[2];
            const size_t i = static_cast<size_t>(y) * pw + x;
            yc[i] = (0.299 * r + 0.587 * g + 0.114 * b) * 255.0 - 128.0;
            cb[i] = (-0.168736 * r - 0.331264 * g + 0.5 * b) * 255.0;
            cr[i] = (0.5 * r - 0.418688 * g - 0.081312 * b) * 255.0;
        }
    }

    const auto qy = detail::scaled_quant_table(detail::kLumaQuant, quality);
    const auto qc = detail::scaled_quant_table(detail::kChromaQuant, quality);
    detail::dct_plane(yc, pw, ph, qy);
    detail::dct_plane(cb, pw, ph, qc);
    detail::dct_plane(cr, pw, ph, qc);

    ImageBuffer out(w, h);
    for (int y = 0; y < h; ++y) {
        double* drow = out.row(y);
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * pw + x;
            drow[x * 3 + 0] = clamp01((yc[i] + 1.402 * cr[i] + 128.0) / 255.0);
            drow[x * 3 + 1] = clamp01((yc[i] - 0.344136 * cb[i] - 0.714136 * cr[i] + 128.0) / 255.0);
            drow[x * 3 + 2] = clamp01((yc[i] + 1.772 * cb[i] + 128.0) / 255.0);
        }
    }
    return out;
}

// --- sRGB transfer ---

enum class TransferDirection { ToLinear, ToDisplay };

inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double srgb_to_display(double c) {
    if (c >= 1.0) return 1.0; // avoid cancellation in 1.055*pow(1,..)-0.055
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

inline ImageBuffer srgb_transfer(const ImageBuffer& img, TransferDirection direction) {
    ImageBuffer out(img.width, img.height);
    if (direction == TransferDirection::ToLinear) {
        for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = srgb_to_linear(clamp01(img.data[i]));
    } else {
        for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = clamp01(srgb_to_display(clamp01(img.data[i])));
    }
    return out;
}

} // namespace restobench
