#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "restobench/dataset.hpp"
#include "restobench/degradation.hpp"
#include "restobench/error.hpp"
#include "restobench/image.hpp"
#include "restobench/imaging.hpp"
#include "restobench/png_io.hpp"

// Trajectory generators that exercise the evaluation harness without any
// learned model: an analytic interpolation oracle and classical per-task
// restorers (unsharp masking, exposure lift, Richardson-Lucy deconvolution).

namespace restobench {

enum class TrajectoryKind { Interp, Unsharp, ExposureLift, RLDeconv };

inline TrajectoryKind trajectory_kind_from_name(const std::string& name) {
    if (name == "interp") return TrajectoryKind::Interp;
    if (name == "unsharp") return TrajectoryKind::Unsharp;
    if (name == "exposure") return TrajectoryKind::ExposureLift;
    if (name == "rl") return TrajectoryKind::RLDeconv;
    fail(ErrorKind::InvalidArgument,
         "unknown trajectory kind '" + name + "' (expected interp|unsharp|exposure|rl)");
}

// Convex blend from degraded to clean: frames[t] = (1-l)*degraded + l*clean
// with l = (t-1)/(T-1). Endpoints are exact copies; interior blends need no
// clamping by convexity. MSE against clean scales as (1-l)^2, which gives
// the closed-form PSNR staircase used to validate the evaluator.
inline std::vector<ImageBuffer> interp_oracle(const ImageBuffer& degraded, const ImageBuffer& clean,
                                              int T = kFrameCount) {
    require_same_dims(degraded, clean, "interp_oracle");
    std::vector<ImageBuffer> frames;
    frames.reserve(T);
    frames.push_back(degraded);
    for (int t = 2; t < T; ++t) {
        const double l = static_cast<double>(t - 1) / (T - 1);
        ImageBuffer f(degraded.width, degraded.height);
        for (size_t i = 0; i < f.data.size(); ++i)
            f.data[i] = (1.0 - l) * degraded.data[i] + l * clean.data[i];
        frames.push_back(std::move(f));
    }
    frames.push_back(clean);
    return frames;
}

// Unsharp: frames[t] = clamp(d + a_t*(d - blur(d, 2))), a_t = 1.5*(t-1)/8.
// ExposureLift: gain 2^(4*(t-1)/8) applied in linear light, then clamp.
// Frame 1 is the unmodified input for both.
inline std::vector<ImageBuffer> classical_trajectory(const ImageBuffer& degraded,
                                                     TrajectoryKind kind, int T = kFrameCount) {
    std::vector<ImageBuffer> frames;
    frames.reserve(T);
    frames.push_back(degraded);

    if (kind == TrajectoryKind::Unsharp) {
        const ImageBuffer base = gaussian_blur(degraded, 2.0);
        for (int t = 2; t <= T; ++t) {
            const double a = 1.5 * (t - 1) / 8.0;
            ImageBuffer f(degraded.width, degraded.height);
            for (size_t i = 0; i < f.data.size(); ++i)
                f.data[i] = clamp01(degraded.data[i] + a * (degraded.data[i] - base.data[i]));
            frames.push_back(std::move(f));
        }
    } else if (kind == TrajectoryKind::ExposureLift) {
        std::vector<double> linear(degraded.data.size());
        for (size_t i = 0; i < linear.size(); ++i) linear[i] = srgb_to_linear(degraded.data[i]);
        for (int t = 2; t <= T; ++t) {
            const double gain = std::exp2(4.0 * (t - 1) / 8.0);
            ImageBuffer f(degraded.width, degraded.height);
            for (size_t i = 0; i < f.data.size(); ++i)
                f.data[i] = clamp01(srgb_to_display(linear[i] * gain));
            frames.push_back(std::move(f));
        }
    } else {
        fail(ErrorKind::InvalidArgument, "classical_trajectory handles unsharp and exposure only");
    }
    return frames;
}

namespace detail {

inline std::vector<Tap> rotate180_taps(const std::vector<Tap>& taps) {
    std::vector<Tap> out;
    out.reserve(taps.size());
    for (const Tap& t : taps) out.push_back({-t.dy, -t.dx, t.w});
    return out;
}

} // namespace detail

// One Richardson-Lucy chain: x <- x * (K~ (*) (y / max(K (*) x, 1e-8))) under
// periodic boundary, K~ the 180-degree-rotated kernel, starting from x0 = y.
// Returns the raw iterate (unclamped); the guard uses max() rather than an
// additive epsilon so the identity kernel is an exact fixed point.
inline ImageBuffer rl_deconv_iterate(const ImageBuffer& y, const Kernel2D& kernel, int iterations) {
    kernel.validate();
    const auto taps = detail::kernel_taps(kernel);
    const auto taps_rot = detail::rotate180_taps(taps);

    ImageBuffer x = y;
    ImageBuffer ratio(y.width, y.height);
    for (int it = 0; it < iterations; ++it) {
        const ImageBuffer denom = detail::convolve_taps(x, taps, Boundary::Periodic);
        for (size_t i = 0; i < ratio.data.size(); ++i)
            ratio.data[i] = y.data[i] / std::max(denom.data[i], 1e-8);
        const ImageBuffer corr = detail::convolve_taps(ratio, taps_rot, Boundary::Periodic);
        for (size_t i = 0; i < x.data.size(); ++i) x.data[i] *= corr.data[i];
    }
    return x;
}

// frames[t] is the RL iterate after (t-1)*iters_per_step iterations, clamped
// only at materialization.
inline std::vector<ImageBuffer> rl_deconv_trajectory(const ImageBuffer& degraded,
                                                     const Kernel2D& kernel, int T = kFrameCount,
                                                     int iters_per_step = 5) {
    kernel.validate();
    const auto taps = detail::kernel_taps(kernel);
    const auto taps_rot = detail::rotate180_taps(taps);

    std::vector<ImageBuffer> frames;
    frames.reserve(T);
    frames.push_back(degraded);

    ImageBuffer x = degraded;
    ImageBuffer ratio(degraded.width, degraded.height);
    for (int t = 2; t <= T; ++t) {
        for (int it = 0; it < iters_per_step; ++it) {
            const ImageBuffer denom = detail::convolve_taps(x, taps, Boundary::Periodic);
            for (size_t i = 0; i < ratio.data.size(); ++i)
                ratio.data[i] = degraded.data[i] / std::max(denom.data[i], 1e-8);
            const ImageBuffer corr = detail::convolve_taps(ratio, taps_rot, Boundary::Periodic);
            for (size_t i = 0; i < x.data.size(); ++i) x.data[i] *= corr.data[i];
        }
        ImageBuffer materialized = x;
        clamp01_inplace(materialized);
        frames.push_back(std::move(materialized));
    }
    return frames;
}

// Writes a 9-frame trajectory in the same per-clip layout the evaluator
// imports: <root>/<clip_id>/frame_01.png .. frame_09.png.
inline void write_trajectory(const std::string& root, const std::string& clip_id,
                             const std::vector<ImageBuffer>& frames) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(root) / clip_id;
    fs::create_directories(dir);
    for (size_t t = 1; t <= frames.size(); ++t)
        write_png((dir / frame_file_name(static_cast<int>(t))).string(), frames[t - 1]);
}

} // namespace restobench
