#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "restobench/error.hpp"
#include "restobench/image.hpp"
#include "restobench/imaging.hpp"
#include "restobench/sampling.hpp"

// The three degradation families and their 9-frame schedules. Every frame is
// rendered from the clean source directly (not from the previous frame), so
// frames are independent and the final frame is exactly the source.

namespace restobench {

inline constexpr int kFrameCount = 9;
inline constexpr int kDefaultWidth = 1360;
inline constexpr int kDefaultHeight = 768;
inline constexpr int kDefaultFps = 5;

enum class TaskKind { Resolution, Blur, LowLight };

inline const char* task_name(TaskKind task) {
    switch (task) {
        case TaskKind::Resolution: return "resolution";
        case TaskKind::Blur: return "blur";
        case TaskKind::LowLight: return "low_light";
    }
    return "?";
}

inline TaskKind task_from_name(const std::string& name) {
    if (name == "resolution") return TaskKind::Resolution;
    if (name == "blur") return TaskKind::Blur;
    if (name == "low_light") return TaskKind::LowLight;
    fail(ErrorKind::InvalidArgument,
         "unknown task '" + name + "' (expected resolution|blur|low_light)");
}

struct DegradationSpec {
    TaskKind task = TaskKind::Resolution;

    // Resolution: scale fractions s (s[8] forced to exactly 1.0) and the
    // artifact quality ramp q (applied only while s < 0.5).
    double s1 = 0.0;
    std::vector<double> s;
    std::vector<int> q;

    // Blur: kernel angle, continuous max length, rounded per-frame lengths.
    double alpha = 0.0;
    double k_max = 0.0;
    std::vector<int> k;

    // LowLight: noise level, white-balance draw; severities live in s.
    double n = 0.0;
    double wb_u = 0.0;
};

// Deterministic schedule shapes, given the sampled per-clip parameters.
inline DegradationSpec resolution_schedule(double s1) {
    DegradationSpec spec;
    spec.task = TaskKind::Resolution;
    spec.s1 = s1;
    for (int t = 1; t <= kFrameCount; ++t) {
        spec.s.push_back(s1 + (1.0 - s1) * (t - 1) / 8.0);
        spec.q.push_back(static_cast<int>(std::lround(30.0 + 65.0 * (t - 1) / 8.0)));
    }
    spec.s.back() = 1.0; // exact clean endpoint
    return spec;
}

inline DegradationSpec blur_schedule(double alpha, double k_max) {
    DegradationSpec spec;
    spec.task = TaskKind::Blur;
    spec.alpha = alpha;
    spec.k_max = k_max;
    for (int t = 1; t <= kFrameCount; ++t)
        spec.k.push_back(static_cast<int>(std::lround(k_max * (1.0 - (t - 1) / 8.0))));
    return spec;
}

inline DegradationSpec low_light_schedule(double n, double wb_u) {
    DegradationSpec spec;
    spec.task = TaskKind::LowLight;
    spec.n = n;
    spec.wb_u = wb_u;
    for (int t = 1; t <= kFrameCount; ++t) spec.s.push_back(1.0 - (t - 1) / 8.0);
    return spec;
}

// Samples the per-clip parameters and fills the deterministic schedule.
// Draw order is fixed: Resolution takes one uniform (s1), Blur takes two
// (alpha, then k_max), LowLight takes two (n, then wb_u).
inline DegradationSpec make_schedule(TaskKind task, RngState& rng) {
    switch (task) {
        case TaskKind::Resolution:
            return resolution_schedule(0.05 + 0.20 * next_unit(rng));
        case TaskKind::Blur: {
            const double alpha = 360.0 * next_unit(rng);
            return blur_schedule(alpha, 40.0 + 160.0 * next_unit(rng));
        }
        case TaskKind::LowLight: {
            const double n = 0.02 + 0.06 * next_unit(rng);
            return low_light_schedule(n, next_unit(rng));
        }
    }
    fail(ErrorKind::InvalidArgument, "unreachable task kind");
}

namespace detail {

inline ImageBuffer low_light_frame(const ImageBuffer& src, double s, double n, double wb_u,
                                   RngState& rng) {
    const double exposure = std::exp2(-4.0 * s);
    const double roll = 0.5 * s;
    const double r_gain = 1.0 + 0.15 * s * wb_u;
    const double b_gain = 1.0 - 0.15 * s * wb_u;

    ImageBuffer out(src.width, src.height);
    for (size_t i = 0; i < src.data.size(); i += 3) {
        double r = srgb_to_linear(src.data[i + 0]) * exposure;
        double g = srgb_to_linear(src.data[i + 1]) * exposure;
        double b = srgb_to_linear(src.data[i + 2]) * exposure;
        r = r / (1.0 + roll * r);
        g = g / (1.0 + roll * g);
        b = b / (1.0 + roll * b);
        out.data[i + 0] = srgb_to_display(r * r_gain);
        out.data[i + 1] = srgb_to_display(g);
        out.data[i + 2] = srgb_to_display(b * b_gain);
    }

    // Display-referred noise, one variate per value in buffer order. sigma
    // shrinks with s, so noise fades as the scene brightens.
    const double sigma = n * s;
    for (double& v : out.data) v += sigma * next_gaussian(rng);

    // Mild blur scaled with severity; this also applies the final clamp.
    return gaussian_blur(out, s);
}

} // namespace detail

// Renders frame t (1..9) of the schedule from the clean source. Endpoint
// frames short-circuit to the untouched source, which is what makes the
// final frame of every clip bit-identical to its source.
inline ImageBuffer degrade_frame(const ImageBuffer& src, const DegradationSpec& spec, int t,
                                 RngState& rng) {
    if (t < 1 || t > kFrameCount)
        fail(ErrorKind::InvalidArgument, "frame index must be 1..9, got " + std::to_string(t));

    switch (spec.task) {
        case TaskKind::Resolution: {
            const double st = spec.s[t - 1];
            if (st == 1.0) return src;
            const int dw = std::max(1, static_cast<int>(std::lround(src.width * st)));
            const int dh = std::max(1, static_cast<int>(std::lround(src.height * st)));
            ImageBuffer frame = resize(resize(src, dw, dh), src.width, src.height);
            if (st < 0.5) frame = dct_artifact(frame, spec.q[t - 1]);
            return frame;
        }
        case TaskKind::Blur: {
            const int k = spec.k[t - 1];
            if (k <= 1) return src;
            return convolve2d(src, motion_kernel(k, spec.alpha), Boundary::Clamp);
        }
        case TaskKind::LowLight: {
            const double s = spec.s[t - 1];
            if (s == 0.0) return src;
            return detail::low_light_frame(src, s, spec.n, spec.wb_u, rng);
        }
    }
    fail(ErrorKind::InvalidArgument, "unreachable task kind");
}

struct Clip {
    std::vector<ImageBuffer> frames; // t = 1..9, degraded -> clean
    DegradationSpec spec;
    std::string source_id;
    uint64_t clip_seed = 0;
    int fps = kDefaultFps;
    int width = 0;
    int height = 0;
};

// Streams the frames of one clip to `sink` in t order without keeping them
// all in memory. The rng stream is consumed by make_schedule first, then by
// the frames in fixed t order.
inline DegradationSpec render_clip(const ImageBuffer& src, TaskKind task, uint64_t clip_seed,
                                   const std::function<void(int, const ImageBuffer&)>& sink) {
    RngState rng{clip_seed};
    const DegradationSpec spec = make_schedule(task, rng);
    for (int t = 1; t <= kFrameCount; ++t) sink(t, degrade_frame(src, spec, t, rng));
    return spec;
}

inline Clip build_clip(const ImageBuffer& src, TaskKind task, uint64_t clip_seed,
                       const std::string& source_id = "") {
    Clip clip;
    clip.source_id = source_id;
    clip.clip_seed = clip_seed;
    clip.width = src.width;
    clip.height = src.height;
    clip.frames.reserve(kFrameCount);
    clip.spec = render_clip(src, task, clip_seed,
                            [&](int, const ImageBuffer& frame) { clip.frames.push_back(frame); });
    return clip;
}

} // namespace restobench
