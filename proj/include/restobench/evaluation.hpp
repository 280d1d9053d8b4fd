#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "restobench/dataset.hpp"
#include "restobench/error.hpp"
#include "restobench/metrics.hpp"

// Frame-wise trajectory evaluation against the clean target and corpus-level
// aggregation: per-frame means, monotone fraction, net delta, best frame.

namespace restobench {

struct MetricConfig {
    bool use_psnr = true;
    bool use_ssim = true;
    bool use_external = false;
};

struct FrameMetrics {
    std::optional<double> psnr_db;
    std::optional<double> ssim;
    std::optional<double> external;

    std::optional<double> get(const std::string& name) const {
        if (name == "psnr_db") return psnr_db;
        if (name == "ssim") return ssim;
        return external;
    }
};

struct FrameCurve {
    std::string clip_id;
    std::array<FrameMetrics, kFrameCount> frames;
};

struct Summary {
    int clip_count = 0;
    std::vector<std::string> metrics; // in report-column order
    std::map<std::string, std::array<double, kFrameCount>> per_frame_mean;
    std::map<std::string, double> monotone_fraction;
    std::map<std::string, double> net_delta;
    std::map<std::string, int> best_frame; // 1-based
    std::array<int, kFrameCount> psnr_inf_counts{};
};

// Lazily decoding view over a directory of per-clip frame folders. Existence
// and dimensions are checked once at import; pixels are read on demand.
struct TrajectoryProvider {
    std::string root;
    std::vector<std::string> clip_ids;

    ImageBuffer frame(const std::string& clip_id, int t) const {
        return read_png((std::filesystem::path(root) / clip_id / frame_file_name(t)).string());
    }

    std::string frame_path(const std::string& clip_id, int t) const {
        return (std::filesystem::path(root) / clip_id / frame_file_name(t)).string();
    }
};

// Reads only the IHDR of a PNG; cheap dimension probe for import validation.
inline std::pair<int, int> read_png_dims(const std::string& path) {
    detail::PngReader ctx;
    ctx.f = std::fopen(path.c_str(), "rb");
    if (!ctx.f) fail(ErrorKind::Io, "cannot open: " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, ctx.f) != 8 || png_sig_cmp(sig, 0, 8))
        fail(ErrorKind::Format, "not a PNG file: " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) fail(ErrorKind::Io, "png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) fail(ErrorKind::Io, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) fail(ErrorKind::Format, "corrupt PNG: " + path);
    png_init_io(ctx.png, ctx.f);
    png_set_sig_bytes(ctx.png, 8);
    png_read_info(ctx.png, ctx.info);
    return {static_cast<int>(png_get_image_width(ctx.png, ctx.info)),
            static_cast<int>(png_get_image_height(ctx.png, ctx.info))};
}

// Validates that `dir` holds a frame folder per manifest clip, with all nine
// frames present at the manifest's dimensions. Missing files are collected
// into a single coverage error listing every absentee.
inline TrajectoryProvider import_trajectories(const std::string& dir,
                                              const DatasetManifest& manifest) {
    namespace fs = std::filesystem;
    TrajectoryProvider provider;
    provider.root = dir;

    std::vector<std::string> missing;
    for (const ManifestEntry& entry : manifest.clips) {
        const std::string clip_id = fs::path(entry.path).filename().string();
        const fs::path clip_dir = fs::path(dir) / clip_id;
        if (!fs::is_directory(clip_dir)) {
            missing.push_back(clip_id);
            continue;
        }
        for (int t = 1; t <= kFrameCount; ++t) {
            const fs::path frame = clip_dir / frame_file_name(t);
            if (!fs::is_regular_file(frame)) {
                missing.push_back(clip_id + "/" + frame_file_name(t));
                continue;
            }
            const auto [w, h] = read_png_dims(frame.string());
            if (w != entry.width || h != entry.height)
                fail(ErrorKind::InvalidArgument,
                     frame.string() + ": " + std::to_string(w) + "x" + std::to_string(h) +
                         " does not match dataset " + std::to_string(entry.width) + "x" +
                         std::to_string(entry.height));
        }
        provider.clip_ids.push_back(clip_id);
    }

    if (!missing.empty()) {
        std::string list;
        for (size_t i = 0; i < missing.size(); ++i) {
            if (i) list += ", ";
            if (i == 20) {
                list += "... (" + std::to_string(missing.size() - i) + " more)";
                break;
            }
            list += missing[i];
        }
        fail(ErrorKind::Coverage, "trajectory dir missing: " + list);
    }
    return provider;
}

// Computes the configured metrics for each frame against the clean target.
// `frame_at` supplies frame t (1..9); `external_at`, when set, supplies the
// external metric value for frame t.
inline FrameCurve evaluate_trajectory(const std::string& clip_id, const ImageBuffer& clean,
                                      const std::function<ImageBuffer(int)>& frame_at,
                                      const MetricConfig& config,
                                      const std::function<double(int)>& external_at = {}) {
    FrameCurve curve;
    curve.clip_id = clip_id;
    for (int t = 1; t <= kFrameCount; ++t) {
        FrameMetrics& m = curve.frames[t - 1];
        try {
            if (config.use_psnr || config.use_ssim) {
                const ImageBuffer frame = frame_at(t);
                if (config.use_psnr) m.psnr_db = psnr(clean, frame);
                if (config.use_ssim) m.ssim = ssim(clean, frame);
            }
            if (config.use_external) {
                if (!external_at)
                    fail(ErrorKind::InvalidArgument, "external metric requested but no source configured");
                m.external = external_at(t);
            }
        } catch (const Error& e) {
            fail(e.kind(), clip_id + " frame " + std::to_string(t) + ": " + e.what());
        }
    }
    return curve;
}

inline FrameCurve evaluate_trajectory(const std::string& clip_id, const ImageBuffer& clean,
                                      const std::vector<ImageBuffer>& frames,
                                      const MetricConfig& config,
                                      const std::function<double(int)>& external_at = {}) {
    if (frames.size() != kFrameCount)
        fail(ErrorKind::InvalidArgument,
             "expected 9 frames, got " + std::to_string(frames.size()));
    return evaluate_trajectory(clip_id, clean, [&](int t) { return frames[t - 1]; }, config,
                               external_at);
}

namespace detail {

inline std::vector<std::string> curve_metric_names(const FrameCurve& c) {
    std::vector<std::string> names;
    if (c.frames[0].psnr_db) names.push_back("psnr_db");
    if (c.frames[0].ssim) names.push_back("ssim");
    if (c.frames[0].external) names.push_back("external");
    return names;
}

} // namespace detail

// Aggregates per-clip curves. Means are arithmetic per frame; +inf PSNR
// entries are excluded from the mean and counted in psnr_inf_counts (a frame
// whose every entry is +inf reports +inf). monotone_fraction is the share of
// adjacent frame pairs that weakly improve in the metric's better direction.
// net_delta is the mean-curve frame-9 minus frame-1 value, sign-adjusted so
// positive means improvement. best_frame is the argbest of the mean curve,
// earliest index on ties.
inline Summary summarize(const std::vector<FrameCurve>& curves) {
    if (curves.empty()) fail(ErrorKind::InvalidArgument, "summarize needs at least one curve");
    const auto metrics = detail::curve_metric_names(curves[0]);
    for (const FrameCurve& c : curves)
        if (detail::curve_metric_names(c) != metrics)
            fail(ErrorKind::InvalidArgument, "curves carry inconsistent metric sets");

    Summary summary;
    summary.clip_count = static_cast<int>(curves.size());
    summary.metrics = metrics;

    auto value_of = [](const FrameCurve& c, int t, const std::string& name) {
        const auto v = c.frames[t].get(name);
        if (!v)
            fail(ErrorKind::InvalidArgument,
                 c.clip_id + ": missing " + name + " at frame " + std::to_string(t + 1));
        return *v;
    };

    for (const std::string& name : metrics) {
        const bool higher = metric_higher_is_better(name);

        std::array<double, kFrameCount> mean{};
        for (int t = 0; t < kFrameCount; ++t) {
            double sum = 0.0;
            int finite = 0, inf = 0;
            for (const FrameCurve& c : curves) {
                const double v = value_of(c, t, name);
                if (std::isinf(v)) {
                    ++inf;
                } else {
                    sum += v;
                    ++finite;
                }
            }
            mean[t] = finite > 0 ? sum / finite : kPsnrInf;
            if (name == "psnr_db") summary.psnr_inf_counts[t] = inf;
        }
        summary.per_frame_mean[name] = mean;

        long improving = 0;
        for (const FrameCurve& c : curves)
            for (int t = 0; t + 1 < kFrameCount; ++t) {
                const double a = value_of(c, t, name);
                const double b = value_of(c, t + 1, name);
                if (higher ? b >= a : b <= a) ++improving;
            }
        summary.monotone_fraction[name] =
            static_cast<double>(improving) / (8.0 * static_cast<double>(curves.size()));

        const double delta = mean[kFrameCount - 1] - mean[0];
        summary.net_delta[name] = higher ? delta : -delta;

        int best = 0;
        for (int t = 1; t < kFrameCount; ++t)
            if (higher ? mean[t] > mean[best] : mean[t] < mean[best]) best = t;
        summary.best_frame[name] = best + 1;
    }
    return summary;
}

// --- report files ---

namespace detail {

inline std::string metric_field(const std::optional<double>& v) {
    if (!v) return "";
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

inline std::optional<double> parse_metric_field(const std::string& s, const std::string& context) {
    if (s.empty()) return std::nullopt;
    if (s == "inf") return kPsnrInf;
    if (s == "-inf") return -kPsnrInf;
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) fail(ErrorKind::Format, context + ": bad metric value '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        fail(ErrorKind::Format, context + ": bad metric value '" + s + "'");
    }
}

} // namespace detail

// CSV with header clip_id,frame,psnr_db,ssim,external; "inf" for the PSNR
// sentinel; absent metrics are empty fields.
inline void write_report_csv(const std::string& path, const std::vector<FrameCurve>& curves) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path);
    out << "clip_id,frame,psnr_db,ssim,external\n";
    for (const FrameCurve& c : curves)
        for (int t = 1; t <= kFrameCount; ++t) {
            const FrameMetrics& m = c.frames[t - 1];
            out << c.clip_id << ',' << t << ',' << detail::metric_field(m.psnr_db) << ','
                << detail::metric_field(m.ssim) << ',' << detail::metric_field(m.external) << '\n';
        }
    if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

inline std::vector<FrameCurve> read_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open: " + path);

    std::vector<FrameCurve> curves;
    std::map<std::string, size_t> index;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = path + " line " + std::to_string(line_no);
        const auto fields = detail::split_csv_line(line);
        if (line_no == 1) {
            if (fields != std::vector<std::string>{"clip_id", "frame", "psnr_db", "ssim", "external"})
                fail(ErrorKind::Format, path + ": expected header clip_id,frame,psnr_db,ssim,external");
            continue;
        }
        if (fields.size() != 5) fail(ErrorKind::Format, context + ": expected 5 fields");
        int frame = 0;
        try {
            frame = std::stoi(fields[1]);
        } catch (const std::logic_error&) {
            fail(ErrorKind::Format, context + ": bad frame index '" + fields[1] + "'");
        }
        if (frame < 1 || frame > kFrameCount)
            fail(ErrorKind::Format, context + ": frame index out of range");

        auto [it, inserted] = index.try_emplace(fields[0], curves.size());
        if (inserted) {
            curves.emplace_back();
            curves.back().clip_id = fields[0];
        }
        FrameMetrics& m = curves[it->second].frames[frame - 1];
        m.psnr_db = detail::parse_metric_field(fields[2], context);
        m.ssim = detail::parse_metric_field(fields[3], context);
        m.external = detail::parse_metric_field(fields[4], context);
    }
    if (curves.empty()) fail(ErrorKind::EmptyInput, path + " has no data rows");
    return curves;
}

inline nlohmann::ordered_json summary_to_json(const Summary& summary) {
    auto num_or_null = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    nlohmann::ordered_json j;
    j["per_frame_mean"] = nlohmann::ordered_json::object();
    for (const auto& name : summary.metrics) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (double v : summary.per_frame_mean.at(name)) arr.push_back(num_or_null(v));
        j["per_frame_mean"][name] = arr;
    }
    j["monotone_fraction"] = nlohmann::ordered_json::object();
    for (const auto& name : summary.metrics)
        j["monotone_fraction"][name] = summary.monotone_fraction.at(name);
    j["net_delta"] = nlohmann::ordered_json::object();
    for (const auto& name : summary.metrics)
        j["net_delta"][name] = num_or_null(summary.net_delta.at(name));
    j["best_frame"] = nlohmann::ordered_json::object();
    for (const auto& name : summary.metrics) j["best_frame"][name] = summary.best_frame.at(name);
    j["clip_count"] = summary.clip_count;
    j["psnr_inf_counts"] = summary.psnr_inf_counts;
    return j;
}

inline void write_summary_json(const std::string& path, const Summary& summary) {
    detail::write_text_file(path, summary_to_json(summary).dump(2) + "\n");
}

} // namespace restobench
