#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "restobench/error.hpp"
#include "restobench/image.hpp"
#include "restobench/imaging.hpp"

// Full-reference quality metrics (PSNR on RGB, SSIM on luma) and the
// external perceptual-metric boundary (exec protocol or CSV lookup) that
// stands in for learned metrics computed elsewhere.

namespace restobench {

inline constexpr double kPsnrInf = std::numeric_limits<double>::infinity();

inline bool metric_higher_is_better(const std::string& name) {
    return name != "external"; // psnr_db and ssim rise with quality
}

// Mean squared error over all pixels and channels, [0,1] scale.
inline double mse(const ImageBuffer& ref, const ImageBuffer& test) {
    require_same_dims(ref, test, "mse");
    double sum = 0.0;
    for (size_t i = 0; i < ref.data.size(); ++i) {
        const double d = ref.data[i] - test.data[i];
        sum += d * d;
    }
    return sum / static_cast<double>(ref.data.size());
}

// 10*log10(1/MSE); identical images give the +inf sentinel.
inline double psnr(const ImageBuffer& ref, const ImageBuffer& test) {
    const double m = mse(ref, test);
    if (m == 0.0) return kPsnrInf;
    return 10.0 * std::log10(1.0 / m);
}

namespace detail {

inline std::vector<double> luma_plane(const ImageBuffer& img) {
    std::vector<double> y(img.pixel_count());
    for (size_t i = 0; i < y.size(); ++i) {
        const double* p = img.data.data() + i * 3;
        y[i] = 0.2126 * p[0] + 0.7152 * p[1] + 0.0722 * p[2];
    }
    return y;
}

// Valid-region (no padding) separable filtering of a plane: horizontal then
// vertical, output (w-2r) x (h-2r).
inline std::vector<double> window_filter_valid(const std::vector<double>& plane, int w, int h,
                                               const std::vector<double>& weights) {
    const int r = static_cast<int>(weights.size()) / 2;
    const int vw = w - 2 * r, vh = h - 2 * r;
    std::vector<double> mid(static_cast<size_t>(h) * vw);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < vw; ++x) {
            double s = 0.0;
            const double* src = plane.data() + static_cast<size_t>(y) * w + x;
            for (size_t i = 0; i < weights.size(); ++i) s += weights[i] * src[i];
            mid[static_cast<size_t>(y) * vw + x] = s;
        }
    std::vector<double> out(static_cast<size_t>(vh) * vw);
    for (int y = 0; y < vh; ++y)
        for (int x = 0; x < vw; ++x) {
            double s = 0.0;
            for (size_t i = 0; i < weights.size(); ++i)
                s += weights[i] * mid[(static_cast<size_t>(y) + i) * vw + x];
            out[static_cast<size_t>(y) * vw + x] = s;
        }
    return out;
}

} // namespace detail

// SSIM on Rec.709 luma of the display-encoded values: 11x11 Gaussian window
// (sigma 1.5), valid-region sliding, C1 = 1e-4, C2 = 9e-4 (K1=0.01, K2=0.03,
// L=1), mean over window positions.
inline double ssim(const ImageBuffer& ref, const ImageBuffer& test) {
    require_same_dims(ref, test, "ssim");
    if (ref.width < 11 || ref.height < 11)
        fail(ErrorKind::InvalidArgument, "ssim needs at least 11x11 images, got " +
                                             std::to_string(ref.width) + "x" + std::to_string(ref.height));

    constexpr double C1 = 1e-4, C2 = 9e-4;
    const auto window = detail::gaussian_weights(1.5, 5); // 11 taps

    const int w = ref.width, h = ref.height;
    const auto x = detail::luma_plane(ref);
    const auto y = detail::luma_plane(test);
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }

    const auto mu_x = detail::window_filter_valid(x, w, h, window);
    const auto mu_y = detail::window_filter_valid(y, w, h, window);
    const auto m_xx = detail::window_filter_valid(xx, w, h, window);
    const auto m_yy = detail::window_filter_valid(yy, w, h, window);
    const auto m_xy = detail::window_filter_valid(xy, w, h, window);

    double total = 0.0;
    for (size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i], my = mu_y[i];
        const double var_x = m_xx[i] - mx * mx;
        const double var_y = m_yy[i] - my * my;
        const double cov = m_xy[i] - mx * my;
        total += ((2.0 * mx * my + C1) * (2.0 * cov + C2)) /
                 ((mx * mx + my * my + C1) * (var_x + var_y + C2));
    }
    return total / static_cast<double>(mu_x.size());
}

// --- external metric boundary ---

struct ExternalMetricSource {
    bool csv_mode = false;
    std::string command;                              // exec mode
    std::map<std::pair<std::string, int>, double> table; // csv mode
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

inline double parse_single_decimal(const std::string& text, const std::string& context) {
    size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        fail(ErrorKind::ExternalMetric, context + ": empty output, expected one decimal");
    size_t end = text.find_last_not_of(" \t\r\n") + 1;
    const std::string token = text.substr(begin, end - begin);
    try {
        size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size())
            fail(ErrorKind::ExternalMetric, context + ": expected one decimal, got '" + token + "'");
        return v;
    } catch (const std::logic_error&) {
        fail(ErrorKind::ExternalMetric, context + ": expected one decimal, got '" + token + "'");
    }
}

} // namespace detail

// Loads a CSV with the exact header clip_id,frame,value into a lookup table.
inline ExternalMetricSource load_external_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open: " + path);

    ExternalMetricSource src;
    src.csv_mode = true;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (line_no == 1) {
            if (fields != std::vector<std::string>{"clip_id", "frame", "value"})
                fail(ErrorKind::Format, path + ": expected header clip_id,frame,value");
            continue;
        }
        if (fields.size() != 3)
            fail(ErrorKind::Format, path + " line " + std::to_string(line_no) + ": expected 3 fields");
        try {
            const int frame = std::stoi(fields[1]);
            const double value = std::stod(fields[2]);
            src.table[{fields[0], frame}] = value;
        } catch (const std::logic_error&) {
            fail(ErrorKind::Format, path + " line " + std::to_string(line_no) + ": bad number");
        }
    }
    return src;
}

inline double lookup_external(const ExternalMetricSource& src, const std::string& clip_id, int frame) {
    const auto it = src.table.find({clip_id, frame});
    if (it == src.table.end())
        fail(ErrorKind::Coverage,
             "no external value for " + clip_id + " frame " + std::to_string(frame));
    return it->second;
}

// Exec protocol: run `<command> <ref_path> <test_path>`, require exit 0 and a
// single decimal on stdout. stderr is captured and attached to errors.
inline double run_external_command(const std::string& command, const std::string& ref_path,
                                   const std::string& test_path) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    const fs::path err_path =
        fs::temp_directory_path() /
        ("restobench_ext_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)) + ".err");

    const std::string line = command + " " + detail::shell_quote(ref_path) + " " +
                             detail::shell_quote(test_path) + " 2>" +
                             detail::shell_quote(err_path.string());

    std::string output;
    std::FILE* pipe = ::popen(line.c_str(), "r");
    if (!pipe) fail(ErrorKind::ExternalMetric, "cannot launch external metric: " + command);
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    const int status = ::pclose(pipe);

    std::string err_text;
    {
        std::ifstream err_in(err_path, std::ios::binary);
        if (err_in) {
            std::stringstream ss;
            ss << err_in.rdbuf();
            err_text = ss.str();
        }
        std::error_code ec;
        fs::remove(err_path, ec);
    }

    if (status == -1) fail(ErrorKind::ExternalMetric, "external metric process lost: " + command);
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
        fail(ErrorKind::ExternalMetric, "external metric exited " +
                                            std::to_string(WEXITSTATUS(status)) + ": " + err_text);
    if (!WIFEXITED(status))
        fail(ErrorKind::ExternalMetric, "external metric terminated abnormally: " + err_text);

    return detail::parse_single_decimal(output, "external metric '" + command + "'");
}

} // namespace restobench
