#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <png.h>

#include "restobench/error.hpp"
#include "restobench/image.hpp"

// 8-bit RGB PNG round trip. Writes use a pinned compression level and no
// ancillary chunks, so identical pixels produce identical files.

namespace restobench {

inline uint8_t quantize_byte(double v) {
    return static_cast<uint8_t>(std::floor(clamp01(v) * 255.0 + 0.5));
}

namespace detail {

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* f = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        if (f) std::fclose(f);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* f = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, &info);
        if (f) std::fclose(f);
    }
};

} // namespace detail

// Decodes a PNG into a [0,1] RGB buffer (value = byte / 255). Gray, palette,
// 16-bit, and alpha variants are normalized to 8-bit RGB; alpha is dropped.
inline ImageBuffer read_png(const std::string& path) {
    detail::PngReader ctx;
    ctx.f = std::fopen(path.c_str(), "rb");
    if (!ctx.f) fail(ErrorKind::Io, "cannot open for reading: " + path);

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

    png_set_palette_to_rgb(ctx.png);
    png_set_expand_gray_1_2_4_to_8(ctx.png);
    png_set_strip_16(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_set_gray_to_rgb(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    if (png_get_channels(ctx.png, ctx.info) != 3 || png_get_bit_depth(ctx.png, ctx.info) != 8)
        fail(ErrorKind::Format, "unsupported PNG layout after normalization: " + path);

    std::vector<uint8_t> bytes(static_cast<size_t>(w) * h * 3);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<size_t>(y) * w * 3;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    ImageBuffer img(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
    return img;
}

// Encodes a [0,1] RGB buffer as 8-bit RGB (value quantized by
// floor(v*255 + 0.5) after clamping). Output bytes are a pure function of
// the pixel data.
inline void write_png(const std::string& path, const ImageBuffer& img) {
    std::vector<uint8_t> bytes(img.value_count());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize_byte(img.data[i]);

    detail::PngWriter ctx;
    ctx.f = std::fopen(path.c_str(), "wb");
    if (!ctx.f) fail(ErrorKind::Io, "cannot open for writing: " + path);

    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) fail(ErrorKind::Io, "png_create_write_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) fail(ErrorKind::Io, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png))) fail(ErrorKind::Io, "PNG write failed: " + path);

    png_init_io(ctx.png, ctx.f);
    png_set_compression_level(ctx.png, 4);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = bytes.data() + static_cast<size_t>(y) * img.width * 3;
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, ctx.info);

    if (std::fclose(ctx.f) != 0) {
        ctx.f = nullptr;
        fail(ErrorKind::Io, "error closing " + path);
    }
    ctx.f = nullptr;
}

} // namespace restobench
