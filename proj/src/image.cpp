#include "fer/image.hpp"

#include "fer/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace fer {

double clamp01(double v) {
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

namespace {

unsigned char quantize8(double v) {
    return static_cast<unsigned char>(std::lround(clamp01(v) * 255.0));
}

// --- PNM (P5/P6) ---------------------------------------------------------

// Reads one whitespace/comment-separated unsigned integer from a PNM header.
int read_pnm_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) {
        throw UnsupportedFormat("malformed header in " + path);
    }
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1 << 30) throw UnsupportedFormat("header value out of range in " + path);
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(v);
}

AnyImage load_pnm(std::ifstream& in, const std::string& path, bool color) {
    const int w = read_pnm_int(in, path);
    const int h = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (w <= 0 || h <= 0) throw UnsupportedFormat("bad dimensions in " + path);
    if (maxval <= 0 || maxval > 255) {
        throw UnsupportedFormat("unsupported maxval " + std::to_string(maxval) + " in " + path);
    }
    in.get(); // single whitespace byte after maxval

    const std::size_t n = static_cast<std::size_t>(w) * h;
    const std::size_t raster = color ? n * 3 : n;
    std::vector<unsigned char> buf(raster);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(raster));
    if (static_cast<std::size_t>(in.gcount()) != raster) {
        throw UnsupportedFormat("truncated raster in " + path);
    }

    AnyImage out;
    const double scale = 1.0 / maxval;
    if (color) {
        out.is_gray = false;
        out.rgb = RgbImage(w, h);
        for (std::size_t i = 0; i < n; ++i) {
            out.rgb.r[i] = buf[3 * i + 0] * scale;
            out.rgb.g[i] = buf[3 * i + 1] * scale;
            out.rgb.b[i] = buf[3 * i + 2] * scale;
        }
    } else {
        out.gray = GrayImage(w, h);
        for (std::size_t i = 0; i < n; ++i) out.gray.data[i] = buf[i] * scale;
    }
    return out;
}

// --- PNG ------------------------------------------------------------------

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

AnyImage load_png(const std::string& path) {
    PngReadCloser s;
    s.fp = std::fopen(path.c_str(), "rb");
    if (!s.fp) throw NotFound("cannot open " + path);

    s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!s.png) throw Error("libpng init failed");
    s.info = png_create_info_struct(s.png);
    if (!s.info) throw Error("libpng init failed");
    if (setjmp(png_jmpbuf(s.png))) {
        throw UnsupportedFormat("failed to decode PNG " + path);
    }
    png_init_io(s.png, s.fp);
    png_read_info(s.png, s.info);

    const png_uint_32 w = png_get_image_width(s.png, s.info);
    const png_uint_32 h = png_get_image_height(s.png, s.info);
    const int depth = png_get_bit_depth(s.png, s.info);
    const int ctype = png_get_color_type(s.png, s.info);
    if (depth != 8 || (ctype != PNG_COLOR_TYPE_GRAY && ctype != PNG_COLOR_TYPE_RGB)) {
        throw UnsupportedFormat("PNG must be 8-bit gray or RGB: " + path);
    }

    const int channels = (ctype == PNG_COLOR_TYPE_RGB) ? 3 : 1;
    std::vector<unsigned char> raster(static_cast<std::size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = raster.data() + static_cast<std::size_t>(y) * w * channels;
    }
    png_read_image(s.png, rows.data());
    png_read_end(s.png, nullptr);

    AnyImage out;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (channels == 3) {
        out.is_gray = false;
        out.rgb = RgbImage(static_cast<int>(w), static_cast<int>(h));
        for (std::size_t i = 0; i < n; ++i) {
            out.rgb.r[i] = raster[3 * i + 0] / 255.0;
            out.rgb.g[i] = raster[3 * i + 1] / 255.0;
            out.rgb.b[i] = raster[3 * i + 2] / 255.0;
        }
    } else {
        out.gray = GrayImage(static_cast<int>(w), static_cast<int>(h));
        for (std::size_t i = 0; i < n; ++i) out.gray.data[i] = raster[i] / 255.0;
    }
    return out;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void save_png(const std::string& path, int w, int h, int channels,
              const std::vector<unsigned char>& raster) {
    PngWriteCloser s;
    s.fp = std::fopen(path.c_str(), "wb");
    if (!s.fp) throw WriteError("cannot open " + path + " for writing");
    s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!s.png) throw Error("libpng init failed");
    s.info = png_create_info_struct(s.png);
    if (!s.info) throw Error("libpng init failed");
    if (setjmp(png_jmpbuf(s.png))) {
        throw WriteError("failed to encode PNG " + path);
    }
    png_init_io(s.png, s.fp);
    png_set_IHDR(s.png, s.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(s.png, s.info);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) {
        rows[y] = const_cast<png_bytep>(raster.data() + static_cast<std::size_t>(y) * w * channels);
    }
    png_write_image(s.png, rows.data());
    png_write_end(s.png, nullptr);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(b) == a; });
}

void check_nonempty(int w, int h, const std::vector<double>& d) {
    if (w <= 0 || h <= 0 || d.size() != static_cast<std::size_t>(w) * h) {
        throw ShapeError("image dimensions do not match its buffer");
    }
}

} // namespace

AnyImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2) throw UnsupportedFormat("file too short: " + path);
    if (magic[0] == 'P' && magic[1] == '5') return load_pnm(in, path, false);
    if (magic[0] == 'P' && magic[1] == '6') return load_pnm(in, path, true);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png(path);
    }
    throw UnsupportedFormat("unrecognized image format: " + path);
}

GrayImage load_gray(const std::string& path) {
    AnyImage img = load_image(path);
    if (img.is_gray) return std::move(img.gray);
    return to_gray(img.rgb);
}

RgbImage load_rgb(const std::string& path) {
    AnyImage img = load_image(path);
    if (!img.is_gray) return std::move(img.rgb);
    RgbImage out(img.gray.width, img.gray.height);
    out.r = img.gray.data;
    out.g = img.gray.data;
    out.b = img.gray.data;
    return out;
}

void save_image(const GrayImage& img, const std::string& path) {
    check_nonempty(img.width, img.height, img.data);
    const std::size_t n = img.size();
    if (has_suffix(path, ".png")) {
        std::vector<unsigned char> raster(n);
        for (std::size_t i = 0; i < n; ++i) raster[i] = quantize8(img.data[i]);
        save_png(path, img.width, img.height, 1, raster);
        return;
    }
    if (!has_suffix(path, ".pgm")) {
        throw UnsupportedFormat("gray images save as .pgm or .png: " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WriteError("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raster(n);
    for (std::size_t i = 0; i < n; ++i) raster[i] = quantize8(img.data[i]);
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(n));
    if (!out) throw WriteError("failed writing " + path);
}

void save_image(const RgbImage& img, const std::string& path) {
    check_nonempty(img.width, img.height, img.r);
    const std::size_t n = img.size();
    std::vector<unsigned char> raster(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        raster[3 * i + 0] = quantize8(img.r[i]);
        raster[3 * i + 1] = quantize8(img.g[i]);
        raster[3 * i + 2] = quantize8(img.b[i]);
    }
    if (has_suffix(path, ".png")) {
        save_png(path, img.width, img.height, 3, raster);
        return;
    }
    if (!has_suffix(path, ".ppm")) {
        throw UnsupportedFormat("color images save as .ppm or .png: " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WriteError("cannot open " + path + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw WriteError("failed writing " + path);
}

GrayImage to_gray(const RgbImage& img, double wr, double wg, double wb) {
    const double sum = wr + wg + wb;
    if (!(sum > 0.0)) throw InvalidArgument("gray weights must have positive sum");
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data[i] = (wr * img.r[i] + wg * img.g[i] + wb * img.b[i]) / sum;
    }
    return out;
}

namespace {

// Shared bilinear kernel: sample positions use half-pixel centers, clamped.
void resize_plane(const std::vector<double>& src, int sw, int sh,
                  std::vector<double>& dst, int dw, int dh) {
    const double sx = static_cast<double>(sw) / dw;
    const double sy = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        if (fy < 0) fy = 0;
        if (fy > sh - 1) fy = sh - 1;
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, sh - 1);
        const double ty = fy - y0;
        for (int x = 0; x < dw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            if (fx < 0) fx = 0;
            if (fx > sw - 1) fx = sw - 1;
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, sw - 1);
            const double tx = fx - x0;
            const double v00 = src[static_cast<std::size_t>(y0) * sw + x0];
            const double v01 = src[static_cast<std::size_t>(y0) * sw + x1];
            const double v10 = src[static_cast<std::size_t>(y1) * sw + x0];
            const double v11 = src[static_cast<std::size_t>(y1) * sw + x1];
            const double top = v00 + (v01 - v00) * tx;
            const double bot = v10 + (v11 - v10) * tx;
            dst[static_cast<std::size_t>(y) * dw + x] = top + (bot - top) * ty;
        }
    }
}

} // namespace

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw InvalidArgument("resize target must be positive");
    if (img.empty()) throw ShapeError("cannot resize an empty image");
    GrayImage out(out_w, out_h);
    resize_plane(img.data, img.width, img.height, out.data, out_w, out_h);
    return out;
}

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw InvalidArgument("resize target must be positive");
    if (img.empty()) throw ShapeError("cannot resize an empty image");
    RgbImage out(out_w, out_h);
    resize_plane(img.r, img.width, img.height, out.r, out_w, out_h);
    resize_plane(img.g, img.width, img.height, out.g, out_w, out_h);
    resize_plane(img.b, img.width, img.height, out.b, out_w, out_h);
    return out;
}

} // namespace fer
