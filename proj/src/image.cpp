#include "vcodec/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace vcodec {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("load_image: file not found: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

Image from_gray8(const std::vector<uint8_t>& px, int h, int w) {
  Image img(h, w);
  for (size_t i = 0; i < img.size(); ++i) img[i] = px[i] / 255.0;
  return img;
}

// ---- PGM (P2/P5) ----

int next_pnm_token(const std::vector<uint8_t>& b, size_t& pos) {
  while (pos < b.size()) {
    if (std::isspace(b[pos])) { ++pos; continue; }
    if (b[pos] == '#') { while (pos < b.size() && b[pos] != '\n') ++pos; continue; }
    break;
  }
  int v = 0;
  bool any = false;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    ++pos;
    any = true;
  }
  if (!any) throw InputError("load_image: malformed PGM header");
  return v;
}

Image load_pgm(const std::vector<uint8_t>& b, const std::string& path) {
  bool ascii = b[1] == '2';
  size_t pos = 2;
  int w = next_pnm_token(b, pos);
  int h = next_pnm_token(b, pos);
  int maxval = next_pnm_token(b, pos);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
    throw InputError("load_image: unsupported PGM (need 8-bit): " + path);
  std::vector<uint8_t> px(static_cast<size_t>(w) * h);
  if (ascii) {
    for (auto& p : px) p = static_cast<uint8_t>(next_pnm_token(b, pos));
  } else {
    ++pos;  // single whitespace after maxval
    if (b.size() - pos < px.size())
      throw InputError("load_image: truncated PGM: " + path);
    std::memcpy(px.data(), b.data() + pos, px.size());
  }
  return from_gray8(px, h, w);
}

// ---- BMP (uncompressed 8-bit palette / 24-bit / 32-bit) ----

uint32_t rd_u32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (uint32_t(p[3]) << 24);
}
int32_t rd_i32(const uint8_t* p) { return static_cast<int32_t>(rd_u32(p)); }
uint16_t rd_u16(const uint8_t* p) { return p[0] | (p[1] << 8); }

Image load_bmp(const std::vector<uint8_t>& b, const std::string& path) {
  if (b.size() < 54) throw InputError("load_image: truncated BMP: " + path);
  uint32_t data_off = rd_u32(&b[10]);
  uint32_t hdr_size = rd_u32(&b[14]);
  int32_t w = rd_i32(&b[18]);
  int32_t h_raw = rd_i32(&b[22]);
  uint16_t bpp = rd_u16(&b[28]);
  uint32_t comp = rd_u32(&b[30]);
  bool bottom_up = h_raw > 0;
  int h = std::abs(h_raw);
  if (comp != 0 || (bpp != 8 && bpp != 24 && bpp != 32) || w < 1 || h < 1)
    throw InputError("load_image: unsupported BMP variant: " + path);

  const uint8_t* palette = nullptr;
  if (bpp == 8) palette = b.data() + 14 + hdr_size;
  size_t row_bytes = ((static_cast<size_t>(w) * bpp + 31) / 32) * 4;
  if (b.size() < data_off + row_bytes * h)
    throw InputError("load_image: truncated BMP: " + path);

  Image img(h, w);
  for (int r = 0; r < h; ++r) {
    const uint8_t* row = b.data() + data_off + row_bytes * (bottom_up ? h - 1 - r : r);
    for (int c = 0; c < w; ++c) {
      double v;
      if (bpp == 8) {
        const uint8_t* e = palette + 4 * row[c];
        v = 0.299 * e[2] + 0.587 * e[1] + 0.114 * e[0];
      } else {
        const uint8_t* px = row + c * (bpp / 8);
        v = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
      }
      img.at(r, c) = v / 255.0;
    }
  }
  return img;
}

// ---- PNG via libpng ----

struct PngMem {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* m = static_cast<PngMem*>(png_get_io_ptr(png));
  if (m->pos + n > m->size) png_error(png, "read past end");
  std::memcpy(out, m->data + m->pos, n);
  m->pos += n;
}

Image load_png(const std::vector<uint8_t>& b, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw InternalError("load_image: libpng init failed");
  std::vector<std::vector<uint8_t>> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("load_image: undecodable PNG: " + path);
  }
  PngMem mem{b.data(), b.size(), 0};
  png_set_read_fn(png, &mem, png_mem_read);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int w = png_get_image_width(png, info);
  int h = png_get_image_height(png, info);
  int channels = png_get_channels(png, info);
  rows.assign(h, std::vector<uint8_t>(png_get_rowbytes(png, info)));
  std::vector<png_bytep> row_ptrs(h);
  for (int r = 0; r < h; ++r) row_ptrs[r] = rows[r].data();
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v;
      if (channels >= 3) {
        const uint8_t* px = &rows[r][c * channels];
        v = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
      } else {
        v = rows[r][c];
      }
      img.at(r, c) = v / 255.0;
    }
  }
  return img;
}

void save_png(const Image& img, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw InputError("save_image: cannot open " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
    throw InternalError("save_image: PNG write failed: " + path);
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      double v = std::clamp(img.at(r, c), 0.0, 1.0);
      row[c] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

// ---- 1-D resampling kernels ----

struct Tap {
  int index;
  double weight;
};

double cubic_keys(double x) {
  // Keys kernel with a = -0.5
  x = std::fabs(x);
  if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
  if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
  return 0.0;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = kPi * x;
  return std::sin(px) / px;
}

// Tap list for one output sample along a dimension of `in` samples mapped to
// `out` samples. Indices are clamped to the valid range; weights of every
// kernel sum to 1 so constants are preserved exactly.
std::vector<Tap> taps_1d(int in, int out, int o, ResampleMethod m) {
  double inv = static_cast<double>(in) / out;
  std::vector<Tap> taps;
  auto clampi = [in](int i) { return std::clamp(i, 0, in - 1); };
  switch (m) {
    case ResampleMethod::kNearest: {
      int i = clampi(static_cast<int>(std::floor((o + 0.5) * inv)));
      taps.push_back({i, 1.0});
      return taps;
    }
    case ResampleMethod::kLinear: {
      double src = (o + 0.5) * inv - 0.5;
      int i0 = static_cast<int>(std::floor(src));
      double f = src - i0;
      taps.push_back({clampi(i0), 1.0 - f});
      taps.push_back({clampi(i0 + 1), f});
      return taps;
    }
    case ResampleMethod::kBicubic: {
      double src = (o + 0.5) * inv - 0.5;
      int i0 = static_cast<int>(std::floor(src));
      for (int k = -1; k <= 2; ++k)
        taps.push_back({clampi(i0 + k), cubic_keys(src - (i0 + k))});
      return taps;
    }
    case ResampleMethod::kLanczos4: {
      double src = (o + 0.5) * inv - 0.5;
      int i0 = static_cast<int>(std::floor(src));
      double sum = 0.0;
      for (int k = -3; k <= 4; ++k) {
        double x = src - (i0 + k);
        double w = sinc(x) * sinc(x / 4.0);
        taps.push_back({clampi(i0 + k), w});
        sum += w;
      }
      for (auto& t : taps) t.weight /= sum;
      return taps;
    }
    case ResampleMethod::kArea: {
      double lo = o * inv, hi = (o + 1) * inv;
      int i0 = static_cast<int>(std::floor(lo));
      int i1 = static_cast<int>(std::ceil(hi));
      double len = hi - lo;
      for (int i = i0; i < i1; ++i) {
        double overlap = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
        if (overlap > 0) taps.push_back({clampi(i), overlap / len});
      }
      return taps;
    }
  }
  throw InternalError("resample: unknown method");
}

// Resamples every row of `img` to `out_w` columns.
Image resample_rows(const Image& img, int out_w, ResampleMethod m) {
  Image out(img.height(), out_w);
  for (int c = 0; c < out_w; ++c) {
    auto taps = taps_1d(img.width(), out_w, c, m);
    for (int r = 0; r < img.height(); ++r) {
      double acc = 0.0;
      for (const auto& t : taps) acc += t.weight * img.at(r, t.index);
      out.at(r, c) = acc;
    }
  }
  return out;
}

Image resample_cols(const Image& img, int out_h, ResampleMethod m) {
  Image out(out_h, img.width());
  for (int r = 0; r < out_h; ++r) {
    auto taps = taps_1d(img.height(), out_h, r, m);
    for (int c = 0; c < img.width(); ++c) {
      double acc = 0.0;
      for (const auto& t : taps) acc += t.weight * img.at(t.index, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

const char* to_string(ResampleMethod m) {
  switch (m) {
    case ResampleMethod::kBicubic: return "bicubic";
    case ResampleMethod::kNearest: return "nearest";
    case ResampleMethod::kLinear: return "linear";
    case ResampleMethod::kArea: return "area";
    case ResampleMethod::kLanczos4: return "lanczos4";
  }
  return "?";
}

ResampleMethod resample_method_from_string(const std::string& s) {
  if (s == "bicubic") return ResampleMethod::kBicubic;
  if (s == "nearest") return ResampleMethod::kNearest;
  if (s == "linear") return ResampleMethod::kLinear;
  if (s == "area") return ResampleMethod::kArea;
  if (s == "lanczos4") return ResampleMethod::kLanczos4;
  throw InputError("unknown resample method: " + s);
}

Image load_image(const std::string& path) {
  auto bytes = read_file(path);
  if (bytes.size() < 8) throw InputError("load_image: undecodable file: " + path);
  if (bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2'))
    return load_pgm(bytes, path);
  if (bytes[0] == 'B' && bytes[1] == 'M') return load_bmp(bytes, path);
  static const uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (std::memcmp(bytes.data(), png_sig, 8) == 0) return load_png(bytes, path);
  throw InputError("load_image: undecodable format: " + path);
}

void save_image(const Image& img, const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "png") {
    save_png(img, path);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("save_image: cannot open " + path);
  f << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  for (size_t i = 0; i < img.size(); ++i) {
    double v = std::clamp(img[i], 0.0, 1.0);
    f.put(static_cast<char>(std::lround(v * 255.0)));
  }
}

Image resample(const Image& img, double factor, ResampleMethod method) {
  if (factor <= 0.0) throw InputError("resample: factor must be positive");
  int out_h = static_cast<int>(std::lround(img.height() * factor));
  int out_w = static_cast<int>(std::lround(img.width() * factor));
  if (out_h < 1 || out_w < 1)
    throw InputError("resample: output dimensions would be < 1");
  return resample_cols(resample_rows(img, out_w, method), out_h, method);
}

Image upsample2x(const Image& img) {
  return resample(img, 2.0, ResampleMethod::kLinear);
}

Image upsample2x_adjoint(const Image& grad, int in_height, int in_width) {
  if (grad.height() != 2 * in_height || grad.width() != 2 * in_width)
    throw InternalError("upsample2x_adjoint: dimension mismatch");
  // Transpose of the two separable linear passes, applied in reverse order.
  Image cols(in_height, grad.width());
  for (int r = 0; r < grad.height(); ++r) {
    auto taps = taps_1d(in_height, grad.height(), r, ResampleMethod::kLinear);
    for (int c = 0; c < grad.width(); ++c)
      for (const auto& t : taps) cols.at(t.index, c) += t.weight * grad.at(r, c);
  }
  Image out(in_height, in_width);
  for (int c = 0; c < grad.width(); ++c) {
    auto taps = taps_1d(in_width, grad.width(), c, ResampleMethod::kLinear);
    for (int r = 0; r < in_height; ++r)
      for (const auto& t : taps) out.at(r, t.index) += t.weight * cols.at(r, c);
  }
  return out;
}

double psnr(const Image& a, const Image& b) {
  if (!a.same_dims(b)) throw InputError("psnr: dimension mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, const SsimConfig& cfg) {
  if (!a.same_dims(b)) throw InputError("ssim: dimension mismatch");
  const int win = cfg.window;
  if (a.height() < win || a.width() < win)
    throw InputError("ssim: image smaller than window");

  std::vector<double> w(static_cast<size_t>(win) * win);
  double half = (win - 1) / 2.0, sum = 0.0;
  for (int u = 0; u < win; ++u)
    for (int v = 0; v < win; ++v) {
      double d2 = (u - half) * (u - half) + (v - half) * (v - half);
      w[u * win + v] = std::exp(-d2 / (2.0 * cfg.sigma * cfg.sigma));
      sum += w[u * win + v];
    }
  for (auto& x : w) x /= sum;

  double total = 0.0;
  int count = 0;
  for (int r0 = 0; r0 + win <= a.height(); ++r0) {
    for (int c0 = 0; c0 + win <= a.width(); ++c0) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int u = 0; u < win; ++u)
        for (int v = 0; v < win; ++v) {
          double wu = w[u * win + v];
          double x = a.at(r0 + u, c0 + v), y = b.at(r0 + u, c0 + v);
          mx += wu * x;
          my += wu * y;
          xx += wu * x * x;
          yy += wu * y * y;
          xy += wu * x * y;
        }
      double vx = xx - mx * mx, vy = yy - my * my, cxy = xy - mx * my;
      double num = (2 * mx * my + cfg.c1) * (2 * cxy + cfg.c2);
      double den = (mx * mx + my * my + cfg.c1) * (vx + vy + cfg.c2);
      total += num / den;
      ++count;
    }
  }
  return total / count;
}

Image rotate90cw(const Image& img, int quarter_turns) {
  int q = ((quarter_turns % 4) + 4) % 4;
  if (q == 0) return img;
  Image src = rotate90cw(img, q - 1);
  Image out(src.width(), src.height());
  for (int r = 0; r < src.height(); ++r)
    for (int c = 0; c < src.width(); ++c)
      out.at(c, src.height() - 1 - r) = src.at(r, c);
  return out;
}

Image flip_horizontal(const Image& img) {
  Image out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      out.at(r, img.width() - 1 - c) = img.at(r, c);
  return out;
}

Image flip_vertical(const Image& img) {
  Image out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      out.at(img.height() - 1 - r, c) = img.at(r, c);
  return out;
}

std::vector<Image> extract_patches(const Image& img, int size,
                                   const PatchOptions& opts) {
  if (size > img.height() || size > img.width())
    throw InputError("extract_patches: patch size larger than image");
  int stride = opts.stride > 0 ? opts.stride : size;

  auto positions_1d = [&](int dim) {
    int k = std::max(1, (dim - size) / stride + 1);
    int margin = (dim - ((k - 1) * stride + size)) / 2;
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[i] = margin + i * stride;
    return pos;
  };
  auto rows = positions_1d(img.height());
  auto cols = positions_1d(img.width());

  std::mt19937_64 rng(opts.seed);
  if (opts.random_crop) {
    std::uniform_int_distribution<int> dr(0, img.height() - size);
    std::uniform_int_distribution<int> dc(0, img.width() - size);
    for (auto& r : rows) r = dr(rng);
    for (auto& c : cols) c = dc(rng);
  }

  std::vector<Image> out;
  for (int r0 : rows) {
    for (int c0 : cols) {
      Image base(size, size);
      for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) base.at(r, c) = img.at(r0 + r, c0 + c);
      int n_rot = opts.rotate90 ? 4 : 1;
      for (int q = 0; q < n_rot; ++q) {
        Image rot = rotate90cw(base, q);
        out.push_back(rot);
        if (opts.flip_h) out.push_back(flip_horizontal(rot));
        if (opts.flip_v) out.push_back(flip_vertical(rot));
      }
    }
  }
  return out;
}

}  // namespace vcodec
