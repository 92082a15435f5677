#include "vcodec/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <json.hpp>

namespace vcodec {

namespace {

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  longjmp(err->jump, 1);
}

// Natural position of each zigzag index (JPEG stores DQT in zigzag order).
constexpr int kZigzagToNatural[64] = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

}  // namespace

Raster8 quantize8(const Image& img) {
  Raster8 r;
  r.height = img.height();
  r.width = img.width();
  r.pixels.resize(img.size());
  for (size_t i = 0; i < img.size(); ++i) {
    double v = std::clamp(img[i], 0.0, 1.0);
    r.pixels[i] = static_cast<uint8_t>(std::lround(v * 255.0));
  }
  return r;
}

Image dequantize8(const Raster8& raster) {
  Image img(raster.height, raster.width);
  for (size_t i = 0; i < img.size(); ++i) img[i] = raster.pixels[i] / 255.0;
  return img;
}

Bitstream jpeg_encode(const Raster8& raster, int quality) {
  if (quality < 1 || quality > 100)
    throw InputError("jpeg_encode: quality must be in [1,100]");
  if (raster.height < 1 || raster.width < 1 || raster.pixels.empty())
    throw InputError("jpeg_encode: empty image");

  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;

  unsigned char* buf = nullptr;
  unsigned long buf_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buf) free(buf);
    throw InternalError(std::string("jpeg_encode: ") + err.message);
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buf, &buf_size);
  cinfo.image_width = raster.width;
  cinfo.image_height = raster.height;
  cinfo.input_components = 1;
  cinfo.in_color_space = JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE /* force baseline */);
  cinfo.optimize_coding = FALSE;  // fixed standard Huffman tables
  jpeg_start_compress(&cinfo, TRUE);
  for (int r = 0; r < raster.height; ++r) {
    JSAMPROW row = const_cast<JSAMPROW>(&raster.pixels[static_cast<size_t>(r) * raster.width]);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  Bitstream bs;
  bs.bytes.assign(buf, buf + buf_size);
  free(buf);
  bs.quality = quality;
  bs.coded_h = raster.height;
  bs.coded_w = raster.width;
  bs.orig_h = raster.height;
  bs.orig_w = raster.width;
  return bs;
}

Raster8 jpeg_decode(const std::vector<uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw InputError(std::string("jpeg_decode: corrupt stream: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);

  Raster8 r;
  r.height = cinfo.output_height;
  r.width = cinfo.output_width;
  r.pixels.resize(static_cast<size_t>(r.height) * r.width);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &r.pixels[static_cast<size_t>(cinfo.output_scanline) * r.width];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return r;
}

Raster8 jpeg_decode(const Bitstream& bs) {
  Raster8 r = jpeg_decode(bs.bytes);
  if (bs.coded_h != 0 && (r.height != bs.coded_h || r.width != bs.coded_w))
    throw InputError("jpeg_decode: stream dimensions do not match metadata");
  return r;
}

double bpp(const Bitstream& bs) {
  if (bs.orig_h < 1 || bs.orig_w < 1)
    throw InputError("bpp: original dimensions not set");
  return 8.0 * static_cast<double>(bs.bytes.size()) /
         (static_cast<double>(bs.orig_h) * bs.orig_w);
}

const std::array<int, 64>& annex_k_luminance_table() {
  static const std::array<int, 64> table = {
      16, 11, 10, 16, 24,  40,  51,  61,
      12, 12, 14, 19, 26,  58,  60,  55,
      14, 13, 16, 24, 40,  57,  69,  56,
      14, 17, 22, 29, 51,  87,  80,  62,
      18, 22, 37, 56, 68,  109, 103, 77,
      24, 35, 55, 64, 81,  104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101,
      72, 92, 95, 98, 112, 100, 103, 99};
  return table;
}

std::array<int, 64> quality_scaled_luminance_table(int quality) {
  if (quality < 1 || quality > 100)
    throw InputError("quality_scaled_luminance_table: quality must be in [1,100]");
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> out;
  const auto& base = annex_k_luminance_table();
  for (int i = 0; i < 64; ++i)
    out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

std::array<int, 64> parse_jpeg_quant_table(const std::vector<uint8_t>& bytes) {
  for (size_t i = 0; i + 3 < bytes.size(); ++i) {
    if (bytes[i] != 0xFF || bytes[i + 1] != 0xDB) continue;
    size_t pos = i + 4;  // skip marker + length
    if (pos >= bytes.size()) break;
    uint8_t pq_tq = bytes[pos++];
    if ((pq_tq >> 4) != 0)
      throw InputError("parse_jpeg_quant_table: 16-bit table not supported");
    if (pos + 64 > bytes.size()) break;
    std::array<int, 64> out;
    for (int z = 0; z < 64; ++z) out[kZigzagToNatural[z]] = bytes[pos + z];
    return out;
  }
  throw InputError("parse_jpeg_quant_table: no DQT segment found");
}

std::string sidecar_path(const std::string& jpg_path) { return jpg_path + ".meta"; }

void write_bitstream(const Bitstream& bs, const std::string& jpg_path) {
  std::ofstream jf(jpg_path, std::ios::binary);
  if (!jf) throw InputError("write_bitstream: cannot open " + jpg_path);
  jf.write(reinterpret_cast<const char*>(bs.bytes.data()), bs.bytes.size());

  nlohmann::json meta = {
      {"version", 1},
      {"quality", bs.quality},
      {"coded_dims", {bs.coded_h, bs.coded_w}},
      {"original_dims", {bs.orig_h, bs.orig_w}},
  };
  std::ofstream mf(sidecar_path(jpg_path));
  if (!mf) throw InputError("write_bitstream: cannot open " + sidecar_path(jpg_path));
  mf << meta.dump(2) << "\n";
}

Bitstream read_bitstream(const std::string& jpg_path) {
  std::ifstream jf(jpg_path, std::ios::binary);
  if (!jf) throw InputError("read_bitstream: cannot open " + jpg_path);
  Bitstream bs;
  bs.bytes.assign((std::istreambuf_iterator<char>(jf)), std::istreambuf_iterator<char>());

  std::ifstream mf(sidecar_path(jpg_path));
  if (!mf) throw InputError("read_bitstream: missing sidecar " + sidecar_path(jpg_path));
  nlohmann::json meta;
  try {
    mf >> meta;
    if (meta.at("version").get<int>() != 1)
      throw InputError("read_bitstream: unsupported sidecar version");
    bs.quality = meta.at("quality").get<int>();
    bs.coded_h = meta.at("coded_dims")[0].get<int>();
    bs.coded_w = meta.at("coded_dims")[1].get<int>();
    bs.orig_h = meta.at("original_dims")[0].get<int>();
    bs.orig_w = meta.at("original_dims")[1].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("read_bitstream: malformed sidecar: ") + e.what());
  }
  return bs;
}

}  // namespace vcodec
