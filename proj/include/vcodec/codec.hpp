#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vcodec/image.hpp"

namespace vcodec {

/// 8-bit grayscale raster, the codec-facing representation.
struct Raster8 {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> pixels;
};

/// A compressed stream plus the metadata needed for rate accounting.
/// `original_dims` refer to the full-size ground-truth image; bpp is
/// normalized by that area, not by the coded (half-resolution) area.
struct Bitstream {
  std::vector<uint8_t> bytes;
  int quality = 0;
  int coded_h = 0, coded_w = 0;
  int orig_h = 0, orig_w = 0;
};

/// Clamp to [0,1], scale by 255, round half away from zero.
Raster8 quantize8(const Image& img);
Image dequantize8(const Raster8& raster);

/// ITU-T T.81 baseline sequential grayscale JPEG with the conventional
/// quality-factor table scaling and fixed (non-optimized) Huffman tables.
Bitstream jpeg_encode(const Raster8& raster, int quality);
Raster8 jpeg_decode(const Bitstream& bs);
Raster8 jpeg_decode(const std::vector<uint8_t>& bytes);

double bpp(const Bitstream& bs);

/// Annex K luminance base table (zigzag-independent, row-major 8x8).
const std::array<int, 64>& annex_k_luminance_table();
/// The quality mapping: q<50 -> scale 5000/q, else 200-2q;
/// entry = clamp(round((base*scale + 50)/100), 1, 255).
std::array<int, 64> quality_scaled_luminance_table(int quality);
/// Extracts the 8-bit luminance quantization table from a JPEG stream's DQT
/// segment (natural row-major order).
std::array<int, 64> parse_jpeg_quant_table(const std::vector<uint8_t>& bytes);

/// Sidecar metadata stored next to the .jpg so the decoder side knows the
/// target resolution and the rate accounting denominator.
void write_bitstream(const Bitstream& bs, const std::string& jpg_path);
Bitstream read_bitstream(const std::string& jpg_path);
std::string sidecar_path(const std::string& jpg_path);

}  // namespace vcodec
