// Command-line front end: train the networks, compress/decompress single
// images with FDNN + JPEG + PPNN, and emit rate-distortion CSV tables.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vcodec/codec.hpp"
#include "vcodec/image.hpp"
#include "vcodec/networks.hpp"
#include "vcodec/trainer.hpp"

namespace fs = std::filesystem;
using namespace vcodec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

struct EvalRecord {
  std::string image_id;
  std::string method;
  int quality;
  double psnr_db;
  double ssim;
  double bpp;
};

void write_records(std::ostream& os, const std::vector<EvalRecord>& records) {
  os << "image_id,method,quality,psnr_db,ssim,bpp\n";
  for (const auto& r : records) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.4f,%.5f,%.6f\n", r.image_id.c_str(),
                  r.method.c_str(), r.quality, r.psnr_db, r.ssim, r.bpp);
    os << buf;
  }
}

Bitstream compress_image(const Image& x, const NetworkParams& fdnn, int quality) {
  if (x.height() % 2 != 0 || x.width() % 2 != 0)
    throw InputError("compress: input dimensions must be even");
  Image y = forward(fdnn, x);
  Bitstream bs = jpeg_encode(quantize8(y), quality);
  bs.orig_h = x.height();
  bs.orig_w = x.width();
  return bs;
}

Image decompress_bitstream(const Bitstream& bs, const NetworkParams& ppnn) {
  Image z = dequantize8(jpeg_decode(bs));
  Image restored = forward(ppnn, z);
  if (restored.height() != bs.orig_h || restored.width() != bs.orig_w)
    throw InputError("decompress: sidecar original_dims do not match the stream");
  for (auto& v : restored.data()) v = std::clamp(v, 0.0, 1.0);
  return restored;
}

std::vector<fs::path> list_rasters(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    if (ext == ".pgm" || ext == ".png" || ext == ".bmp") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no rasters found in " + dir);
  return files;
}

int cmd_train(const std::string& config_path) {
  TrainingConfig cfg = load_training_config(config_path);
  auto progress = [](const std::string& msg) { std::cout << "[train] " << msg << "\n"; };
  if (!cfg.per_quality_model) {
    run_algorithm1(cfg, progress);
    return kExitOk;
  }
  // One independent model per quality factor, each in its own subdirectory.
  for (int q : cfg.quality_factors) {
    TrainingConfig sub = cfg;
    sub.quality_factors = {q};
    sub.checkpoint_dir = (fs::path(cfg.checkpoint_dir) / ("q" + std::to_string(q))).string();
    std::cout << "[train] quality factor " << q << " -> " << sub.checkpoint_dir << "\n";
    run_algorithm1(sub, progress);
  }
  return kExitOk;
}

int cmd_compress(const std::string& input, const std::string& ckpt, int quality,
                 const std::string& output) {
  Image x = load_image(input);
  NetworkParams fdnn = load_checkpoint(ckpt, NetworkId::kFdnn);
  Bitstream bs = compress_image(x, fdnn, quality);
  write_bitstream(bs, output);
  std::printf("%s: %zu bytes, %.6f bpp (coded %dx%d, original %dx%d)\n", output.c_str(),
              bs.bytes.size(), bpp(bs), bs.coded_h, bs.coded_w, bs.orig_h, bs.orig_w);
  return kExitOk;
}

int cmd_decompress(const std::string& input, const std::string& ckpt,
                   const std::string& output) {
  Bitstream bs = read_bitstream(input);
  NetworkParams ppnn = load_checkpoint(ckpt, NetworkId::kPpnn);
  Image restored = decompress_bitstream(bs, ppnn);
  save_image(restored, output);
  std::printf("%s: %dx%d\n", output.c_str(), restored.width(), restored.height());
  return kExitOk;
}

int cmd_rd_curve(const std::string& test_dir, const std::string& ckpt_dir,
                 std::vector<int> qualities, std::vector<int> jpeg_qualities,
                 const std::string& output, bool mean_rows) {
  NetworkParams fdnn =
      load_checkpoint((fs::path(ckpt_dir) / "fdnn_final.ckpt").string(), NetworkId::kFdnn);
  NetworkParams ppnn =
      load_checkpoint((fs::path(ckpt_dir) / "ppnn_final.ckpt").string(), NetworkId::kPpnn);

  std::vector<EvalRecord> records;
  auto add_mean = [&](const std::string& method, int q, double p, double s, double b, int n) {
    if (mean_rows && n > 0) records.push_back({"mean", method, q, p / n, s / n, b / n});
  };

  for (int q : qualities) {
    double sp = 0, ss = 0, sb = 0;
    int n = 0;
    for (const auto& f : list_rasters(test_dir)) {
      Image x = load_image(f.string());
      if (x.height() % 2 != 0 || x.width() % 2 != 0) continue;
      Bitstream bs = compress_image(x, fdnn, q);
      Image restored = decompress_bitstream(bs, ppnn);
      EvalRecord r{f.stem().string(), "ours", q, psnr(restored, x), ssim(restored, x), bpp(bs)};
      sp += r.psnr_db; ss += r.ssim; sb += r.bpp; ++n;
      records.push_back(std::move(r));
    }
    add_mean("ours", q, sp, ss, sb, n);
  }

  // Full-resolution JPEG-only baseline series.
  for (int q : jpeg_qualities) {
    double sp = 0, ss = 0, sb = 0;
    int n = 0;
    for (const auto& f : list_rasters(test_dir)) {
      Image x = load_image(f.string());
      Bitstream bs = jpeg_encode(quantize8(x), q);
      Image decoded = dequantize8(jpeg_decode(bs));
      EvalRecord r{f.stem().string(), "jpeg", q, psnr(decoded, x), ssim(decoded, x), bpp(bs)};
      sp += r.psnr_db; ss += r.ssim; sb += r.bpp; ++n;
      records.push_back(std::move(r));
    }
    add_mean("jpeg", q, sp, ss, sb, n);
  }

  // Stable order: image_id, then method, then quality.
  std::stable_sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tie(a.image_id, a.method, a.quality) < std::tie(b.image_id, b.method, b.quality);
  });

  if (output.empty()) {
    write_records(std::cout, records);
  } else {
    std::ofstream f(output);
    if (!f) throw InputError("cannot open " + output);
    write_records(f, records);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-codec image compression: FDNN + JPEG + PPNN"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train = app.add_subcommand("train", "run the alternating training algorithm");
  train->add_option("--config", config_path, "training config file")->required();

  std::string in_path, out_path, ckpt_path;
  int quality = 10;
  auto* compress = app.add_subcommand("compress", "FDNN + JPEG encode an image");
  compress->add_option("input", in_path, "input raster (pgm/png/bmp, even dims)")->required();
  compress->add_option("--checkpoint", ckpt_path, "FDNN checkpoint")->required();
  compress->add_option("--quality", quality, "JPEG quality factor")->required();
  compress->add_option("--output", out_path, "output .jpg path")->required();

  std::string d_in, d_out, d_ckpt;
  auto* decompress = app.add_subcommand("decompress", "JPEG decode + PPNN restore");
  decompress->add_option("input", d_in, "input .jpg (with sidecar)")->required();
  decompress->add_option("--checkpoint", d_ckpt, "PPNN checkpoint")->required();
  decompress->add_option("--output", d_out, "restored image path (pgm/png)")->required();

  std::string test_dir, ckpt_dir, csv_out;
  std::vector<int> qualities = {5, 10, 20, 40};
  std::vector<int> jpeg_qualities = {2, 3, 4, 5, 10};
  bool mean_rows = false;
  auto* rd = app.add_subcommand("rd-curve", "emit a rate-distortion CSV table");
  rd->add_option("test_dir", test_dir, "directory of test rasters")->required();
  rd->add_option("--checkpoint-dir", ckpt_dir, "directory with *_final.ckpt")->required();
  rd->add_option("--quality", qualities, "quality factors for the trained pipeline");
  rd->add_option("--jpeg-quality", jpeg_qualities, "quality factors for the JPEG baseline");
  rd->add_option("--output", csv_out, "CSV output path (default: stdout)");
  rd->add_flag("--mean", mean_rows, "append per-method mean rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path);
    if (*compress) return cmd_compress(in_path, ckpt_path, quality, out_path);
    if (*decompress) return cmd_decompress(d_in, d_ckpt, d_out);
    if (*rd) return cmd_rd_curve(test_dir, ckpt_dir, qualities, jpeg_qualities, csv_out, mean_rows);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
