#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcodec {

/// Error hierarchy: input problems (bad files, bad arguments) vs internal
/// failures. The CLI maps them to distinct exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Single-channel raster with real intensities, nominal range [0,1].
/// Network outputs may transiently leave the range; clamping happens only
/// at the codec bridge and on export.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0)
      : height_(height), width_(width),
        data_(static_cast<size_t>(height) * width, fill) {
    if (height < 1 || width < 1)
      throw InputError("Image: dimensions must be >= 1");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  size_t size() const { return data_.size(); }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * width_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * width_ + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_dims(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

enum class ResampleMethod { kBicubic, kNearest, kLinear, kArea, kLanczos4 };

const char* to_string(ResampleMethod m);
ResampleMethod resample_method_from_string(const std::string& s);

/// Loads an 8-bit raster (PGM/PNG/BMP by content) and normalizes to [0,1].
/// Color inputs are converted to luma (BT.601) before normalization.
Image load_image(const std::string& path);

/// Writes an image as 8-bit PGM or PNG (by extension), clamping to [0,1].
void save_image(const Image& img, const std::string& path);

/// Resamples with the conventional meaning of the five kernel names.
/// All kernels have unit DC gain: constant images map to the same constant.
Image resample(const Image& img, double factor, ResampleMethod method);

/// Bilinear 2x upsampler s(.) used between the feature description and the
/// full-resolution losses. Equals resample(img, 2, kLinear) but has an exact
/// adjoint so gradients can flow through it during training.
Image upsample2x(const Image& img);
/// Adjoint of upsample2x: maps a gradient at 2H x 2W back to H x W.
Image upsample2x_adjoint(const Image& grad, int in_height, int in_width);

/// PSNR in dB with peak 1.0; identical images return the 100 dB cap.
double psnr(const Image& a, const Image& b);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double c1 = 0.0001;
  double c2 = 0.0009;
};

/// Mean SSIM index over all fully-interior windows (Gaussian-weighted).
double ssim(const Image& a, const Image& b, const SsimConfig& cfg = {});

struct PatchOptions {
  int stride = 0;        // 0 means stride = patch size (centered tiling)
  bool random_crop = false;
  bool rotate90 = false; // add 90/180/270-degree rotations
  bool flip_h = false;   // add horizontally flipped variants
  bool flip_v = false;   // add vertically flipped variants
  uint64_t seed = 0;
};

/// Extracts size x size patches. Without random_crop the tiling is centered;
/// augmentation multiplies each base patch by the requested rotation/flip
/// variants. Deterministic given options and seed.
std::vector<Image> extract_patches(const Image& img, int size,
                                   const PatchOptions& opts = {});

Image rotate90cw(const Image& img, int quarter_turns);
Image flip_horizontal(const Image& img);
Image flip_vertical(const Image& img);

}  // namespace vcodec
