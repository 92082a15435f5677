#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "vcodec/image.hpp"

using namespace vcodec;

namespace {

Image random_image(int h, int w, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Image img(h, w);
  for (auto& v : img.data()) v = d(rng);
  return img;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/vcodec_test_") + name;
}

// Independent SSIM oracle: explicitly centered window statistics (the
// implementation uses raw moments), Gaussian 11x11 sigma 1.5, valid windows.
double ssim_oracle(const Image& a, const Image& b) {
  const int win = 11;
  const double sigma = 1.5, c1 = 0.0001, c2 = 0.0009;
  double w[11][11], wsum = 0;
  for (int u = 0; u < win; ++u)
    for (int v = 0; v < win; ++v) {
      double du = u - 5.0, dv = v - 5.0;
      w[u][v] = std::exp(-(du * du + dv * dv) / (2 * sigma * sigma));
      wsum += w[u][v];
    }
  double total = 0;
  int count = 0;
  for (int r = 0; r + win <= a.height(); ++r)
    for (int c = 0; c + win <= a.width(); ++c) {
      double mx = 0, my = 0;
      for (int u = 0; u < win; ++u)
        for (int v = 0; v < win; ++v) {
          mx += w[u][v] / wsum * a.at(r + u, c + v);
          my += w[u][v] / wsum * b.at(r + u, c + v);
        }
      double vx = 0, vy = 0, cov = 0;
      for (int u = 0; u < win; ++u)
        for (int v = 0; v < win; ++v) {
          double dx = a.at(r + u, c + v) - mx, dy = b.at(r + u, c + v) - my;
          vx += w[u][v] / wsum * dx * dx;
          vy += w[u][v] / wsum * dy * dy;
          cov += w[u][v] / wsum * dx * dy;
        }
      total += ((2 * mx * my + c1) * (2 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return total / count;
}

}  // namespace

TEST_CASE("load_image normalizes 8-bit PGM values") {
  std::string path = temp_path("gray.pgm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n3 1\n255\n";
    f.put(char(0));
    f.put(char(128));
    f.put(char(255));
  }
  Image img = load_image(path);
  CHECK(img.height() == 1);
  CHECK(img.width() == 3);
  CHECK(img.at(0, 0) == doctest::Approx(0.0));
  CHECK(img.at(0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(img.at(0, 2) == doctest::Approx(1.0));
  std::remove(path.c_str());
}

TEST_CASE("load_image error paths") {
  CHECK_THROWS_AS(load_image("/nonexistent/file.pgm"), InputError);
  std::string path = temp_path("garbage.bin");
  {
    std::ofstream f(path, std::ios::binary);
    f << "this is not an image at all";
  }
  CHECK_THROWS_AS(load_image(path), InputError);
  std::remove(path.c_str());
}

TEST_CASE("save/load round trip through PGM and PNG") {
  Image img = random_image(24, 18, 7);
  for (const char* name : {"rt.pgm", "rt.png"}) {
    std::string path = temp_path(name);
    save_image(img, path);
    Image back = load_image(path);
    REQUIRE(back.same_dims(img));
    for (size_t i = 0; i < img.size(); ++i)
      CHECK(std::fabs(back[i] - img[i]) <= 0.5 / 255.0 + 1e-12);
    std::remove(path.c_str());
  }
}

TEST_CASE("resample preserves constants under every method") {
  Image img(16, 16, 0.5);
  for (auto m : {ResampleMethod::kBicubic, ResampleMethod::kNearest,
                 ResampleMethod::kLinear, ResampleMethod::kArea,
                 ResampleMethod::kLanczos4}) {
    for (double factor : {0.5, 2.0, 0.75}) {
      Image out = resample(img, factor, m);
      for (auto v : out.data()) CHECK(std::fabs(v - 0.5) < 1e-12);
    }
  }
}

TEST_CASE("resample dimension arithmetic") {
  Image img(160, 160);
  Image half = resample(img, 0.5, ResampleMethod::kBicubic);
  CHECK(half.height() == 80);
  CHECK(half.width() == 80);
  CHECK_THROWS_AS(resample(img, -1.0, ResampleMethod::kLinear), InputError);
  CHECK_THROWS_AS(resample(Image(2, 2), 0.1, ResampleMethod::kLinear), InputError);
}

TEST_CASE("nearest upsampling duplicates pixels") {
  Image img(2, 2);
  img.at(0, 1) = 1.0;
  img.at(1, 1) = 1.0;
  Image out = resample(img, 2.0, ResampleMethod::kNearest);
  REQUIRE(out.height() == 4);
  REQUIRE(out.width() == 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(out.at(r, c) == doctest::Approx(c >= 2 ? 1.0 : 0.0));
}

TEST_CASE("psnr closed forms and cap") {
  Image a(8, 8, 0.0), b(8, 8, 0.5);
  CHECK(psnr(a, a) == doctest::Approx(100.0));
  CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(psnr(a, Image(4, 4)), InputError);
}

TEST_CASE("psnr matches a per-pixel MSE oracle and is symmetric") {
  Image a = random_image(13, 9, 1), b = random_image(13, 9, 2);
  double mse = 0;
  for (int r = 0; r < a.height(); ++r)
    for (int c = 0; c < a.width(); ++c) {
      double d = a.at(r, c) - b.at(r, c);
      mse += d * d;
    }
  mse /= a.size();
  CHECK(std::fabs(psnr(a, b) - 10.0 * std::log10(1.0 / mse)) < 1e-9);
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
}

TEST_CASE("psnr decreases strictly with noise variance") {
  Image base = random_image(32, 32, 3);
  std::mt19937_64 rng(4);
  double prev = 101.0;
  for (double sd : {0.01, 0.03, 0.09}) {
    std::normal_distribution<double> noise(0.0, sd);
    Image noisy = base;
    for (auto& v : noisy.data()) v += noise(rng);
    double p = psnr(base, noisy);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim identity, bounds, symmetry") {
  Image a = random_image(16, 16, 5), b = random_image(16, 16, 6);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  double s = ssim(a, b);
  CHECK(s >= -1.0);
  CHECK(s <= 1.0);
  CHECK(s == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK_THROWS_AS(ssim(a, Image(8, 8)), InputError);
  CHECK_THROWS_AS(ssim(Image(4, 4), Image(4, 4)), InputError);  // below window
}

TEST_CASE("ssim matches the brute-force window oracle") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Image a = random_image(16, 16, 100 + seed), b = random_image(16, 16, 200 + seed);
    CHECK(std::fabs(ssim(a, b) - ssim_oracle(a, b)) < 1e-9);
  }
}

TEST_CASE("extract_patches: center crop and tiling counts") {
  Image big = random_image(180, 180, 8);
  auto one = extract_patches(big, 160);
  REQUIRE(one.size() == 1);
  CHECK(one[0].height() == 160);
  CHECK(one[0].width() == 160);
  // Crop is centered: margin (180-160)/2 = 10.
  CHECK(one[0].at(0, 0) == doctest::Approx(big.at(10, 10)));

  Image tiled = random_image(320, 320, 9);
  auto four = extract_patches(tiled, 160);
  CHECK(four.size() == 4);

  CHECK_THROWS_AS(extract_patches(Image(100, 100), 160), InputError);
}

TEST_CASE("default augmentation recipe yields 8 patches per 180x180 image") {
  // 400 images x 8 variants = 3200 patches, the paper-scale corpus size.
  PatchOptions opts;
  opts.rotate90 = true;
  opts.flip_h = true;
  Image img = random_image(180, 180, 10);
  CHECK(extract_patches(img, 160, opts).size() == 8);
}

TEST_CASE("extract_patches is bit-identical across runs with the same seed") {
  Image img = random_image(200, 200, 11);
  PatchOptions opts;
  opts.random_crop = true;
  opts.rotate90 = true;
  opts.flip_h = true;
  opts.seed = 42;
  auto p1 = extract_patches(img, 64, opts);
  auto p2 = extract_patches(img, 64, opts);
  REQUIRE(p1.size() == p2.size());
  for (size_t i = 0; i < p1.size(); ++i)
    for (size_t j = 0; j < p1[i].size(); ++j) CHECK(p1[i][j] == p2[i][j]);
}

TEST_CASE("upsample2x matches linear resample and has an exact adjoint") {
  Image y = random_image(10, 14, 12);
  Image up = upsample2x(y);
  Image ref = resample(y, 2.0, ResampleMethod::kLinear);
  REQUIRE(up.same_dims(ref));
  for (size_t i = 0; i < up.size(); ++i) CHECK(up[i] == doctest::Approx(ref[i]).epsilon(1e-12));

  // <A u, v> == <u, A^T v>
  Image u = random_image(10, 14, 13), v = random_image(20, 28, 14);
  Image Au = upsample2x(u);
  Image Atv = upsample2x_adjoint(v, 10, 14);
  double lhs = 0, rhs = 0;
  for (size_t i = 0; i < Au.size(); ++i) lhs += Au[i] * v[i];
  for (size_t i = 0; i < u.size(); ++i) rhs += u[i] * Atv[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
