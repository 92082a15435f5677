#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "vcodec/losses.hpp"

using namespace vcodec;

namespace {

Image random_image(int h, int w, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Image img(h, w);
  for (auto& v : img.data()) v = d(rng);
  return img;
}

// Central finite-difference gradient check at pixels where the function is
// smooth; returns the worst relative error over the sampled pixels.
double fd_check(const Image& a, const Image& b,
                const std::function<double(const Image&)>& f, const Image& analytic,
                double h, int samples, uint64_t seed, double smooth_margin) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dr(0, a.height() - 1), dc(0, a.width() - 1);
  double worst = 0;
  int used = 0;
  while (used < samples) {
    int r = dr(rng), c = dc(rng);
    if (smooth_margin > 0 && std::fabs(a.at(r, c) - b.at(r, c)) <= smooth_margin) continue;
    Image ap = a, am = a;
    ap.at(r, c) += h;
    am.at(r, c) -= h;
    double fd = (f(ap) - f(am)) / (2 * h);
    double rel = std::fabs(fd - analytic.at(r, c)) /
                 std::max(std::fabs(fd), std::max(std::fabs(analytic.at(r, c)), 1e-12));
    worst = std::max(worst, rel);
    ++used;
  }
  return worst;
}

}  // namespace

TEST_CASE("l1_content closed forms") {
  Image a(1, 2), b(1, 2);
  a.at(0, 1) = 0.5;
  b.at(0, 0) = 0.25;
  b.at(0, 1) = 0.5;
  CHECK(l1_content(a, a).value == doctest::Approx(0.0));
  CHECK(l1_content(a, b).value == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(l1_content(a, Image(2, 2)), InputError);
}

TEST_CASE("l1_content matches per-pixel loop oracle") {
  Image a = random_image(5, 5, 1), b = random_image(5, 5, 2);
  double s = 0;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) s += std::fabs(a.at(r, c) - b.at(r, c));
  CHECK(std::fabs(l1_content(a, b).value - s / 25.0) < 1e-9);
}

TEST_CASE("l1 losses are symmetric, zero iff equal, and scale linearly") {
  Image a = random_image(7, 6, 3), b = random_image(7, 6, 4);
  CHECK(l1_content(a, b).value == doctest::Approx(l1_content(b, a).value).epsilon(1e-12));
  CHECK(l1_gradient_diff(a, b).value ==
        doctest::Approx(l1_gradient_diff(b, a).value).epsilon(1e-12));
  CHECK(l1_content(a, a).value < 1e-12);
  CHECK(l1_gradient_diff(a, a).value < 1e-12);
  CHECK(l1_content(a, b).value > 0);

  Image a3 = a, b3 = b;
  for (auto& v : a3.data()) v *= 3.0;
  for (auto& v : b3.data()) v *= 3.0;
  CHECK(l1_content(a3, b3).value == doctest::Approx(3.0 * l1_content(a, b).value).epsilon(1e-12));
}

TEST_CASE("l1_gradient_diff closed forms") {
  // Constant images: all finite differences vanish.
  CHECK(l1_gradient_diff(Image(4, 4, 0.3), Image(4, 4, 0.9)).value == doctest::Approx(0.0));

  // a = [[0,1],[0,1]], b = 0: horizontal diffs differ by 1 in both rows.
  Image a(2, 2), b(2, 2);
  a.at(0, 1) = 1.0;
  a.at(1, 1) = 1.0;
  CHECK(l1_gradient_diff(a, b).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("l1_gradient_diff matches a loop oracle over both directions") {
  Image a = random_image(6, 6, 5), b = random_image(6, 6, 6);
  double s = 0;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      double ga = c + 1 < 6 ? a.at(r, c + 1) - a.at(r, c) : 0.0;
      double gb = c + 1 < 6 ? b.at(r, c + 1) - b.at(r, c) : 0.0;
      s += std::fabs(ga - gb);
      ga = r + 1 < 6 ? a.at(r + 1, c) - a.at(r, c) : 0.0;
      gb = r + 1 < 6 ? b.at(r + 1, c) - b.at(r, c) : 0.0;
      s += std::fabs(ga - gb);
    }
  CHECK(std::fabs(l1_gradient_diff(a, b).value - s / 36.0) < 1e-9);
}

TEST_CASE("ssim_loss identity and bounds") {
  Image x = random_image(16, 16, 7);
  CHECK(ssim_loss(x, x).value == doctest::Approx(-1.0).epsilon(1e-12));
  Image y = random_image(16, 16, 8);
  double v = ssim_loss(y, x).value;
  CHECK(v >= -1.0);
  CHECK(v <= 1.0);
  // Consistency with the metric in core_image.
  CHECK(std::fabs(ssim_loss(y, x).value + ssim(y, x)) < 1e-9);
}

TEST_CASE("loss gradients match central finite differences") {
  Image a = random_image(16, 16, 9), b = random_image(16, 16, 10);

  SUBCASE("l1_content") {
    double worst = fd_check(
        a, b, [&](const Image& img) { return l1_content(img, b).value; },
        l1_content_grad(a, b), 1e-4, 20, 11, 1e-3);
    CHECK(worst < 1e-3);
  }
  SUBCASE("l1_gradient_diff") {
    // The loss is piecewise linear in each pixel; a tiny step stays on one
    // linear piece with overwhelming probability on random input.
    double worst = fd_check(
        a, b, [&](const Image& img) { return l1_gradient_diff(img, b).value; },
        l1_gradient_diff_grad(a, b), 1e-6, 20, 12, 0.0);
    CHECK(worst < 1e-3);
  }
  SUBCASE("ssim_loss") {
    double worst = fd_check(
        a, b, [&](const Image& img) { return ssim_loss(img, b).value; },
        ssim_loss_grad(a, b), 1e-4, 20, 13, 0.0);
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("composite objectives decompose into their components") {
  Image x = random_image(12, 12, 14), p = random_image(12, 12, 15);
  Image s = random_image(12, 12, 16);

  LossValue ppnn = ppnn_objective(x, p);
  CHECK(std::fabs(ppnn.value - l1_content(x, p).value - l1_gradient_diff(x, p).value) < 1e-12);
  CHECK(ppnn.components.size() == 2);
  double sum = 0;
  for (auto& [k, v] : ppnn.components) sum += v;
  CHECK(std::fabs(ppnn.value - sum) < 1e-12);
  CHECK(ppnn_objective(x, x).value < 1e-12);

  LossValue vcnn = vcnn_objective(p, x);
  CHECK(vcnn.value == doctest::Approx(ppnn.value).epsilon(1e-12));

  LossValue fdnn = fdnn_objective(x, p, s);
  sum = 0;
  for (auto& [k, v] : fdnn.components) sum += v;
  CHECK(std::fabs(fdnn.value - sum) < 1e-12);
  // I^ = X and sY = X leaves only the SSIM term.
  CHECK(fdnn_objective(x, x, x).value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fdnn objective gradients match finite differences") {
  Image x = random_image(16, 16, 17), p = random_image(16, 16, 18);
  Image s = random_image(16, 16, 19);

  double worst = fd_check(
      p, x, [&](const Image& img) { return fdnn_objective(x, img, s).value; },
      fdnn_objective_grad_pred(x, p), 1e-4, 20, 20, 1e-3);
  CHECK(worst < 1e-3);

  worst = fd_check(
      s, x, [&](const Image& img) { return fdnn_objective(x, p, img).value; },
      fdnn_objective_grad_sY(x, s), 1e-4, 20, 21, 0.0);
  CHECK(worst < 1e-3);
}
