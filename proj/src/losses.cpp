#include "vcodec/losses.hpp"

#include <cmath>
#include <vector>

namespace vcodec {

namespace {

double sign0(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

void check_dims(const Image& a, const Image& b, const char* who) {
  if (!a.same_dims(b)) throw InputError(std::string(who) + ": dimension mismatch");
}

std::vector<double> gaussian_window(const SsimConfig& cfg) {
  const int win = cfg.window;
  std::vector<double> w(static_cast<size_t>(win) * win);
  double half = (win - 1) / 2.0, sum = 0.0;
  for (int u = 0; u < win; ++u)
    for (int v = 0; v < win; ++v) {
      double d2 = (u - half) * (u - half) + (v - half) * (v - half);
      w[u * win + v] = std::exp(-d2 / (2.0 * cfg.sigma * cfg.sigma));
      sum += w[u * win + v];
    }
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace

LossValue l1_content(const Image& a, const Image& b) {
  check_dims(a, b, "l1_content");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  LossValue lv;
  lv.value = s / static_cast<double>(a.size());
  lv.components["l1_content"] = lv.value;
  return lv;
}

Image l1_content_grad(const Image& a, const Image& b) {
  check_dims(a, b, "l1_content_grad");
  Image g(a.height(), a.width());
  double inv = 1.0 / static_cast<double>(a.size());
  for (size_t i = 0; i < a.size(); ++i) g[i] = sign0(a[i] - b[i]) * inv;
  return g;
}

LossValue l1_gradient_diff(const Image& a, const Image& b, const GradientSet& dirs) {
  check_dims(a, b, "l1_gradient_diff");
  const int H = a.height(), W = a.width();
  double s = 0.0;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      if (dirs.horizontal && c + 1 < W)
        s += std::fabs((a.at(r, c + 1) - a.at(r, c)) - (b.at(r, c + 1) - b.at(r, c)));
      if (dirs.vertical && r + 1 < H)
        s += std::fabs((a.at(r + 1, c) - a.at(r, c)) - (b.at(r + 1, c) - b.at(r, c)));
    }
  LossValue lv;
  lv.value = s / static_cast<double>(a.size());
  lv.components["l1_gradient"] = lv.value;
  return lv;
}

Image l1_gradient_diff_grad(const Image& a, const Image& b, const GradientSet& dirs) {
  check_dims(a, b, "l1_gradient_diff_grad");
  const int H = a.height(), W = a.width();
  Image g(H, W);
  double inv = 1.0 / static_cast<double>(a.size());
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      if (dirs.horizontal && c + 1 < W) {
        double s = sign0((a.at(r, c + 1) - a.at(r, c)) - (b.at(r, c + 1) - b.at(r, c)));
        g.at(r, c + 1) += s * inv;
        g.at(r, c) -= s * inv;
      }
      if (dirs.vertical && r + 1 < H) {
        double s = sign0((a.at(r + 1, c) - a.at(r, c)) - (b.at(r + 1, c) - b.at(r, c)));
        g.at(r + 1, c) += s * inv;
        g.at(r, c) -= s * inv;
      }
    }
  return g;
}

LossValue ssim_loss(const Image& sY, const Image& X, const SsimConfig& cfg) {
  check_dims(sY, X, "ssim_loss");
  LossValue lv;
  lv.value = -ssim(sY, X, cfg);
  lv.components["ssim"] = lv.value;
  return lv;
}

Image ssim_loss_grad(const Image& sY, const Image& X, const SsimConfig& cfg) {
  check_dims(sY, X, "ssim_loss_grad");
  const int win = cfg.window;
  if (sY.height() < win || sY.width() < win)
    throw InputError("ssim_loss_grad: image smaller than window");
  auto w = gaussian_window(cfg);

  const int nh = sY.height() - win + 1, nw = sY.width() - win + 1;
  const double scale = -1.0 / (static_cast<double>(nh) * nw);
  Image g(sY.height(), sY.width());

  for (int r0 = 0; r0 < nh; ++r0) {
    for (int c0 = 0; c0 < nw; ++c0) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int u = 0; u < win; ++u)
        for (int v = 0; v < win; ++v) {
          double wu = w[u * win + v];
          double x = sY.at(r0 + u, c0 + v), y = X.at(r0 + u, c0 + v);
          mx += wu * x;
          my += wu * y;
          xx += wu * x * x;
          yy += wu * y * y;
          xy += wu * x * y;
        }
      double vx = xx - mx * mx, vy = yy - my * my, cxy = xy - mx * my;
      double A1 = 2 * mx * my + cfg.c1, A2 = 2 * cxy + cfg.c2;
      double B1 = mx * mx + my * my + cfg.c1, B2 = vx + vy + cfg.c2;
      double S = (A1 * A2) / (B1 * B2);
      // dS/dx_u with dmu = w_u, dvx = 2 w_u (x_u - mx), dcxy = w_u (y_u - my)
      for (int u = 0; u < win; ++u)
        for (int v = 0; v < win; ++v) {
          double wu = w[u * win + v];
          double x = sY.at(r0 + u, c0 + v), y = X.at(r0 + u, c0 + v);
          double dA1 = 2 * my * wu;
          double dA2 = 2 * wu * (y - my);
          double dB1 = 2 * mx * wu;
          double dB2 = 2 * wu * (x - mx);
          double dS = (dA1 * A2 + A1 * dA2) / (B1 * B2) - S * (dB1 / B1 + dB2 / B2);
          g.at(r0 + u, c0 + v) += scale * dS;
        }
    }
  }
  return g;
}

LossValue ppnn_objective(const Image& X, const Image& I_post) {
  LossValue lv = l1_content(X, I_post);
  LossValue lg = l1_gradient_diff(X, I_post);
  lv.value += lg.value;
  lv.components.insert(lg.components.begin(), lg.components.end());
  return lv;
}

Image ppnn_objective_grad(const Image& X, const Image& I_post) {
  Image g = l1_content_grad(I_post, X);
  Image gg = l1_gradient_diff_grad(I_post, X);
  for (size_t i = 0; i < g.size(); ++i) g[i] += gg[i];
  return g;
}

LossValue vcnn_objective(const Image& I_pred, const Image& I_post) {
  LossValue lv = l1_content(I_pred, I_post);
  LossValue lg = l1_gradient_diff(I_pred, I_post);
  lv.value += lg.value;
  lv.components.insert(lg.components.begin(), lg.components.end());
  return lv;
}

Image vcnn_objective_grad(const Image& I_pred, const Image& I_post) {
  Image g = l1_content_grad(I_pred, I_post);
  Image gg = l1_gradient_diff_grad(I_pred, I_post);
  for (size_t i = 0; i < g.size(); ++i) g[i] += gg[i];
  return g;
}

LossValue fdnn_objective(const Image& X, const Image& I_pred, const Image& sY,
                         const SsimConfig& cfg) {
  check_dims(X, I_pred, "fdnn_objective");
  check_dims(X, sY, "fdnn_objective");
  LossValue lv = l1_content(X, I_pred);
  LossValue lg = l1_gradient_diff(X, I_pred);
  LossValue ls = ssim_loss(sY, X, cfg);
  lv.value += lg.value + ls.value;
  lv.components.insert(lg.components.begin(), lg.components.end());
  lv.components.insert(ls.components.begin(), ls.components.end());
  return lv;
}

Image fdnn_objective_grad_pred(const Image& X, const Image& I_pred) {
  Image g = l1_content_grad(I_pred, X);
  Image gg = l1_gradient_diff_grad(I_pred, X);
  for (size_t i = 0; i < g.size(); ++i) g[i] += gg[i];
  return g;
}

Image fdnn_objective_grad_sY(const Image& X, const Image& sY,
                             const SsimConfig& cfg) {
  return ssim_loss_grad(sY, X, cfg);
}

}  // namespace vcodec
