#pragma once

#include <map>
#include <string>

#include "vcodec/image.hpp"

namespace vcodec {

/// A scalar loss plus its named sub-terms. `value` is always the sum of the
/// components; the SSIM component is the only one that can be negative.
struct LossValue {
  double value = 0.0;
  std::map<std::string, double> components;
};

/// Finite-difference directions used by the gradient-difference loss.
struct GradientSet {
  bool horizontal = true;
  bool vertical = true;
};

/// Mean absolute difference: (1/MN) * sum |a_i - b_i|.
LossValue l1_content(const Image& a, const Image& b);
/// d l1_content / d a. Subgradient at a_i == b_i is 0.
Image l1_content_grad(const Image& a, const Image& b);

/// L1 distance between forward differences of a and b over the directions in
/// `dirs`, replicate boundary (last row/column difference is 0), normalized
/// by MN (not by the number of directions).
LossValue l1_gradient_diff(const Image& a, const Image& b, const GradientSet& dirs = {});
Image l1_gradient_diff_grad(const Image& a, const Image& b, const GradientSet& dirs = {});

/// Negative mean SSIM between the upsampled description s(Y) and X.
LossValue ssim_loss(const Image& sY, const Image& X, const SsimConfig& cfg = {});
/// d ssim_loss / d sY (smooth; Eq. of the per-window index is rational).
Image ssim_loss_grad(const Image& sY, const Image& X, const SsimConfig& cfg = {});

/// PPNN sub-problem objective: l1_content(X, I~) + l1_gradient_diff(X, I~).
LossValue ppnn_objective(const Image& X, const Image& I_post);
/// Gradient of ppnn_objective w.r.t. the network output I~.
Image ppnn_objective_grad(const Image& X, const Image& I_post);

/// VCNN sub-problem objective: same functional form on (I^, I~).
LossValue vcnn_objective(const Image& I_pred, const Image& I_post);
Image vcnn_objective_grad(const Image& I_pred, const Image& I_post);

/// FDNN sub-problem objective: content + gradient-difference between X and
/// the frozen-VCNN prediction I^, plus the SSIM loss on (s(Y), X).
LossValue fdnn_objective(const Image& X, const Image& I_pred, const Image& sY,
                         const SsimConfig& cfg = {});
/// Gradients w.r.t. I^ and s(Y); both feed back into the FDNN parameters.
Image fdnn_objective_grad_pred(const Image& X, const Image& I_pred);
Image fdnn_objective_grad_sY(const Image& X, const Image& sY,
                             const SsimConfig& cfg = {});

}  // namespace vcodec
