#pragma once

#include <vector>

#include "vcodec/image.hpp"

namespace vcodec {

/// Dense CHW tensor. The training engine instantiates T = float; tests use
/// T = double for finite-difference oracles.
template <typename T>
struct Tensor3 {
  int c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor3() = default;
  Tensor3(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, T(0)) {}

  size_t plane_size() const { return static_cast<size_t>(h) * w; }
  T* plane(int i) { return v.data() + i * plane_size(); }
  const T* plane(int i) const { return v.data() + i * plane_size(); }
  T& at(int ci, int r, int col) { return v[(static_cast<size_t>(ci) * h + r) * w + col]; }
  T at(int ci, int r, int col) const { return v[(static_cast<size_t>(ci) * h + r) * w + col]; }
};

template <typename T>
Tensor3<T> image_to_tensor(const Image& img) {
  Tensor3<T> t(1, img.height(), img.width());
  for (size_t i = 0; i < img.size(); ++i) t.v[i] = static_cast<T>(img[i]);
  return t;
}

template <typename T>
Image tensor_to_image(const Tensor3<T>& t) {
  if (t.c != 1) throw InternalError("tensor_to_image: expected 1 channel");
  Image img(t.h, t.w);
  for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(t.v[i]);
  return img;
}

}  // namespace vcodec
