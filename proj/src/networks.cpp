#include "vcodec/networks.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace vcodec {

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int conv_out_dim(int in, int kernel, int stride) {
  int pad = (kernel - 1) / 2;
  return (in + 2 * pad - kernel) / stride + 1;
}

// ---- stride-s convolution with SAME-style zero padding ----

template <typename T>
Mat<T> im2col(const Tensor3<T>& in, int k, int stride) {
  const int pad = (k - 1) / 2;
  const int ho = conv_out_dim(in.h, k, stride), wo = conv_out_dim(in.w, k, stride);
  Mat<T> col = Mat<T>::Zero(static_cast<long>(in.c) * k * k, static_cast<long>(ho) * wo);
  for (int r = 0; r < ho; ++r) {
    for (int c = 0; c < wo; ++c) {
      long idx = static_cast<long>(r) * wo + c;
      T* dst = col.data() + idx * col.rows();
      for (int ci = 0; ci < in.c; ++ci) {
        const T* plane = in.plane(ci);
        for (int u = 0; u < k; ++u) {
          int rr = r * stride + u - pad;
          long base = static_cast<long>(ci) * k * k + static_cast<long>(u) * k;
          if (rr < 0 || rr >= in.h) continue;
          for (int v = 0; v < k; ++v) {
            int cc = c * stride + v - pad;
            if (cc < 0 || cc >= in.w) continue;
            dst[base + v] = plane[static_cast<size_t>(rr) * in.w + cc];
          }
        }
      }
    }
  }
  return col;
}

template <typename T>
void col2im_add(const Mat<T>& col, Tensor3<T>& out, int k, int stride) {
  const int pad = (k - 1) / 2;
  const int ho = conv_out_dim(out.h, k, stride), wo = conv_out_dim(out.w, k, stride);
  for (int r = 0; r < ho; ++r) {
    for (int c = 0; c < wo; ++c) {
      long idx = static_cast<long>(r) * wo + c;
      const T* src = col.data() + idx * col.rows();
      for (int ci = 0; ci < out.c; ++ci) {
        T* plane = out.plane(ci);
        for (int u = 0; u < k; ++u) {
          int rr = r * stride + u - pad;
          if (rr < 0 || rr >= out.h) continue;
          long base = static_cast<long>(ci) * k * k + static_cast<long>(u) * k;
          for (int v = 0; v < k; ++v) {
            int cc = c * stride + v - pad;
            if (cc < 0 || cc >= out.w) continue;
            plane[static_cast<size_t>(rr) * out.w + cc] += src[base + v];
          }
        }
      }
    }
  }
}

template <typename T>
Tensor3<T> conv_forward(const Tensor3<T>& in, const LayerSpec& s,
                        const std::vector<float>& w, const std::vector<float>& b) {
  const int k = s.kernel;
  const int ho = conv_out_dim(in.h, k, s.stride), wo = conv_out_dim(in.w, k, s.stride);
  Mat<T> col = im2col(in, k, s.stride);
  Mat<T> wm(s.out_channels, s.in_channels * k * k);
  for (long i = 0; i < wm.rows(); ++i)
    for (long j = 0; j < wm.cols(); ++j)
      wm(i, j) = static_cast<T>(w[i * wm.cols() + j]);

  Tensor3<T> out(s.out_channels, ho, wo);
  Eigen::Map<RowMat<T>> om(out.v.data(), s.out_channels, static_cast<long>(ho) * wo);
  om.noalias() = wm * col;
  for (int co = 0; co < s.out_channels; ++co) {
    T* plane = out.plane(co);
    T bias = static_cast<T>(b[co]);
    for (size_t i = 0; i < out.plane_size(); ++i) plane[i] += bias;
  }
  return out;
}

template <typename T>
Tensor3<T> conv_backward(const Tensor3<T>& in, const LayerSpec& s,
                         const std::vector<float>& w, const Tensor3<T>& dOut,
                         std::vector<T>* dW, std::vector<T>* dB) {
  const int k = s.kernel;
  const long ckk = static_cast<long>(s.in_channels) * k * k;
  Eigen::Map<const RowMat<T>> dom(dOut.v.data(), s.out_channels, dOut.plane_size());

  if (dW) {
    Mat<T> col = im2col(in, k, s.stride);
    Eigen::Map<RowMat<T>> dwm(dW->data(), s.out_channels, ckk);
    dwm.noalias() = dom * col.transpose();
    // Fixed-order accumulation: Eigen's vectorized sum() peels to an aligned
    // boundary, making the rounding depend on the buffer's heap address.
    for (int co = 0; co < s.out_channels; ++co) {
      T acc = T(0);
      const T* plane = dOut.plane(co);
      for (size_t i = 0; i < dOut.plane_size(); ++i) acc += plane[i];
      (*dB)[co] = acc;
    }
  }

  Mat<T> wm(s.out_channels, ckk);
  for (long i = 0; i < wm.rows(); ++i)
    for (long j = 0; j < wm.cols(); ++j)
      wm(i, j) = static_cast<T>(w[i * ckk + j]);
  Mat<T> dcol = wm.transpose() * dom;
  Tensor3<T> dIn(in.c, in.h, in.w);
  col2im_add(dcol, dIn, k, s.stride);
  return dIn;
}

// ---- stride-2 transposed convolution, output center-cropped to exactly
// 2H x 2W (the full output is (H-1)*2 + k; crop offset (k-2)/2) ----

template <typename T>
Tensor3<T> deconv_forward(const Tensor3<T>& in, const LayerSpec& s,
                          const std::vector<float>& w, const std::vector<float>& b) {
  const int k = s.kernel, st = s.stride;
  const int full_h = (in.h - 1) * st + k, full_w = (in.w - 1) * st + k;
  const int out_h = in.h * st, out_w = in.w * st;
  const int off = (k - st) / 2;
  const long cokk = static_cast<long>(s.out_channels) * k * k;

  Mat<T> wm(in.c, cokk);  // deconv weights are [in][out][k][k]
  for (long i = 0; i < wm.rows(); ++i)
    for (long j = 0; j < wm.cols(); ++j)
      wm(i, j) = static_cast<T>(w[i * cokk + j]);
  Mat<T> inm(in.c, in.plane_size());
  for (int ci = 0; ci < in.c; ++ci)
    for (size_t i = 0; i < in.plane_size(); ++i) inm(ci, i) = in.plane(ci)[i];

  Mat<T> col = wm.transpose() * inm;  // (out*k*k) x (H*W)

  Tensor3<T> full(s.out_channels, full_h, full_w);
  for (int r = 0; r < in.h; ++r) {
    for (int c = 0; c < in.w; ++c) {
      long idx = static_cast<long>(r) * in.w + c;
      const T* src = col.data() + idx * col.rows();
      for (int co = 0; co < s.out_channels; ++co) {
        T* plane = full.plane(co);
        long base = static_cast<long>(co) * k * k;
        for (int u = 0; u < k; ++u) {
          T* dst = plane + static_cast<size_t>(r * st + u) * full_w + c * st;
          for (int v = 0; v < k; ++v) dst[v] += src[base + u * k + v];
        }
      }
    }
  }

  Tensor3<T> out(s.out_channels, out_h, out_w);
  for (int co = 0; co < s.out_channels; ++co) {
    T bias = static_cast<T>(b[co]);
    for (int r = 0; r < out_h; ++r)
      for (int c = 0; c < out_w; ++c)
        out.at(co, r, c) = full.at(co, r + off, c + off) + bias;
  }
  return out;
}

template <typename T>
Tensor3<T> deconv_backward(const Tensor3<T>& in, const LayerSpec& s,
                           const std::vector<float>& w, const Tensor3<T>& dOut,
                           std::vector<T>* dW, std::vector<T>* dB) {
  const int k = s.kernel, st = s.stride;
  const int full_h = (in.h - 1) * st + k, full_w = (in.w - 1) * st + k;
  const int off = (k - st) / 2;
  const long cokk = static_cast<long>(s.out_channels) * k * k;

  Tensor3<T> dFull(s.out_channels, full_h, full_w);
  for (int co = 0; co < s.out_channels; ++co)
    for (int r = 0; r < dOut.h; ++r)
      for (int c = 0; c < dOut.w; ++c)
        dFull.at(co, r + off, c + off) = dOut.at(co, r, c);

  Mat<T> dcol(cokk, in.plane_size());
  for (int r = 0; r < in.h; ++r) {
    for (int c = 0; c < in.w; ++c) {
      long idx = static_cast<long>(r) * in.w + c;
      T* dst = dcol.data() + idx * dcol.rows();
      for (int co = 0; co < s.out_channels; ++co) {
        const T* plane = dFull.plane(co);
        long base = static_cast<long>(co) * k * k;
        for (int u = 0; u < k; ++u) {
          const T* src = plane + static_cast<size_t>(r * st + u) * full_w + c * st;
          for (int v = 0; v < k; ++v) dst[base + u * k + v] = src[v];
        }
      }
    }
  }

  if (dW) {
    Mat<T> inm(in.c, in.plane_size());
    for (int ci = 0; ci < in.c; ++ci)
      for (size_t i = 0; i < in.plane_size(); ++i) inm(ci, i) = in.plane(ci)[i];
    Eigen::Map<RowMat<T>> dwm(dW->data(), in.c, cokk);
    dwm.noalias() = inm * dcol.transpose();
    for (int co = 0; co < s.out_channels; ++co) {
      T acc = T(0);
      const T* plane = dOut.plane(co);
      for (size_t i = 0; i < dOut.plane_size(); ++i) acc += plane[i];
      (*dB)[co] = acc;
    }
  }

  Mat<T> wm(in.c, cokk);
  for (long i = 0; i < wm.rows(); ++i)
    for (long j = 0; j < wm.cols(); ++j)
      wm(i, j) = static_cast<T>(w[i * cokk + j]);
  Mat<T> dinm = wm * dcol;  // (Cin x H*W)
  Tensor3<T> dIn(in.c, in.h, in.w);
  for (int ci = 0; ci < in.c; ++ci)
    for (size_t i = 0; i < in.plane_size(); ++i) dIn.plane(ci)[i] = dinm(ci, i);
  return dIn;
}

void check_finite(const NetworkParams& net) {
  for (const auto& layer : net.layers) {
    for (float x : layer.weights)
      if (!std::isfinite(x)) throw InternalError("network parameters contain NaN/Inf");
    for (float x : layer.biases)
      if (!std::isfinite(x)) throw InternalError("network parameters contain NaN/Inf");
  }
}

}  // namespace

const char* to_string(NetworkId id) {
  switch (id) {
    case NetworkId::kFdnn: return "fdnn";
    case NetworkId::kPpnn: return "ppnn";
    case NetworkId::kVcnn: return "vcnn";
  }
  return "?";
}

std::vector<LayerSpec> fdnn_spec() {
  std::vector<LayerSpec> s;
  s.push_back({LayerKind::kConv, 9, 1, 128, 1, true});
  s.push_back({LayerKind::kConv, 3, 128, 128, 2, true});
  for (int i = 0; i < 5; ++i) s.push_back({LayerKind::kConv, 3, 128, 128, 1, true});
  s.push_back({LayerKind::kConv, 9, 128, 1, 1, false});
  return s;
}

std::vector<LayerSpec> ppnn_spec() {
  std::vector<LayerSpec> s;
  s.push_back({LayerKind::kConv, 9, 1, 128, 1, true});
  for (int i = 0; i < 6; ++i) s.push_back({LayerKind::kConv, 3, 128, 128, 1, true});
  s.push_back({LayerKind::kDeconv, 9, 128, 1, 2, false});
  return s;
}

std::vector<LayerSpec> vcnn_spec() { return ppnn_spec(); }

std::vector<LayerSpec> spec_for(NetworkId id) {
  switch (id) {
    case NetworkId::kFdnn: return fdnn_spec();
    case NetworkId::kPpnn: return ppnn_spec();
    case NetworkId::kVcnn: return vcnn_spec();
  }
  throw InternalError("spec_for: bad network id");
}

size_t weight_count(const LayerSpec& s) {
  return static_cast<size_t>(s.in_channels) * s.out_channels * s.kernel * s.kernel;
}

NetworkParams init_params(NetworkId id, uint64_t seed) {
  NetworkParams net;
  net.id = id;
  net.spec = spec_for(id);
  std::mt19937_64 rng(seed);
  for (const auto& s : net.spec) {
    NetworkParams::Layer layer;
    double fan_in = static_cast<double>(s.in_channels) * s.kernel * s.kernel;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    layer.weights.resize(weight_count(s));
    for (auto& w : layer.weights) w = static_cast<float>(dist(rng));
    layer.biases.assign(s.out_channels, 0.0f);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

template <typename T>
Tensor3<T> forward_t(const NetworkParams& net, const Tensor3<T>& input,
                     ForwardCache<T>* cache) {
  check_finite(net);
  if (net.id == NetworkId::kFdnn && (input.h % 2 != 0 || input.w % 2 != 0))
    throw InputError("forward: FDNN input dimensions must be even");
  if (input.c != net.spec.front().in_channels)
    throw InputError("forward: input channel mismatch");

  if (cache) {
    cache->inputs.clear();
    cache->preact.clear();
  }
  Tensor3<T> x = input;
  for (size_t li = 0; li < net.spec.size(); ++li) {
    const auto& s = net.spec[li];
    if (cache) cache->inputs.push_back(x);
    Tensor3<T> y = s.kind == LayerKind::kConv
                       ? conv_forward(x, s, net.layers[li].weights, net.layers[li].biases)
                       : deconv_forward(x, s, net.layers[li].weights, net.layers[li].biases);
    if (cache) cache->preact.push_back(y);
    if (s.relu)
      for (auto& v : y.v) v = v > T(0) ? v : T(0);
    x = std::move(y);
  }
  return x;
}

template <typename T>
Tensor3<T> backward_t(const NetworkParams& net, const ForwardCache<T>& cache,
                      const Tensor3<T>& dOut, ParamGrads<T>* grads) {
  if (cache.inputs.size() != net.spec.size())
    throw InternalError("backward: cache does not match network");
  if (grads && grads->layers.size() != net.layers.size()) grads->init_like(net);

  Tensor3<T> d = dOut;
  for (int li = static_cast<int>(net.spec.size()) - 1; li >= 0; --li) {
    const auto& s = net.spec[li];
    if (s.relu) {
      const auto& pre = cache.preact[li];
      for (size_t i = 0; i < d.v.size(); ++i)
        if (pre.v[i] <= T(0)) d.v[i] = T(0);
    }
    std::vector<T>* dW = grads ? &grads->layers[li].weights : nullptr;
    std::vector<T>* dB = grads ? &grads->layers[li].biases : nullptr;
    d = s.kind == LayerKind::kConv
            ? conv_backward(cache.inputs[li], s, net.layers[li].weights, d, dW, dB)
            : deconv_backward(cache.inputs[li], s, net.layers[li].weights, d, dW, dB);
  }
  return d;
}

template Tensor3<float> forward_t<float>(const NetworkParams&, const Tensor3<float>&, ForwardCache<float>*);
template Tensor3<double> forward_t<double>(const NetworkParams&, const Tensor3<double>&, ForwardCache<double>*);
template Tensor3<float> backward_t<float>(const NetworkParams&, const ForwardCache<float>&, const Tensor3<float>&, ParamGrads<float>*);
template Tensor3<double> backward_t<double>(const NetworkParams&, const ForwardCache<double>&, const Tensor3<double>&, ParamGrads<double>*);

Image forward(const NetworkParams& net, const Image& input) {
  return tensor_to_image(forward_t<float>(net, image_to_tensor<float>(input)));
}

// ---- checkpoint io ----

namespace {

constexpr char kMagic[4] = {'V', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

template <typename T>
void wr(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T rd(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!f) throw InputError("load_checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const NetworkParams& net, const std::string& path) {
  check_finite(net);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("save_checkpoint: cannot open " + path);
  f.write(kMagic, 4);
  wr(f, kVersion);
  wr(f, static_cast<uint8_t>(net.id));
  wr(f, static_cast<uint32_t>(net.spec.size()));
  for (const auto& s : net.spec) {
    wr(f, static_cast<uint8_t>(s.kind));
    wr(f, static_cast<uint8_t>(s.relu));
    wr(f, static_cast<int32_t>(s.kernel));
    wr(f, static_cast<int32_t>(s.in_channels));
    wr(f, static_cast<int32_t>(s.out_channels));
    wr(f, static_cast<int32_t>(s.stride));
  }
  for (const auto& layer : net.layers) {
    wr(f, static_cast<uint64_t>(layer.weights.size()));
    f.write(reinterpret_cast<const char*>(layer.weights.data()),
            layer.weights.size() * sizeof(float));
    wr(f, static_cast<uint64_t>(layer.biases.size()));
    f.write(reinterpret_cast<const char*>(layer.biases.data()),
            layer.biases.size() * sizeof(float));
  }
  if (!f) throw InternalError("save_checkpoint: write failed: " + path);
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("load_checkpoint: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw InputError("load_checkpoint: not a checkpoint file: " + path);
  if (rd<uint32_t>(f) != kVersion)
    throw InputError("load_checkpoint: unsupported version: " + path);

  NetworkParams net;
  net.id = static_cast<NetworkId>(rd<uint8_t>(f));
  uint32_t n_layers = rd<uint32_t>(f);
  for (uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec s;
    s.kind = static_cast<LayerKind>(rd<uint8_t>(f));
    s.relu = rd<uint8_t>(f) != 0;
    s.kernel = rd<int32_t>(f);
    s.in_channels = rd<int32_t>(f);
    s.out_channels = rd<int32_t>(f);
    s.stride = rd<int32_t>(f);
    net.spec.push_back(s);
  }
  for (uint32_t i = 0; i < n_layers; ++i) {
    NetworkParams::Layer layer;
    uint64_t wn = rd<uint64_t>(f);
    if (wn != weight_count(net.spec[i]))
      throw InputError("load_checkpoint: weight count does not match spec");
    layer.weights.resize(wn);
    f.read(reinterpret_cast<char*>(layer.weights.data()), wn * sizeof(float));
    uint64_t bn = rd<uint64_t>(f);
    if (bn != static_cast<uint64_t>(net.spec[i].out_channels))
      throw InputError("load_checkpoint: bias count does not match spec");
    layer.biases.resize(bn);
    f.read(reinterpret_cast<char*>(layer.biases.data()), bn * sizeof(float));
    if (!f) throw InputError("load_checkpoint: truncated file: " + path);
    net.layers.push_back(std::move(layer));
  }
  check_finite(net);
  return net;
}

NetworkParams load_checkpoint(const std::string& path, NetworkId expected) {
  NetworkParams net = load_checkpoint(path);
  if (net.id != expected || net.spec != spec_for(expected))
    throw InputError("load_checkpoint: checkpoint is a " +
                     std::string(to_string(net.id)) + " network, expected " +
                     to_string(expected));
  return net;
}

}  // namespace vcodec
