#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcodec/tensor.hpp"

namespace vcodec {

enum class LayerKind : uint8_t { kConv = 0, kDeconv = 1 };
enum class NetworkId : uint8_t { kFdnn = 0, kPpnn = 1, kVcnn = 2 };

const char* to_string(NetworkId id);

struct LayerSpec {
  LayerKind kind;
  int kernel;        // 3 or 9
  int in_channels;
  int out_channels;
  int stride;        // 1 or 2
  bool relu;

  bool operator==(const LayerSpec&) const = default;
};

/// FDNN f(X, alpha): 8 conv layers, 9x9 first/last, stride 2 on the second,
/// 128 feature maps on layers 1-7, ReLU everywhere but the last.
std::vector<LayerSpec> fdnn_spec();
/// PPNN h(Z, gamma): 7 conv layers (9x9 then 3x3, all ReLU) and one 9x9
/// stride-2 deconvolution back to a single channel, no final activation.
std::vector<LayerSpec> ppnn_spec();
/// VCNN v(Y, theta): same structure as the PPNN.
std::vector<LayerSpec> vcnn_spec();

std::vector<LayerSpec> spec_for(NetworkId id);

/// Parameters are float32 tensors; conv weights are laid out
/// [out_ch][in_ch][k][k], deconv weights [in_ch][out_ch][k][k].
struct NetworkParams {
  struct Layer {
    std::vector<float> weights;
    std::vector<float> biases;
  };
  NetworkId id = NetworkId::kFdnn;
  std::vector<LayerSpec> spec;
  std::vector<Layer> layers;
};

size_t weight_count(const LayerSpec& s);

/// He-style init: zero biases, Gaussian weights with variance 2/fan_in.
/// Deterministic for a given seed.
NetworkParams init_params(NetworkId id, uint64_t seed);

/// Per-layer cached activations needed by backward().
template <typename T>
struct ForwardCache {
  std::vector<Tensor3<T>> inputs;   // input to each layer
  std::vector<Tensor3<T>> preact;   // pre-activation output of each layer
};

template <typename T>
struct ParamGrads {
  struct Layer {
    std::vector<T> weights;
    std::vector<T> biases;
  };
  std::vector<Layer> layers;

  void init_like(const NetworkParams& net) {
    layers.assign(net.layers.size(), {});
    for (size_t i = 0; i < net.layers.size(); ++i) {
      layers[i].weights.assign(net.layers[i].weights.size(), T(0));
      layers[i].biases.assign(net.layers[i].biases.size(), T(0));
    }
  }
  void accumulate(const ParamGrads& other, T scale = T(1)) {
    for (size_t i = 0; i < layers.size(); ++i) {
      for (size_t j = 0; j < layers[i].weights.size(); ++j)
        layers[i].weights[j] += scale * other.layers[i].weights[j];
      for (size_t j = 0; j < layers[i].biases.size(); ++j)
        layers[i].biases[j] += scale * other.layers[i].biases[j];
    }
  }
};

/// Forward pass through the whole stack. FDNN halves spatial dims (input
/// must be even), PPNN/VCNN double them. Throws on NaN parameters.
template <typename T>
Tensor3<T> forward_t(const NetworkParams& net, const Tensor3<T>& input,
                     ForwardCache<T>* cache = nullptr);

/// Backpropagates dOut through the stack; fills `grads` when non-null (pass
/// null to get only the input gradient, e.g. through a frozen VCNN) and
/// returns d(loss)/d(input).
template <typename T>
Tensor3<T> backward_t(const NetworkParams& net, const ForwardCache<T>& cache,
                      const Tensor3<T>& dOut, ParamGrads<T>* grads);

extern template Tensor3<float> forward_t<float>(const NetworkParams&, const Tensor3<float>&, ForwardCache<float>*);
extern template Tensor3<double> forward_t<double>(const NetworkParams&, const Tensor3<double>&, ForwardCache<double>*);
extern template Tensor3<float> backward_t<float>(const NetworkParams&, const ForwardCache<float>&, const Tensor3<float>&, ParamGrads<float>*);
extern template Tensor3<double> backward_t<double>(const NetworkParams&, const ForwardCache<double>&, const Tensor3<double>&, ParamGrads<double>*);

/// Single-image convenience wrapper over the float engine.
Image forward(const NetworkParams& net, const Image& input);

/// Versioned binary checkpoint with float32 little-endian tensors.
/// Layout: "VCKP" | u32 version | u8 network_id | u32 n_layers |
/// per-layer spec (u8 kind, u8 relu, i32 kernel/in/out/stride) |
/// per-layer u64 count + float32[] weights, u64 count + float32[] biases.
void save_checkpoint(const NetworkParams& net, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);
/// Loads and verifies the stored network id and layer spec.
NetworkParams load_checkpoint(const std::string& path, NetworkId expected);

}  // namespace vcodec
