#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vcodec/image.hpp"
#include "vcodec/losses.hpp"
#include "vcodec/networks.hpp"

namespace vcodec {

/// Hyperparameters of the alternating training algorithm. Defaults are the
/// full-scale values; desk-scale tests override them.
struct TrainingConfig {
  int outer_iterations = 3;   // K
  int ppnn_epochs = 60;       // p, also used for the VCNN and the final retrain
  int fdnn_epochs = 30;       // q
  int batch_size = 20;        // m
  int corpus_size = 3200;     // n, target patch count when building a corpus
  double lr0 = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double grad_clip = 0.0;     // global L2-norm clip per batch; 0 disables
  std::vector<int> quality_factors = {5, 10, 20, 40};
  uint64_t seed = 0;
  int patch_size = 160;
  std::string corpus_path;
  std::string checkpoint_dir = ".";
  std::vector<ResampleMethod> init_methods = {
      ResampleMethod::kBicubic, ResampleMethod::kNearest, ResampleMethod::kLinear,
      ResampleMethod::kArea, ResampleMethod::kLanczos4};
  bool augment = true;        // rotations + horizontal flips when building patches
  bool per_quality_model = false;
  bool resume = false;
  SsimConfig ssim;
};

/// Parses a `key = value` config file (comments start with '#').
TrainingConfig load_training_config(const std::string& path);

enum class Phase { kPpnn, kVcnn, kFdnn, kFinalPpnn };
const char* to_string(Phase p);

struct TrainingLogRow {
  Phase phase;
  int outer_iter;   // 1-based; K+1 for the final retrain
  int epoch;        // 1-based within the phase
  double loss;
  double l1_content;
  double l1_gradient;
  double ssim;      // 0 for phases without an SSIM term
  double lr;
};

void write_log_csv(const std::vector<TrainingLogRow>& log, const std::string& path);

/// Piecewise-constant decay: lr0 until 3/5 of the steps, lr0/2 until 4/5,
/// lr0/4 afterwards.
double lr_schedule(long step, long total_steps, double lr0);

struct DescriptionPair {
  int x_index;      // index into the corpus
  Image y;          // half-resolution description
};

/// Initial descriptions: every corpus image downsampled by 0.5 under every
/// listed interpolation method.
std::vector<DescriptionPair> build_initial_descriptions(
    const std::vector<Image>& corpus, const std::vector<ResampleMethod>& methods);

/// One (input, target) supervision pair; pointers refer into caller storage.
struct TrainSample {
  const Image* input;
  const Image* target;
};

/// Adam with double-precision moments over float parameters.
class AdamOptimizer {
 public:
  AdamOptimizer(const NetworkParams& net, double beta1, double beta2);
  void step(NetworkParams& net, const ParamGrads<float>& grads, double lr);

 private:
  double beta1_, beta2_;
  long t_ = 0;
  std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
};

/// p epochs of Adam on the PPNN objective over (Z -> X) pairs. Mutates
/// `gamma` in place and appends one log row per epoch.
void train_ppnn(const std::vector<TrainSample>& pairs, const TrainingConfig& cfg,
                NetworkParams& gamma, int epochs, Phase phase, int outer_iter,
                std::vector<TrainingLogRow>& log);

/// p epochs of Adam on the VCNN objective over (Y -> I~) pairs.
void train_vcnn(const std::vector<TrainSample>& pairs, const TrainingConfig& cfg,
                NetworkParams& theta, int epochs, int outer_iter,
                std::vector<TrainingLogRow>& log);

/// q epochs on the FDNN objective with theta frozen; gradients flow through
/// the frozen VCNN and the bilinear upsampler into alpha.
void train_fdnn(const std::vector<Image>& corpus, const TrainingConfig& cfg,
                NetworkParams& alpha, const NetworkParams& theta_frozen,
                int epochs, int outer_iter, std::vector<TrainingLogRow>& log);

/// Compresses a description with the standard codec at the given quality.
Image codec_roundtrip(const Image& y, int quality);

/// Assigns a quality factor to each description pair: the configured factor
/// set is cycled over a seeded shuffle of the pair order, so every factor is
/// used at least once per pass (when pairs >= factors).
std::vector<int> assign_quality_factors(size_t n_pairs, const std::vector<int>& factors,
                                        uint64_t pass_seed);

struct TrainResult {
  NetworkParams fdnn;   // alpha — deployable
  NetworkParams ppnn;   // gamma — deployable
  NetworkParams vcnn;   // theta — training artifact only
  std::vector<TrainingLogRow> log;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Algorithm 1 end to end over a pre-extracted patch corpus. Writes per-phase
/// checkpoints, a progress marker, and the training-log CSV into
/// cfg.checkpoint_dir. With cfg.resume, completed phases are skipped.
TrainResult run_algorithm1(const TrainingConfig& cfg, const std::vector<Image>& corpus,
                           const ProgressFn& progress = nullptr);

/// Loads the corpus from cfg.corpus_path (patch extraction + augmentation per
/// the config) and runs the algorithm.
TrainResult run_algorithm1(const TrainingConfig& cfg, const ProgressFn& progress = nullptr);

/// Builds the training patch set from the rasters found in a directory.
std::vector<Image> build_corpus(const TrainingConfig& cfg);

}  // namespace vcodec
