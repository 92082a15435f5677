#include "vcodec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vcodec/codec.hpp"

namespace fs = std::filesystem;

namespace vcodec {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  uint64_t x = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  return x;
}

struct EpochStats {
  double loss = 0, l1c = 0, l1g = 0, ssim = 0;
  long n = 0;
  void add(const LossValue& lv) {
    loss += lv.value;
    auto get = [&](const char* k) {
      auto it = lv.components.find(k);
      return it == lv.components.end() ? 0.0 : it->second;
    };
    l1c += get("l1_content");
    l1g += get("l1_gradient");
    ssim += get("ssim");
    ++n;
  }
  TrainingLogRow row(Phase ph, int iter, int epoch, double lr) const {
    return {ph, iter, epoch, loss / n, l1c / n, l1g / n, ssim / n, lr};
  }
};

// Global L2-norm gradient clipping (no-op when max_norm <= 0).
void clip_grads(ParamGrads<float>& grads, double max_norm) {
  if (max_norm <= 0) return;
  double ss = 0;
  for (const auto& l : grads.layers) {
    for (float g : l.weights) ss += static_cast<double>(g) * g;
    for (float g : l.biases) ss += static_cast<double>(g) * g;
  }
  double norm = std::sqrt(ss);
  if (norm <= max_norm) return;
  float scale = static_cast<float>(max_norm / norm);
  for (auto& l : grads.layers) {
    for (float& g : l.weights) g *= scale;
    for (float& g : l.biases) g *= scale;
  }
}

// Shared inner loop for the PPNN/VCNN sub-problems: minimize the L1 content
// plus gradient-difference distance between the network output and a fixed
// target.
void train_supervised(const std::vector<TrainSample>& pairs, const TrainingConfig& cfg,
                      NetworkParams& net, int epochs, Phase phase, int outer_iter,
                      std::vector<TrainingLogRow>& log) {
  if (pairs.empty()) throw InputError("train: empty pair list");
  for (const auto& p : pairs) {
    if (p.target->height() != 2 * p.input->height() ||
        p.target->width() != 2 * p.input->width())
      throw InputError("train: target dims must be exactly 2x the input dims");
  }

  const long n = static_cast<long>(pairs.size());
  const long nb = n >= cfg.batch_size ? n / cfg.batch_size : 1;
  const long bs = n >= cfg.batch_size ? cfg.batch_size : n;
  const long total_steps = static_cast<long>(epochs) * nb;

  std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<uint64_t>(phase) + 10, outer_iter));
  std::vector<long> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  AdamOptimizer adam(net, cfg.adam_beta1, cfg.adam_beta2);
  ParamGrads<float> batch_grads, sample_grads;
  batch_grads.init_like(net);
  long step = 0;

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    EpochStats stats;
    double lr = cfg.lr0;
    for (long b = 0; b < nb; ++b) {
      for (auto& l : batch_grads.layers) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0f);
        std::fill(l.biases.begin(), l.biases.end(), 0.0f);
      }
      for (long j = 0; j < bs; ++j) {
        const TrainSample& sp = pairs[perm[b * bs + j]];
        ForwardCache<float> cache;
        Tensor3<float> out = forward_t(net, image_to_tensor<float>(*sp.input), &cache);
        Image pred = tensor_to_image(out);
        stats.add(vcnn_objective(pred, *sp.target));
        Image dPred = vcnn_objective_grad(pred, *sp.target);
        backward_t(net, cache, image_to_tensor<float>(dPred), &sample_grads);
        batch_grads.accumulate(sample_grads, 1.0f / static_cast<float>(bs));
      }
      clip_grads(batch_grads, cfg.grad_clip);
      lr = lr_schedule(step, total_steps, cfg.lr0);
      adam.step(net, batch_grads, lr);
      ++step;
    }
    log.push_back(stats.row(phase, outer_iter, epoch, lr));
  }
}

std::vector<TrainingLogRow> read_log_csv(const std::string& path);

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::kPpnn: return "ppnn";
    case Phase::kVcnn: return "vcnn";
    case Phase::kFdnn: return "fdnn";
    case Phase::kFinalPpnn: return "final_ppnn";
  }
  return "?";
}

double lr_schedule(long step, long total_steps, double lr0) {
  if (step < 0 || step >= total_steps) throw InternalError("lr_schedule: step out of range");
  double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  if (frac < 0.6) return lr0;
  if (frac < 0.8) return lr0 / 2.0;
  return lr0 / 4.0;
}

std::vector<DescriptionPair> build_initial_descriptions(
    const std::vector<Image>& corpus, const std::vector<ResampleMethod>& methods) {
  if (corpus.empty()) throw InputError("build_initial_descriptions: empty corpus");
  if (methods.empty()) throw InputError("build_initial_descriptions: no methods");
  std::vector<DescriptionPair> out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Image& x = corpus[i];
    if (x.height() % 2 != 0 || x.width() % 2 != 0)
      throw InputError("build_initial_descriptions: image dims must be even");
    for (auto m : methods)
      out.push_back({static_cast<int>(i), resample(x, 0.5, m)});
  }
  return out;
}

std::vector<int> assign_quality_factors(size_t n_pairs, const std::vector<int>& factors,
                                        uint64_t pass_seed) {
  if (factors.empty()) throw InputError("assign_quality_factors: empty factor list");
  std::vector<size_t> order(n_pairs);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(pass_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> q(n_pairs);
  for (size_t i = 0; i < n_pairs; ++i) q[order[i]] = factors[i % factors.size()];
  return q;
}

Image codec_roundtrip(const Image& y, int quality) {
  return dequantize8(jpeg_decode(jpeg_encode(quantize8(y), quality)));
}

AdamOptimizer::AdamOptimizer(const NetworkParams& net, double beta1, double beta2)
    : beta1_(beta1), beta2_(beta2) {
  for (const auto& l : net.layers) {
    m_w_.emplace_back(l.weights.size(), 0.0);
    v_w_.emplace_back(l.weights.size(), 0.0);
    m_b_.emplace_back(l.biases.size(), 0.0);
    v_b_.emplace_back(l.biases.size(), 0.0);
  }
}

void AdamOptimizer::step(NetworkParams& net, const ParamGrads<float>& grads, double lr) {
  constexpr double eps = 1e-8;
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (size_t li = 0; li < net.layers.size(); ++li) {
    auto upd = [&](std::vector<float>& p, const std::vector<float>& g,
                   std::vector<double>& m, std::vector<double>& v) {
      for (size_t i = 0; i < p.size(); ++i) {
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * static_cast<double>(g[i]) * g[i];
        double mhat = m[i] / bc1, vhat = v[i] / bc2;
        p[i] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps));
      }
    };
    upd(net.layers[li].weights, grads.layers[li].weights, m_w_[li], v_w_[li]);
    upd(net.layers[li].biases, grads.layers[li].biases, m_b_[li], v_b_[li]);
  }
}

void train_ppnn(const std::vector<TrainSample>& pairs, const TrainingConfig& cfg,
                NetworkParams& gamma, int epochs, Phase phase, int outer_iter,
                std::vector<TrainingLogRow>& log) {
  train_supervised(pairs, cfg, gamma, epochs, phase, outer_iter, log);
}

void train_vcnn(const std::vector<TrainSample>& pairs, const TrainingConfig& cfg,
                NetworkParams& theta, int epochs, int outer_iter,
                std::vector<TrainingLogRow>& log) {
  train_supervised(pairs, cfg, theta, epochs, Phase::kVcnn, outer_iter, log);
}

void train_fdnn(const std::vector<Image>& corpus, const TrainingConfig& cfg,
                NetworkParams& alpha, const NetworkParams& theta_frozen,
                int epochs, int outer_iter, std::vector<TrainingLogRow>& log) {
  if (corpus.empty()) throw InputError("train_fdnn: empty corpus");
  const long n = static_cast<long>(corpus.size());
  const long nb = n >= cfg.batch_size ? n / cfg.batch_size : 1;
  const long bs = n >= cfg.batch_size ? cfg.batch_size : n;
  const long total_steps = static_cast<long>(epochs) * nb;

  std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<uint64_t>(Phase::kFdnn) + 10, outer_iter));
  std::vector<long> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  AdamOptimizer adam(alpha, cfg.adam_beta1, cfg.adam_beta2);
  ParamGrads<float> batch_grads, sample_grads;
  batch_grads.init_like(alpha);
  long step = 0;

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    EpochStats stats;
    double lr = cfg.lr0;
    for (long b = 0; b < nb; ++b) {
      for (auto& l : batch_grads.layers) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0f);
        std::fill(l.biases.begin(), l.biases.end(), 0.0f);
      }
      for (long j = 0; j < bs; ++j) {
        const Image& X = corpus[perm[b * bs + j]];
        ForwardCache<float> cache_f, cache_v;
        Tensor3<float> yT = forward_t(alpha, image_to_tensor<float>(X), &cache_f);
        Tensor3<float> predT = forward_t(theta_frozen, yT, &cache_v);
        Image y = tensor_to_image(yT);
        Image pred = tensor_to_image(predT);
        Image sY = upsample2x(y);
        stats.add(fdnn_objective(X, pred, sY, cfg.ssim));

        // Two gradient paths into Y: through the frozen VCNN and through the
        // bilinear upsampler feeding the SSIM loss.
        Image dPred = fdnn_objective_grad_pred(X, pred);
        Tensor3<float> dY = backward_t<float>(theta_frozen, cache_v,
                                              image_to_tensor<float>(dPred), nullptr);
        Image dsY = fdnn_objective_grad_sY(X, sY, cfg.ssim);
        Image dYs = upsample2x_adjoint(dsY, y.height(), y.width());
        for (size_t i = 0; i < dY.v.size(); ++i)
          dY.v[i] += static_cast<float>(dYs[i]);

        backward_t(alpha, cache_f, dY, &sample_grads);
        batch_grads.accumulate(sample_grads, 1.0f / static_cast<float>(bs));
      }
      clip_grads(batch_grads, cfg.grad_clip);
      lr = lr_schedule(step, total_steps, cfg.lr0);
      adam.step(alpha, batch_grads, lr);
      ++step;
    }
    log.push_back(stats.row(Phase::kFdnn, outer_iter, epoch, lr));
  }
}

// ---- log csv ----

void write_log_csv(const std::vector<TrainingLogRow>& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("write_log_csv: cannot open " + path);
  f << "phase,outer_iter,epoch,loss,l1_content,l1_gradient,ssim,lr\n";
  for (const auto& r : log) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  to_string(r.phase), r.outer_iter, r.epoch, r.loss, r.l1_content,
                  r.l1_gradient, r.ssim, r.lr);
    f << buf;
  }
}

namespace {

Phase phase_from_string(const std::string& s) {
  if (s == "ppnn") return Phase::kPpnn;
  if (s == "vcnn") return Phase::kVcnn;
  if (s == "fdnn") return Phase::kFdnn;
  if (s == "final_ppnn") return Phase::kFinalPpnn;
  throw InputError("unknown phase in log: " + s);
}

std::vector<TrainingLogRow> read_log_csv(const std::string& path) {
  std::vector<TrainingLogRow> log;
  std::ifstream f(path);
  if (!f) return log;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    TrainingLogRow r;
    std::getline(ss, tok, ',');
    r.phase = phase_from_string(tok);
    std::getline(ss, tok, ',');
    r.outer_iter = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.epoch = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.loss = std::stod(tok);
    std::getline(ss, tok, ',');
    r.l1_content = std::stod(tok);
    std::getline(ss, tok, ',');
    r.l1_gradient = std::stod(tok);
    std::getline(ss, tok, ',');
    r.ssim = std::stod(tok);
    std::getline(ss, tok, ',');
    r.lr = std::stod(tok);
    log.push_back(r);
  }
  return log;
}

}  // namespace

// ---- Algorithm 1 driver ----

namespace {

struct PhaseTag {
  Phase phase;
  int iter;
};

std::string ckpt_name(NetworkId id, const PhaseTag& tag) {
  return std::string(to_string(id)) + "_iter" + std::to_string(tag.iter) + "_" +
         to_string(tag.phase) + ".ckpt";
}

void save_snapshot(const fs::path& dir, const PhaseTag& tag, const NetworkParams& a,
                   const NetworkParams& g, const NetworkParams& t) {
  save_checkpoint(a, (dir / ckpt_name(a.id, tag)).string());
  save_checkpoint(g, (dir / ckpt_name(g.id, tag)).string());
  save_checkpoint(t, (dir / ckpt_name(t.id, tag)).string());
  save_checkpoint(a, (dir / "fdnn_latest.ckpt").string());
  save_checkpoint(g, (dir / "ppnn_latest.ckpt").string());
  save_checkpoint(t, (dir / "vcnn_latest.ckpt").string());
}

}  // namespace

TrainResult run_algorithm1(const TrainingConfig& cfg, const std::vector<Image>& corpus,
                           const ProgressFn& progress) {
  if (corpus.empty()) throw InputError("run_algorithm1: empty corpus");
  fs::path dir(cfg.checkpoint_dir);
  fs::create_directories(dir);
  const std::string progress_path = (dir / "progress.json").string();
  const std::string log_path = (dir / "training_log.csv").string();
  auto report = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  NetworkParams alpha = init_params(NetworkId::kFdnn, mix_seed(cfg.seed, 1));
  NetworkParams gamma = init_params(NetworkId::kPpnn, mix_seed(cfg.seed, 2));
  NetworkParams theta = init_params(NetworkId::kVcnn, mix_seed(cfg.seed, 3));
  std::vector<TrainingLogRow> log;

  int completed = 0;
  if (cfg.resume && fs::exists(progress_path)) {
    std::ifstream pf(progress_path);
    nlohmann::json pj;
    pf >> pj;
    completed = pj.at("completed_phases").get<int>();
    if (completed > 0) {
      alpha = load_checkpoint((dir / "fdnn_latest.ckpt").string(), NetworkId::kFdnn);
      gamma = load_checkpoint((dir / "ppnn_latest.ckpt").string(), NetworkId::kPpnn);
      theta = load_checkpoint((dir / "vcnn_latest.ckpt").string(), NetworkId::kVcnn);
      log = read_log_csv(log_path);
      report("resuming after " + std::to_string(completed) + " completed phases");
    }
  }

  auto finish_phase = [&](const PhaseTag& tag, int idx) {
    save_snapshot(dir, tag, alpha, gamma, theta);
    write_log_csv(log, log_path);
    nlohmann::json pj = {{"completed_phases", idx + 1}};
    std::ofstream pf(progress_path);
    pf << pj.dump(2) << "\n";
  };

  int phase_idx = 0;
  for (int k = 1; k <= cfg.outer_iterations; ++k) {
    int first_idx = phase_idx;
    if (first_idx + 3 <= completed) {
      phase_idx += 3;  // whole iteration already done
      continue;
    }

    // Line 1 / line 4: current descriptions, compressed by the codec.
    std::vector<DescriptionPair> descs;
    if (k == 1) {
      descs = build_initial_descriptions(corpus, cfg.init_methods);
    } else {
      for (size_t i = 0; i < corpus.size(); ++i)
        descs.push_back({static_cast<int>(i), forward(alpha, corpus[i])});
    }
    auto qualities = assign_quality_factors(descs.size(), cfg.quality_factors,
                                            mix_seed(cfg.seed, 100, k));
    std::vector<Image> compressed;
    compressed.reserve(descs.size());
    for (size_t i = 0; i < descs.size(); ++i)
      compressed.push_back(codec_roundtrip(descs[i].y, qualities[i]));

    // Sub-problem 1: PPNN.
    if (phase_idx >= completed) {
      report("iter " + std::to_string(k) + ": training PPNN");
      std::vector<TrainSample> pairs;
      for (size_t i = 0; i < descs.size(); ++i)
        pairs.push_back({&compressed[i], &corpus[descs[i].x_index]});
      train_ppnn(pairs, cfg, gamma, cfg.ppnn_epochs, Phase::kPpnn, k, log);
      finish_phase({Phase::kPpnn, k}, phase_idx);
    }
    ++phase_idx;

    // Sub-problem 2: VCNN, teacher targets regenerated with the current gamma.
    if (phase_idx >= completed) {
      report("iter " + std::to_string(k) + ": training VCNN");
      std::vector<Image> teachers;
      teachers.reserve(descs.size());
      for (const auto& z : compressed) teachers.push_back(forward(gamma, z));
      std::vector<TrainSample> pairs;
      for (size_t i = 0; i < descs.size(); ++i)
        pairs.push_back({&descs[i].y, &teachers[i]});
      train_vcnn(pairs, cfg, theta, cfg.ppnn_epochs, k, log);
      finish_phase({Phase::kVcnn, k}, phase_idx);
    }
    ++phase_idx;

    // Sub-problem 3: FDNN with theta frozen.
    if (phase_idx >= completed) {
      report("iter " + std::to_string(k) + ": training FDNN");
      train_fdnn(corpus, cfg, alpha, theta, cfg.fdnn_epochs, k, log);
      finish_phase({Phase::kFdnn, k}, phase_idx);
    }
    ++phase_idx;
  }

  // Line 24: final PPNN retrain against the final descriptions.
  if (phase_idx >= completed) {
    report("final PPNN retrain");
    int k = cfg.outer_iterations + 1;
    std::vector<DescriptionPair> descs;
    for (size_t i = 0; i < corpus.size(); ++i)
      descs.push_back({static_cast<int>(i), forward(alpha, corpus[i])});
    auto qualities = assign_quality_factors(descs.size(), cfg.quality_factors,
                                            mix_seed(cfg.seed, 100, k));
    std::vector<Image> compressed;
    std::vector<TrainSample> pairs;
    compressed.reserve(descs.size());
    for (size_t i = 0; i < descs.size(); ++i)
      compressed.push_back(codec_roundtrip(descs[i].y, qualities[i]));
    for (size_t i = 0; i < descs.size(); ++i)
      pairs.push_back({&compressed[i], &corpus[descs[i].x_index]});
    train_ppnn(pairs, cfg, gamma, cfg.ppnn_epochs, Phase::kFinalPpnn, k, log);
    finish_phase({Phase::kFinalPpnn, k}, phase_idx);
  }
  ++phase_idx;

  save_checkpoint(alpha, (dir / "fdnn_final.ckpt").string());
  save_checkpoint(gamma, (dir / "ppnn_final.ckpt").string());
  write_log_csv(log, log_path);
  report("training complete");
  return {std::move(alpha), std::move(gamma), std::move(theta), std::move(log)};
}

std::vector<Image> build_corpus(const TrainingConfig& cfg) {
  if (cfg.corpus_path.empty()) throw InputError("build_corpus: corpus_path not set");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.corpus_path))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("build_corpus: no files in " + cfg.corpus_path);

  PatchOptions opts;
  opts.rotate90 = cfg.augment;
  opts.flip_h = cfg.augment;
  opts.seed = cfg.seed;
  std::vector<Image> corpus;
  for (const auto& f : files) {
    Image img = load_image(f.string());
    for (auto& p : extract_patches(img, cfg.patch_size, opts))
      corpus.push_back(std::move(p));
  }
  if (cfg.corpus_size > 0 && static_cast<int>(corpus.size()) > cfg.corpus_size)
    corpus.resize(cfg.corpus_size);
  return corpus;
}

TrainResult run_algorithm1(const TrainingConfig& cfg, const ProgressFn& progress) {
  return run_algorithm1(cfg, build_corpus(cfg), progress);
}

// ---- config file ----

TrainingConfig load_training_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("load_training_config: cannot open " + path);
  TrainingConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto as_list = [&](auto parse) {
      std::vector<decltype(parse(val))> out;
      std::stringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(parse(trim(tok)));
      return out;
    };
    auto as_bool = [&](const std::string& v) {
      if (v == "true" || v == "1") return true;
      if (v == "false" || v == "0") return false;
      throw InputError("config: bad boolean for " + key + ": " + v);
    };
    try {
      if (key == "outer_iterations" || key == "K") cfg.outer_iterations = std::stoi(val);
      else if (key == "ppnn_epochs" || key == "p") cfg.ppnn_epochs = std::stoi(val);
      else if (key == "fdnn_epochs" || key == "q") cfg.fdnn_epochs = std::stoi(val);
      else if (key == "batch_size" || key == "m") cfg.batch_size = std::stoi(val);
      else if (key == "corpus_size" || key == "n") cfg.corpus_size = std::stoi(val);
      else if (key == "lr0") cfg.lr0 = std::stod(val);
      else if (key == "adam_beta1") cfg.adam_beta1 = std::stod(val);
      else if (key == "adam_beta2") cfg.adam_beta2 = std::stod(val);
      else if (key == "grad_clip") cfg.grad_clip = std::stod(val);
      else if (key == "quality_factors")
        cfg.quality_factors = as_list([](const std::string& s) { return std::stoi(s); });
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "patch_size") cfg.patch_size = std::stoi(val);
      else if (key == "corpus_path") cfg.corpus_path = val;
      else if (key == "checkpoint_dir") cfg.checkpoint_dir = val;
      else if (key == "init_methods")
        cfg.init_methods = as_list([](const std::string& s) { return resample_method_from_string(s); });
      else if (key == "augment") cfg.augment = as_bool(val);
      else if (key == "per_quality_model") cfg.per_quality_model = as_bool(val);
      else if (key == "resume") cfg.resume = as_bool(val);
      else if (key == "ssim_window") cfg.ssim.window = std::stoi(val);
      else if (key == "ssim_sigma") cfg.ssim.sigma = std::stod(val);
      else throw InputError("config: unknown key: " + key);
    } catch (const std::invalid_argument&) {
      throw InputError("config: bad value for " + key + ": " + val);
    }
  }
  if (cfg.outer_iterations < 1 || cfg.ppnn_epochs < 1 || cfg.fdnn_epochs < 1 ||
      cfg.batch_size < 1)
    throw InputError("config: K, p, q, m must all be >= 1");
  return cfg;
}

}  // namespace vcodec
