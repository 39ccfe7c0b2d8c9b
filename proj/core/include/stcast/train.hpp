#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stcast/data.hpp"
#include "stcast/nnet.hpp"
#include "stcast/rng.hpp"
#include "stcast/transform.hpp"

namespace stcast {

/// Sum of squared errors, no averaging.
double sse_loss(std::span<const double> preds, std::span<const double> targets);

struct BackwardResult {
  double loss = 0;
  GradientSet grads;
};

/// Loss and exact gradients for one teacher-forced sequence, backpropagating
/// through every LSTM step, the cross layer, the embedding rows and the ReLU
/// (subgradient 0 at the kink).
BackwardResult backward(const ModelParams& p, std::span<const StepInput> inputs,
                        std::span<const double> targets);

/// Central differences (L(t+e) - L(t-e)) / 2e for every scalar parameter.
/// Verification oracle; independent of backward().
GradientSet finite_diff_grad(const ModelParams& p,
                             std::span<const StepInput> inputs,
                             std::span<const double> targets, double eps);

/// Worst per-element relative error between two gradient sets, per tensor.
/// The denominator is floored at 1e-3 so near-zero entries compare absolutely.
std::vector<std::pair<std::string, double>> gradient_rel_errors(
    const GradientSet& a, const GradientSet& b);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  long step = 0;
  GradientSet m;  // first moments
  GradientSet s;  // second moments

  static AdamState init(const ModelParams& p, const AdamConfig& cfg);
};

/// Standard Adam update with bias correction, in place.
void adam_step(AdamState& st, ModelParams& p, const GradientSet& g);

struct TrainConfig {
  int epochs = 500;
  double lr = 0.01;
  std::uint64_t seed = 0;
  int hidden = 8;
  int embed_dim = 4;
  ModelVariant variant = ModelVariant::integrated;
  double init_scale = 0.1;
  /// Ablation switch: keep the climate cross layer and the month embedding
  /// pinned at zero while training the integrated variant.
  bool freeze_climate_season = false;
};

/// Seeded init: weights uniform(-init_scale, init_scale), alpha = 1,
/// LSTM forget bias = 1. The draw order puts shared tensors first so both
/// variants see identical shared initializations for the same seed.
ModelParams init_params(const TrainConfig& cfg, Rng& rng);

/// Teacher-forced model inputs for predicting raw months [first_t, last_t],
/// both inclusive, on the transformed scale. Requires first_t >= 2.
std::vector<StepInput> teacher_forced_inputs(const PanelDataset& ds,
                                             const TransformState& ts,
                                             int region, int first_t,
                                             int last_t,
                                             ModelVariant variant);

/// Transformed observations for months [first_t, last_t] (the targets the
/// inputs above predict).
std::vector<double> transformed_targets(const PanelDataset& ds,
                                        const TransformState& ts, int region,
                                        int first_t, int last_t);

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_curve;  // loss at the start of each epoch
  double final_loss = 0;           // after the last update
};

/// Full-batch Adam over the teacher-forced training sequence (months 2..N-1)
/// of one region. Deterministic given cfg.seed. Throws ValidationError naming
/// the epoch if the loss goes non-finite.
TrainResult train_region(const PanelDataset& ds, int region,
                         const TrainConfig& cfg, const TransformState& ts);

}  // namespace stcast
