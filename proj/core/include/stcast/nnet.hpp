#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stcast/types.hpp"

namespace stcast {

inline constexpr int kNeighborInputs = 3;   // LSTM input width
inline constexpr int kClimateFeatures = 4;  // tmax, tmin, tmean, precip
inline constexpr int kMonths = 12;

enum Gate { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };
inline constexpr std::array<const char*, 4> kGateNames = {"in", "forget",
                                                          "cell", "out"};

/// Standard LSTM cell over 3-wide neighbor inputs plus a linear readout.
struct LstmParams {
  int hidden = 0;
  std::array<std::vector<double>, 4> input_w;  // [gate], hidden x 3 row-major
  std::array<std::vector<double>, 4> recur_w;  // [gate], hidden x hidden
  std::array<std::vector<double>, 4> bias;     // [gate], hidden
  std::vector<double> readout;                 // hidden

  static LstmParams zeros(int hidden);
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zeros(int hidden) {
    return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
  }
};

/// Quadratic feature-interaction layer over the 4 climate features:
/// psi(v) = combine . ((W v) * v), elementwise product.
struct CrossParams {
  std::array<double, 16> w{};        // 4x4 row-major
  std::array<double, 4> combine{};   // maps interaction vector to a scalar
};

/// Learned month-of-year effect: table lookup followed by a dot product.
struct SeasonParams {
  int dim = 0;
  std::vector<double> table;  // 12 x dim row-major
  std::vector<double> w_out;  // dim

  static SeasonParams zeros(int dim);
};

enum class ModelVariant { base = 1, integrated = 2 };

/// Every trainable parameter. The base variant omits the climate cross layer
/// and the month embedding; the integrated variant carries both.
struct ModelParams {
  ModelVariant variant = ModelVariant::base;
  double alpha = 0;  // own-lag coefficient
  double beta = 0;   // all-neighbor-sum coefficient
  double bias = 0;
  LstmParams lstm;
  std::optional<CrossParams> cross;
  std::optional<SeasonParams> season;

  int hidden() const { return lstm.hidden; }
  int embed_dim() const { return season ? season->dim : 0; }

  static ModelParams zeros(ModelVariant v, int hidden, int embed_dim);
};

/// Gradients (or any other per-parameter accumulator) share the parameter
/// layout exactly.
using GradientSet = ModelParams;

GradientSet zeros_like(const ModelParams& p);

/// Named views over every parameter tensor, in a fixed order shared by the
/// optimizer, the gradient checker and the checkpoint writer.
std::vector<std::pair<std::string, std::span<double>>> tensors(ModelParams& p);
std::vector<std::pair<std::string, std::span<const double>>> tensors(
    const ModelParams& p);

/// One LSTM update. Gates use the logistic sigmoid, candidate and output use
/// tanh: c' = f*c + i*g, h' = o * tanh(c').
LstmState lstm_step(const LstmParams& p, std::span<const double> x,
                    const LstmState& s);

/// Runs the cell over a whole sequence from a zero state and returns the
/// readout f_t = readout . h_t for every step.
std::vector<double> lstm_encode(
    const LstmParams& p,
    std::span<const std::array<double, kNeighborInputs>> seq);

double cross_layer(const CrossParams& c, const std::array<double, 4>& v);

/// month_id must be in [0, 11].
double season_term(const SeasonParams& s, int month_id);

/// Teacher-forced inputs for one prediction step, all on the transformed
/// scale. climate/month are present iff the model is the integrated variant.
struct StepInput {
  double own_prev = 0;                          // region's previous value
  std::array<double, kNeighborInputs> neighbor_top{};  // LSTM input
  double neighbor_sum = 0;                      // sum over ALL neighbors
  std::optional<std::array<double, 4>> climate;
  std::optional<int> month_id;
};

/// Per-step scalar terms of the prediction.
struct StepTrace {
  double f = 0;       // LSTM readout
  double season = 0;  // g(t), integrated variant only
  double cross = 0;   // psi(v_t), integrated variant only
  double preact = 0;
  double yhat = 0;    // max(preact, 0)
};

/// Assembles one prediction from an already-computed LSTM readout f_t.
StepTrace forward(const ModelParams& p, const StepInput& in, double f_t);

/// Everything backward() needs: gate activations and states per LSTM step
/// plus the scalar terms per prediction.
struct ForwardTrace {
  std::vector<std::array<std::vector<double>, 4>> gates;  // [step][gate][h]
  std::vector<std::vector<double>> cell;      // c_t
  std::vector<std::vector<double>> cell_tanh; // tanh(c_t)
  std::vector<std::vector<double>> hidden;    // h_t
  std::vector<StepTrace> steps;

  std::vector<double> predictions() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.yhat);
    return out;
  }
};

/// Runs the LSTM across all steps (zero initial state, state carried through)
/// and assembles every prediction. Throws ValidationError naming the step if
/// an intermediate value is non-finite.
ForwardTrace run_forward(const ModelParams& p, std::span<const StepInput> inputs);

}  // namespace stcast
