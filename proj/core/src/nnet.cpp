#include "stcast/nnet.hpp"

#include <cmath>
#include <string>

namespace stcast {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LstmParams LstmParams::zeros(int hidden) {
  LstmParams p;
  p.hidden = hidden;
  for (int g = 0; g < 4; ++g) {
    p.input_w[g].assign(hidden * kNeighborInputs, 0.0);
    p.recur_w[g].assign(hidden * hidden, 0.0);
    p.bias[g].assign(hidden, 0.0);
  }
  p.readout.assign(hidden, 0.0);
  return p;
}

SeasonParams SeasonParams::zeros(int dim) {
  SeasonParams s;
  s.dim = dim;
  s.table.assign(kMonths * dim, 0.0);
  s.w_out.assign(dim, 0.0);
  return s;
}

ModelParams ModelParams::zeros(ModelVariant v, int hidden, int embed_dim) {
  ModelParams p;
  p.variant = v;
  p.lstm = LstmParams::zeros(hidden);
  if (v == ModelVariant::integrated) {
    p.cross = CrossParams{};
    p.season = SeasonParams::zeros(embed_dim);
  }
  return p;
}

GradientSet zeros_like(const ModelParams& p) {
  return ModelParams::zeros(p.variant, p.hidden(), p.embed_dim());
}

namespace {

template <typename Params, typename Span>
std::vector<std::pair<std::string, Span>> tensor_list(Params& p) {
  std::vector<std::pair<std::string, Span>> out;
  out.emplace_back("alpha", Span(&p.alpha, 1));
  out.emplace_back("beta", Span(&p.beta, 1));
  out.emplace_back("bias", Span(&p.bias, 1));
  for (int g = 0; g < 4; ++g) {
    out.emplace_back(std::string("lstm.input_w.") + kGateNames[g],
                     Span(p.lstm.input_w[g]));
  }
  for (int g = 0; g < 4; ++g) {
    out.emplace_back(std::string("lstm.recur_w.") + kGateNames[g],
                     Span(p.lstm.recur_w[g]));
  }
  for (int g = 0; g < 4; ++g) {
    out.emplace_back(std::string("lstm.bias.") + kGateNames[g],
                     Span(p.lstm.bias[g]));
  }
  out.emplace_back("lstm.readout", Span(p.lstm.readout));
  if (p.cross) {
    out.emplace_back("cross.w", Span(p.cross->w));
    out.emplace_back("cross.combine", Span(p.cross->combine));
  }
  if (p.season) {
    out.emplace_back("season.table", Span(p.season->table));
    out.emplace_back("season.w_out", Span(p.season->w_out));
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::span<double>>> tensors(ModelParams& p) {
  return tensor_list<ModelParams, std::span<double>>(p);
}

std::vector<std::pair<std::string, std::span<const double>>> tensors(
    const ModelParams& p) {
  return tensor_list<const ModelParams, std::span<const double>>(p);
}

LstmState lstm_step(const LstmParams& p, std::span<const double> x,
                    const LstmState& s) {
  const int H = p.hidden;
  if (static_cast<int>(x.size()) != kNeighborInputs ||
      static_cast<int>(s.h.size()) != H || static_cast<int>(s.c.size()) != H) {
    throw ValidationError("lstm_step: dimension mismatch");
  }
  LstmState next = LstmState::zeros(H);
  std::array<double, 4> pre;
  for (int h = 0; h < H; ++h) {
    for (int g = 0; g < 4; ++g) {
      double a = p.bias[g][h];
      const double* wi = p.input_w[g].data() + h * kNeighborInputs;
      for (int k = 0; k < kNeighborInputs; ++k) a += wi[k] * x[k];
      const double* wr = p.recur_w[g].data() + h * H;
      for (int k = 0; k < H; ++k) a += wr[k] * s.h[k];
      pre[g] = a;
    }
    const double i = sigmoid(pre[kInputGate]);
    const double f = sigmoid(pre[kForgetGate]);
    const double g = std::tanh(pre[kCellGate]);
    const double o = sigmoid(pre[kOutputGate]);
    next.c[h] = f * s.c[h] + i * g;
    next.h[h] = o * std::tanh(next.c[h]);
  }
  return next;
}

std::vector<double> lstm_encode(
    const LstmParams& p,
    std::span<const std::array<double, kNeighborInputs>> seq) {
  if (seq.empty()) throw ValidationError("lstm_encode: empty sequence");
  LstmState state = LstmState::zeros(p.hidden);
  std::vector<double> out;
  out.reserve(seq.size());
  for (const auto& x : seq) {
    state = lstm_step(p, x, state);
    out.push_back(dot(p.readout, state.h));
  }
  return out;
}

double cross_layer(const CrossParams& c, const std::array<double, 4>& v) {
  double psi = 0;
  for (int k = 0; k < 4; ++k) {
    double wv = 0;
    for (int l = 0; l < 4; ++l) wv += c.w[k * 4 + l] * v[l];
    psi += c.combine[k] * wv * v[k];
  }
  return psi;
}

double season_term(const SeasonParams& s, int month_id) {
  if (month_id < 0 || month_id >= kMonths) {
    throw ValidationError("season_term: month_id " + std::to_string(month_id) +
                          " out of [0, 11]");
  }
  return dot(s.w_out,
             std::span<const double>(s.table.data() + month_id * s.dim, s.dim));
}

StepTrace forward(const ModelParams& p, const StepInput& in, double f_t) {
  const bool integrated = p.variant == ModelVariant::integrated;
  if (integrated != (in.climate.has_value() && in.month_id.has_value())) {
    throw ValidationError(
        "forward: climate and month inputs must be present exactly for the "
        "integrated variant");
  }
  StepTrace tr;
  tr.f = f_t;
  double a = p.alpha * in.own_prev + p.beta * in.neighbor_sum + f_t + p.bias;
  if (integrated) {
    tr.season = season_term(*p.season, *in.month_id);
    tr.cross = cross_layer(*p.cross, *in.climate);
    a += tr.season + tr.cross;
  }
  tr.preact = a;
  tr.yhat = a > 0 ? a : 0.0;
  return tr;
}

ForwardTrace run_forward(const ModelParams& p,
                         std::span<const StepInput> inputs) {
  const int H = p.hidden();
  ForwardTrace trace;
  trace.gates.reserve(inputs.size());
  trace.cell.reserve(inputs.size());
  trace.cell_tanh.reserve(inputs.size());
  trace.hidden.reserve(inputs.size());
  trace.steps.reserve(inputs.size());

  LstmState state = LstmState::zeros(H);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const StepInput& in = inputs[t];
    // One LSTM step, keeping the gate activations for backward().
    std::array<std::vector<double>, 4> gates;
    for (auto& g : gates) g.resize(H);
    std::vector<double> c_new(H), c_tanh(H), h_new(H);
    for (int h = 0; h < H; ++h) {
      std::array<double, 4> pre;
      for (int g = 0; g < 4; ++g) {
        double a = p.lstm.bias[g][h];
        const double* wi = p.lstm.input_w[g].data() + h * kNeighborInputs;
        for (int k = 0; k < kNeighborInputs; ++k) {
          a += wi[k] * in.neighbor_top[k];
        }
        const double* wr = p.lstm.recur_w[g].data() + h * H;
        for (int k = 0; k < H; ++k) a += wr[k] * state.h[k];
        pre[g] = a;
      }
      gates[kInputGate][h] = sigmoid(pre[kInputGate]);
      gates[kForgetGate][h] = sigmoid(pre[kForgetGate]);
      gates[kCellGate][h] = std::tanh(pre[kCellGate]);
      gates[kOutputGate][h] = sigmoid(pre[kOutputGate]);
      c_new[h] = gates[kForgetGate][h] * state.c[h] +
                 gates[kInputGate][h] * gates[kCellGate][h];
      c_tanh[h] = std::tanh(c_new[h]);
      h_new[h] = gates[kOutputGate][h] * c_tanh[h];
    }
    state.c = c_new;
    state.h = h_new;

    const double f_t = dot(p.lstm.readout, state.h);
    StepTrace step = forward(p, in, f_t);
    if (!std::isfinite(step.preact)) {
      throw ValidationError("run_forward: non-finite value at step " +
                            std::to_string(t));
    }
    trace.gates.push_back(std::move(gates));
    trace.cell.push_back(std::move(c_new));
    trace.cell_tanh.push_back(std::move(c_tanh));
    trace.hidden.push_back(state.h);
    trace.steps.push_back(step);
  }
  return trace;
}

}  // namespace stcast
