#include "stcast/train.hpp"

#include <cmath>
#include <string>

namespace stcast {

double sse_loss(std::span<const double> preds,
                std::span<const double> targets) {
  if (preds.size() != targets.size() || preds.empty()) {
    throw ValidationError("sse_loss: length mismatch or empty");
  }
  double s = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - targets[i];
    s += d * d;
  }
  return s;
}

BackwardResult backward(const ModelParams& p,
                        std::span<const StepInput> inputs,
                        std::span<const double> targets) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw ValidationError("backward: inputs/targets length mismatch or empty");
  }
  const int H = p.hidden();
  const ForwardTrace trace = run_forward(p, inputs);

  BackwardResult res;
  res.grads = zeros_like(p);
  GradientSet& g = res.grads;

  // Per-step loss derivative through the ReLU (subgradient 0 at the kink).
  const std::size_t T = inputs.size();
  std::vector<double> delta(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double err = trace.steps[t].yhat - targets[t];
    res.loss += err * err;
    delta[t] = trace.steps[t].preact > 0 ? 2.0 * err : 0.0;
  }

  std::vector<double> dh_carry(H, 0.0), dc_carry(H, 0.0);
  std::vector<double> dh(H), dc(H);
  std::array<std::vector<double>, 4> da;
  for (auto& v : da) v.resize(H);

  for (std::size_t ti = T; ti-- > 0;) {
    const StepInput& in = inputs[ti];
    const double d = delta[ti];

    g.alpha += d * in.own_prev;
    g.beta += d * in.neighbor_sum;
    g.bias += d;

    if (p.variant == ModelVariant::integrated) {
      // Month embedding: g(t) = w_out . table[month].
      const SeasonParams& season = *p.season;
      const int m = *in.month_id;
      for (int k = 0; k < season.dim; ++k) {
        g.season->w_out[k] += d * season.table[m * season.dim + k];
        g.season->table[m * season.dim + k] += d * season.w_out[k];
      }
      // Cross layer: psi = combine . ((W v) * v).
      const CrossParams& cross = *p.cross;
      const auto& v = *in.climate;
      for (int k = 0; k < 4; ++k) {
        double wv = 0;
        for (int l = 0; l < 4; ++l) wv += cross.w[k * 4 + l] * v[l];
        g.cross->combine[k] += d * wv * v[k];
        for (int l = 0; l < 4; ++l) {
          g.cross->w[k * 4 + l] += d * cross.combine[k] * v[k] * v[l];
        }
      }
    }

    // Into the LSTM: f_t = readout . h_t.
    const std::vector<double>& h_t = trace.hidden[ti];
    for (int k = 0; k < H; ++k) {
      g.lstm.readout[k] += d * h_t[k];
      dh[k] = dh_carry[k] + d * p.lstm.readout[k];
      dc[k] = dc_carry[k];
    }

    const auto& gates = trace.gates[ti];
    const std::vector<double>& c_tanh = trace.cell_tanh[ti];
    const std::vector<double>* c_prev = ti > 0 ? &trace.cell[ti - 1] : nullptr;
    const std::vector<double>* h_prev =
        ti > 0 ? &trace.hidden[ti - 1] : nullptr;

    for (int k = 0; k < H; ++k) {
      const double i_g = gates[kInputGate][k];
      const double f_g = gates[kForgetGate][k];
      const double c_g = gates[kCellGate][k];
      const double o_g = gates[kOutputGate][k];
      const double dout = dh[k] * c_tanh[k];
      dc[k] += dh[k] * o_g * (1.0 - c_tanh[k] * c_tanh[k]);
      const double din = dc[k] * c_g;
      const double dcell = dc[k] * i_g;
      const double dforget = dc[k] * (c_prev ? (*c_prev)[k] : 0.0);
      dc_carry[k] = dc[k] * f_g;
      da[kInputGate][k] = din * i_g * (1.0 - i_g);
      da[kForgetGate][k] = dforget * f_g * (1.0 - f_g);
      da[kCellGate][k] = dcell * (1.0 - c_g * c_g);
      da[kOutputGate][k] = dout * o_g * (1.0 - o_g);
    }

    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
    for (int gate = 0; gate < 4; ++gate) {
      for (int h = 0; h < H; ++h) {
        const double a = da[gate][h];
        double* wi = g.lstm.input_w[gate].data() + h * kNeighborInputs;
        for (int k = 0; k < kNeighborInputs; ++k) {
          wi[k] += a * in.neighbor_top[k];
        }
        if (h_prev) {
          double* wr = g.lstm.recur_w[gate].data() + h * H;
          for (int k = 0; k < H; ++k) wr[k] += a * (*h_prev)[k];
        }
        g.lstm.bias[gate][h] += a;
        const double* wr_p = p.lstm.recur_w[gate].data() + h * H;
        for (int k = 0; k < H; ++k) dh_carry[k] += wr_p[k] * a;
      }
    }
  }

  for (const auto& [name, span] : tensors(g)) {
    for (double v : span) {
      if (!std::isfinite(v)) {
        throw ValidationError("backward: non-finite gradient in " + name);
      }
    }
  }
  return res;
}

GradientSet finite_diff_grad(const ModelParams& p,
                             std::span<const StepInput> inputs,
                             std::span<const double> targets, double eps) {
  if (eps <= 0) throw ValidationError("finite_diff_grad: eps must be > 0");
  ModelParams probe = p;
  GradientSet out = zeros_like(p);
  auto probe_tensors = tensors(probe);
  auto out_tensors = tensors(out);
  auto loss_at = [&]() {
    const auto preds = run_forward(probe, inputs).predictions();
    return sse_loss(preds, targets);
  };
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    auto& span = probe_tensors[t].second;
    auto& dst = out_tensors[t].second;
    for (std::size_t i = 0; i < span.size(); ++i) {
      const double saved = span[i];
      span[i] = saved + eps;
      const double up = loss_at();
      span[i] = saved - eps;
      const double down = loss_at();
      span[i] = saved;
      dst[i] = (up - down) / (2.0 * eps);
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> gradient_rel_errors(
    const GradientSet& a, const GradientSet& b) {
  auto ta = tensors(a);
  auto tb = tensors(b);
  if (ta.size() != tb.size()) {
    throw ValidationError("gradient_rel_errors: shape mismatch");
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(ta.size());
  for (std::size_t t = 0; t < ta.size(); ++t) {
    double worst = 0;
    const auto& sa = ta[t].second;
    const auto& sb = tb[t].second;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const double denom =
          std::max({1e-3, std::fabs(sa[i]), std::fabs(sb[i])});
      worst = std::max(worst, std::fabs(sa[i] - sb[i]) / denom);
    }
    out.emplace_back(ta[t].first, worst);
  }
  return out;
}

AdamState AdamState::init(const ModelParams& p, const AdamConfig& cfg) {
  AdamState st;
  st.cfg = cfg;
  st.m = zeros_like(p);
  st.s = zeros_like(p);
  return st;
}

void adam_step(AdamState& st, ModelParams& p, const GradientSet& g) {
  ++st.step;
  const AdamConfig& c = st.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(st.step));
  auto tp = tensors(p);
  auto tm = tensors(st.m);
  auto ts = tensors(st.s);
  const auto tg = tensors(g);
  for (std::size_t t = 0; t < tp.size(); ++t) {
    auto& param = tp[t].second;
    auto& m = tm[t].second;
    auto& s = ts[t].second;
    const auto& grad = tg[t].second;
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad[i];
      s[i] = c.beta2 * s[i] + (1.0 - c.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double shat = s[i] / bc2;
      param[i] -= c.lr * mhat / (std::sqrt(shat) + c.eps);
    }
  }
}

ModelParams init_params(const TrainConfig& cfg, Rng& rng) {
  ModelParams p =
      ModelParams::zeros(cfg.variant, cfg.hidden, cfg.embed_dim);
  // Fixed draw order (the tensors() order) with shared tensors first, so the
  // base and integrated variants share initializations for the same seed.
  for (auto& [name, span] : tensors(p)) {
    if (name == "alpha") {
      span[0] = 1.0;  // difference-persistence prior
    } else if (name == "lstm.bias.forget") {
      std::fill(span.begin(), span.end(), 1.0);
    } else {
      for (double& v : span) v = rng.uniform(-cfg.init_scale, cfg.init_scale);
    }
  }
  if (cfg.freeze_climate_season && p.variant == ModelVariant::integrated) {
    std::fill(p.cross->w.begin(), p.cross->w.end(), 0.0);
    std::fill(p.cross->combine.begin(), p.cross->combine.end(), 0.0);
    std::fill(p.season->table.begin(), p.season->table.end(), 0.0);
    std::fill(p.season->w_out.begin(), p.season->w_out.end(), 0.0);
  }
  return p;
}

std::vector<StepInput> teacher_forced_inputs(const PanelDataset& ds,
                                             const TransformState& ts,
                                             int region, int first_t,
                                             int last_t, ModelVariant variant) {
  if (first_t < 2 || last_t >= ds.total_months || first_t > last_t) {
    throw ValidationError("teacher_forced_inputs: month range out of bounds");
  }
  const auto transformed = ts.case_accessor(ds);
  std::vector<StepInput> out;
  out.reserve(last_t - first_t + 1);
  for (int t = first_t; t <= last_t; ++t) {
    StepInput in;
    in.own_prev = ts.case_value(ds, region, t - 1);
    double sum = 0;
    for (int nb : ds.neighbor_ids[region]) {
      sum += ts.case_value(ds, nb, t - 1);
    }
    in.neighbor_sum = sum;
    in.neighbor_top = top_neighbors(ds, region, t, transformed).values;
    if (variant == ModelVariant::integrated) {
      in.climate = ts.climate_value(ds, region, t);
      in.month_id = ds.month_id(t);
    }
    out.push_back(in);
  }
  return out;
}

std::vector<double> transformed_targets(const PanelDataset& ds,
                                        const TransformState& ts, int region,
                                        int first_t, int last_t) {
  std::vector<double> out;
  out.reserve(last_t - first_t + 1);
  for (int t = first_t; t <= last_t; ++t) {
    out.push_back(ts.case_value(ds, region, t));
  }
  return out;
}

TrainResult train_region(const PanelDataset& ds, int region,
                         const TrainConfig& cfg, const TransformState& ts) {
  if (cfg.epochs < 1) throw ValidationError("train: epochs must be >= 1");
  if (cfg.lr <= 0) throw ValidationError("train: learning rate must be > 0");
  if (region < 0 || region >= static_cast<int>(ds.regions.size())) {
    throw ValidationError("train: region index out of range");
  }
  if (ds.train_months < 4) {
    throw ValidationError("train: need at least 4 training months");
  }

  const auto inputs = teacher_forced_inputs(ds, ts, region, 2,
                                            ds.train_months - 1, cfg.variant);
  const auto targets =
      transformed_targets(ds, ts, region, 2, ds.train_months - 1);

  Rng rng(cfg.seed);
  TrainResult res;
  res.params = init_params(cfg, rng);
  AdamState adam = AdamState::init(res.params, AdamConfig{.lr = cfg.lr});
  res.loss_curve.reserve(cfg.epochs);

  const bool freeze = cfg.freeze_climate_season &&
                      cfg.variant == ModelVariant::integrated;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    BackwardResult bw = backward(res.params, inputs, targets);
    if (!std::isfinite(bw.loss)) {
      throw ValidationError("train: loss diverged at epoch " +
                            std::to_string(epoch));
    }
    if (freeze) {
      std::fill(bw.grads.cross->w.begin(), bw.grads.cross->w.end(), 0.0);
      std::fill(bw.grads.cross->combine.begin(), bw.grads.cross->combine.end(),
                0.0);
      std::fill(bw.grads.season->table.begin(), bw.grads.season->table.end(),
                0.0);
      std::fill(bw.grads.season->w_out.begin(), bw.grads.season->w_out.end(),
                0.0);
    }
    adam_step(adam, res.params, bw.grads);
    res.loss_curve.push_back(bw.loss);
  }
  res.final_loss =
      sse_loss(run_forward(res.params, inputs).predictions(), targets);
  return res;
}

}  // namespace stcast
