#include "stcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "stcast/arima.hpp"
#include "stcast/rng.hpp"

namespace stcast {

namespace {

double quantize2(double v) { return std::round(v * 100.0) / 100.0; }

RegionId synth_region_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "R%03d", index);
  return buf;
}

AdjacencyGraph build_graph(AdjacencyPattern pattern,
                           const std::vector<RegionId>& names) {
  const int n = static_cast<int>(names.size());
  AdjacencyGraph g;
  for (const auto& r : names) g.add_node(r);
  switch (pattern) {
    case AdjacencyPattern::ring:
      if (n == 2) {
        g.add_edge(names[0], names[1]);
      } else if (n >= 3) {
        for (int i = 0; i < n; ++i) g.add_edge(names[i], names[(i + 1) % n]);
      }
      break;
    case AdjacencyPattern::grid: {
      const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(n))));
      for (int i = 0; i < n; ++i) {
        if (i % cols + 1 < cols && i + 1 < n) g.add_edge(names[i], names[i + 1]);
        if (i + cols < n) g.add_edge(names[i], names[i + cols]);
      }
      break;
    }
    case AdjacencyPattern::complete:
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) g.add_edge(names[i], names[j]);
      }
      break;
  }
  return g;
}

}  // namespace

AdjacencyPattern parse_pattern(const std::string& name) {
  if (name == "ring") return AdjacencyPattern::ring;
  if (name == "grid") return AdjacencyPattern::grid;
  if (name == "complete") return AdjacencyPattern::complete;
  throw ValidationError("unknown adjacency pattern '" + name +
                        "' (expected ring|grid|complete)");
}

ModelParams default_truth(int hidden, int embed_dim, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  ModelParams p = ModelParams::zeros(ModelVariant::integrated, hidden,
                                     embed_dim);
  p.alpha = 0.30;
  p.beta = 0.12;  // applied to the sum over all neighbors
  p.bias = 0.30;  // recentered by gen_panel once climate is known

  for (int g = 0; g < 4; ++g) {
    for (double& v : p.lstm.input_w[g]) v = rng.uniform(-0.12, 0.12);
    for (double& v : p.lstm.recur_w[g]) v = rng.uniform(-0.05, 0.05);
  }
  std::fill(p.lstm.bias[kForgetGate].begin(), p.lstm.bias[kForgetGate].end(),
            0.5);
  for (double& v : p.lstm.readout) v = rng.uniform(-0.25, 0.25);

  // Jagged month effects (demeaned): strongly month-specific jumps are what
  // an embedding captures and what a short-lag AR cannot track.
  SeasonParams& season = *p.season;
  season.w_out[0] = 1.0;
  for (int k = 1; k < season.dim; ++k) season.w_out[k] = 0.2;
  double mean_effect = 0;
  for (int m = 0; m < kMonths; ++m) {
    season.table[m * season.dim] = rng.uniform(-0.42, 0.42);
    mean_effect += season.table[m * season.dim];
  }
  mean_effect /= kMonths;
  for (int m = 0; m < kMonths; ++m) {
    season.table[m * season.dim] -= mean_effect;
    for (int k = 1; k < season.dim; ++k) {
      season.table[m * season.dim + k] = rng.uniform(-0.06, 0.06);
    }
  }

  CrossParams& cross = *p.cross;
  for (double& v : cross.w) v = rng.uniform(-0.35, 0.35);
  for (double& v : cross.combine) v = rng.uniform(-0.6, 0.6);
  return p;
}

SynthPanel gen_panel(const SynthConfig& cfg) {
  if (cfg.regions < 1) throw ValidationError("synth: regions must be >= 1");
  if (cfg.train_months < 24 || cfg.months <= cfg.train_months) {
    throw ValidationError("synth: need months > train_months >= 24");
  }
  if (cfg.noise_sigma < 0) throw ValidationError("synth: sigma must be >= 0");

  const int R = cfg.regions;
  const int T = cfg.months;
  const int N = cfg.train_months;
  Rng rng(cfg.seed);

  std::vector<RegionId> names;
  names.reserve(R);
  for (int r = 0; r < R; ++r) names.push_back(synth_region_name(r));

  ModelParams truth = cfg.truth ? *cfg.truth : default_truth(8, 4, cfg.seed);
  if (truth.variant != ModelVariant::integrated) {
    throw ValidationError("synth: ground truth must be the integrated variant");
  }

  // Climate first: annual sinusoids plus noise, quantized to 0.01 so the CSV
  // round trip is exact.
  std::vector<std::vector<ClimateVector>> climate(
      R, std::vector<ClimateVector>(T));
  for (int r = 0; r < R; ++r) {
    const double phase_t = rng.uniform(0.0, 12.0);
    const double phase_p = rng.uniform(0.0, 12.0);
    for (int t = 0; t < T; ++t) {
      const int m = (cfg.start.month_id() + t) % 12;
      const double angle_t =
          2.0 * std::numbers::pi * (m - phase_t) / 12.0;
      const double angle_p =
          2.0 * std::numbers::pi * (m - phase_p) / 12.0;
      ClimateVector v;
      v.tmean = quantize2(27.0 + 2.5 * std::sin(angle_t) +
                          rng.gaussian(0.0, 0.9));
      v.tmax = quantize2(v.tmean + 4.0 + std::fabs(rng.gaussian(0.0, 0.8)));
      v.tmin = quantize2(v.tmean - 4.0 - std::fabs(rng.gaussian(0.0, 0.8)));
      v.precip = quantize2(std::max(
          0.0, 140.0 + 90.0 * std::sin(angle_p) + rng.gaussian(0.0, 45.0)));
      climate[r][t] = v;
    }
  }

  // The exact transform the dynamics run under: fixed symmetric window for
  // case differences, climate windows fitted on the training months.
  TransformState ts;
  ts.regions = names;
  ts.per_region.resize(R);
  for (int r = 0; r < R; ++r) {
    RegionTransform& rt = ts.per_region[r];
    rt.cases = NormParams{-cfg.diff_halfspan, cfg.diff_halfspan, false};
    for (int k = 0; k < 4; ++k) {
      std::vector<double> feature;
      feature.reserve(T);
      for (int t = 0; t < T; ++t) feature.push_back(climate[r][t][k]);
      rt.climate[k] = fit_normalizer(feature, static_cast<std::size_t>(N));
    }
  }

  AdjacencyGraph graph = build_graph(cfg.pattern, names);
  std::vector<std::vector<int>> neighbors(R);
  for (int r = 0; r < R; ++r) {
    for (const auto& nb : graph.neighbors(names[r])) {
      neighbors[r].push_back(
          static_cast<int>(std::lower_bound(names.begin(), names.end(), nb) -
                           names.begin()));
    }
    std::sort(neighbors[r].begin(), neighbors[r].end());
  }

  // Adapt the default dynamics to this scenario: spread the total neighbor
  // coupling over the actual degree (a dense graph would otherwise be
  // unstable) and recenter the bias so the transformed process hovers near
  // 0.5 (zero drift on the count scale) for this particular climate draw.
  if (!cfg.truth) {
    double mean_psi = 0, mean_g = 0, mean_deg = 0;
    for (int r = 0; r < R; ++r) {
      mean_deg += static_cast<double>(neighbors[r].size());
      for (int t = 0; t < T; ++t) {
        std::array<double, 4> v;
        for (int k = 0; k < 4; ++k) {
          v[k] = normalize(climate[r][t][k], ts.per_region[r].climate[k]);
        }
        mean_psi += cross_layer(*truth.cross, v);
        mean_g += season_term(*truth.season,
                              (cfg.start.month_id() + t) % 12);
      }
    }
    mean_psi /= R * T;
    mean_g /= R * T;
    mean_deg /= R;
    truth.beta = 0.24 / std::max(1.0, mean_deg);
    LstmState ss = LstmState::zeros(truth.hidden());
    const std::array<double, kNeighborInputs> mid{0.5, 0.5, 0.5};
    for (int i = 0; i < 24; ++i) ss = lstm_step(truth.lstm, mid, ss);
    double f_ss = 0;
    for (int k = 0; k < truth.hidden(); ++k) {
      f_ss += truth.lstm.readout[k] * ss.h[k];
    }
    truth.bias = 0.5 * (1.0 - truth.alpha - mean_deg * truth.beta) - mean_g -
                 mean_psi - f_ss;
  }

  std::vector<std::vector<double>> cases(R, std::vector<double>(T, 0.0));
  for (int r = 0; r < R; ++r) {
    cases[r][0] = std::round(cfg.base_level + cfg.level_step * r);
    cases[r][1] = std::max(
        0.0, cases[r][0] + std::round(rng.uniform(-0.1, 0.1) *
                                      cfg.diff_halfspan));
    ts.per_region[r].anchor = cases[r][0];
  }

  // Transformed observation for month t (needs t >= 1).
  auto transformed = [&](int r, int t) {
    return normalize(cases[r][t] - cases[r][t - 1], ts.per_region[r].cases);
  };

  std::vector<LstmState> states(R, LstmState::zeros(truth.hidden()));
  for (int t = 2; t < T; ++t) {
    for (int r = 0; r < R; ++r) {
      // Top three neighbors by raw count at t-1, ties by region id; region
      // ids sort like their indices here.
      std::vector<int> order = neighbors[r];
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (cases[a][t - 1] != cases[b][t - 1]) {
          return cases[a][t - 1] > cases[b][t - 1];
        }
        return a < b;
      });
      std::array<double, kNeighborInputs> top{};
      for (int i = 0; i < static_cast<int>(order.size()) && i < 3; ++i) {
        top[i] = transformed(order[i], t - 1);
      }
      double nb_sum = 0;
      for (int nb : neighbors[r]) nb_sum += transformed(nb, t - 1);

      states[r] = lstm_step(truth.lstm, top, states[r]);
      double f_t = 0;
      for (int k = 0; k < truth.hidden(); ++k) {
        f_t += truth.lstm.readout[k] * states[r].h[k];
      }

      std::array<double, 4> v;
      for (int k = 0; k < 4; ++k) {
        v[k] = normalize(climate[r][t][k], ts.per_region[r].climate[k]);
      }
      const int month = (cfg.start.month_id() + t) % 12;
      const double preact = truth.alpha * transformed(r, t - 1) +
                            truth.beta * nb_sum + f_t +
                            season_term(*truth.season, month) +
                            cross_layer(*truth.cross, v) + truth.bias;
      double x = std::max(preact, 0.0);
      if (cfg.noise_sigma > 0) x += rng.gaussian(0.0, cfg.noise_sigma);

      const double next =
          cases[r][t - 1] + denormalize(x, ts.per_region[r].cases);
      if (!std::isfinite(next) || std::fabs(next) > 1e9) {
        throw ValidationError("synth: dynamics diverged at month " +
                              std::to_string(t));
      }
      // The rounded count is what the dynamics see from here on, so the
      // panel stays an exact teacher-forced trajectory up to rounding.
      cases[r][t] = std::max(0.0, std::round(next));
    }
  }

  CaseTable case_table{cfg.start, names, cases};
  ClimateTable climate_table{cfg.start, names, climate};
  SynthPanel out{
      assemble(case_table, climate_table, graph, cfg.start.plus(N - 1)),
      SynthTruth{truth, std::move(ts)}};
  return out;
}

std::vector<double> gen_arima_path(double intercept,
                                   std::span<const double> phi,
                                   std::span<const double> theta, int d, int n,
                                   double sigma, std::uint64_t seed) {
  if (n < 50) throw ValidationError("gen_arima_path: n must be >= 50");
  if (d < 0 || sigma < 0) {
    throw ValidationError("gen_arima_path: bad d or sigma");
  }
  if (!ar_stationary(phi)) {
    throw ValidationError("gen_arima_path: non-stationary AR coefficients");
  }
  if (!ma_invertible(theta)) {
    throw ValidationError("gen_arima_path: non-invertible MA coefficients");
  }
  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(theta.size());
  constexpr int kBurnIn = 200;
  Rng rng(seed);
  std::vector<double> z(kBurnIn + n, 0.0);
  std::vector<double> eps(kBurnIn + n, 0.0);
  for (int t = 0; t < kBurnIn + n; ++t) {
    eps[t] = rng.gaussian(0.0, sigma);
    double v = intercept + eps[t];
    for (int i = 1; i <= p && t - i >= 0; ++i) v += phi[i - 1] * z[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) v += theta[j - 1] * eps[t - j];
    z[t] = v;
  }
  std::vector<double> out(z.end() - n, z.end());
  for (int k = 0; k < d; ++k) {
    for (int t = 1; t < n; ++t) out[t] += out[t - 1];
  }
  return out;
}

void write_panel_csvs(const PanelDataset& ds,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "cases.csv");
    if (!out) throw IoError("cannot write " + (dir / "cases.csv").string());
    out << "region,month,cases\n";
    for (std::size_t r = 0; r < ds.regions.size(); ++r) {
      for (int t = 0; t < ds.total_months; ++t) {
        out << ds.regions[r] << "," << ds.month(t).str() << ","
            << static_cast<long long>(ds.cases[r][t]) << "\n";
      }
    }
  }
  {
    std::ofstream out(dir / "climate.csv");
    if (!out) throw IoError("cannot write " + (dir / "climate.csv").string());
    out << "region,month,tmax,tmin,tmean,precip\n";
    char buf[128];
    for (std::size_t r = 0; r < ds.regions.size(); ++r) {
      for (int t = 0; t < ds.total_months; ++t) {
        const ClimateVector& v = ds.climate[r][t];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%.2f,%.2f", v.tmax, v.tmin,
                      v.tmean, v.precip);
        out << ds.regions[r] << "," << ds.month(t).str() << "," << buf << "\n";
      }
    }
  }
  {
    std::ofstream out(dir / "adjacency.csv");
    if (!out) {
      throw IoError("cannot write " + (dir / "adjacency.csv").string());
    }
    out << "region_a,region_b\n";
    for (const auto& [a, b] : ds.graph.edges()) {
      out << a << "," << b << "\n";
    }
    for (const auto& node : ds.graph.nodes()) {
      if (ds.graph.neighbors(node).empty()) out << node << ",\n";
    }
  }
}

}  // namespace stcast
