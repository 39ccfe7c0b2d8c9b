#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "stcast/data.hpp"
#include "stcast/nnet.hpp"
#include "stcast/transform.hpp"

namespace stcast {

enum class AdjacencyPattern { ring, grid, complete };

AdjacencyPattern parse_pattern(const std::string& name);

/// Scenario description for the panel generator. The defaults produce a
/// 5-region ring with a 51/18 train/test split.
struct SynthConfig {
  int regions = 5;
  int months = 69;        // T
  int train_months = 51;  // N, >= 24 so two seasonal cycles are observed
  AdjacencyPattern pattern = AdjacencyPattern::ring;
  double noise_sigma = 0.10;  // Gaussian noise on the transformed scale
  std::uint64_t seed = 0;
  YearMonth start{2013, 6};

  double base_level = 400;  // initial count level of region 0
  double level_step = 45;   // per-region offset of the initial level
  double diff_halfspan = 22;  // fixed normalization window [-h, +h] for diffs

  /// Generator dynamics; when absent a seeded default instance is built.
  std::optional<ModelParams> truth;
};

/// What the generator actually used: the dynamics parameters and the exact
/// transform (anchors, fixed diff window, fitted climate windows).
struct SynthTruth {
  ModelParams params;
  TransformState transform;
};

struct SynthPanel {
  PanelDataset panel;
  SynthTruth truth;
};

/// Simulates the integrated model forward on the transformed scale with the
/// ground-truth parameters, adds Gaussian noise, inverts the transforms and
/// rounds to non-negative integer counts. The rounded value is fed back into
/// the dynamics, so with sigma = 0 every generated count is the model's own
/// teacher-forced forecast to within +-0.5. Climate follows annual sinusoids
/// with tmin <= tmean <= tmax. Deterministic given cfg.seed.
SynthPanel gen_panel(const SynthConfig& cfg);

/// The ground-truth dynamics used when SynthConfig.truth is absent.
ModelParams default_truth(int hidden, int embed_dim, std::uint64_t seed);

/// Simulates an ARMA(p,q) recursion with seeded Gaussian shocks (after a
/// burn-in) and integrates d times. Rejects non-stationary/non-invertible
/// coefficients. Returns n values.
std::vector<double> gen_arima_path(double intercept,
                                   std::span<const double> phi,
                                   std::span<const double> theta, int d, int n,
                                   double sigma, std::uint64_t seed);

/// Writes cases.csv / climate.csv / adjacency.csv in the formats the loaders
/// read back exactly.
void write_panel_csvs(const PanelDataset& ds,
                      const std::filesystem::path& dir);

}  // namespace stcast
