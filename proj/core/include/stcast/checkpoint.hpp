#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stcast/nnet.hpp"
#include "stcast/transform.hpp"
#include "stcast/types.hpp"

namespace stcast {

/// Everything needed to reproduce and reuse a training run: config snapshot,
/// fitted transforms and one parameter set per region. Serialized as
/// versioned, self-describing text (tensor name, shape, row-major decimal
/// values); save -> load -> save is byte-identical.
struct Checkpoint {
  int version = 1;
  ModelVariant variant = ModelVariant::integrated;
  int hidden = 8;
  int embed_dim = 4;
  std::uint64_t seed = 0;
  int epochs = 500;
  double lr = 0.01;
  double init_scale = 0.1;
  YearMonth split;
  TransformState transform;
  std::vector<std::pair<RegionId, ModelParams>> models;  // sorted by region

  const ModelParams* find(const RegionId& r) const;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

}  // namespace stcast
