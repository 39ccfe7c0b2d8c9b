#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stcast::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Merged view of config-file values and command-line flags (flags win).
struct Options {
  std::filesystem::path cases = "cases.csv";
  std::filesystem::path climate = "climate.csv";
  std::filesystem::path adjacency = "adjacency.csv";
  std::filesystem::path out = ".";
  std::optional<std::string> split;  // YYYY-MM, last training month
  int variant = 2;
  std::uint64_t seed = 0;
  int epochs = 500;
  double lr = 0.01;
  int hidden = 8;
  int embed_dim = 4;
  double init_scale = 0.1;
  std::optional<std::string> region;  // restrict to one region

  int arima_p = 2;
  int arima_d = 1;
  int arima_q = 1;

  int synth_regions = 5;
  int synth_months = 69;
  int synth_train_months = 51;
  std::string synth_pattern = "ring";
  double synth_sigma = 0.15;
  std::string synth_start = "2013-06";

  std::optional<std::filesystem::path> checkpoint;   // forecast / evaluate
  std::optional<std::filesystem::path> checkpoint1;  // compare, variant 1
  std::optional<std::filesystem::path> checkpoint2;  // compare, variant 2
  bool svg = false;

  double gradcheck_tol = 1e-4;
  int gradcheck_steps = 20;
  bool gradcheck_corrupt = false;  // fault-injection hook for tests
};

/// Overlays values from a JSON config file onto `opts`, skipping any key
/// listed in `cli_set` (those came from explicit flags and win).
void apply_config_file(Options& opts, const std::filesystem::path& config,
                       const std::vector<std::string>& cli_set);

int cmd_synth(const Options& opts);
int cmd_train(const Options& opts);
int cmd_forecast(const Options& opts);
int cmd_evaluate(const Options& opts);
int cmd_compare(const Options& opts);
int cmd_gradcheck(const Options& opts);

/// Maps exceptions from a command body onto exit codes.
int run_guarded(const std::function<int()>& body);

}  // namespace stcast::cli
