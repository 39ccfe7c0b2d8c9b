#include <CLI11.hpp>

#include "commands.hpp"

using stcast::cli::Options;

namespace {

/// Registers the flags shared by every subcommand. Returns the list of keys
/// to track so config-file values never override explicit flags.
void add_common(CLI::App* cmd, Options& opts, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--variant", opts.variant, "model variant (1 or 2)")
      ->check(CLI::Range(1, 2));
  cmd->add_option("--split", [&opts](const CLI::results_t& res) {
    opts.split = res[0];
    return true;
  }, "last training month, YYYY-MM");
}

void add_data(CLI::App* cmd, Options& opts) {
  cmd->add_option("--cases", opts.cases, "cases CSV");
  cmd->add_option("--climate", opts.climate, "climate CSV");
  cmd->add_option("--adjacency", opts.adjacency, "adjacency CSV");
  cmd->add_option("--region", [&opts](const CLI::results_t& res) {
    opts.region = res[0];
    return true;
  }, "restrict to one region");
}

void add_training(CLI::App* cmd, Options& opts) {
  cmd->add_option("--epochs", opts.epochs, "training epochs");
  cmd->add_option("--lr", opts.lr, "Adam learning rate");
  cmd->add_option("--hidden", opts.hidden, "LSTM hidden size");
  cmd->add_option("--embed-dim", opts.embed_dim, "month embedding dimension");
  cmd->add_option("--init-scale", opts.init_scale, "uniform init half-width");
}

std::vector<std::string> passed_keys(CLI::App* cmd) {
  // Map long flag names to Options field keys for the config overlay.
  static const std::vector<std::pair<std::string, std::string>> kMap = {
      {"--cases", "cases"},           {"--climate", "climate"},
      {"--adjacency", "adjacency"},   {"--out", "out"},
      {"--split", "split"},           {"--variant", "variant"},
      {"--seed", "seed"},             {"--epochs", "epochs"},
      {"--lr", "lr"},                 {"--hidden", "hidden"},
      {"--embed-dim", "embed_dim"},   {"--init-scale", "init_scale"},
      {"--region", "region"},         {"--regions", "synth_regions"},
      {"--months", "synth_months"},   {"--train-months", "synth_train_months"},
      {"--pattern", "synth_pattern"}, {"--sigma", "synth_sigma"},
      {"--start", "synth_start"},     {"--arima-p", "arima_p"},
      {"--arima-d", "arima_d"},       {"--arima-q", "arima_q"},
  };
  std::vector<std::string> keys;
  for (const auto& [flag, key] : kMap) {
    const auto* opt = cmd->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) keys.push_back(key);
  }
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal monthly count forecasting toolkit"};
  app.require_subcommand(1);

  Options opts;
  std::string config_path;

  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic panel (CSV files + ground truth)");
  add_common(synth, opts, config_path);
  synth->add_option("--regions", opts.synth_regions, "number of regions");
  synth->add_option("--months", opts.synth_months, "total months");
  synth->add_option("--train-months", opts.synth_train_months,
                    "training months");
  synth->add_option("--pattern", opts.synth_pattern,
                    "adjacency pattern: ring|grid|complete");
  synth->add_option("--sigma", opts.synth_sigma,
                    "noise sigma on the transformed scale");
  synth->add_option("--start", opts.synth_start, "first month, YYYY-MM");

  auto* train = app.add_subcommand("train", "Train one model per region");
  add_common(train, opts, config_path);
  add_data(train, opts);
  add_training(train, opts);

  auto* forecast = app.add_subcommand(
      "forecast", "One-step-ahead test forecasts from a checkpoint");
  add_common(forecast, opts, config_path);
  add_data(forecast, opts);
  forecast->add_option("--checkpoint", opts.checkpoint, "model checkpoint")
      ->required();

  auto* evaluate = app.add_subcommand(
      "evaluate", "Test-window RMSE/MAE for a checkpoint");
  add_common(evaluate, opts, config_path);
  add_data(evaluate, opts);
  evaluate->add_option("--checkpoint", opts.checkpoint, "model checkpoint")
      ->required();

  auto* compare = app.add_subcommand(
      "compare", "Side-by-side report: variant 1, variant 2 and ARIMA");
  add_common(compare, opts, config_path);
  add_data(compare, opts);
  add_training(compare, opts);
  compare->add_option("--model1", opts.checkpoint1,
                      "variant-1 checkpoint (trains in place when absent)");
  compare->add_option("--model2", opts.checkpoint2,
                      "variant-2 checkpoint (trains in place when absent)");
  compare->add_option("--arima-p", opts.arima_p, "ARIMA AR order");
  compare->add_option("--arima-d", opts.arima_d, "ARIMA differences");
  compare->add_option("--arima-q", opts.arima_q, "ARIMA MA order");
  compare->add_flag("--svg", opts.svg, "emit a line chart per region");

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Compare analytic gradients against finite differences");
  add_common(gradcheck, opts, config_path);
  add_training(gradcheck, opts);
  gradcheck->add_option("--tol", opts.gradcheck_tol, "max relative error");
  gradcheck->add_option("--steps", opts.gradcheck_steps, "sequence length");
  gradcheck->add_flag("--corrupt", opts.gradcheck_corrupt,
                      "corrupt one analytic tensor (test hook)");

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = app.get_subcommands().front();
  return stcast::cli::run_guarded([&]() -> int {
    if (!config_path.empty()) {
      stcast::cli::apply_config_file(opts, config_path, passed_keys(active));
    }
    if (active == synth) return stcast::cli::cmd_synth(opts);
    if (active == train) return stcast::cli::cmd_train(opts);
    if (active == forecast) return stcast::cli::cmd_forecast(opts);
    if (active == evaluate) return stcast::cli::cmd_evaluate(opts);
    if (active == compare) return stcast::cli::cmd_compare(opts);
    return stcast::cli::cmd_gradcheck(opts);
  });
}
