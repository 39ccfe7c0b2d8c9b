#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "stcast/arima.hpp"
#include "stcast/checkpoint.hpp"
#include "stcast/data.hpp"
#include "stcast/eval.hpp"
#include "stcast/rng.hpp"
#include "stcast/synth.hpp"
#include "stcast/train.hpp"
#include "svg.hpp"

namespace stcast::cli {

namespace {

using nlohmann::json;

PanelDataset load_panel(const Options& opts, const YearMonth& split) {
  const CaseTable cases = load_cases(opts.cases);
  const ClimateTable climate = load_climate(opts.climate);
  const AdjacencyGraph graph = load_adjacency(opts.adjacency);
  return assemble(cases, climate, graph, split);
}

YearMonth required_split(const Options& opts) {
  if (!opts.split) {
    throw ValidationError("missing --split (last training month, YYYY-MM)");
  }
  return YearMonth::parse(*opts.split);
}

TrainConfig train_config(const Options& opts) {
  TrainConfig cfg;
  cfg.epochs = opts.epochs;
  cfg.lr = opts.lr;
  cfg.seed = opts.seed;
  cfg.hidden = opts.hidden;
  cfg.embed_dim = opts.embed_dim;
  cfg.variant = opts.variant == 1 ? ModelVariant::base
                                  : ModelVariant::integrated;
  cfg.init_scale = opts.init_scale;
  if (opts.variant != 1 && opts.variant != 2) {
    throw ValidationError("variant must be 1 or 2");
  }
  return cfg;
}

std::vector<int> selected_regions(const PanelDataset& ds,
                                  const Options& opts) {
  if (!opts.region) {
    std::vector<int> all(ds.regions.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return all;
  }
  const int idx = ds.region_index(*opts.region);
  if (idx < 0) {
    throw ValidationError("unknown region '" + *opts.region + "'");
  }
  return {idx};
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

/// Trains every selected region and assembles the checkpoint. Per-region
/// seeds are derived from the base seed so regions get independent streams.
Checkpoint train_all(const PanelDataset& ds, const TransformState& ts,
                     const Options& opts, const std::vector<int>& regions,
                     std::vector<std::vector<double>>* curves) {
  const TrainConfig base_cfg = train_config(opts);
  Checkpoint ck;
  ck.variant = base_cfg.variant;
  ck.hidden = base_cfg.hidden;
  ck.embed_dim = base_cfg.embed_dim;
  ck.seed = opts.seed;
  ck.epochs = base_cfg.epochs;
  ck.lr = base_cfg.lr;
  ck.init_scale = base_cfg.init_scale;
  ck.split = ds.month(ds.train_months - 1);
  ck.transform = ts;
  for (int r : regions) {
    TrainConfig cfg = base_cfg;
    cfg.seed = opts.seed + static_cast<std::uint64_t>(r);
    TrainResult res = train_region(ds, r, cfg, ts);
    if (curves) curves->push_back(res.loss_curve);
    std::cout << "trained " << ds.regions[r]
              << " final_loss=" << res.final_loss << "\n";
    ck.models.emplace_back(ds.regions[r], std::move(res.params));
  }
  return ck;
}

void write_loss_curves(const PanelDataset& ds, const std::vector<int>& regions,
                       const std::vector<std::vector<double>>& curves,
                       const std::filesystem::path& out_dir) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    std::string csv = "epoch,loss\n";
    for (std::size_t e = 0; e < curves[i].size(); ++e) {
      csv += std::to_string(e) + "," + format_double(curves[i][e]) + "\n";
    }
    write_text_file(out_dir / ("loss_" + ds.regions[regions[i]] + ".csv"),
                    csv);
  }
}

std::string prediction_csv(const PanelDataset& ds, int region,
                           const std::vector<std::string>& headers,
                           const std::vector<const std::vector<double>*>& cols) {
  std::string out = "month,actual";
  for (const auto& h : headers) out += "," + h;
  out += "\n";
  for (int t = ds.train_months; t < ds.total_months; ++t) {
    const int i = t - ds.train_months;
    out += ds.month(t).str() + "," +
           format_double(ds.cases[region][t]);
    for (const auto* col : cols) out += "," + format_double((*col)[i]);
    out += "\n";
  }
  return out;
}

}  // namespace

void apply_config_file(Options& opts, const std::filesystem::path& config,
                       const std::vector<std::string>& cli_set) {
  std::ifstream in(config);
  if (!in) throw IoError("cannot open config " + config.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + config.string() + ": " + e.what());
  }
  auto taken = [&](const std::string& key) {
    return std::find(cli_set.begin(), cli_set.end(), key) != cli_set.end();
  };
  auto set_str = [&](const char* key, auto&& apply) {
    if (j.contains(key) && !taken(key)) apply(j[key].get<std::string>());
  };
  auto set_num = [&](const char* key, auto& field) {
    if (j.contains(key) && !taken(key)) {
      field = j[key].get<std::decay_t<decltype(field)>>();
    }
  };
  set_str("cases", [&](const std::string& v) { opts.cases = v; });
  set_str("climate", [&](const std::string& v) { opts.climate = v; });
  set_str("adjacency", [&](const std::string& v) { opts.adjacency = v; });
  set_str("out", [&](const std::string& v) { opts.out = v; });
  set_str("split", [&](const std::string& v) { opts.split = v; });
  set_str("region", [&](const std::string& v) { opts.region = v; });
  set_num("variant", opts.variant);
  set_num("seed", opts.seed);
  set_num("epochs", opts.epochs);
  set_num("lr", opts.lr);
  set_num("hidden", opts.hidden);
  set_num("embed_dim", opts.embed_dim);
  set_num("init_scale", opts.init_scale);
  if (j.contains("arima")) {
    const auto& a = j["arima"];
    if (a.contains("p") && !taken("arima_p")) opts.arima_p = a["p"].get<int>();
    if (a.contains("d") && !taken("arima_d")) opts.arima_d = a["d"].get<int>();
    if (a.contains("q") && !taken("arima_q")) opts.arima_q = a["q"].get<int>();
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    auto taken2 = [&](const char* key) { return taken(key); };
    if (s.contains("regions") && !taken2("synth_regions")) {
      opts.synth_regions = s["regions"].get<int>();
    }
    if (s.contains("months") && !taken2("synth_months")) {
      opts.synth_months = s["months"].get<int>();
    }
    if (s.contains("train_months") && !taken2("synth_train_months")) {
      opts.synth_train_months = s["train_months"].get<int>();
    }
    if (s.contains("pattern") && !taken2("synth_pattern")) {
      opts.synth_pattern = s["pattern"].get<std::string>();
    }
    if (s.contains("sigma") && !taken2("synth_sigma")) {
      opts.synth_sigma = s["sigma"].get<double>();
    }
    if (s.contains("start") && !taken2("synth_start")) {
      opts.synth_start = s["start"].get<std::string>();
    }
  }
}

int cmd_synth(const Options& opts) {
  SynthConfig cfg;
  cfg.regions = opts.synth_regions;
  cfg.months = opts.synth_months;
  cfg.train_months = opts.synth_train_months;
  cfg.pattern = parse_pattern(opts.synth_pattern);
  cfg.noise_sigma = opts.synth_sigma;
  cfg.seed = opts.seed;
  cfg.start = YearMonth::parse(opts.synth_start);

  const SynthPanel panel = gen_panel(cfg);
  std::filesystem::create_directories(opts.out);
  write_panel_csvs(panel.panel, opts.out);

  Checkpoint truth;
  truth.variant = ModelVariant::integrated;
  truth.hidden = panel.truth.params.hidden();
  truth.embed_dim = panel.truth.params.embed_dim();
  truth.seed = opts.seed;
  truth.epochs = 0;
  truth.lr = 0;
  truth.init_scale = 0;
  truth.split = cfg.start.plus(cfg.train_months - 1);
  truth.transform = panel.truth.transform;
  for (const auto& region : panel.panel.regions) {
    truth.models.emplace_back(region, panel.truth.params);
  }
  save_checkpoint(truth, opts.out / "truth.ckpt");

  std::cout << "wrote " << panel.panel.regions.size() << " regions x "
            << panel.panel.total_months << " months (train "
            << panel.panel.train_months << ") to " << opts.out.string()
            << "\n";
  return kExitOk;
}

int cmd_train(const Options& opts) {
  const PanelDataset ds = load_panel(opts, required_split(opts));
  const TransformState ts = TransformState::fit(ds);
  const auto regions = selected_regions(ds, opts);
  std::vector<std::vector<double>> curves;
  const Checkpoint ck = train_all(ds, ts, opts, regions, &curves);

  std::filesystem::create_directories(opts.out);
  const auto ck_path =
      opts.out / ("model_v" + std::to_string(opts.variant) + ".ckpt");
  save_checkpoint(ck, ck_path);
  write_loss_curves(ds, regions, curves, opts.out);
  std::cout << "checkpoint: " << ck_path.string() << "\n";
  return kExitOk;
}

int cmd_forecast(const Options& opts) {
  if (!opts.checkpoint) throw ValidationError("missing --checkpoint");
  const Checkpoint ck = load_checkpoint(*opts.checkpoint);
  const YearMonth split = opts.split ? YearMonth::parse(*opts.split) : ck.split;
  const PanelDataset ds = load_panel(opts, split);

  std::filesystem::create_directories(opts.out);
  for (const auto& [region, params] : ck.models) {
    const int idx = ds.region_index(region);
    if (idx < 0) {
      throw ValidationError("checkpoint region '" + region +
                            "' not in dataset");
    }
    const auto preds = rolling_forecast(params, ck.transform, ds, idx);
    write_text_file(opts.out / ("forecast_" + region + ".csv"),
                    prediction_csv(ds, idx, {"predicted"}, {&preds}));
  }
  std::cout << "forecasts written to " << opts.out.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& opts) {
  if (!opts.checkpoint) throw ValidationError("missing --checkpoint");
  const Checkpoint ck = load_checkpoint(*opts.checkpoint);
  const YearMonth split = opts.split ? YearMonth::parse(*opts.split) : ck.split;
  const PanelDataset ds = load_panel(opts, split);

  std::string csv = "region,rmse,mae\n";
  for (const auto& [region, params] : ck.models) {
    const int idx = ds.region_index(region);
    if (idx < 0) {
      throw ValidationError("checkpoint region '" + region +
                            "' not in dataset");
    }
    const auto preds = rolling_forecast(params, ck.transform, ds, idx);
    const std::vector<double> actual(ds.cases[idx].begin() + ds.train_months,
                                     ds.cases[idx].end());
    const auto errs = abs_errors(preds, actual);
    const double r = rmse(errs), m = mae(errs);
    csv += region + "," + format_double(r) + "," + format_double(m) + "\n";
    std::cout << region << " rmse=" << r << " mae=" << m << "\n";
  }
  std::filesystem::create_directories(opts.out);
  write_text_file(opts.out / "metrics.csv", csv);
  return kExitOk;
}

int cmd_compare(const Options& opts) {
  const YearMonth split = required_split(opts);
  const PanelDataset ds = load_panel(opts, split);
  const TransformState ts = TransformState::fit(ds);
  const auto regions = selected_regions(ds, opts);

  auto obtain = [&](int variant,
                    const std::optional<std::filesystem::path>& path) {
    if (path) {
      Checkpoint ck = load_checkpoint(*path);
      if (static_cast<int>(ck.variant) != variant) {
        throw ValidationError(path->string() + ": expected a variant-" +
                              std::to_string(variant) + " checkpoint");
      }
      if (ck.split != split) {
        throw ValidationError(path->string() + ": trained with split " +
                              ck.split.str() + ", compare uses " +
                              split.str());
      }
      return ck;
    }
    Options o = opts;
    o.variant = variant;
    std::cout << "training variant " << variant << " in place\n";
    return train_all(ds, ts, o, regions, nullptr);
  };
  const Checkpoint ck1 = obtain(1, opts.checkpoint1);
  const Checkpoint ck2 = obtain(2, opts.checkpoint2);

  EvalReport report;
  std::string arima_dump;
  std::filesystem::create_directories(opts.out);
  for (int r : regions) {
    const RegionId& region = ds.regions[r];
    const ModelParams* m1 = ck1.find(region);
    const ModelParams* m2 = ck2.find(region);
    if (!m1 || !m2) {
      throw ValidationError("checkpoints do not cover region '" + region +
                            "'");
    }
    const std::vector<double> train_series(
        ds.cases[r].begin(), ds.cases[r].begin() + ds.train_months);
    const ArimaModel arima =
        fit_arima(train_series,
                  ArimaOrder{opts.arima_p, opts.arima_d, opts.arima_q},
                  opts.seed);
    arima_dump += "region " + region + "\n" + arima.dump() + "\n";

    ReportRow row = compare_region(ds, r, *m1, *m2, arima, ts);
    write_text_file(
        opts.out / ("pred_" + region + ".csv"),
        prediction_csv(ds, r, {"model1", "model2", "arima"},
                       {&row.predictions[kBase], &row.predictions[kIntegrated],
                        &row.predictions[kArima]}));
    if (opts.svg) {
      std::vector<std::string> labels;
      std::vector<double> actual_all(ds.cases[r]);
      for (int t = 0; t < ds.total_months; ++t) {
        labels.push_back(ds.month(t).str());
      }
      auto padded = [&](const std::vector<double>& test_preds) {
        std::vector<double> full(ds.cases[r].begin(),
                                 ds.cases[r].begin() + ds.train_months);
        full.insert(full.end(), test_preds.begin(), test_preds.end());
        return full;
      };
      write_line_chart(
          opts.out / ("chart_" + region + ".svg"), region, labels,
          {{"actual", actual_all, "#222222", false},
           {"model1", padded(row.predictions[kBase]), "#1f77b4", false},
           {"model2", padded(row.predictions[kIntegrated]), "#d62728", false},
           {"arima", padded(row.predictions[kArima]), "#2ca02c", true}},
          ds.train_months);
    }
    report.rows.push_back(std::move(row));
  }

  const std::string text = format_report_text(report);
  write_text_file(opts.out / "report.txt", text);
  write_text_file(opts.out / "report.csv", format_report_csv(report));
  write_text_file(opts.out / "arima_models.txt", arima_dump);
  std::cout << text;
  return kExitOk;
}

int cmd_gradcheck(const Options& opts) {
  const ModelVariant variant =
      opts.variant == 1 ? ModelVariant::base : ModelVariant::integrated;
  const int steps = opts.gradcheck_steps;
  if (steps < 1) throw ValidationError("gradcheck: steps must be >= 1");

  // Build a random instance, rejecting any draw whose pre-activations sit
  // near the ReLU kink where finite differences are not trustworthy.
  ModelParams params = ModelParams::zeros(variant, opts.hidden,
                                          opts.embed_dim);
  std::vector<StepInput> inputs;
  std::vector<double> targets;
  for (std::uint64_t sub = 0;; ++sub) {
    Rng rng(opts.seed + sub * 0x51bc2399ull);
    for (auto& [name, span] : tensors(params)) {
      for (double& v : span) v = rng.uniform(-0.5, 0.5);
    }
    inputs.clear();
    targets.clear();
    for (int t = 0; t < steps; ++t) {
      StepInput in;
      in.own_prev = rng.uniform(0.0, 1.0);
      for (double& v : in.neighbor_top) v = rng.uniform(0.0, 1.0);
      in.neighbor_sum = rng.uniform(0.0, 3.0);
      if (variant == ModelVariant::integrated) {
        std::array<double, 4> climate;
        for (double& v : climate) v = rng.uniform(0.0, 1.0);
        in.climate = climate;
        in.month_id = t % 12;
      }
      inputs.push_back(in);
      targets.push_back(rng.uniform(0.0, 1.0));
    }
    const auto trace = run_forward(params, inputs);
    const bool near_kink =
        std::any_of(trace.steps.begin(), trace.steps.end(),
                    [](const StepTrace& s) {
                      return std::fabs(s.preact) < 1e-3;
                    });
    if (!near_kink) break;
    if (sub > 64) {
      throw ValidationError("gradcheck: could not find a kink-free instance");
    }
  }

  BackwardResult analytic = backward(params, inputs, targets);
  if (opts.gradcheck_corrupt) {
    analytic.grads.lstm.readout[0] += 0.5;  // fault injection
  }
  const GradientSet numeric = finite_diff_grad(params, inputs, targets, 1e-5);

  bool ok = true;
  for (const auto& [name, err] : gradient_rel_errors(analytic.grads, numeric)) {
    const bool pass = err < opts.gradcheck_tol;
    ok = ok && pass;
    std::printf("%-22s max_rel_err=%.3e  %s\n", name.c_str(), err,
                pass ? "ok" : "FAIL");
  }
  std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << "\n";
  return ok ? kExitOk : kExitValidation;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace stcast::cli
