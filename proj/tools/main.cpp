// SPDX-License-Identifier: Apache-2.0
//
// clcrn: one binary for the full pipeline. Subcommands: generate, train,
// evaluate, inspect-kernel, graph-info. Exit codes: 0 success, 2 usage or
// configuration error, 3 numerical failure.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clcrn/checkpoint.hpp"
#include "clcrn/clcrn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDegToRad = kPi / 180.0;

/// Optional JSON config file. Command-line flags win; file values fill in
/// anything the user did not pass explicitly.
struct FileConfig {
  json j = json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw clcrn::MissingFile("cannot open config file " + path);
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw clcrn::ConfigError(path + ": " + e.what());
    }
  }

  template <typename T>
  void apply(const CLI::App& app, const std::string& flag,
             const std::string& key, T& target) const {
    if (app.get_option(flag)->count() == 0 && j.contains(key)) {
      try {
        target = j.at(key).get<T>();
      } catch (const json::exception& e) {
        throw clcrn::ConfigError("config key '" + key + "': " + e.what());
      }
    }
  }
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CLCRN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library default: hardware concurrency
}

std::string meta_path_of(const std::string& data) {
  if (fs::is_directory(data)) return (fs::path(data) / "meta.json").string();
  return data;
}

void write_resolved_config(const std::string& out_dir, const json& cfg) {
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "config.json");
  out << cfg.dump(2) << "\n";
}

/// Rebuilds a trained model from a checkpoint against a dataset's geometry.
clcrn::Seq2SeqModel model_from_checkpoint(const clcrn::Checkpoint& ckpt,
                                          const clcrn::Dataset& ds) {
  const json& cfg_json = ckpt.config;
  const clcrn::ModelConfig cfg =
      clcrn::model_config_from_json(cfg_json.at("model"));
  if (cfg_json.at("num_nodes").get<int>() != ds.num_nodes) {
    throw clcrn::ConfigError(
        "checkpoint was trained on " +
        std::to_string(cfg_json.at("num_nodes").get<int>()) +
        " nodes but the dataset has " + std::to_string(ds.num_nodes));
  }
  if (cfg.signal_dim != ds.dim) {
    throw clcrn::ConfigError("checkpoint signal_dim " +
                             std::to_string(cfg.signal_dim) +
                             " does not match dataset dim " +
                             std::to_string(ds.dim));
  }
  clcrn::Seq2SeqModel model(cfg, ds.points, 0);
  clcrn::ParamStore& ps = model.params();
  if (ps.size() != ckpt.params.size()) {
    throw clcrn::ConfigError("checkpoint holds " +
                             std::to_string(ckpt.params.size()) +
                             " parameters, model expects " +
                             std::to_string(ps.size()));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const int idx = static_cast<int>(i);
    const auto& src = ckpt.params.value(idx);
    if (ckpt.params.name(idx) != ps.name(idx) ||
        src.shape != ps.value(idx).shape) {
      throw clcrn::ConfigError("checkpoint parameter " + ckpt.params.name(idx) +
                               " does not match the model layout");
    }
    ps.value(idx) = src;
  }
  return model;
}

/// Kernel parameters alone, without rebuilding the full model.
clcrn::CondLocalKernel kernel_from_checkpoint(const clcrn::Checkpoint& ckpt) {
  const clcrn::ModelConfig cfg =
      clcrn::model_config_from_json(ckpt.config.at("model"));
  clcrn::CondLocalKernel k;
  k.components = cfg.components;
  for (int l = 0;; ++l) {
    const int wi = ckpt.params.index_of("kernel.w" + std::to_string(l));
    const int bi = ckpt.params.index_of("kernel.b" + std::to_string(l));
    if (wi < 0 || bi < 0) break;
    k.weights.push_back(ckpt.params.value(wi));
    k.biases.push_back(ckpt.params.value(bi));
  }
  const int ti = ckpt.params.index_of("kernel.tau_raw");
  if (k.weights.empty() || ti < 0) {
    throw clcrn::ConfigError("checkpoint holds no kernel parameters");
  }
  k.tau_raw = ckpt.params.value(ti);
  return k;
}

void print_metrics_table(const std::vector<clcrn::MetricsRow>& rows,
                         const std::vector<clcrn::MetricsRow>& baseline) {
  std::printf("%8s %12s %12s %12s %12s %12s\n", "horizon", "mae", "rmse_paper",
              "rmse_conv", "mape", "baseline");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("%8d %12.6f %12.6f %12.6f %12.6f %12.6f\n", rows[i].horizon,
                rows[i].mae, rows[i].rmse_paper, rows[i].rmse_conventional,
                rows[i].mape, baseline[i].mae);
  }
}

void write_metrics_csv(const std::string& path,
                       const std::vector<clcrn::MetricsRow>& rows,
                       const std::vector<clcrn::MetricsRow>& baseline) {
  std::ofstream out(path);
  out << "horizon,mae,rmse_paper,rmse_conventional,mape,baseline_mae\n";
  char buf[192];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  rows[i].horizon, rows[i].mae, rows[i].rmse_paper,
                  rows[i].rmse_conventional, rows[i].mape, baseline[i].mae);
    out << buf;
  }
}

clcrn::Split split_from_string(const std::string& name) {
  if (name == "train") return clcrn::Split::kTrain;
  if (name == "val") return clcrn::Split::kVal;
  if (name == "test") return clcrn::Split::kTest;
  throw clcrn::ConfigError("unknown split '" + name + "' (train|val|test)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional local convolution recurrent network for spherical "
               "signal forecasting"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- generate
  auto* gen = app.add_subcommand("generate",
                                 "Generate a synthetic advection-diffusion "
                                 "dataset on a Fibonacci sphere lattice");
  std::string gen_config, gen_out = "synth";
  int gen_nodes = 200;
  clcrn::AdvectionParams adv;
  int gen_input_len = 12, gen_horizon = 12;
  gen->add_option("--config", gen_config, "JSON config file");
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--nodes", gen_nodes, "Number of lattice nodes (>= 16)")
      ->capture_default_str();
  gen->add_option("--steps", adv.steps, "Frames to simulate")
      ->capture_default_str();
  gen->add_option("--seed", adv.seed, "RNG seed")->capture_default_str();
  gen->add_option("--kappa", adv.kappa, "Diffusion strength per step")
      ->capture_default_str();
  gen->add_option("--alpha", adv.alpha, "Directional drift strength")
      ->capture_default_str();
  gen->add_option("--drift-bearing", adv.drift_bearing,
                  "Preferred bearing in radians (0 = east)")
      ->capture_default_str();
  gen->add_option("--knn", adv.knn, "Neighbor count of the dynamics stencil")
      ->capture_default_str();
  gen->add_option("--bumps", adv.bumps, "Gaussian bumps in the initial field")
      ->capture_default_str();
  gen->add_flag("--symmetrize", adv.symmetrize,
                "Symmetric stencil weights (mass-conserving diffusion)");
  gen->add_option("--train-frac", adv.train_frac, "Training split fraction")
      ->capture_default_str();
  gen->add_option("--val-frac", adv.val_frac, "Validation split fraction")
      ->capture_default_str();
  gen->add_option("--input-len", gen_input_len, "Window input length")
      ->capture_default_str();
  gen->add_option("--horizon", gen_horizon, "Window forecast horizon")
      ->capture_default_str();
  gen->callback([&] {
    FileConfig fc;
    if (!gen_config.empty()) fc.load(gen_config);
    fc.apply(*gen, "--out", "out", gen_out);
    fc.apply(*gen, "--nodes", "nodes", gen_nodes);
    fc.apply(*gen, "--steps", "steps", adv.steps);
    fc.apply(*gen, "--seed", "seed", adv.seed);
    fc.apply(*gen, "--kappa", "kappa", adv.kappa);
    fc.apply(*gen, "--alpha", "alpha", adv.alpha);
    fc.apply(*gen, "--drift-bearing", "drift_bearing", adv.drift_bearing);
    fc.apply(*gen, "--knn", "knn", adv.knn);
    fc.apply(*gen, "--bumps", "bumps", adv.bumps);
    fc.apply(*gen, "--symmetrize", "symmetrize", adv.symmetrize);
    fc.apply(*gen, "--train-frac", "train_frac", adv.train_frac);
    fc.apply(*gen, "--val-frac", "val_frac", adv.val_frac);
    fc.apply(*gen, "--input-len", "input_len", gen_input_len);
    fc.apply(*gen, "--horizon", "horizon", gen_horizon);

    double margin = 0.0;
    clcrn::Dataset ds = clcrn::gen_synthetic(gen_nodes, adv, &margin);
    ds.input_len = gen_input_len;
    ds.horizon = gen_horizon;
    clcrn::save_dataset(ds, gen_out);

    json resolved{{"command", "generate"},
                  {"out", gen_out},
                  {"nodes", gen_nodes},
                  {"steps", adv.steps},
                  {"seed", adv.seed},
                  {"kappa", adv.kappa},
                  {"alpha", adv.alpha},
                  {"drift_bearing", adv.drift_bearing},
                  {"knn", adv.knn},
                  {"bumps", adv.bumps},
                  {"symmetrize", adv.symmetrize},
                  {"train_frac", adv.train_frac},
                  {"val_frac", adv.val_frac},
                  {"input_len", gen_input_len},
                  {"horizon", gen_horizon}};
    write_resolved_config(gen_out, resolved);
    std::printf("nodes=%d frames=%d stability_margin=%.6f\n", ds.num_nodes,
                ds.num_frames, margin);
  });

  // ------------------------------------------------------------------- train
  auto* tr = app.add_subcommand("train", "Train a CLC-GRU forecaster");
  std::string tr_config, tr_data, tr_out = "run";
  std::string tr_map = "horizon", tr_components = "mlp,angle,distance";
  std::string tr_tf = "scheduled";
  clcrn::ModelConfig mcfg;
  clcrn::TrainConfig tcfg;
  int tr_threads = 0;
  bool tr_window_flags[2] = {false, false};
  tr->add_option("--config", tr_config, "JSON config file");
  tr->add_option("--data", tr_data, "Dataset directory or meta.json path")
      ->required();
  tr->add_option("--out", tr_out, "Run directory")->capture_default_str();
  tr->add_option("--hidden", mcfg.hidden, "Hidden state width")
      ->capture_default_str();
  tr->add_option("--layers", mcfg.layers, "Stacked GRU layers")
      ->capture_default_str();
  tr->add_option("--input-len", mcfg.input_len,
                 "Encoder length (default: dataset window)")
      ->capture_default_str();
  tr->add_option("--horizon", mcfg.horizon,
                 "Decoder length (default: dataset window)")
      ->capture_default_str();
  tr->add_option("--k", mcfg.k, "Graph neighbor count")->capture_default_str();
  tr->add_option("--map", tr_map, "Local coordinate map: horizon|log|fast")
      ->capture_default_str();
  tr->add_option("--kernel-components", tr_components,
                 "Active kernel factors, subset of mlp,angle,distance")
      ->capture_default_str();
  tr->add_option("--heads", mcfg.heads, "Kernel heads")->capture_default_str();
  tr->add_option("--epochs", tcfg.epochs, "Training epochs")
      ->capture_default_str();
  tr->add_option("--batch-size", tcfg.batch_size, "Windows per update")
      ->capture_default_str();
  tr->add_option("--lr", tcfg.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--lr-decay", tcfg.lr_decay,
                 "Decay factor applied every 10 epochs in the first 50")
      ->capture_default_str();
  tr->add_option("--clip-norm", tcfg.clip_norm, "Global gradient norm cap")
      ->capture_default_str();
  tr->add_option("--teacher-forcing", tr_tf,
                 "Decoder feeding: always|never|scheduled")
      ->capture_default_str();
  tr->add_option("--tf-c", tcfg.tf_c, "Scheduled-sampling constant")
      ->capture_default_str();
  tr->add_option("--patience", tcfg.patience,
                 "Early-stopping patience in epochs (0 = off)")
      ->capture_default_str();
  tr->add_option("--seed", tcfg.seed, "RNG seed")->capture_default_str();
  tr->add_option("--max-windows", tcfg.max_windows_per_epoch,
                 "Cap on training windows per epoch (0 = all)")
      ->capture_default_str();
  tr->add_option("--threads", tr_threads,
                 "Worker threads (0 = cores; env CLCRN_THREADS as fallback)")
      ->capture_default_str();
  tr->callback([&] {
    FileConfig fc;
    if (!tr_config.empty()) fc.load(tr_config);
    fc.apply(*tr, "--data", "data", tr_data);
    fc.apply(*tr, "--out", "out", tr_out);
    fc.apply(*tr, "--hidden", "hidden", mcfg.hidden);
    fc.apply(*tr, "--layers", "layers", mcfg.layers);
    fc.apply(*tr, "--k", "k", mcfg.k);
    fc.apply(*tr, "--map", "map", tr_map);
    fc.apply(*tr, "--kernel-components", "kernel_components", tr_components);
    fc.apply(*tr, "--heads", "heads", mcfg.heads);
    fc.apply(*tr, "--epochs", "epochs", tcfg.epochs);
    fc.apply(*tr, "--batch-size", "batch_size", tcfg.batch_size);
    fc.apply(*tr, "--lr", "lr", tcfg.lr);
    fc.apply(*tr, "--lr-decay", "lr_decay", tcfg.lr_decay);
    fc.apply(*tr, "--clip-norm", "clip_norm", tcfg.clip_norm);
    fc.apply(*tr, "--teacher-forcing", "teacher_forcing", tr_tf);
    fc.apply(*tr, "--tf-c", "tf_c", tcfg.tf_c);
    fc.apply(*tr, "--patience", "patience", tcfg.patience);
    fc.apply(*tr, "--seed", "seed", tcfg.seed);
    fc.apply(*tr, "--max-windows", "max_windows", tcfg.max_windows_per_epoch);
    fc.apply(*tr, "--threads", "threads", tr_threads);
    tr_window_flags[0] = tr->get_option("--input-len")->count() > 0 ||
                         fc.j.contains("input_len");
    tr_window_flags[1] = tr->get_option("--horizon")->count() > 0 ||
                         fc.j.contains("horizon");
    fc.apply(*tr, "--input-len", "input_len", mcfg.input_len);
    fc.apply(*tr, "--horizon", "horizon", mcfg.horizon);

    clcrn::Dataset ds = clcrn::load_dataset(meta_path_of(tr_data));
    if (tr_window_flags[0]) ds.input_len = mcfg.input_len;
    if (tr_window_flags[1]) ds.horizon = mcfg.horizon;
    mcfg.input_len = ds.input_len;
    mcfg.horizon = ds.horizon;
    mcfg.signal_dim = ds.dim;
    mcfg.map = clcrn::map_kind_from_string(tr_map);
    mcfg.components = clcrn::components_from_string(tr_components);
    tcfg.teacher_forcing = clcrn::teacher_forcing_from_string(tr_tf);
    tcfg.threads = resolve_threads(tr_threads);

    clcrn::Seq2SeqModel model(mcfg, ds.points, tcfg.seed);
    const clcrn::TrainResult result = clcrn::train(model, ds, tcfg);

    fs::create_directories(tr_out);
    {
      std::ofstream loss(fs::path(tr_out) / "loss.csv");
      clcrn::write_loss_csv(loss, result.history);
    }
    json ckpt_cfg{{"model", clcrn::model_config_to_json(mcfg)},
                  {"num_nodes", ds.num_nodes},
                  {"seed", tcfg.seed}};
    clcrn::save_checkpoint((fs::path(tr_out) / "model.ckpt").string(),
                           ckpt_cfg, model.params());

    json resolved{{"command", "train"},
                  {"data", tr_data},
                  {"out", tr_out},
                  {"model", clcrn::model_config_to_json(mcfg)},
                  {"epochs", tcfg.epochs},
                  {"batch_size", tcfg.batch_size},
                  {"lr", tcfg.lr},
                  {"lr_decay", tcfg.lr_decay},
                  {"clip_norm", tcfg.clip_norm},
                  {"teacher_forcing", tr_tf},
                  {"tf_c", tcfg.tf_c},
                  {"patience", tcfg.patience},
                  {"seed", tcfg.seed},
                  {"max_windows", tcfg.max_windows_per_epoch},
                  {"threads", tcfg.threads}};
    write_resolved_config(tr_out, resolved);

    for (const auto& row : result.history) {
      std::printf("epoch %3d  train_mae %.6f  val_mae %.6f\n", row.epoch,
                  row.train_mae, row.val_mae);
    }
    std::printf("best epoch %d  val_mae %.6f\n", result.best_epoch,
                result.best_val_mae);
  });

  // ---------------------------------------------------------------- evaluate
  auto* ev = app.add_subcommand("evaluate",
                                "Score a checkpoint on a dataset split");
  std::string ev_config, ev_ckpt, ev_data, ev_out = "run", ev_split = "test";
  std::vector<int> ev_horizons{3, 6, 12};
  int ev_threads = 0;
  ev->add_option("--config", ev_config, "JSON config file");
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint path")->required();
  ev->add_option("--data", ev_data, "Dataset directory or meta.json path")
      ->required();
  ev->add_option("--out", ev_out, "Output directory")->capture_default_str();
  ev->add_option("--split", ev_split, "Split to score: train|val|test")
      ->capture_default_str();
  ev->add_option("--horizons", ev_horizons, "Lead times to report")
      ->delimiter(',')
      ->capture_default_str();
  ev->add_option("--threads", ev_threads,
                 "Worker threads (0 = cores; env CLCRN_THREADS as fallback)")
      ->capture_default_str();
  ev->callback([&] {
    FileConfig fc;
    if (!ev_config.empty()) fc.load(ev_config);
    fc.apply(*ev, "--checkpoint", "checkpoint", ev_ckpt);
    fc.apply(*ev, "--data", "data", ev_data);
    fc.apply(*ev, "--out", "out", ev_out);
    fc.apply(*ev, "--split", "split", ev_split);
    fc.apply(*ev, "--horizons", "horizons", ev_horizons);
    fc.apply(*ev, "--threads", "threads", ev_threads);

    clcrn::Dataset ds = clcrn::load_dataset(meta_path_of(ev_data));
    const clcrn::Checkpoint ckpt = clcrn::load_checkpoint(ev_ckpt);
    const clcrn::Seq2SeqModel model = model_from_checkpoint(ckpt, ds);
    ds.input_len = model.config().input_len;
    ds.horizon = model.config().horizon;
    const clcrn::Split split = split_from_string(ev_split);
    const int threads = resolve_threads(ev_threads);

    const std::vector<clcrn::MetricsRow> rows =
        clcrn::evaluate(model, ds, split, ev_horizons, threads);
    const std::vector<clcrn::MetricsRow> baseline =
        clcrn::persistence_baseline(ds, split, ev_horizons);
    print_metrics_table(rows, baseline);

    fs::create_directories(ev_out);
    write_metrics_csv((fs::path(ev_out) / "metrics.csv").string(), rows,
                      baseline);
    json resolved{{"command", "evaluate"}, {"checkpoint", ev_ckpt},
                  {"data", ev_data},       {"out", ev_out},
                  {"split", ev_split},     {"horizons", ev_horizons},
                  {"threads", threads}};
    write_resolved_config(ev_out, resolved);
  });

  // ---------------------------------------------------------- inspect-kernel
  auto* ik = app.add_subcommand(
      "inspect-kernel", "Dump learned kernel weights on a grid of relative "
                        "positions around given centers");
  std::string ik_config, ik_ckpt, ik_out = "run";
  std::vector<std::string> ik_centers;
  int ik_resolution = 25;
  double ik_radius = kPi / 2.0;
  ik->add_option("--config", ik_config, "JSON config file");
  ik->add_option("--checkpoint", ik_ckpt, "Checkpoint path")->required();
  ik->add_option("--center", ik_centers,
                 "Center as lat_deg,lon_deg (repeatable)")
      ->required();
  ik->add_option("--out", ik_out, "Output directory")->capture_default_str();
  ik->add_option("--resolution", ik_resolution, "Grid points per axis")
      ->capture_default_str();
  ik->add_option("--radius", ik_radius, "Grid half-width in radians")
      ->capture_default_str();
  ik->callback([&] {
    FileConfig fc;
    if (!ik_config.empty()) fc.load(ik_config);
    fc.apply(*ik, "--checkpoint", "checkpoint", ik_ckpt);
    fc.apply(*ik, "--center", "centers", ik_centers);
    fc.apply(*ik, "--out", "out", ik_out);
    fc.apply(*ik, "--resolution", "resolution", ik_resolution);
    fc.apply(*ik, "--radius", "radius", ik_radius);

    const clcrn::Checkpoint ckpt = clcrn::load_checkpoint(ik_ckpt);
    const clcrn::CondLocalKernel kernel = kernel_from_checkpoint(ckpt);

    fs::create_directories(ik_out);
    for (const std::string& spec : ik_centers) {
      double lat = 0.0, lon = 0.0;
      if (std::sscanf(spec.c_str(), "%lf,%lf", &lat, &lon) != 2) {
        throw clcrn::ConfigError("center '" + spec +
                                 "' is not of the form lat_deg,lon_deg");
      }
      const clcrn::SpherePoint center =
          clcrn::SpherePoint::from_lat_lon(lat * kDegToRad, lon * kDegToRad);
      if (center.is_pole()) {
        throw clcrn::ConfigError(
            "center '" + spec +
            "' is a pole; pole neighborhoods use the fixed convention "
            "phi_rel = 0, z_rel = +-distance and have no kernel grid");
      }
      const std::vector<clcrn::KernelGridRow> rows =
          clcrn::kernel_grid_dump(kernel, center, ik_resolution, ik_radius);
      char name[96];
      std::snprintf(name, sizeof(name), "kernel_%g_%g.csv", lat, lon);
      std::ofstream out(fs::path(ik_out) / name);
      clcrn::write_kernel_grid_csv(out, rows);
      std::printf("%s: %zu rows\n", name, rows.size());
    }
    json resolved{{"command", "inspect-kernel"}, {"checkpoint", ik_ckpt},
                  {"centers", ik_centers},       {"out", ik_out},
                  {"resolution", ik_resolution}, {"radius", ik_radius}};
    write_resolved_config(ik_out, resolved);
  });

  // -------------------------------------------------------------- graph-info
  auto* gi = app.add_subcommand("graph-info",
                                "Print K-NN graph statistics for a dataset or "
                                "a synthetic lattice");
  std::string gi_data;
  int gi_nodes = 0, gi_k = 8;
  gi->add_option("--data", gi_data, "Dataset directory or meta.json path");
  gi->add_option("--nodes", gi_nodes,
                 "Fibonacci lattice size (alternative to --data)");
  gi->add_option("--k", gi_k, "Neighbor count")->capture_default_str();
  gi->callback([&] {
    std::vector<clcrn::SpherePoint> points;
    if (!gi_data.empty()) {
      points = clcrn::load_dataset(meta_path_of(gi_data)).points;
    } else if (gi_nodes > 0) {
      points = clcrn::fibonacci_lattice(gi_nodes);
    } else {
      throw clcrn::ConfigError("graph-info needs --data or --nodes");
    }
    const clcrn::SphericalGraph graph = clcrn::knn_graph(points, gi_k);
    double min_d = 1e300, max_d = 0.0, sum_d = 0.0;
    long edges = 0;
    for (int i = 0; i < graph.num_nodes(); ++i) {
      for (int j : graph.neighbors[i]) {
        if (j == i) continue;
        const double d = clcrn::geodesic_distance(points[i], points[j]);
        min_d = std::min(min_d, d);
        max_d = std::max(max_d, d);
        sum_d += d;
        ++edges;
      }
    }
    std::printf("nodes=%d k=%d degree=%d (plus self-loop)\n",
                graph.num_nodes(), graph.k, graph.k);
    std::printf("neighbor distance: min=%.6f mean=%.6f max=%.6f rad\n", min_d,
                sum_d / static_cast<double>(edges), max_d);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const clcrn::Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const clcrn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
