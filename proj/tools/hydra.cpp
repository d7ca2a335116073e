#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hydra/config.hpp"
#include "hydra/error.hpp"
#include "hydra/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim;
  std::string mode;
  std::string backend;
  std::string profile;
};

void add_common(CLI::App* cmd, Options& o, bool needs_data) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  auto* data = cmd->add_option("--data", o.data,
                               "dataset path (.csv features, .tsv/.txt text, .bits points) or "
                               "synthetic:record|language|blobs");
  if (needs_data) data->required();
  cmd->add_option("--out", o.out, "output directory (default: CSV to stdout)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--dim", o.dim, "hypervector dimension (multiple of 128, <= 2048)");
  cmd->add_option("--mode", o.mode, "binary or multibit");
  cmd->add_option("--backend", o.backend, "ideal or analog");
  cmd->add_option("--profile", o.profile, "uniform or calibrated");
}

hydra::ExperimentConfig resolve(const Options& o) {
  hydra::ExperimentConfig cfg = o.config.empty() ? hydra::ExperimentConfig{}
                                                 : hydra::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.dim) cfg.dim = *o.dim;
  if (!o.mode.empty()) cfg.mode = hydra::parse_mode(o.mode);
  if (!o.backend.empty()) cfg.backend = hydra::parse_backend(o.backend);
  if (!o.profile.empty()) cfg.profile = hydra::parse_profile(o.profile);
  cfg.validate();
  return cfg;
}

// Writes through `emit` into <out>/<name>, or to stdout when no --out.
template <typename Emit>
void output(const Options& o, const std::string& name, Emit emit) {
  if (o.out.empty()) {
    emit(std::cout);
    return;
  }
  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / name;
  std::ofstream f(path);
  if (!f) throw hydra::Error(hydra::Errc::configuration, "cannot write " + path.string());
  emit(f);
  std::cerr << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDC experiments on a behavioral SOT-CAM model"};
  app.require_subcommand(1);
  Options o;

  auto* classify = app.add_subcommand("classify", "train, evaluate, report accuracy and cost");
  add_common(classify, o, true);
  auto* cluster = app.add_subcommand("cluster", "HDC k-means clustering");
  add_common(cluster, o, true);
  auto* sweep = app.add_subcommand("dim-sweep", "accuracy and energy per query across dims");
  add_common(sweep, o, true);
  auto* transfer = app.add_subcommand("transfer-curve", "ML current vs Hamming distance");
  add_common(transfer, o, false);
  auto* calibrate = app.add_subcommand("calibrate", "search the 4-level voltage profile");
  add_common(calibrate, o, false);
  auto* cost = app.add_subcommand("cost-report", "cost table ratios, or a classify run's costs");
  add_common(cost, o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const hydra::ExperimentConfig cfg = resolve(o);
    if (classify->parsed()) {
      const auto ds = hydra::load_dataset(o.data, cfg);
      const auto r = hydra::run_classify(cfg, ds);
      output(o, "classify.csv", [&](std::ostream& os) { hydra::write_classify_csv(os, cfg, r); });
      std::cerr << "accuracy " << r.accuracy << " on " << r.queries.size() << " test samples\n";
    } else if (cluster->parsed()) {
      const auto ds = hydra::load_dataset(o.data, cfg);
      const auto r = hydra::run_cluster(cfg, ds);
      output(o, "cluster.csv", [&](std::ostream& os) { hydra::write_cluster_csv(os, cfg, r); });
      if (!o.out.empty()) {
        output(o, "cluster_epochs.csv",
               [&](std::ostream& os) { hydra::write_cluster_epochs_csv(os, cfg, r); });
      }
      std::cerr << "epochs " << r.state.epoch << (r.state.converged ? " (converged)" : "")
                << (r.purity ? ", purity " + std::to_string(*r.purity) : "") << '\n';
    } else if (sweep->parsed()) {
      const auto ds = hydra::load_dataset(o.data, cfg);
      const auto rows = hydra::run_dim_sweep(cfg, ds);
      output(o, "dim_sweep.csv", [&](std::ostream& os) { hydra::write_dim_sweep_csv(os, cfg, rows); });
    } else if (transfer->parsed()) {
      const auto r = hydra::run_transfer_curve(cfg);
      output(o, "transfer_curve.csv", [&](std::ostream& os) { hydra::write_transfer_csv(os, cfg, r); });
    } else if (calibrate->parsed()) {
      const auto r = hydra::calibrate_profile(cfg.analog, cfg.calibration);
      output(o, "calibration.csv",
             [&](std::ostream& os) { hydra::write_calibration_csv(os, cfg, r); });
      std::cerr << "profile " << hydra::to_json(r.profile).dump() << '\n';
      if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
    } else if (cost->parsed()) {
      if (o.data.empty()) {
        output(o, "cost_ratios.csv", [&](std::ostream& os) { hydra::write_ratio_csv(os, cfg); });
      } else {
        const auto ds = hydra::load_dataset(o.data, cfg);
        const auto r = hydra::run_classify(cfg, ds);
        hydra::CostLedger query = r.encode_ledger;
        query.merge(r.search_ledger);
        const auto summary = hydra::report(query, cfg.cost_table, r.queries.size());
        output(o, "cost_report.csv",
               [&](std::ostream& os) { hydra::write_cost_csv(os, cfg, summary); });
        std::cerr << hydra::to_text(summary);
      }
    }
  } catch (const hydra::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
