#include "hydra/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "hydra/error.hpp"

namespace hydra {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string levels_text(const VoltageProfile& p) {
  std::string out;
  for (const double v : p.levels) {
    if (!out.empty()) out += ' ';
    out += num(v);
  }
  return out;
}

void fit_metrics(std::vector<std::pair<std::string, std::string>>& m, const std::string& prefix,
                 const LinearityFit& fit) {
  m.emplace_back(prefix + ".slope_amperes", num(fit.slope));
  m.emplace_back(prefix + ".max_deviation_amperes", num(fit.max_deviation));
  m.emplace_back(prefix + ".max_deviation_bits", num(fit.max_deviation_bits));
  m.emplace_back(prefix + ".min_step_amperes", num(fit.min_step));
}

std::vector<double> normalized(const Dataset& ds, std::size_t index) {
  std::vector<double> row = ds.features.at(index);
  for (std::size_t f = 0; f < row.size(); ++f) {
    const double span = ds.feature_max[f] - ds.feature_min[f];
    row[f] = span > 0.0 ? (row[f] - ds.feature_min[f]) / span : 0.0;
  }
  return row;
}

}  // namespace

Seeds Seeds::derive(std::uint64_t master) {
  const Rng root(master);
  Seeds s;
  s.master = master;
  s.items = root.fork(1).seed();
  s.levels = root.fork(2).seed();
  s.split = root.fork(3).seed();
  s.drop = root.fork(4).seed();
  s.lta = root.fork(5).seed();
  s.cluster = root.fork(6).seed();
  s.data = root.fork(7).seed();
  return s;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::precondition, "a train/test split needs at least 2 samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::configuration, "train_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

Dataset synthetic_dataset(const std::string& name, const ExperimentConfig& cfg) {
  Rng rng(Seeds::derive(cfg.seed).data);
  if (name == "record") return generate_records(cfg.synthetic.records, rng);
  if (name == "language") return generate_language_corpus(cfg.synthetic.language, rng);
  if (name == "blobs") {
    BlobSpec spec = cfg.synthetic.blobs;
    spec.dim = cfg.dim;
    return generate_blobs(spec, rng);
  }
  throw Error(Errc::configuration, "unknown synthetic dataset '" + name +
                                       "' (expected record, language or blobs)");
}

Dataset load_dataset(const std::string& spec, const ExperimentConfig& cfg) {
  constexpr std::string_view kPrefix = "synthetic:";
  if (spec.starts_with(kPrefix)) return synthetic_dataset(spec.substr(kPrefix.size()), cfg);
  const auto dot = spec.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : spec.substr(dot);
  if (ext == ".tsv" || ext == ".txt") return ingest(spec, DatasetKind::text_corpus);
  if (ext == ".bits") return ingest(spec, DatasetKind::synthetic_blobs);
  return ingest(spec, DatasetKind::feature_csv);
}

SampleEncoder::SampleEncoder(const ExperimentConfig& cfg, const Dataset& ds, const Seeds& seeds)
    : enc_(cfg.encoding), drop_seed_(seeds.drop) {
  enc_.dim = cfg.dim;
  switch (ds.kind) {
    case DatasetKind::feature_csv: {
      enc_.scheme = Scheme::record;
      enc_.validate();
      Rng item_rng(seeds.items);
      Rng level_rng(seeds.levels);
      items_.emplace(build_item_memory(ds.arity(), cfg.dim, item_rng));
      levels_.emplace(build_level_memory(enc_.levels, cfg.dim, level_rng));
      break;
    }
    case DatasetKind::text_corpus: {
      enc_.scheme = Scheme::ngram;
      enc_.validate();
      Rng item_rng(seeds.items);
      items_.emplace(build_item_memory(kAlphabetSize, cfg.dim, item_rng));
      break;
    }
    case DatasetKind::synthetic_blobs:
      if (!ds.points.empty() && ds.points.front().dim() != cfg.dim) {
        throw Error(Errc::dimension_mismatch, "blob points do not match the configured dim");
      }
      break;
  }
}

LabeledSample SampleEncoder::encode(const Dataset& ds, std::size_t index, CostLedger* ledger) const {
  const std::size_t label = ds.labeled() ? ds.labels.at(index) : 0;
  switch (ds.kind) {
    case DatasetKind::feature_csv: {
      const auto row = normalized(ds, index);
      return {encode_record(row, *items_, *levels_, ledger), label};
    }
    case DatasetKind::text_corpus: {
      Rng rng = Rng(drop_seed_).fork(index);
      return {encode_ngram(ds.sequences.at(index), enc_.n, *items_, enc_, rng, ledger), label};
    }
    case DatasetKind::synthetic_blobs: {
      AccumulatorHV acc(ds.points.at(index).dim());
      acc.add(ds.points[index]);
      return {std::move(acc), label};
    }
  }
  throw Error(Errc::precondition, "unknown dataset kind");
}

VoltageProfile resolve_profile(const ExperimentConfig& cfg) {
  if (cfg.profile == ProfileChoice::uniform) return VoltageProfile::uniform();
  return calibrate_profile(cfg.analog, cfg.calibration).profile;
}

SimilarityBackend make_backend(const ExperimentConfig& cfg, const Seeds& seeds) {
  if (cfg.backend == BackendChoice::analog) {
    return SimilarityBackend::analog_cam({resolve_profile(cfg), cfg.analog, cfg.sensing, seeds.lta});
  }
  return cfg.mode == HvMode::binary ? SimilarityBackend::ideal_hamming()
                                    : SimilarityBackend::ideal_dot();
}

ClassifyResult run_classify(const ExperimentConfig& cfg, const Dataset& ds) {
  cfg.validate();
  if (!ds.labeled()) throw Error(Errc::precondition, "classification needs a labeled dataset");
  const Seeds seeds = Seeds::derive(cfg.seed);
  const auto [train_idx, test_idx] = split_indices(ds.size(), cfg.train_fraction, seeds.split);
  const SampleEncoder encoder(cfg, ds, seeds);

  ClassifyResult r;
  r.train_size = train_idx.size();
  std::vector<LabeledSample> train_set;
  train_set.reserve(train_idx.size());
  for (const auto i : train_idx) train_set.push_back(encoder.encode(ds, i, &r.train_ledger));

  const SimilarityBackend backend = make_backend(cfg, seeds);
  if (backend.kind() == BackendKind::analog_cam) r.profile = backend.analog().profile;
  ClassMemory cm = train(train_set, ds.num_classes(), cfg.dim, cfg.mode, &r.train_ledger);
  cm = retrain(std::move(cm), train_set, cfg.retrain_epochs, backend, &r.train_ledger);

  std::size_t correct = 0;
  for (const auto i : test_idx) {
    const LabeledSample q = encoder.encode(ds, i, &r.encode_ledger);
    const Prediction p = predict(q, cm, backend, &r.search_ledger);
    r.queries.push_back({i, q.label, p.label, p.score, p.ambiguous_flags});
    r.ambiguous_total += p.ambiguous_flags;
    if (p.label == q.label) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(test_idx.size());
  return r;
}

double purity(std::span<const std::size_t> assignments, std::span<const std::size_t> labels) {
  if (assignments.size() != labels.size() || assignments.empty()) {
    throw Error(Errc::precondition, "purity needs one label per assigned point");
  }
  std::map<std::size_t, std::map<std::size_t, std::size_t>> counts;
  for (std::size_t p = 0; p < assignments.size(); ++p) ++counts[assignments[p]][labels[p]];
  std::size_t majority = 0;
  for (const auto& [cluster, by_label] : counts) {
    std::size_t best = 0;
    for (const auto& [label, n] : by_label) best = std::max(best, n);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(assignments.size());
}

ClusterResult run_cluster(const ExperimentConfig& cfg, const Dataset& ds) {
  cfg.validate();
  const Seeds seeds = Seeds::derive(cfg.seed);
  std::vector<BipolarHV> points;
  if (ds.kind == DatasetKind::synthetic_blobs) {
    points = ds.points;
  } else {
    const SampleEncoder encoder(cfg, ds, seeds);
    for (std::size_t i = 0; i < ds.size(); ++i) points.push_back(encoder.encode(ds, i).binary);
  }
  ExperimentConfig binary_cfg = cfg;
  binary_cfg.mode = HvMode::binary;
  const SimilarityBackend backend = make_backend(binary_cfg, seeds);

  ClusterResult r;
  Rng rng(seeds.cluster);
  for (std::size_t i = 0; i < cfg.cluster.restarts; ++i) {
    ClusterState s = cluster(points, cfg.cluster.k, cfg.cluster.threshold, cfg.cluster.max_epochs,
                             rng, backend, &r.ledger);
    if (i == 0 || s.objective.back() < r.state.objective.back()) {
      r.state = std::move(s);
      r.restart = i;
    }
  }
  if (ds.labeled()) r.purity = purity(r.state.assignments, ds.labels);
  return r;
}

std::vector<DimSweepRow> run_dim_sweep(const ExperimentConfig& cfg, const Dataset& ds) {
  if (cfg.dims.empty()) throw Error(Errc::configuration, "dim sweep needs at least one dim");
  std::vector<DimSweepRow> rows;
  for (const auto d : cfg.dims) {
    ExperimentConfig c = cfg;
    c.dim = d;
    const ClassifyResult r = run_classify(c, ds);
    CostLedger query = r.encode_ledger;
    query.merge(r.search_ledger);
    const auto q = static_cast<double>(r.queries.size());
    rows.push_back({d, r.accuracy, r.search_ledger.hydra_energy_pj(cfg.cost_table) / q,
                    query.hydra_energy_pj(cfg.cost_table) / q,
                    query.hydra_latency_ns(cfg.cost_table) / q,
                    query.cmos_net_energy_pj(cfg.cost_table) / q});
  }
  return rows;
}

TransferResult run_transfer_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  TransferResult r;
  r.calibration = calibrate_profile(cfg.analog, cfg.calibration);
  for (const auto& [id, profile] : {std::pair<std::string, VoltageProfile>{"uniform", VoltageProfile::uniform()},
                                    {"calibrated", r.calibration.profile}}) {
    ProfileCurve pc{id, profile, {}, {}};
    pc.curve = transfer_curve(profile, cfg.analog, cfg.placement, cfg.calibration.placement_seed);
    pc.fit = fit_line(pc.curve);
    r.curves.push_back(std::move(pc));
  }
  return r;
}

void write_header(std::ostream& os, const std::string& verb, const ExperimentConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& metrics) {
  os << "# hydra " << verb << '\n';
  os << "# config:\n";
  std::istringstream lines(to_json(cfg).dump(2));
  for (std::string line; std::getline(lines, line);) os << "#   " << line << '\n';
  const Seeds s = Seeds::derive(cfg.seed);
  os << "# seeds: rng=" << Rng::kAlgorithm << " master=" << s.master << " items=" << s.items
     << " levels=" << s.levels << " split=" << s.split << " drop=" << s.drop << " lta=" << s.lta
     << " cluster=" << s.cluster << " data=" << s.data << '\n';
  for (const auto& [key, value] : metrics) os << "# " << key << ": " << value << '\n';
}

void write_classify_csv(std::ostream& os, const ExperimentConfig& cfg, const ClassifyResult& r) {
  CostLedger query = r.encode_ledger;
  query.merge(r.search_ledger);
  const auto q = static_cast<double>(r.queries.size());
  const CostTable& t = cfg.cost_table;
  std::vector<std::pair<std::string, std::string>> m{
      {"accuracy", num(r.accuracy)},
      {"train_size", std::to_string(r.train_size)},
      {"test_size", std::to_string(r.queries.size())},
      {"ambiguous_batches", std::to_string(r.ambiguous_total)},
      {"hydra_energy_pj_per_query.search", num(r.search_ledger.hydra_energy_pj(t) / q)},
      {"hydra_energy_pj_per_query.encode_and_search", num(query.hydra_energy_pj(t) / q)},
      {"hydra_latency_ns_per_query.encode_and_search", num(query.hydra_latency_ns(t) / q)},
      {"cmos_net_energy_pj_per_query.encode_and_search", num(query.cmos_net_energy_pj(t) / q)},
      {"train.hydra_energy_pj", num(r.train_ledger.hydra_energy_pj(t))}};
  for (const auto op : kAllOps) {
    m.emplace_back("ops." + std::string(to_string(op)),
                   std::to_string(r.train_ledger.count(op) + query.count(op)));
  }
  if (r.profile) m.emplace_back("profile_levels_volts", levels_text(*r.profile));
  write_header(os, "classify", cfg, m);
  os << "sample,label,predicted,correct,score,ambiguous_flags\n";
  for (const auto& x : r.queries) {
    os << x.sample << ',' << x.label << ',' << x.predicted << ',' << (x.label == x.predicted ? 1 : 0)
       << ',' << num(x.score) << ',' << x.ambiguous_flags << '\n';
  }
}

void write_cluster_csv(std::ostream& os, const ExperimentConfig& cfg, const ClusterResult& r) {
  std::string objective;
  for (const auto v : r.state.objective) objective += (objective.empty() ? "" : " ") + std::to_string(v);
  std::vector<std::pair<std::string, std::string>> m{
      {"epochs", std::to_string(r.state.epoch)},
      {"converged", r.state.converged ? "true" : "false"},
      {"restart_kept", std::to_string(r.restart)},
      {"purity", r.purity ? num(*r.purity) : "n/a"},
      {"objective_per_epoch", objective},
      {"hydra_energy_pj", num(r.ledger.hydra_energy_pj(cfg.cost_table))},
      {"hydra_latency_ns", num(r.ledger.hydra_latency_ns(cfg.cost_table))},
      {"cmos_net_energy_pj", num(r.ledger.cmos_net_energy_pj(cfg.cost_table))}};
  write_header(os, "cluster", cfg, m);
  os << "point,assignment\n";
  for (std::size_t p = 0; p < r.state.assignments.size(); ++p) {
    os << p << ',' << r.state.assignments[p] << '\n';
  }
}

void write_cluster_epochs_csv(std::ostream& os, const ExperimentConfig& cfg,
                              const ClusterResult& r) {
  write_header(os, "cluster", cfg);
  os << "epoch,objective,center_shift\n";
  for (std::size_t e = 0; e < r.state.objective.size(); ++e) {
    os << e + 1 << ',' << r.state.objective[e] << ',' << r.state.center_shift[e] << '\n';
  }
}

void write_dim_sweep_csv(std::ostream& os, const ExperimentConfig& cfg,
                         const std::vector<DimSweepRow>& rows) {
  write_header(os, "dim-sweep", cfg);
  os << "dim,accuracy,search_energy_pj_per_query,energy_pj_per_query,latency_ns_per_query,"
        "cmos_net_energy_pj_per_query\n";
  for (const auto& r : rows) {
    os << r.dim << ',' << num(r.accuracy) << ',' << num(r.search_energy_pj_per_query) << ','
       << num(r.energy_pj_per_query) << ',' << num(r.latency_ns_per_query) << ','
       << num(r.cmos_net_energy_pj_per_query) << '\n';
  }
}

void write_transfer_csv(std::ostream& os, const ExperimentConfig& cfg, const TransferResult& r) {
  std::vector<std::pair<std::string, std::string>> m;
  for (const auto& c : r.curves) {
    m.emplace_back(c.profile_id + ".levels_volts", levels_text(c.profile));
    fit_metrics(m, c.profile_id, c.fit);
  }
  if (r.curves.size() == 2 && r.curves[1].fit.max_deviation > 0.0) {
    m.emplace_back("deviation_reduction",
                   num(r.curves[0].fit.max_deviation / r.curves[1].fit.max_deviation));
  }
  if (!r.calibration.warning.empty()) m.emplace_back("warning", r.calibration.warning);
  write_header(os, "transfer-curve", cfg, m);
  os << "hamming,current_amperes,profile_id\n";
  for (const auto& c : r.curves) {
    for (const auto& p : c.curve) os << p.hamming << ',' << num(p.current) << ',' << c.profile_id << '\n';
  }
}

void write_calibration_csv(std::ostream& os, const ExperimentConfig& cfg,
                           const CalibrationResult& r) {
  std::vector<std::pair<std::string, std::string>> m{{"evaluations", std::to_string(r.evaluations)}};
  fit_metrics(m, "uniform", r.uniform);
  fit_metrics(m, "calibrated", r.calibrated);
  if (!r.warning.empty()) m.emplace_back("warning", r.warning);
  write_header(os, "calibrate", cfg, m);
  os << "segment,first_column,last_column,voltage\n";
  for (std::size_t s = 0; s < kVoltageLevels; ++s) {
    os << s << ',' << s * kSegmentWidth << ',' << (s + 1) * kSegmentWidth - 1 << ','
       << num(r.profile.levels[s]) << '\n';
  }
}

void write_cost_csv(std::ostream& os, const ExperimentConfig& cfg, const CostSummary& summary) {
  write_header(os, "cost-report", cfg,
               {{"queries", std::to_string(summary.queries)},
                {"energy_reduction", num(summary.energy_reduction)},
                {"hydra_queries_per_second", num(summary.hydra_queries_per_second)},
                {"cmos_queries_per_second", num(summary.cmos_queries_per_second)}});
  write_csv(os, summary);
}

void write_ratio_csv(std::ostream& os, const ExperimentConfig& cfg) {
  write_header(os, "cost-report", cfg);
  const auto ratios = ratios_vs_cmos(cfg.cost_table);
  os << "op,hydra_latency_ns,hydra_energy_pj,cmos_cycles,cmos_energy_pj,cmos_net_energy_pj,"
        "energy_ratio,net_energy_ratio\n";
  for (const auto op : kAllOps) {
    const OpCost& c = cfg.cost_table[op];
    const OpRatio& q = ratios[static_cast<std::size_t>(op)];
    os << to_string(op) << ',' << num(c.hydra_latency_ns) << ',' << num(c.hydra_energy_pj) << ','
       << num(c.cmos_cycles) << ',' << num(c.cmos_energy_pj) << ',' << num(c.cmos_net_energy_pj)
       << ',' << num(q.energy_ratio) << ',' << num(q.net_energy_ratio) << '\n';
  }
}

}  // namespace hydra
