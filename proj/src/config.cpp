#include "hydra/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <type_traits>

#include "hydra/error.hpp"

namespace hydra {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads known keys out of one JSON object and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j.is_object()) fail("", "expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        fail(key, "expected a non-negative integer");
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "expected a number");
    }
    try {
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }

  const json* object(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  // Parses a string-valued enum with `parse`, rethrowing as a keyed error.
  template <typename T, typename Parse>
  void get_enum(const std::string& key, T& out, Parse parse) {
    std::string name;
    get(key, name);
    if (!seen_.contains(key)) return;
    try {
      out = parse(name);
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) fail(key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::string where = context_;
    if (!key.empty()) where += where.empty() ? key : "." + key;
    throw Error(Errc::configuration, (where.empty() ? std::string("config") : where) + ": " + what);
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

}  // namespace

std::string_view to_string(BackendChoice b) noexcept {
  return b == BackendChoice::ideal ? "ideal" : "analog";
}

std::string_view to_string(ProfileChoice p) noexcept {
  return p == ProfileChoice::uniform ? "uniform" : "calibrated";
}

BackendChoice parse_backend(std::string_view name) {
  if (name == "ideal") return BackendChoice::ideal;
  if (name == "analog") return BackendChoice::analog;
  throw Error(Errc::configuration, "unknown backend '" + std::string(name) + "'");
}

ProfileChoice parse_profile(std::string_view name) {
  if (name == "uniform") return ProfileChoice::uniform;
  if (name == "calibrated") return ProfileChoice::calibrated;
  throw Error(Errc::configuration, "unknown profile '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  check_dim(dim);
  EncodingConfig enc = encoding;
  enc.dim = dim;
  enc.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::configuration, "train_fraction must be in (0, 1)");
  }
  if (cluster.k < 2 || cluster.k > ClassMemory::kMaxClasses || cluster.max_epochs == 0 ||
      cluster.restarts == 0) {
    throw Error(Errc::configuration, "cluster needs 2 <= k <= 128, max_epochs >= 1 and restarts >= 1");
  }
  for (const auto d : dims) check_dim(d);
  analog.validate();
  sensing.validate();
  cost_table.validate();
  if (!(calibration.v_min > 0.0 && calibration.v_min <= 1.0 && calibration.v_max >= 1.0 &&
        calibration.v_max <= 1.2 && calibration.step > 0.0 && calibration.coarse_step > 0.0)) {
    throw Error(Errc::configuration, "calibration range must bracket 1 V within (0, 1.2]");
  }
}

ordered_json to_json(const AnalogParams& p) {
  return {{"r_segment", p.r_segment},
          {"gamma", p.gamma},
          {"v_th", p.v_th},
          {"i_cell_nominal", p.i_cell_nominal},
          {"i_bias", p.i_bias},
          {"i_floor", p.i_floor},
          {"i_operating_max", p.i_operating_max},
          {"tolerance", p.tolerance},
          {"damping", p.damping},
          {"max_iterations", p.max_iterations}};
}

ordered_json to_json(const VoltageProfile& p) {
  return {{"levels", p.levels}, {"base_voltage", p.base_voltage}};
}

ordered_json to_json(const CostTable& t) {
  ordered_json out;
  for (const auto op : kAllOps) {
    const OpCost& c = t[op];
    out[std::string(to_string(op))] = {{"hydra_latency_ns", c.hydra_latency_ns},
                                       {"hydra_energy_pj", c.hydra_energy_pj},
                                       {"cmos_cycles", c.cmos_cycles},
                                       {"cmos_energy_pj", c.cmos_energy_pj},
                                       {"cmos_net_energy_pj", c.cmos_net_energy_pj}};
  }
  out["mem_read_energy_nj"] = t.mem_read_energy_nj;
  out["cmos_cycle_ns"] = t.cmos_cycle_ns;
  out["reference_dim"] = t.reference_dim;
  return out;
}

ordered_json to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["dim"] = cfg.dim;
  j["mode"] = to_string(cfg.mode);
  j["backend"] = to_string(cfg.backend);
  j["profile"] = to_string(cfg.profile);
  j["encoding"] = {{"n", cfg.encoding.n},
                   {"levels", cfg.encoding.levels},
                   {"permute_mode", to_string(cfg.encoding.permute_mode)},
                   {"drop_width", cfg.encoding.drop_width},
                   {"shift_step", cfg.encoding.shift_step}};
  j["retrain_epochs"] = cfg.retrain_epochs;
  j["train_fraction"] = cfg.train_fraction;
  j["cluster"] = {{"k", cfg.cluster.k},
                  {"threshold", cfg.cluster.threshold},
                  {"max_epochs", cfg.cluster.max_epochs},
                  {"restarts", cfg.cluster.restarts}};
  j["dims"] = cfg.dims;
  j["analog"] = to_json(cfg.analog);
  j["sensing"] = {{"resolution", cfg.sensing.resolution},
                  {"floor", cfg.sensing.floor},
                  {"batch", cfg.sensing.batch}};
  j["calibration"] = {{"v_min", cfg.calibration.v_min},
                      {"v_max", cfg.calibration.v_max},
                      {"step", cfg.calibration.step},
                      {"coarse_step", cfg.calibration.coarse_step},
                      {"placement_seed", cfg.calibration.placement_seed},
                      {"min_step_fraction", cfg.calibration.min_step_fraction}};
  j["placement"] = to_string(cfg.placement);
  j["cost_table_path"] = cfg.cost_table_path;
  j["cost_table"] = to_json(cfg.cost_table);
  const auto& s = cfg.synthetic;
  j["synthetic"] = {
      {"records",
       {{"classes", s.records.classes},
        {"features", s.records.features},
        {"samples", s.records.samples},
        {"noise", s.records.noise}}},
      {"language",
       {{"languages", s.language.languages},
        {"samples", s.language.samples},
        {"min_length", s.language.min_length},
        {"max_length", s.language.max_length},
        {"spread", s.language.spread}}},
      {"blobs",
       {{"blobs", s.blobs.blobs}, {"per_blob", s.blobs.per_blob}, {"max_flips", s.blobs.max_flips}}}};
  j["seed"] = cfg.seed;
  return j;
}

AnalogParams analog_params_from_json(const json& j, AnalogParams p) {
  Fields f(j, "analog");
  f.get("r_segment", p.r_segment);
  f.get("gamma", p.gamma);
  f.get("v_th", p.v_th);
  f.get("i_cell_nominal", p.i_cell_nominal);
  f.get("i_bias", p.i_bias);
  f.get("i_floor", p.i_floor);
  f.get("i_operating_max", p.i_operating_max);
  f.get("tolerance", p.tolerance);
  f.get("damping", p.damping);
  f.get("max_iterations", p.max_iterations);
  f.finish();
  p.validate();
  return p;
}

VoltageProfile profile_from_json(const json& j) {
  VoltageProfile p;
  Fields f(j, "profile");
  std::vector<double> levels;
  f.get("levels", levels);
  if (j.contains("levels")) {
    if (levels.size() != kVoltageLevels) f.fail("levels", "expected 4 voltages");
    std::copy(levels.begin(), levels.end(), p.levels.begin());
  }
  f.get("base_voltage", p.base_voltage);
  f.finish();
  p.validate();
  return p;
}

CostTable cost_table_from_json(const json& j, CostTable t) {
  Fields f(j, "cost_table");
  for (const auto op : kAllOps) {
    const std::string name(to_string(op));
    if (const json* o = f.object(name)) {
      Fields g(*o, "cost_table." + name);
      OpCost& c = t[op];
      g.get("hydra_latency_ns", c.hydra_latency_ns);
      g.get("hydra_energy_pj", c.hydra_energy_pj);
      g.get("cmos_cycles", c.cmos_cycles);
      g.get("cmos_energy_pj", c.cmos_energy_pj);
      g.get("cmos_net_energy_pj", c.cmos_net_energy_pj);
      g.finish();
    }
  }
  f.get("mem_read_energy_nj", t.mem_read_energy_nj);
  f.get("cmos_cycle_ns", t.cmos_cycle_ns);
  f.get("reference_dim", t.reference_dim);
  f.finish();
  t.validate();
  return t;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  Fields f(j, "");
  f.get("dim", cfg.dim);
  f.get_enum("mode", cfg.mode, parse_mode);
  f.get_enum("backend", cfg.backend, parse_backend);
  f.get_enum("profile", cfg.profile, parse_profile);
  if (const json* e = f.object("encoding")) {
    Fields g(*e, "encoding");
    g.get("n", cfg.encoding.n);
    g.get("levels", cfg.encoding.levels);
    g.get_enum("permute_mode", cfg.encoding.permute_mode, parse_permute_mode);
    g.get("drop_width", cfg.encoding.drop_width);
    g.get("shift_step", cfg.encoding.shift_step);
    g.finish();
  }
  f.get("retrain_epochs", cfg.retrain_epochs);
  f.get("train_fraction", cfg.train_fraction);
  if (const json* c = f.object("cluster")) {
    Fields g(*c, "cluster");
    g.get("k", cfg.cluster.k);
    g.get("threshold", cfg.cluster.threshold);
    g.get("max_epochs", cfg.cluster.max_epochs);
    g.get("restarts", cfg.cluster.restarts);
    g.finish();
  }
  f.get("dims", cfg.dims);
  if (const json* a = f.object("analog")) cfg.analog = analog_params_from_json(*a, cfg.analog);
  if (const json* s = f.object("sensing")) {
    Fields g(*s, "sensing");
    g.get("resolution", cfg.sensing.resolution);
    g.get("floor", cfg.sensing.floor);
    g.get("batch", cfg.sensing.batch);
    g.finish();
  }
  if (const json* c = f.object("calibration")) {
    Fields g(*c, "calibration");
    g.get("v_min", cfg.calibration.v_min);
    g.get("v_max", cfg.calibration.v_max);
    g.get("step", cfg.calibration.step);
    g.get("coarse_step", cfg.calibration.coarse_step);
    g.get("placement_seed", cfg.calibration.placement_seed);
    g.get("min_step_fraction", cfg.calibration.min_step_fraction);
    g.finish();
  }
  f.get_enum("placement", cfg.placement, parse_placement);
  f.get("cost_table_path", cfg.cost_table_path);
  if (!cfg.cost_table_path.empty()) {
    std::filesystem::path path(cfg.cost_table_path);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    std::ifstream in(path);
    if (!in) f.fail("cost_table_path", "cannot open '" + path.string() + "'");
    json t;
    try {
      t = json::parse(in);
    } catch (const json::exception& e) {
      f.fail("cost_table_path", e.what());
    }
    cfg.cost_table = cost_table_from_json(t);
  }
  if (const json* t = f.object("cost_table")) cfg.cost_table = cost_table_from_json(*t, cfg.cost_table);
  if (const json* s = f.object("synthetic")) {
    Fields g(*s, "synthetic");
    auto& syn = cfg.synthetic;
    if (const json* r = g.object("records")) {
      Fields h(*r, "synthetic.records");
      h.get("classes", syn.records.classes);
      h.get("features", syn.records.features);
      h.get("samples", syn.records.samples);
      h.get("noise", syn.records.noise);
      h.finish();
    }
    if (const json* l = g.object("language")) {
      Fields h(*l, "synthetic.language");
      h.get("languages", syn.language.languages);
      h.get("samples", syn.language.samples);
      h.get("min_length", syn.language.min_length);
      h.get("max_length", syn.language.max_length);
      h.get("spread", syn.language.spread);
      h.finish();
    }
    if (const json* b = g.object("blobs")) {
      Fields h(*b, "synthetic.blobs");
      h.get("blobs", syn.blobs.blobs);
      h.get("per_blob", syn.blobs.per_blob);
      h.get("max_flips", syn.blobs.max_flips);
      h.finish();
    }
    g.finish();
  }
  f.get("seed", cfg.seed);
  f.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::configuration, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::configuration, "config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

}  // namespace hydra
