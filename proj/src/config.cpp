#include "slicenn/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace slicenn {

using nlohmann::json;

std::string to_string(Profile p) { return p == Profile::fast ? "fast" : "paper"; }

Profile profile_from_string(const std::string& s) {
  if (s == "fast") return Profile::fast;
  if (s == "paper") return Profile::paper;
  throw ConfigurationError("unknown profile '" + s + "' (expected fast or paper)");
}

ExperimentConfig ExperimentConfig::preset(Profile p) {
  ExperimentConfig c;
  c.equalizers = {EqualizerSpec::from_name("Sy-FNN"), EqualizerSpec::from_name("Sa-FNN")};
  if (p == Profile::fast) c.snr_db = {4, 6, 8, 10, 12};
  c.apply_profile(p);
  return c;
}

void ExperimentConfig::apply_profile(Profile p) {
  const bool fast = p == Profile::fast;
  train_symbols = fast ? (1 << 16) : (1 << 19);
  test_symbols = fast ? (1 << 13) : (1 << 16);
  validation_symbols = 1 << 14;
  for (auto& e : equalizers) {
    e.epochs = fast ? 60 : 200;
    e.optimizer = fast ? Optimizer::adam : Optimizer::sgd;
  }
}

void ExperimentConfig::validate() const {
  link.validate();
  if (equalizers.empty() && !references.unequalized && !references.ffe)
    throw ConfigurationError("config: nothing to evaluate (no equalizers, no references)");
  for (const auto& e : equalizers) {
    e.validate();
    if (e.framing.n_slices != link.n_slices)
      throw ConfigurationError("config: " + e.name() + " expects " + std::to_string(e.framing.n_slices) +
                               " slices, link has " + std::to_string(link.n_slices));
    if (link.sim_sps % e.framing.sps != 0)
      throw ConfigurationError("config: " + e.name() + " sps must divide the simulation sps");
  }
  if (distances_km.empty()) throw ConfigurationError("config: distances_km is empty");
  for (double d : distances_km)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigurationError("config: distances must be finite and >= 0");
  for (double s : snr_db)
    if (std::isnan(s)) throw ConfigurationError("config: snr grid contains NaN");
  if (!(snr_step_db > 0.0)) throw ConfigurationError("config: snr_step_db must be positive");
  if (!(snr_cap_db >= snr_start_db)) throw ConfigurationError("config: snr_cap_db below snr_start_db");
  for (auto b : budgets)
    if (b < 1) throw ConfigurationError("config: budgets must be positive");
  if (train_symbols < 1 || test_symbols < 1) throw ConfigurationError("config: split sizes must be positive");
  if (validation_symbols < 0 || validation_symbols >= train_symbols)
    throw ConfigurationError("config: validation_symbols must be smaller than train_symbols");
  if (workers < 1) throw ConfigurationError("config: workers must be >= 1");
  if (references.ffe_taps < 1 || references.ffe_taps % 2 == 0)
    throw ConfigurationError("config: ffe_taps must be odd and positive");
}

namespace {

Eigen::Index guard_symbols(const ExperimentConfig& c) {
  int k = 0;
  for (const auto& e : c.equalizers) k = std::max(k, e.framing.context_symbols);
  return 2 * (c.link.rrc_span + k);
}

}  // namespace

Eigen::Index ExperimentConfig::total_symbols() const {
  const Eigen::Index g = guard_symbols(*this);
  const Eigen::Index need = 3 * g + train_symbols + test_symbols;
  Eigen::Index n = 1;
  while (n < need) n <<= 1;
  return n;
}

DataSplit ExperimentConfig::split() const {
  const Eigen::Index g = guard_symbols(*this);
  DataSplit s;
  s.train = {g, train_symbols};
  s.validation = validation_symbols;
  s.test = {2 * g + train_symbols, test_symbols};
  return s;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError("config: '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigurationError("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

json snr_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

double snr_from_json(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ConfigurationError("config: snr must be a number or null");
  return v.get<double>();
}

json link_to_json(const LinkConfig& l) {
  return json{{"baud_rate", l.baud_rate},
              {"sim_sps", l.sim_sps},
              {"rrc_alpha", l.rrc_alpha},
              {"rrc_span", l.rrc_span},
              {"dispersion_ps_nm_km", l.dispersion_ps_nm_km},
              {"wavelength_nm", l.wavelength_nm},
              {"n_slices", l.n_slices},
              {"slice_3db_bw_ghz", l.slice_3db_bw_ghz},
              {"slice_spacing_ghz", l.slice_spacing_ghz},
              {"slice_filter_order", l.slice_filter_order},
              {"mzm_model", to_string(l.mzm_model)}};
}

LinkConfig link_from_json(const json& j) {
  check_keys(j,
             {"baud_rate", "sim_sps", "rrc_alpha", "rrc_span", "dispersion_ps_nm_km", "wavelength_nm", "n_slices",
              "slice_3db_bw_ghz", "slice_spacing_ghz", "slice_filter_order", "mzm_model"},
             "link");
  LinkConfig l;
  read(j, "baud_rate", l.baud_rate);
  read(j, "sim_sps", l.sim_sps);
  read(j, "rrc_alpha", l.rrc_alpha);
  read(j, "rrc_span", l.rrc_span);
  read(j, "dispersion_ps_nm_km", l.dispersion_ps_nm_km);
  read(j, "wavelength_nm", l.wavelength_nm);
  read(j, "n_slices", l.n_slices);
  read(j, "slice_3db_bw_ghz", l.slice_3db_bw_ghz);
  read(j, "slice_spacing_ghz", l.slice_spacing_ghz);
  read(j, "slice_filter_order", l.slice_filter_order);
  if (j.contains("mzm_model")) l.mzm_model = mzm_model_from_string(j.at("mzm_model").get<std::string>());
  return l;
}

json eq_to_json(const EqualizerSpec& e) {
  return json{{"name", e.name()},
              {"context_symbols", e.framing.context_symbols},
              {"sps", e.framing.sps},
              {"n_hidden", e.n_hidden},
              {"filter_width", e.filter_width},
              {"f_hidden", to_string(e.f_hidden)},
              {"f_out", to_string(e.f_out)},
              {"var", e.var_target},
              {"learn_rate", e.learn_rate},
              {"mini_batch", e.mini_batch},
              {"epochs", e.epochs},
              {"patience", e.patience},
              {"gru_update", to_string(e.gru_update)},
              {"gru_readout", to_string(e.gru_readout)},
              {"optimizer", to_string(e.optimizer)}};
}

EqualizerSpec eq_from_json(const json& j, const LinkConfig& link) {
  if (j.is_string()) {
    EqualizerSpec e = EqualizerSpec::from_name(j.get<std::string>());
    e.framing.n_slices = link.n_slices;
    e.rrc_alpha = link.rrc_alpha;
    e.rrc_span = link.rrc_span;
    return e;
  }
  check_keys(j,
             {"name", "context_symbols", "sps", "n_hidden", "filter_width", "f_hidden", "f_out", "var", "learn_rate",
              "mini_batch", "epochs", "patience", "gru_update", "gru_readout", "optimizer"},
             "equalizer");
  if (!j.contains("name")) throw ConfigurationError("config: equalizer entry needs a 'name'");
  int sps = 0;
  read(j, "sps", sps);
  EqualizerSpec e = EqualizerSpec::from_name(j.at("name").get<std::string>(), sps);
  int k = e.framing.context_symbols;
  read(j, "context_symbols", k);
  e.framing = FramingSpec::make(e.framing.mode, k, e.framing.sps, link.n_slices);
  const bool nw_given = j.contains("filter_width");
  read(j, "n_hidden", e.n_hidden);
  read(j, "filter_width", e.filter_width);
  if (e.arch == Arch::cnn && !nw_given) e.filter_width = e.framing.memory();
  if (j.contains("f_hidden")) e.f_hidden = activation_from_string(j.at("f_hidden").get<std::string>());
  if (j.contains("f_out")) e.f_out = activation_from_string(j.at("f_out").get<std::string>());
  read(j, "var", e.var_target);
  read(j, "learn_rate", e.learn_rate);
  read(j, "mini_batch", e.mini_batch);
  read(j, "epochs", e.epochs);
  read(j, "patience", e.patience);
  if (j.contains("gru_update")) e.gru_update = gru_update_from_string(j.at("gru_update").get<std::string>());
  if (j.contains("gru_readout")) e.gru_readout = gru_readout_from_string(j.at("gru_readout").get<std::string>());
  if (j.contains("optimizer")) e.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  e.rrc_alpha = link.rrc_alpha;
  e.rrc_span = link.rrc_span;
  return e;
}

json to_json_doc(const ExperimentConfig& c) {
  json eqs = json::array();
  for (const auto& e : c.equalizers) eqs.push_back(eq_to_json(e));
  json snr = json::array();
  for (double s : c.snr_db) snr.push_back(snr_to_json(s));
  return json{{"schema", kConfigSchemaVersion},
              {"link", link_to_json(c.link)},
              {"equalizers", eqs},
              {"references",
               {{"unequalized", c.references.unequalized},
                {"back_to_back", c.references.back_to_back},
                {"ffe", c.references.ffe},
                {"ffe_taps", c.references.ffe_taps},
                {"ffe_step", c.references.ffe_step},
                {"ffe_train_symbols", c.references.ffe_train_symbols}}},
              {"distances_km", c.distances_km},
              {"snr_db", snr},
              {"budgets", c.budgets},
              {"train_symbols", c.train_symbols},
              {"validation_symbols", c.validation_symbols},
              {"test_symbols", c.test_symbols},
              {"snr_start_db", c.snr_start_db},
              {"snr_step_db", c.snr_step_db},
              {"snr_cap_db", c.snr_cap_db},
              {"scan_distance_km", c.scan_distance_km},
              {"scan_snr_db", snr_to_json(c.scan_snr_db)},
              {"seed", c.seed},
              {"out_dir", c.out_dir},
              {"workers", c.workers}};
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) { return to_json_doc(c).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"schema", "profile", "link", "equalizers", "references", "distances_km", "snr_db", "budgets",
              "train_symbols", "validation_symbols", "test_symbols", "snr_start_db", "snr_step_db", "snr_cap_db",
              "scan_distance_km", "scan_snr_db", "seed", "out_dir", "workers"},
             "config");
  if (!j.contains("schema")) throw ConfigurationError("config: missing 'schema'");
  if (j.at("schema") != kConfigSchemaVersion)
    throw ConfigurationError("config: unsupported schema " + j.at("schema").dump() + " (expected " +
                             std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig c;
  if (j.contains("link")) c.link = link_from_json(j.at("link"));
  if (j.contains("equalizers")) {
    for (const auto& e : j.at("equalizers")) c.equalizers.push_back(eq_from_json(e, c.link));
  } else {
    c.equalizers = ExperimentConfig::preset(Profile::paper).equalizers;
  }
  // A profile sets split sizes and training budget; explicit keys below win.
  if (j.contains("profile")) c.apply_profile(profile_from_string(j.at("profile").get<std::string>()));
  if (j.contains("equalizers") && j.contains("profile")) {
    std::size_t i = 0;
    for (const auto& e : j.at("equalizers")) {
      if (e.is_object()) {
        read(e, "epochs", c.equalizers[i].epochs);
        if (e.contains("optimizer")) c.equalizers[i].optimizer = optimizer_from_string(e.at("optimizer").get<std::string>());
      }
      ++i;
    }
  }
  if (j.contains("references")) {
    const json& r = j.at("references");
    check_keys(r, {"unequalized", "back_to_back", "ffe", "ffe_taps", "ffe_step", "ffe_train_symbols"}, "references");
    read(r, "unequalized", c.references.unequalized);
    read(r, "back_to_back", c.references.back_to_back);
    read(r, "ffe", c.references.ffe);
    read(r, "ffe_taps", c.references.ffe_taps);
    read(r, "ffe_step", c.references.ffe_step);
    read(r, "ffe_train_symbols", c.references.ffe_train_symbols);
  }
  read(j, "distances_km", c.distances_km);
  if (j.contains("snr_db")) {
    c.snr_db.clear();
    for (const auto& v : j.at("snr_db")) c.snr_db.push_back(snr_from_json(v));
  }
  read(j, "budgets", c.budgets);
  read(j, "train_symbols", c.train_symbols);
  read(j, "validation_symbols", c.validation_symbols);
  read(j, "test_symbols", c.test_symbols);
  read(j, "snr_start_db", c.snr_start_db);
  read(j, "snr_step_db", c.snr_step_db);
  read(j, "snr_cap_db", c.snr_cap_db);
  read(j, "scan_distance_km", c.scan_distance_km);
  if (j.contains("scan_snr_db")) c.scan_snr_db = snr_from_json(j.at("scan_snr_db"));
  read(j, "seed", c.seed);
  read(j, "out_dir", c.out_dir);
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const std::string& path, const ExperimentConfig& c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << config_to_json(c);
  if (!os) throw IoError("write failed: '" + path + "'");
}

std::string config_hash(const ExperimentConfig& c) {
  json doc = to_json_doc(c);
  doc.erase("out_dir");
  doc.erase("workers");
  const std::string canon = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace slicenn
