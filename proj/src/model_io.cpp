#include "slicenn/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace slicenn {

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw FormatError("model: not a number '" + s + "'");
  return v;
}

template <typename Container>
void write_list(std::ostream& os, const char* key, const Container& values) {
  os << key << ' ' << values.size();
  for (double v : values) os << ' ' << hex(v);
  os << '\n';
}

std::vector<double> read_list(std::istringstream& line) {
  std::size_t n = 0;
  if (!(line >> n)) throw FormatError("model: list without a length");
  std::vector<double> v(n);
  std::string tok;
  for (auto& x : v) {
    if (!(line >> tok)) throw FormatError("model: truncated list");
    x = parse(tok);
  }
  return v;
}

}  // namespace

void write_model(std::ostream& os, const TrainedModel& model) {
  const EqualizerSpec& s = model.spec;
  os << "slicenn-model " << kModelFormatVersion << '\n';
  os << "arch " << to_string(s.arch) << '\n';
  os << "framing " << to_string(s.framing.mode) << '\n';
  os << "context_symbols " << s.framing.context_symbols << '\n';
  os << "sps " << s.framing.sps << '\n';
  os << "n_slices " << s.framing.n_slices << '\n';
  os << "n_hidden " << s.n_hidden << '\n';
  os << "filter_width " << s.filter_width << '\n';
  os << "f_hidden " << to_string(s.f_hidden) << '\n';
  os << "f_out " << to_string(s.f_out) << '\n';
  os << "var " << hex(s.var_target) << '\n';
  os << "learn_rate " << hex(s.learn_rate) << '\n';
  os << "mini_batch " << s.mini_batch << '\n';
  os << "epochs " << s.epochs << '\n';
  os << "patience " << s.patience << '\n';
  os << "seed " << s.seed << '\n';
  os << "gru_update " << to_string(s.gru_update) << '\n';
  os << "gru_readout " << to_string(s.gru_readout) << '\n';
  os << "optimizer " << to_string(s.optimizer) << '\n';
  os << "rrc_alpha " << hex(s.rrc_alpha) << '\n';
  os << "rrc_span " << s.rrc_span << '\n';
  write_list(os, "norm_mean", model.norm_mean);
  write_list(os, "norm_scale", model.norm_scale);
  os << "rule " << hex(model.rule.threshold) << ' ' << hex(model.rule.scale) << ' ' << hex(model.rule.offset) << ' '
     << (model.rule.method == ThresholdMethod::midpoint ? "midpoint" : "min_error") << '\n';
  os << "sa_phase " << model.sa_phase << '\n';
  write_list(os, "train_loss", model.train_loss);
  write_list(os, "validation_loss", model.validation_loss);
  const auto names = parameter_names(s.arch);
  for (std::size_t i = 0; i < model.net.params.size(); ++i) {
    const auto& p = model.net.params[i];
    os << "tensor " << names[i] << ' ' << p.rows() << ' ' << p.cols();
    for (Eigen::Index k = 0; k < p.size(); ++k) os << ' ' << hex(p.data()[k]);
    os << '\n';
  }
  os << "end\n";
}

TrainedModel read_model(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("model: empty file");
  {
    std::istringstream h(line);
    std::string magic;
    int version = 0;
    h >> magic >> version;
    if (magic != "slicenn-model") throw FormatError("model: missing 'slicenn-model' header");
    if (version != kModelFormatVersion) throw FormatError("model: unsupported format version " + std::to_string(version));
  }

  std::map<std::string, std::string> kv;
  TrainedModel model;
  std::vector<std::pair<std::string, Mat<double>>> tensors;
  bool ended = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "norm_mean" || key == "norm_scale") {
      const auto v = read_list(ls);
      (key == "norm_mean" ? model.norm_mean : model.norm_scale) =
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "train_loss") {
      model.train_loss = read_list(ls);
    } else if (key == "validation_loss") {
      model.validation_loss = read_list(ls);
    } else if (key == "rule") {
      std::string t, s, o, m;
      if (!(ls >> t >> s >> o >> m)) throw FormatError("model: malformed rule line");
      model.rule.threshold = parse(t);
      model.rule.scale = parse(s);
      model.rule.offset = parse(o);
      model.rule.method = m == "min_error" ? ThresholdMethod::min_error : ThresholdMethod::midpoint;
    } else if (key == "tensor") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) throw FormatError("model: malformed tensor header");
      Mat<double> m(rows, cols);
      std::string tok;
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        if (!(ls >> tok)) throw FormatError("model: truncated tensor '" + name + "'");
        m.data()[k] = parse(tok);
      }
      tensors.emplace_back(name, std::move(m));
    } else {
      std::string rest;
      std::getline(ls >> std::ws, rest);
      kv[key] = rest;
    }
  }
  if (!ended) throw FormatError("model: missing 'end' marker");

  auto get = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError(std::string("model: missing key '") + k + "'");
    return it->second;
  };
  EqualizerSpec& s = model.spec;
  s.arch = arch_from_string(get("arch"));
  s.framing = FramingSpec::make(framing_mode_from_string(get("framing")), std::stoi(get("context_symbols")),
                                std::stoi(get("sps")), std::stoi(get("n_slices")));
  s.n_hidden = std::stoi(get("n_hidden"));
  s.filter_width = std::stoi(get("filter_width"));
  s.f_hidden = activation_from_string(get("f_hidden"));
  s.f_out = activation_from_string(get("f_out"));
  s.var_target = parse(get("var"));
  s.learn_rate = parse(get("learn_rate"));
  s.mini_batch = std::stoi(get("mini_batch"));
  s.epochs = std::stoi(get("epochs"));
  s.patience = std::stoi(get("patience"));
  s.seed = std::stoull(get("seed"));
  s.gru_update = gru_update_from_string(get("gru_update"));
  s.gru_readout = gru_readout_from_string(get("gru_readout"));
  s.optimizer = optimizer_from_string(get("optimizer"));
  s.rrc_alpha = parse(get("rrc_alpha"));
  s.rrc_span = std::stoi(get("rrc_span"));
  model.sa_phase = std::stoi(get("sa_phase"));
  s.validate();

  model.net = Network<double>::zeros(s.shape());
  const auto names = parameter_names(s.arch);
  if (tensors.size() != model.net.params.size()) throw FormatError("model: wrong number of tensors");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].first != names[i]) throw FormatError("model: expected tensor '" + names[i] + "'");
    if (tensors[i].second.rows() != model.net.params[i].rows() || tensors[i].second.cols() != model.net.params[i].cols())
      throw FormatError("model: tensor '" + names[i] + "' has the wrong shape");
    model.net.params[i] = std::move(tensors[i].second);
  }
  if (model.norm_mean.size() != s.framing.n_slices || model.norm_scale.size() != s.framing.n_slices)
    throw FormatError("model: normalization length does not match n_slices");
  return model;
}

void save_model(const std::string& path, const TrainedModel& model) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_model(os, model);
  if (!os) throw IoError("write failed: '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_model(is);
}

}  // namespace slicenn
