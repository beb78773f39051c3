#include "slicenn/network.hpp"

namespace slicenn {

std::string to_string(Arch a) {
  switch (a) {
    case Arch::fnn: return "FNN";
    case Arch::gru: return "GRU";
    case Arch::cnn: return "CNN";
  }
  return "?";
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "?";
}

std::string to_string(GruUpdate u) { return u == GruUpdate::verbatim ? "verbatim" : "standard"; }
std::string to_string(GruReadout r) { return r == GruReadout::final_state ? "final_state" : "per_step_mean"; }

Arch arch_from_string(const std::string& s) {
  if (s == "FNN" || s == "fnn") return Arch::fnn;
  if (s == "GRU" || s == "gru") return Arch::gru;
  if (s == "CNN" || s == "cnn") return Arch::cnn;
  throw ConfigurationError("unknown architecture '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::linear;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "relu" || s == "ReLU") return Activation::relu;
  throw ConfigurationError("unknown activation '" + s + "'");
}

GruUpdate gru_update_from_string(const std::string& s) {
  if (s == "verbatim") return GruUpdate::verbatim;
  if (s == "standard") return GruUpdate::standard;
  throw ConfigurationError("unknown gru_update '" + s + "'");
}

GruReadout gru_readout_from_string(const std::string& s) {
  if (s == "final_state") return GruReadout::final_state;
  if (s == "per_step_mean") return GruReadout::per_step_mean;
  throw ConfigurationError("unknown gru_readout '" + s + "'");
}

void NetworkShape::validate() const {
  if (memory < 1) throw ConfigurationError("network: memory must be >= 1");
  if (n_slices < 1) throw ConfigurationError("network: n_slices must be >= 1");
  if (n_hidden < 1) throw ConfigurationError("network: n_hidden must be >= 1");
  if (arch == Arch::cnn && (filter_width < 1 || filter_width > memory))
    throw ConfigurationError("network: CNN filter width must satisfy 1 <= N_w <= M");
}

std::vector<std::string> parameter_names(Arch arch) {
  switch (arch) {
    case Arch::fnn: return {"w_hidden", "b_hidden", "w_out", "b_out"};
    case Arch::gru: return {"w_r", "u_r", "b_r", "w_s", "u_s", "b_s", "w_h", "u_h", "b_h", "w_out", "b_out"};
    case Arch::cnn: return {"filters", "b_filters", "w_out", "b_out"};
  }
  return {};
}

}  // namespace slicenn
