#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "slicenn/config.hpp"
#include "slicenn/harness.hpp"
#include "slicenn/model_io.hpp"
#include "slicenn/report.hpp"

using namespace slicenn;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--profile", c.profile, "fast or paper")->check(CLI::IsMember({"fast", "paper"}));
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig::preset(profile_from_string(c.profile.value_or("fast")))
                                          : load_config(c.config);
  if (!c.config.empty() && c.profile) cfg.apply_profile(profile_from_string(*c.profile));
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out_dir = *c.out;
  if (c.workers) cfg.workers = *c.workers;
  cfg.validate();
  return cfg;
}

void report_written(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

int exit_code(const std::string& kind) {
  if (kind == "io") return 3;
  if (kind == "format") return 4;
  if (kind == "configuration" || kind == "parameter") return 2;
  return 1;
}

EqualizerSpec pick_equalizer(const ExperimentConfig& cfg, const std::string& name) {
  for (const auto& s : series_of(cfg))
    if (s.kind == Series::Kind::equalizer && s.label == name) return cfg.equalizers[static_cast<std::size_t>(s.index)];
  EqualizerSpec e = EqualizerSpec::from_name(name);
  if (!cfg.equalizers.empty()) {
    e.epochs = cfg.equalizers.front().epochs;
    e.optimizer = cfg.equalizers.front().optimizer;
  }
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliced-spectrum IM/DD link simulator and neural equalizer workbench"};
  app.require_subcommand(1);

  Common common;
  double distance = NAN, snr = INFINITY;
  std::string signal_path, bits_path, model_path, eq_name = "Sy-FNN";

  auto* sim = app.add_subcommand("simulate", "simulate the link and write the sliced signal and bits");
  add_common(sim, common);
  sim->add_option("--distance", distance, "fiber length [km]");
  sim->add_option("--snr", snr, "SNR [dB] (omit for noiseless)");

  auto* trn = app.add_subcommand("train", "train one equalizer on a simulated signal");
  add_common(trn, common);
  trn->add_option("--signal", signal_path, "sliced signal file")->required()->check(CLI::ExistingFile);
  trn->add_option("--bits", bits_path, "bits file")->required()->check(CLI::ExistingFile);
  trn->add_option("--equalizer", eq_name, "e.g. Sy-FNN, Sa-GRU");

  auto* evl = app.add_subcommand("evaluate", "BER of a trained model on a signal");
  add_common(evl, common);
  evl->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  evl->add_option("--signal", signal_path, "sliced signal file")->required()->check(CLI::ExistingFile);
  evl->add_option("--bits", bits_path, "bits file")->required()->check(CLI::ExistingFile);

  auto* ssnr = app.add_subcommand("sweep-snr", "BER against SNR at one distance");
  add_common(ssnr, common);
  ssnr->add_option("--distance", distance, "fiber length [km] (default: first configured distance)");

  auto* sdist = app.add_subcommand("sweep-distance", "SNR penalty at KP4 against distance");
  add_common(sdist, common);

  auto* scx = app.add_subcommand("sweep-complexity", "BER of budget-restricted equalizers");
  add_common(scx, common);

  auto* cx = app.add_subcommand("complexity", "print realizations under the configured budgets");
  add_common(cx, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(common);
    const fs::path out = cfg.out_dir;
    if (sim->parsed()) {
      const double d = std::isnan(distance) ? cfg.distances_km.front() : distance;
      LinkConfig link = cfg.link;
      link.fiber_length_km = d;
      link.snr_db = snr;
      Prng prng(link_seed(cfg.seed, d, snr));
      const Bits bits = generate_bits(prng, static_cast<std::size_t>(cfg.total_symbols()));
      const SlicedSignal s = simulate_link(bits, link, prng);
      fs::create_directories(out);
      save_sliced_signal((out / "signal.csv").string(), s);
      save_bits((out / "bits.txt").string(), bits);
      report_written({(out / "signal.csv").string(), (out / "bits.txt").string()});
    } else if (trn->parsed()) {
      const SlicedSignal s = load_sliced_signal(signal_path);
      const Bits bits = load_bits(bits_path);
      LinkConfig link = cfg.link;
      link.sim_sps = s.sps;
      EqualizerSpec spec = pick_equalizer(cfg, eq_name);
      spec.seed = derive_seed(cfg.seed, {0x6d6f64656cULL});
      TrainingData data{s, bits, drive_waveform(bits, link)};
      const TrainedModel m = train(spec, data, cfg.split());
      fs::create_directories(out);
      save_model((out / "model.txt").string(), m);
      const BerResult r = evaluate(m, data, cfg.split().test);
      std::printf("%s epochs=%zu final_train_loss=%.6g test_ber=%.6g (%zu/%zu)\n", spec.name().c_str(),
                  m.train_loss.size(), m.train_loss.empty() ? NAN : m.train_loss.back(), r.ber, r.errors, r.bits_counted);
      report_written({(out / "model.txt").string()});
    } else if (evl->parsed()) {
      const TrainedModel m = load_model(model_path);
      const SlicedSignal s = load_sliced_signal(signal_path);
      const Bits bits = load_bits(bits_path);
      TrainingData data{s, bits, {}};
      const BerResult r = evaluate(m, data, cfg.split().test);
      std::printf("ber=%.10g errors=%zu bits=%zu\n", r.ber, r.errors, r.bits_counted);
    } else if (ssnr->parsed()) {
      const double d = std::isnan(distance) ? cfg.distances_km.front() : distance;
      report_written(emit_outputs(run_ber_vs_snr(cfg, d), out.string()));
    } else if (sdist->parsed()) {
      report_written(emit_outputs(run_penalty_vs_distance(cfg), out.string()));
    } else if (scx->parsed()) {
      report_written(emit_outputs(run_complexity_scan(cfg), out.string()));
    } else if (cx->parsed()) {
      write_complexity_table(std::cout, cfg.budgets);
      if (common.out) {
        fs::create_directories(out);
        std::ofstream os(out / "complexity.csv");
        if (!os) throw IoError("cannot write " + (out / "complexity.csv").string());
        write_complexity_table(os, cfg.budgets);
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", e.kind().c_str(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 1;
  }
  return 0;
}
