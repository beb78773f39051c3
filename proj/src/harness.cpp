#include "slicenn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

namespace slicenn {

std::vector<Series> series_of(const ExperimentConfig& config) {
  std::vector<Series> out;
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < config.equalizers.size(); ++i) {
    const auto& e = config.equalizers[i];
    std::string label = e.name();
    if (int n = seen[label]++; n > 0) label += "#" + std::to_string(n + 1);
    out.push_back({Series::Kind::equalizer, static_cast<int>(i), label, to_string(e.framing.mode)});
  }
  if (config.references.unequalized) out.push_back({Series::Kind::unequalized, 0, "unequalized", "-"});
  if (config.references.back_to_back) out.push_back({Series::Kind::back_to_back, 0, "b2b", "-"});
  if (config.references.ffe) out.push_back({Series::Kind::ffe, 0, "ffe", "-"});
  return out;
}

namespace {

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); }

std::uint64_t label_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kLinkTag = 0x6c696e6bULL;
constexpr std::uint64_t kTrainTag = 0x747261696eULL;

struct PointData {
  LinkOutput out;
  Bits bits;
  RealSequence drive;
};

PointData simulate_point(const ExperimentConfig& config, double distance_km, double snr_db) {
  LinkConfig link = config.link;
  link.fiber_length_km = distance_km;
  link.snr_db = snr_db;
  Prng prng(link_seed(config.seed, distance_km, snr_db));
  PointData d;
  d.bits = generate_bits(prng, static_cast<std::size_t>(config.total_symbols()));
  d.out = simulate_link_with_reference(d.bits, link, prng);
  d.drive = drive_waveform(d.bits, link);
  return d;
}

void fill(SweepRecord& r, const BerResult& b) {
  r.ber = b.ber;
  r.errors = b.errors;
  r.bits = b.bits_counted;
}

template <typename F>
SweepRecord guarded(SweepRecord r, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const Error& e) {
    r.status = e.kind();
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = "internal";
    r.message = e.what();
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

bool record_less(const SweepRecord& a, const SweepRecord& b) {
  return std::tie(a.distance_km, a.equalizer, a.budget, a.snr_db) < std::tie(b.distance_km, b.equalizer, b.budget, b.snr_db);
}

}  // namespace

std::uint64_t link_seed(std::uint64_t master, double distance_km, double snr_db) {
  return derive_seed(master, {kLinkTag, bits_of(distance_km), bits_of(snr_db)});
}

std::uint64_t train_seed(std::uint64_t master, double distance_km, double snr_db, const std::string& label,
                         std::int64_t budget) {
  return derive_seed(master, {kTrainTag, bits_of(distance_km), bits_of(snr_db), label_hash(label),
                              static_cast<std::uint64_t>(budget)});
}

SweepRecord run_equalizer_point(const ExperimentConfig& config, const EqualizerSpec& spec, const std::string& label,
                                double distance_km, double snr_db, std::int64_t budget) {
  SweepRecord r;
  r.budget = budget;
  r.distance_km = distance_km;
  r.snr_db = snr_db;
  r.equalizer = label;
  r.framing = to_string(spec.framing.mode);
  r.memory = spec.framing.memory();
  r.n_hidden = spec.n_hidden;
  return guarded(r, [&](SweepRecord& rec) {
    rec.cc_per_symbol = complexity_of(spec.arch, spec.framing, spec.n_hidden, spec.filter_width).cc_per_symbol;
    PointData d = simulate_point(config, distance_km, snr_db);
    EqualizerSpec s = spec;
    s.seed = train_seed(config.seed, distance_km, snr_db, label, budget);
    const DataSplit split = config.split();
    TrainingData data{std::move(d.out.sliced), std::move(d.bits), std::move(d.drive)};
    const TrainedModel model = train(s, data, split);
    if (!model.train_loss.empty()) rec.train_loss = model.train_loss.back();
    fill(rec, evaluate(model, data, split.test));
  });
}

SweepRecord run_point(const ExperimentConfig& config, const Series& series, double distance_km, double snr_db) {
  if (series.kind == Series::Kind::equalizer)
    return run_equalizer_point(config, config.equalizers.at(static_cast<std::size_t>(series.index)), series.label,
                               distance_km, snr_db);
  SweepRecord r;
  r.distance_km = distance_km;
  r.snr_db = snr_db;
  r.equalizer = series.label;
  r.framing = series.framing;
  return guarded(r, [&](SweepRecord& rec) {
    const double d_km = series.kind == Series::Kind::back_to_back ? 0.0 : distance_km;
    rec.distance_km = d_km;
    const PointData d = simulate_point(config, d_km, snr_db);
    const DataSplit split = config.split();
    const int sps = config.link.sim_sps;
    const double alpha = config.link.rrc_alpha;
    const int span = config.link.rrc_span;
    if (series.kind == Series::Kind::ffe) {
      const auto& ref = config.references;
      rec.cc_per_symbol = cc_ffe(ref.ffe_taps);
      const FfeReceiver ffe =
          train_ffe(d.out.single_pd, d.bits, sps, alpha, split.train, ref.ffe_train_symbols, ref.ffe_taps, ref.ffe_step, span);
      fill(rec, evaluate_ffe(ffe, d.out.single_pd, d.bits, sps, alpha, split.test, span));
    } else {
      fill(rec, evaluate_unequalized(d.out.single_pd, d.bits, sps, alpha, split.train, split.test, span));
    }
  });
}

void run_parallel(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<CurvePoint> curve_of(const SweepResult& r, const std::string& equalizer, double distance_km) {
  std::vector<CurvePoint> c;
  for (const auto& rec : r.records) {
    if (rec.equalizer != equalizer || rec.distance_km != distance_km || !rec.ok() || rec.bits == 0) continue;
    c.push_back({rec.snr_db, std::max(rec.ber, 0.5 / static_cast<double>(rec.bits))});
  }
  std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; });
  return c;
}

namespace {

struct Job {
  Series series;
  double distance_km;
};

RequiredSnr required_of(const std::vector<SweepRecord>& recs) {
  std::vector<CurvePoint> c;
  for (const auto& r : recs)
    if (r.ok() && r.bits > 0) c.push_back({r.snr_db, std::max(r.ber, 0.5 / static_cast<double>(r.bits))});
  if (c.empty()) return {};
  return required_snr(c, kKp4Threshold);
}

// Evaluates the grid, then extends it one step at a time until the KP4
// crossing is bracketed or the limits are hit.
std::vector<SweepRecord> run_series(const ExperimentConfig& config, const Job& job, const std::vector<double>& grid,
                                    bool extend) {
  std::vector<SweepRecord> recs;
  for (double s : grid) recs.push_back(run_point(config, job.series, job.distance_km, s));
  const double step = config.snr_step_db;
  if (grid.empty()) {
    for (int i = 0;; ++i) {
      const double s = config.snr_start_db + i * step;
      if (s > config.snr_cap_db + 1e-9) break;
      recs.push_back(run_point(config, job.series, job.distance_km, s));
      const auto& r = recs.back();
      if (r.ok() && r.ber < kKp4Threshold) break;
    }
    return recs;
  }
  if (!extend) return recs;
  const double lo_limit = *std::min_element(grid.begin(), grid.end()) - (config.snr_cap_db - config.snr_start_db);
  for (;;) {
    const RequiredSnr req = required_of(recs);
    auto [lo_it, hi_it] = std::minmax_element(recs.begin(), recs.end(),
                                              [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; });
    const double lo = lo_it->snr_db, hi = hi_it->snr_db;
    if (req.status == RequiredSnr::Status::no_reach && hi + step <= config.snr_cap_db + 1e-9 && std::isfinite(hi)) {
      recs.push_back(run_point(config, job.series, job.distance_km, hi + step));
    } else if (req.status == RequiredSnr::Status::below_grid && lo - step >= lo_limit - 1e-9) {
      recs.push_back(run_point(config, job.series, job.distance_km, lo - step));
    } else {
      break;
    }
  }
  return recs;
}

SweepResult collect(const ExperimentConfig& config, std::string kind, std::vector<std::vector<SweepRecord>> parts) {
  SweepResult r;
  r.kind = std::move(kind);
  r.config_hash = config_hash(config);
  r.seed = config.seed;
  for (auto& p : parts)
    for (auto& rec : p) r.records.push_back(std::move(rec));
  std::stable_sort(r.records.begin(), r.records.end(), record_less);
  return r;
}

std::vector<std::vector<SweepRecord>> run_jobs(const ExperimentConfig& config, const std::vector<Job>& jobs,
                                               bool extend) {
  std::vector<std::vector<SweepRecord>> parts(jobs.size());
  run_parallel(jobs.size(), config.workers,
               [&](std::size_t i) { parts[i] = run_series(config, jobs[i], config.snr_db, extend); });
  return parts;
}

}  // namespace

SweepResult run_ber_vs_snr(const ExperimentConfig& config, double distance_km) {
  config.validate();
  std::vector<Job> jobs;
  for (const auto& s : series_of(config)) jobs.push_back({s, distance_km});
  return collect(config, "ber_vs_snr", run_jobs(config, jobs, false));
}

SweepResult run_penalty_vs_distance(const ExperimentConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  bool have_ref = false;
  for (const auto& s : series_of(config)) {
    if (s.kind == Series::Kind::back_to_back) {
      jobs.push_back({s, 0.0});
      have_ref = true;
      continue;
    }
    for (double d : config.distances_km) jobs.push_back({s, d});
  }
  if (!have_ref) {
    Series ref{Series::Kind::back_to_back, 0, "b2b", "-"};
    jobs.push_back({ref, 0.0});
  }
  SweepResult r = collect(config, "penalty_vs_distance", run_jobs(config, jobs, true));

  std::vector<SweepRecord> ref_recs;
  for (const auto& rec : r.records)
    if (rec.equalizer == "b2b") ref_recs.push_back(rec);
  r.reference = required_of(ref_recs);
  for (const auto& job : jobs) {
    if (job.series.kind == Series::Kind::back_to_back) continue;
    std::vector<SweepRecord> recs;
    for (const auto& rec : r.records)
      if (rec.equalizer == job.series.label && rec.distance_km == job.distance_km) recs.push_back(rec);
    PenaltyRecord p;
    p.distance_km = job.distance_km;
    p.equalizer = job.series.label;
    p.required = required_of(recs);
    if (p.required.reached() && r.reference->reached()) p.penalty_db = p.required.snr_db - r.reference->snr_db;
    r.penalties.push_back(p);
  }
  std::sort(r.penalties.begin(), r.penalties.end(), [](const auto& a, const auto& b) {
    return std::tie(a.equalizer, a.distance_km) < std::tie(b.equalizer, b.distance_km);
  });
  return r;
}

SweepResult run_complexity_scan(const ExperimentConfig& config) {
  config.validate();
  if (config.budgets.empty()) throw ConfigurationError("complexity scan needs at least one budget");
  struct Task {
    EqualizerSpec spec;
    std::string label;
    std::int64_t budget;
    Realization real;
  };
  std::vector<Task> tasks;
  for (const auto& s : series_of(config)) {
    if (s.kind != Series::Kind::equalizer) continue;
    const EqualizerSpec& base = config.equalizers[static_cast<std::size_t>(s.index)];
    for (std::int64_t b : config.budgets) {
      RealizationSearch search;
      search.arch = base.arch;
      search.framing = base.framing;
      search.vary_memory = base.arch == Arch::gru;
      search.filter_width = 0;
      Task t{base, s.label, b, realize_under_budget(search, b)};
      if (t.real.achievable) {
        const auto& c = t.real.chosen;
        const int q = base.framing.mode == FramingMode::Sa ? 1 : base.framing.sps;
        t.spec.framing.context_symbols = (c.memory - q) / (2 * base.framing.sps);
        t.spec.n_hidden = c.n_hidden;
        t.spec.filter_width = c.filter_width;
      }
      tasks.push_back(std::move(t));
    }
  }
  std::vector<std::vector<SweepRecord>> parts(tasks.size());
  run_parallel(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& t = tasks[i];
    SweepRecord rec;
    if (!t.real.achievable) {
      rec.distance_km = config.scan_distance_km;
      rec.snr_db = config.scan_snr_db;
      rec.equalizer = t.label;
      rec.framing = to_string(t.spec.framing.mode);
      rec.status = "unachievable";
      rec.message = t.real.diagnostic;
    } else {
      rec = run_equalizer_point(config, t.spec, t.label, config.scan_distance_km, config.scan_snr_db, t.budget);
    }
    rec.budget = t.budget;
    parts[i] = {rec};
  });
  return collect(config, "complexity", std::move(parts));
}

}  // namespace slicenn
