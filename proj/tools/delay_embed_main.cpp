// delay-embed: command-line harness around the delay-embedding library.
// Subcommands: gen, spectrum, fit, predict, mindelay, cond, pseudospec,
// ensemble, hodmd. Exit codes: 0 success, 2 validation error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include "delay_embed/conditioning.hpp"
#include "delay_embed/delay_solver.hpp"
#include "delay_embed/io.hpp"
#include "delay_embed/modal.hpp"
#include "delay_embed/signals.hpp"
#include "delay_embed/spectral.hpp"
#include "delay_embed/vector_analysis.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace delay_embed;
using delay_solver::RowSelection;
using delay_solver::SpectralMethod;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Output {
  fs::path dir;
  json config;

  explicit Output(const std::string& out_dir, json cfg)
      : dir(out_dir), config(std::move(cfg)) {
    fs::create_directories(dir);
  }

  fs::path operator/(const std::string& name) const { return dir / name; }

  void finalize(double wall_seconds) const {
    json manifest;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    manifest["config_hash"] = hash;
    manifest["version"] = kVersion;
    manifest["wall_clock_s"] = wall_seconds;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    std::ofstream cf(dir / "config.json");
    cf << config.dump(2) << "\n";
  }
};

// ---- builtin signals ------------------------------------------------------

TimeSeries make_builtin(const json& cfg) {
  const std::string name = cfg.at("signal");
  if (name == "five-mode") {
    TimeSeries ts = signals::gen_five_mode(cfg.value("M", 100), cfg.value("periods", 2));
    if (cfg.value("snr", 0.0) > 0.0)
      ts = signals::add_noise(
          ts, {cfg["snr"], cfg.value("seed", std::uint64_t{0})});
    return ts;
  }
  if (name == "vdp") {
    TimeSeries raw = signals::gen_vdp(cfg.value("mu", 2.0), {1.0, 0.0},
                                      cfg.value("dt", 0.01),
                                      cfg.value("discard", 530) +
                                          cfg.value("periods", 4) * cfg.value("period", 776));
    return signals::segment(raw, cfg.value("discard", 530),
                            cfg.value("periods", 4) * cfg.value("period", 776),
                            cfg.value("period", 776));
  }
  if (name == "quasi-periodic")
    return signals::gen_quasi_periodic(cfg.value("dt", 0.1), cfg.value("steps", 401));
  if (name == "surrogate")
    return signals::gen_modal_surrogate(cfg.value("channels", 200), cfg.value("steps", 400),
                                        cfg.value("strong", 10), cfg.value("weak", 15),
                                        cfg.value("weak_amplitude", 0.03),
                                        cfg.value("seed", std::uint64_t{1}))
        .series;
  throw std::invalid_argument("unknown builtin signal: " + name);
}

TimeSeries load_input(const json& cfg) {
  if (cfg.contains("input")) return io::read_timeseries_csv(cfg["input"].get<std::string>());
  if (cfg.contains("signal")) return make_builtin(cfg);
  throw std::invalid_argument("either --input or --signal is required");
}

// Filtered resample: keep the pattern bins of one component and sample the
// interpolant on a new grid with samples_per_period points.
TimeSeries filtered_resample(const TimeSeries& ts, int component, double threshold,
                             int samples_per_period, int n_periods) {
  const auto spec = spectral::dft(signals::subtract_mean(ts), component);
  const auto pat = spectral::detect_sparsity(spec, threshold);
  const auto filt = spectral::filter_spectrum(spec, pat);
  TimeSeries out;
  const int n = samples_per_period * n_periods;
  out.data.resize(1, n);
  for (int k = 0; k < n; ++k)
    out.data(0, k) =
        spectral::reconstruct(filt, static_cast<double>(k) / samples_per_period);
  out.dt = ts.dt * (*ts.period_samples) / samples_per_period;
  out.period_samples = samples_per_period;
  return out;
}

// ---- subcommands ----------------------------------------------------------

int cmd_gen(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-gen"), cfg);
  const TimeSeries ts = make_builtin(cfg);
  io::write_timeseries_csv(out / "series.csv", ts);
  std::cout << "wrote " << (out / "series.csv").string() << " (J=" << ts.components()
            << ", N=" << ts.samples() << ", dt=" << ts.dt << ")\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_spectrum(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-spectrum"), cfg);
  TimeSeries ts = load_input(cfg);
  if (cfg.value("subtract_mean", true)) ts = signals::subtract_mean(ts);
  if (cfg.contains("period")) ts.period_samples = cfg["period"].get<int>();
  const int component = cfg.value("component", 0);
  const double thr = cfg.value("threshold", 1e-10);

  const auto spec = spectral::dft(ts, component);
  const auto pat = spectral::detect_sparsity(spec, thr);
  io::write_spectrum_json(out / "spectrum.json", spec, pat);

  std::cout << "M=" << spec.M << " P=" << pat.P();
  if (pat.P() > 0) {
    std::cout << " minimal_L=" << delay_solver::minimal_delay_scalar(pat);
    const bool has_mid =
        std::count(pat.indices.begin(), pat.indices.end(), spec.M / 2) > 0;
    if (spec.M % 2 == 0 && !has_mid)
      std::cout << " M_star=" << spectral::min_subsample(pat, spec.M);
    std::cout << "\n  pattern:";
    for (int i : pat.indices) std::cout << " " << i;
  }
  std::cout << "\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

struct FitOutcome {
  delay_solver::DelayModel model;
  double nmse = 0.0;
};

FitOutcome fit_and_roll(const TimeSeries& ts, int L, const json& cfg) {
  const int n = ts.samples();
  int train = cfg.value("train_count", 0);
  if (train == 0 && cfg.contains("train_frac"))
    train = static_cast<int>(cfg["train_frac"].get<double>() * n);
  if (train == 0) train = n;
  if (train < L + 2)
    throw std::invalid_argument("fit: training window shorter than L+2");

  const std::string rows = cfg.value("rows", "contiguous");
  const std::string solver = cfg.value("solver", "time");
  const double cutoff = cfg.value("svd_cutoff", 1e-15);

  delay_solver::DelayModel model;
  if (solver == "time") {
    const auto sel = rows == "periodic"
                         ? RowSelection::all_periodic()
                         : RowSelection::contiguous(L, train - 1 - L);
    model = delay_solver::solve_time_domain(
        delay_solver::build_hankel(ts, L, sel), cutoff);
  } else {
    detail::require(ts.components() == 1, "spectral solvers are scalar-only");
    const auto spec = spectral::dft(ts);
    const auto pat = spectral::detect_sparsity(spec, cfg.value("threshold", 1e-10));
    const auto sys = delay_solver::build_spectral_system(pat, spec.M, L);
    model = delay_solver::solve_spectral(
        sys, solver == "bp" ? SpectralMethod::bp : SpectralMethod::svd, cutoff);
  }

  FitOutcome res;
  res.model = model;
  const int horizon = std::min<int>(n, cfg.value("horizon", n));
  const MatrixXd seed = ts.data.middleCols(train - (L + 1), L + 1);
  if (horizon > train) {
    const TimeSeries pred =
        delay_solver::predict_rollout(model, seed, horizon - train, ts.dt);
    TimeSeries truth;
    truth.data = ts.data.middleCols(train, horizon - train);
    truth.dt = ts.dt;
    res.nmse = delay_solver::nmse(pred, truth);
  }
  return res;
}

int cmd_fit(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-fit"), cfg);
  const TimeSeries ts = load_input(cfg);

  std::vector<int> l_values;
  if (cfg.contains("L_sweep"))
    l_values = cfg["L_sweep"].get<std::vector<int>>();
  else
    l_values = {cfg.value("L", delay_solver::minimal_delay_scalar(
                                   spectral::detect_sparsity(
                                       spectral::dft(signals::subtract_mean(ts)),
                                       cfg.value("threshold", 1e-10))))};

  std::ofstream sweep(out / "nmse_by_L.csv");
  sweep << "L,nmse\n";
  FitOutcome best;
  double best_nmse = std::numeric_limits<double>::infinity();
  int best_l = -1;
  for (int l : l_values) {
    const FitOutcome r = fit_and_roll(ts, l, cfg);
    sweep << l << "," << io::format_double(r.nmse) << "\n";
    std::cout << "L=" << l << " nmse=" << io::format_double(r.nmse) << "\n";
    if (r.nmse < best_nmse) {
      best_nmse = r.nmse;
      best = r;
      best_l = l;
    }
  }
  io::write_model_json(out / "model.json", best.model);

  // prediction trace for the selected model
  const int n = ts.samples();
  int train = cfg.value("train_count", 0);
  if (train == 0 && cfg.contains("train_frac"))
    train = static_cast<int>(cfg["train_frac"].get<double>() * n);
  if (train == 0) train = n;
  if (train < n) {
    const MatrixXd seed = ts.data.middleCols(train - (best_l + 1), best_l + 1);
    const TimeSeries pred =
        delay_solver::predict_rollout(best.model, seed, n - train, ts.dt);
    io::write_timeseries_csv(out / "prediction.csv", pred);
  }
  std::cout << "best L=" << best_l << " nmse=" << io::format_double(best_nmse) << "\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_predict(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-predict"), cfg);
  const auto model = io::read_model_json(cfg.at("model").get<std::string>());
  const TimeSeries ts = load_input(cfg);
  const int L = model.L;
  const int seed_end = cfg.value("seed_end", L + 1);
  detail::require(seed_end >= L + 1 && seed_end <= ts.samples(),
                  "predict: seed window out of range");
  const int steps = cfg.value("steps", ts.samples() - seed_end);
  detail::require(steps >= 1, "predict: nothing to predict");

  const MatrixXd seed = ts.data.middleCols(seed_end - (L + 1), L + 1);
  const TimeSeries pred = delay_solver::predict_rollout(model, seed, steps, ts.dt);
  io::write_timeseries_csv(out / "prediction.csv", pred);
  if (seed_end + steps <= ts.samples()) {
    TimeSeries truth;
    truth.data = ts.data.middleCols(seed_end, steps);
    truth.dt = ts.dt;
    std::cout << "nmse=" << io::format_double(delay_solver::nmse(pred, truth)) << "\n";
  }
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_mindelay(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-mindelay"), cfg);
  TimeSeries ts = load_input(cfg);
  if (cfg.value("subtract_mean", true)) ts = signals::subtract_mean(ts);
  if (cfg.contains("period")) ts.period_samples = cfg["period"].get<int>();
  const double thr = cfg.value("threshold", 1e-10);
  const double rank_tol = cfg.value("rank_tol", 1e-10);

  // Optional cleanup for approximately sparse signals: keep each component's
  // pattern bins and resample the filtered interpolants at resample_M per
  // period before the stacked analysis.
  if (cfg.contains("resample_M")) {
    const int m_new = cfg["resample_M"].get<int>();
    TimeSeries resampled;
    resampled.data.resize(ts.components(), m_new);
    for (int j = 0; j < ts.components(); ++j)
      resampled.data.row(j) =
          filtered_resample(ts, j, thr, m_new, 1).data.row(0);
    resampled.dt = ts.dt * (*ts.period_samples) / m_new;
    resampled.period_samples = m_new;
    ts = resampled;
  }

  std::vector<spectral::FourierSpectrum> specs;
  for (int j = 0; j < ts.components(); ++j) specs.push_back(spectral::dft(ts, j));
  const auto stacked = vector_analysis::make_stacked(specs, thr);

  io::VectorReport rep;
  rep.P_union = stacked.P_union();
  rep.minimal_L = vector_analysis::minimal_delay_vector(stacked, rank_tol);

  // The induced system keeps exactly the union-pattern rows: filter each
  // spectrum to the pattern, then eliminate the (exactly) zero rows.
  vector_analysis::StackedSpectra on_pattern = stacked;
  for (auto& s : on_pattern.spectra)
    s = spectral::filter_spectrum(s, stacked.union_pattern);
  rep.oc_index = vector_analysis::oc_index(
      vector_analysis::row_eliminate(on_pattern, 0.0), rank_tol);
  for (int l = 0; l <= rep.minimal_L + 2; ++l)
    rep.ranks_by_L.push_back(vector_analysis::rank_test_vector(stacked, l, rank_tol));
  io::write_vector_report_json(out / "mindelay.json", rep);

  std::cout << "P_union=" << rep.P_union << " minimal_L=" << rep.minimal_L
            << " oc_index=" << rep.oc_index << " (bound L<=" << rep.oc_index - 1
            << ")\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_cond(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-cond"), cfg);

  std::vector<int> m_sweep = cfg.value("M_sweep", std::vector<int>{});
  std::vector<int> l_sweep = cfg.value("L_sweep", std::vector<int>{});
  if (m_sweep.empty() && l_sweep.empty())
    throw std::invalid_argument("cond: at least one of M_sweep/L_sweep required");
  if (m_sweep.empty()) m_sweep = {cfg.value("M", 100)};
  if (l_sweep.empty()) l_sweep = {cfg.value("L", 9)};

  std::vector<io::ConditionRow> rows;
  std::ofstream nm(out / "nmse.csv");
  nm << "M,L,nmse,residual\n";
  for (int m : m_sweep) {
    // the sweep signal is the five-mode series resampled at M per period
    const TimeSeries ts = signals::gen_five_mode(m, 2);
    const auto pat = spectral::detect_sparsity(spectral::dft(ts), 1e-10);
    for (int l : l_sweep) {
      io::ConditionRow row;
      row.M = m;
      row.L = l;
      row.report = conditioning::analyze_spectral_system(pat, m, l,
                                                         cfg.value("svd_cutoff", 1e-15));
      rows.push_back(row);

      json fit_cfg = cfg;
      int tc = cfg.value("train_count", 0);
      if (tc == 0) tc = m;  // default: one period of training data
      fit_cfg["train_count"] = tc;
      const auto sys =
          delay_solver::build_hankel(ts, l, RowSelection::contiguous(l, tc - 1 - l));
      const auto model =
          delay_solver::solve_time_domain(sys, cfg.value("svd_cutoff", 1e-15));
      const double resid = (sys.regressor * model.weights - sys.target).norm();
      const FitOutcome r = fit_and_roll(ts, l, fit_cfg);
      nm << m << "," << l << "," << io::format_double(r.nmse) << ","
         << io::format_double(resid) << "\n";
    }
  }
  io::write_condition_csv(out / "cond.csv", rows);
  std::cout << "wrote " << rows.size() << " sweep points\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_pseudospec(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-pseudospec"), cfg);
  modal::GridSpec grid;
  grid.re_min = cfg.value("re_min", -1.5);
  grid.re_max = cfg.value("re_max", 1.5);
  grid.im_min = cfg.value("im_min", -1.5);
  grid.im_max = cfg.value("im_max", 1.5);
  grid.nx = cfg.value("nx", 301);
  grid.ny = cfg.value("ny", 301);

  delay_solver::DelayModel model;
  if (cfg.contains("model")) {
    model = io::read_model_json(cfg["model"].get<std::string>());
  } else {
    const TimeSeries ts = load_input(cfg);
    const FitOutcome r = fit_and_roll(ts, cfg.value("L", 9), cfg);
    model = r.model;
  }
  const auto cm = modal::companion(model);
  const auto ps = modal::pseudospectrum(cm, grid, cfg.value("threads", 0));
  io::write_pseudospectrum_csv(out / "pseudospectrum.csv", ps);
  io::write_modal_json(out / "modes.json", modal::eigendecompose(cm));
  std::cout << "grid " << grid.nx << "x" << grid.ny
            << " min sigma=" << io::format_double(ps.sigma_min.minCoeff()) << "\n";
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_ensemble(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-ensemble"), cfg);
  const int members = cfg.value("members", 500);
  const double snr = cfg.value("snr", 0.01);
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  const std::vector<int> l_values = cfg.value("L_sweep", std::vector<int>{9, 20});
  const int m = cfg.value("M", 100);
  const double stable_cut = cfg.value("stable_nmse", 0.5);

  const TimeSeries clean = signals::gen_five_mode(m, 2);
  TimeSeries truth_tail;
  truth_tail.data = clean.data.rightCols(m);
  truth_tail.dt = clean.dt;

  struct MemberResult {
    std::vector<VectorXcd> eigenvalues;  // per L
    std::vector<double> nmse;            // per L
  };
  std::vector<MemberResult> results(members);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= members) return;
      // per-member seed keeps the run order-independent
      const TimeSeries noisy =
          signals::add_noise(clean, {snr, seed + static_cast<std::uint64_t>(i)});
      MemberResult res;
      for (int l : l_values) {
        const auto sys = delay_solver::build_hankel(
            noisy, l, RowSelection::contiguous(l, m - 1 - l));
        const auto model = delay_solver::solve_time_domain(sys, 1e-15);
        res.eigenvalues.push_back(
            modal::eigendecompose(modal::companion(model)).eigenvalues);
        const MatrixXd seed_w = noisy.data.middleCols(m - (l + 1), l + 1);
        const TimeSeries pred =
            delay_solver::predict_rollout(model, seed_w, m, clean.dt);
        res.nmse.push_back(delay_solver::nmse(pred, truth_tail));
      }
      results[i] = std::move(res);
    }
  };
  const int workers = cfg.value("threads", 0) > 0
                          ? cfg["threads"].get<int>()
                          : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  // deterministic write order regardless of completion order
  std::ofstream cloud(out / "eigenvalues.csv");
  cloud << "member,L,re,im\n";
  for (int i = 0; i < members; ++i)
    for (size_t li = 0; li < l_values.size(); ++li)
      for (int e = 0; e < results[i].eigenvalues[li].size(); ++e)
        cloud << i << "," << l_values[li] << ","
              << io::format_double(results[i].eigenvalues[li](e).real()) << ","
              << io::format_double(results[i].eigenvalues[li](e).imag()) << "\n";

  std::ofstream stats(out / "stats.csv");
  stats << "L,stable_fraction,median_nmse\n";
  for (size_t li = 0; li < l_values.size(); ++li) {
    int stable = 0;
    std::vector<double> all;
    for (int i = 0; i < members; ++i) {
      const double v = results[i].nmse[li];
      if (std::isfinite(v) && v < stable_cut) ++stable;
      all.push_back(v);
    }
    std::sort(all.begin(), all.end());
    stats << l_values[li] << ","
          << io::format_double(static_cast<double>(stable) / members) << ","
          << io::format_double(all[members / 2]) << "\n";
    std::cout << "L=" << l_values[li]
              << " stable_fraction=" << static_cast<double>(stable) / members << "\n";
  }
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int cmd_hodmd(const json& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Output out(cfg.value("out", "out-hodmd"), cfg);
  const TimeSeries ts = load_input(cfg);
  const std::vector<int> r_values = cfg.value("r_sweep", std::vector<int>{cfg.value("r", 10)});
  const std::vector<int> l_values = cfg.value("L_sweep", std::vector<int>{cfg.value("L", 1)});
  const double cutoff = cfg.value("r_prime_cutoff", 1e-10);
  const int train = cfg.value("train_count", 0);

  std::ofstream summary(out / "hodmd.csv");
  summary << "r,L,r_prime,spectral_radius,nmse\n";
  for (int r : r_values) {
    for (int l : l_values) {
      try {
        const auto fit = modal::hodmd(ts, r, l, cutoff, train);
        const auto& dec = fit.decomposition;
        double radius = 0.0;
        for (int i = 0; i < dec.eigenvalues.size(); ++i)
          radius = std::max(radius, std::abs(dec.eigenvalues(i)));
        const TimeSeries rec = modal::modal_rollout(fit, ts, ts.samples());
        TimeSeries truth;
        truth.data = ts.data.middleCols(l + 1, ts.samples() - (l + 1));
        truth.dt = ts.dt;
        const double err = delay_solver::nmse(rec, truth);
        summary << r << "," << l << "," << dec.r_prime << ","
                << io::format_double(radius) << "," << io::format_double(err) << "\n";
        std::cout << "r=" << r << " L=" << l << " r'=" << dec.r_prime
                  << " radius=" << io::format_double(radius)
                  << " nmse=" << io::format_double(err) << "\n";
        char name[64];
        std::snprintf(name, sizeof(name), "modes_r%d_L%d.json", r, l);
        io::write_modal_json(out / name, dec);
      } catch (const std::invalid_argument& e) {
        summary << r << "," << l << ",,,\n";
        std::cout << "r=" << r << " L=" << l << " skipped: " << e.what() << "\n";
      }
    }
  }
  if (cfg.contains("optimal_delay_for_r")) {
    const int r = cfg["optimal_delay_for_r"];
    const auto od = modal::optimal_delay(ts.samples(), r);
    std::cout << "L_opt=" << od.L_opt << " (formula ceil(M/(r+1)); overdelay "
              << "threshold L_*=" << od.L_star << ", also consider L_opt-1="
              << od.L_opt - 1 << ") r'_*=" << od.r_prime_star << "\n";
  }
  out.finalize(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

// ---- presets --------------------------------------------------------------

json preset_config(const std::string& name) {
  if (name == "fig-result-1")
    return {{"signal", "five-mode"}, {"M", 100},  {"periods", 2},
            {"train_count", 40},     {"rows", "contiguous"},
            {"solver", "time"},      {"L_sweep", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}}};
  if (name == "fig-result-3")
    return {{"M_sweep", {26, 50, 100, 200, 400}}, {"L_sweep", {9}}, {"train_count", 0}};
  if (name == "fig-result-4")
    return {{"M_sweep", {500}},
            {"L_sweep", {9, 15, 25, 50, 100, 200}},
            {"train_count", 500}};
  if (name == "fig-result-5")
    return {{"M_sweep", {26, 34, 50, 66, 82, 98}}, {"L_sweep", {9}}, {"train_count", 0}};
  if (name == "fig-true-quasi")
    return {{"signal", "quasi-periodic"}, {"dt", 0.1},      {"steps", 401},
            {"train_count", 61},          {"solver", "time"}, {"L_sweep", {5, 6, 7, 8, 9}}};
  if (name == "fig-noise")
    return {{"members", 500}, {"snr", 0.01}, {"M", 100}, {"L_sweep", {9, 20}}, {"seed", 2023}};
  if (name == "fig-noise-spectra")
    return {{"signal", "five-mode"}, {"M", 100},       {"periods", 2},
            {"snr", 0.01},           {"seed", 5},      {"train_count", 100},
            {"L", 9},                {"nx", 121},      {"ny", 121}};
  if (name == "fig-rb-surrogate")
    return {{"signal", "surrogate"}, {"channels", 200},    {"steps", 400},
            {"strong", 10},          {"weak", 15},         {"weak_amplitude", 0.03},
            {"seed", 69},            {"train_count", 55},  {"r_sweep", {40}},
            {"L_sweep", {0, 1, 2}},  {"r_prime_cutoff", 1e-10}};
  if (name == "tab-vdp")
    return {{"signal", "vdp"}, {"mu", 2.0},       {"dt", 0.01}, {"discard", 530},
            {"period", 776},   {"periods", 4},    {"threshold", 1e-2},
            {"rank_tol", 1e-10}, {"resample_M", 80}};
  throw std::invalid_argument("unknown preset: " + name);
}

json merge_config(const json& base, const json& overrides) {
  json merged = base;
  for (auto it = overrides.begin(); it != overrides.end(); ++it)
    merged[it.key()] = it.value();
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delay-embed: linear time-delay models of periodic signals"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset;
  long long seed = -1;
  app.add_option("--config", config_path, "JSON config file (see docs/config-schema.json)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the config seed");

  // subcommand-level options land directly in the JSON overlay
  json cli_overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // accept --out/--config/--seed after the subcommand
    sub->add_option_function<std::string>(
        "--preset", [&](const std::string& v) { preset = v; },
        "builtin experiment preset (fig-result-1, fig-result-3, fig-result-4, "
        "fig-result-5, fig-true-quasi, fig-noise, fig-noise-spectra, "
        "fig-rb-surrogate, tab-vdp)");
    sub->add_option_function<std::string>(
        "--input", [&](const std::string& v) { cli_overrides["input"] = v; },
        "input time series CSV");
    sub->add_option_function<std::string>(
        "--signal", [&](const std::string& v) { cli_overrides["signal"] = v; },
        "builtin signal (five-mode, vdp, quasi-periodic, surrogate)");
    sub->add_option_function<int>(
        "--M", [&](int v) { cli_overrides["M"] = v; }, "samples per period");
    sub->add_option_function<int>(
        "--L", [&](int v) { cli_overrides["L"] = v; }, "number of delays");
    sub->add_option_function<int>(
        "--train-count", [&](int v) { cli_overrides["train_count"] = v; },
        "training samples");
    sub->add_option_function<double>(
        "--threshold", [&](double v) { cli_overrides["threshold"] = v; },
        "relative sparsity threshold");
    sub->add_option_function<std::string>(
        "--solver", [&](const std::string& v) { cli_overrides["solver"] = v; },
        "time | bp | svd");
    sub->add_option_function<std::string>(
        "--model", [&](const std::string& v) { cli_overrides["model"] = v; },
        "model JSON path");
    sub->add_option_function<int>(
        "--steps", [&](int v) { cli_overrides["steps"] = v; }, "rollout steps");
    sub->add_option_function<int>(
        "--members", [&](int v) { cli_overrides["members"] = v; }, "ensemble size");
    sub->add_option_function<double>(
        "--snr", [&](double v) { cli_overrides["snr"] = v; }, "noise fraction");
    sub->add_option_function<int>(
        "--r", [&](int v) { cli_overrides["r"] = v; }, "spatial rank");
    sub->add_option_function<int>(
        "--threads", [&](int v) { cli_overrides["threads"] = v; }, "worker threads");
    sub->add_option_function<int>(
        "--periods", [&](int v) { cli_overrides["periods"] = v; }, "periods to generate");
    sub->add_option_function<int>(
        "--period", [&](int v) { cli_overrides["period"] = v; },
        "declare samples per period on the input");
  };

  std::map<std::string, int (*)(const json&)> handlers = {
      {"gen", cmd_gen},           {"spectrum", cmd_spectrum},
      {"fit", cmd_fit},           {"predict", cmd_predict},
      {"mindelay", cmd_mindelay}, {"cond", cmd_cond},
      {"pseudospec", cmd_pseudospec}, {"ensemble", cmd_ensemble},
      {"hodmd", cmd_hodmd}};
  const std::map<std::string, std::string> descriptions = {
      {"gen", "generate a builtin signal and write it as CSV"},
      {"spectrum", "DFT one period, detect sparsity, report P / minimal L / M*"},
      {"fit", "fit a delay model (optionally over an L sweep) and report NMSE"},
      {"predict", "roll out a stored model over a seed window"},
      {"mindelay", "vector-case rank test, minimal L and OC index"},
      {"cond", "conditioning sweep over M and L"},
      {"pseudospec", "sigma_min grid of the companion matrix"},
      {"ensemble", "noise ensemble: eigenvalue cloud and stable fraction"},
      {"hodmd", "SVD-reduced high-order DMD sweep"}};
  for (auto& [name, fn] : handlers)
    add_common(app.add_subcommand(name, descriptions.at(name)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json cfg;
    if (!preset.empty()) cfg = preset_config(preset);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config " + config_path);
      cfg = merge_config(cfg, json::parse(in));
    }
    cfg = merge_config(cfg, cli_overrides);
    if (seed >= 0) cfg["seed"] = seed;
    if (!out_dir.empty()) cfg["out"] = out_dir;
    if (!preset.empty()) cfg["preset"] = preset;

    const std::string sub = app.get_subcommands().front()->get_name();
    return handlers.at(sub)(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
