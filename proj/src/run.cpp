#include "bosde/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "bosde/diffusion.hpp"
#include "bosde/dnse.hpp"
#include "bosde/observables.hpp"
#include "bosde/oracle.hpp"
#include "bosde/sde.hpp"

#ifndef BOSDE_VERSION
#define BOSDE_VERSION "unknown"
#endif

namespace bosde {

namespace {

constexpr int kBootstrapResamples = 50;
constexpr int kBoundGridSize = 2000;

bool stochastic(Mode mode) {
  return mode == Mode::kSde || mode == Mode::kRandomwalk || mode == Mode::kVerify ||
         mode == Mode::kDnseDemo || mode == Mode::kBetaCheck;
}

void require_observables(const RunConfig& cfg, Mode mode) {
  if (cfg.observables.empty())
    throw ValidationError("observables: mode " + std::string(mode_name(mode)) +
                          " needs at least one entry in [observables]");
}

std::vector<double> step_times(const SdeConfig& sde) {
  const long steps = total_steps(sde.t_final, sde.dt);
  std::vector<double> times;
  for (double t : sde.snapshot_times)
    times.push_back(static_cast<double>(std::min(snapshot_step(t, sde.dt), steps)) * sde.dt);
  return times;
}

CsvTable meanfield_table(const RunConfig& cfg) {
  const SystemSpec& spec = cfg.system;
  const OdeSolution sol = integrate_meanfield(
      cfg.z0, [&spec](const ModeVector& z) { return meanfield_drift(z, spec); }, cfg.sde.t_final,
      cfg.sde.dt);
  CsvTable table;
  table.add_column("t");
  for (Eigen::Index j = 0; j < cfg.z0.size(); ++j) {
    table.add_column("re_z" + std::to_string(j));
    table.add_column("im_z" + std::to_string(j));
  }
  table.add_column("norm");
  const long last = static_cast<long>(sol.times.size()) - 1;
  for (double t : cfg.sde.snapshot_times) {
    const long s = std::min(snapshot_step(t, cfg.sde.dt), last);
    const ModeVector& z = sol.states[static_cast<std::size_t>(s)];
    std::vector<double> row{sol.times[static_cast<std::size_t>(s)]};
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      row.push_back(z(j).real());
      row.push_back(z(j).imag());
    }
    row.push_back(z.norm());
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable sde_table(const RunConfig& cfg, const TrajectoryEnsemble& ens) {
  CsvTable table;
  table.add_column("t");
  table.add_column("samples", true);
  for (const auto& o : cfg.observables) {
    table.add_column(o.name + "_mean");
    table.add_column(o.name + "_std_error");
  }
  for (const auto& snap : ens.snapshots) {
    std::vector<double> row{snap.time, static_cast<double>(snap.states.cols())};
    for (const auto& o : cfg.observables) {
      const SampleEstimate est = expect_sde(o.obs, snap.states, cfg.system.n);
      row.push_back(est.mean);
      row.push_back(est.std_error);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable density_table(const RunConfig& cfg, const std::vector<TimedDensity>& states,
                       std::optional<int> samples) {
  CsvTable table;
  table.add_column("t");
  if (samples) table.add_column("samples", true);
  table.add_column("trace");
  table.add_column("min_eigenvalue");
  for (const auto& o : cfg.observables) table.add_column(o.name);
  for (const auto& s : states) {
    const DensityHealth h = density_health(s.state.rho);
    std::vector<double> row{s.time};
    if (samples) row.push_back(*samples);
    row.push_back(s.state.rho.trace().real());
    row.push_back(h.min_eigenvalue);
    for (const auto& o : cfg.observables) row.push_back(expect_rho(o.obs, s.state));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void verify_table(const RunConfig& cfg, std::uint64_t seed, int workers, RunResult& result) {
  SdeConfig sde = cfg.sde;
  sde.seed = seed;
  const FockModel model(cfg.system);
  const TrajectoryEnsemble ens = run_ensemble(cfg.z0, cfg.system, sde, workers);
  const DensityMatrix rho0 = pure_density(coherent_product_state(cfg.z0, model.basis()));
  const std::vector<TimedDensity> exact = integrate_lindblad(rho0, model, sde.dt, step_times(sde));

  double grid_alpha = 0;
  if (!cfg.dnse) {
    const auto grid = random_unit_grid(static_cast<int>(cfg.system.modes()), kBoundGridSize, mix64(seed ^ 0x5eedULL));
    grid_alpha = alpha_perp_max(cfg.system, grid);
    result.summary["alpha_perp_max"] = grid_alpha;
  } else {
    result.summary["c"] = cfg.dnse->c;
    result.summary["alpha_upper_bound"] =
        cfg.dnse->c > 0 ? dnse::alpha_upper_bound(cfg.dnse->c, cfg.dnse->n) : std::numeric_limits<double>::infinity();
  }

  CsvTable& table = result.table;
  table.add_column("t");
  table.add_column("trace_distance");
  table.add_column("bound");
  table.add_column("stat_tolerance");
  table.add_column("pass", true);
  bool all_pass = true;
  for (std::size_t s = 0; s < ens.snapshots.size(); ++s) {
    const Snapshot& snap = ens.snapshots[s];
    const ComplexMatrix<double> amps = ensemble_amplitudes(snap.states, *model.basis());
    const DensityMatrix rho_plus{model.basis(), amps * amps.adjoint() / static_cast<double>(amps.cols())};
    const double dist = trace_distance(rho_plus, exact[s].state);
    double bound;
    if (cfg.dnse) {
      bound = cfg.dnse->c > 0 ? dnse::trace_error_bound(snap.time, cfg.dnse->c)
                              : std::numeric_limits<double>::infinity();
    } else {
      bound = 6.0 * cfg.system.n * snap.time * grid_alpha;
    }
    const double tol =
        amps.cols() > 1 ? 3.0 * bootstrap_trace_distance_std(amps, exact[s].state.rho, kBootstrapResamples,
                                                             mix64(seed + s))
                        : 0.0;
    const bool pass = dist <= bound + tol;
    all_pass = all_pass && pass;
    table.rows.push_back({snap.time, dist, bound, tol, pass ? 1.0 : 0.0});
  }
  result.exit_code = all_pass ? 0 : 2;
}

void dnse_demo_table(const RunConfig& cfg, std::uint64_t seed, int workers, RunResult& result) {
  const auto& p = *cfg.dnse;
  SdeConfig sde = cfg.sde;
  sde.seed = seed;
  const FockModel model(cfg.system);
  const TrajectoryEnsemble ens = run_ensemble(cfg.z0, cfg.system, sde, workers);
  const DensityMatrix rho0 = pure_density(coherent_product_state(cfg.z0, model.basis()));
  const std::vector<TimedDensity> exact = integrate_lindblad(rho0, model, sde.dt, step_times(sde));
  const SystemSpec& spec = cfg.system;
  const OdeSolution mf = integrate_meanfield(
      cfg.z0, [&spec](const ModeVector& z) { return meanfield_drift(z, spec); }, sde.t_final, sde.dt);

  result.summary["c"] = p.c;
  result.summary["epsilon"] = p.epsilon;
  if (p.c > 0) {
    result.summary["alpha_upper_bound"] = dnse::alpha_upper_bound(p.c, p.n);
    result.summary["trace_error_bound"] = dnse::trace_error_bound(sde.t_final, p.c);
  }

  CsvTable& table = result.table;
  table.add_column("t");
  for (const auto& o : cfg.observables) {
    table.add_column(o.name + "_sde_mean");
    table.add_column(o.name + "_sde_std_error");
    table.add_column(o.name + "_lindblad");
    table.add_column(o.name + "_meanfield");
    table.add_column(o.name + "_bound");
  }
  const long last = static_cast<long>(mf.times.size()) - 1;
  for (std::size_t s = 0; s < ens.snapshots.size(); ++s) {
    const Snapshot& snap = ens.snapshots[s];
    std::vector<double> row{snap.time};
    const double dist_bound = p.c > 0 ? dnse::trace_error_bound(snap.time, p.c)
                                      : std::numeric_limits<double>::infinity();
    const ModeVector& zmf = mf.states[static_cast<std::size_t>(std::min(snap.step, last))];
    for (const auto& o : cfg.observables) {
      const SampleEstimate est = expect_sde(o.obs, snap.states, p.n);
      row.push_back(est.mean);
      row.push_back(est.std_error);
      row.push_back(expect_rho(o.obs, exact[s].state));
      const double scale = o.obs.scaled_by_1_over_n ? 1.0 : p.n;
      row.push_back(scale * zmf.dot(o.obs.O * zmf).real());
      row.push_back(output_error_bound(o.obs, *model.basis(), dist_bound));
    }
    table.rows.push_back(std::move(row));
  }
}

void beta_table(const RunConfig& cfg, std::uint64_t seed, RunResult& result) {
  const int N = static_cast<int>(cfg.system.modes());
  const int n = cfg.system.n;
  const int draws = cfg.sde.samples;
  const auto zs = random_unit_grid(N, draws, seed);
  CsvTable& table = result.table;
  table.add_column("draw", true);
  table.add_column("witness");
  table.add_column("bound");
  table.add_column("pointwise_bound");
  table.add_column("pass", true);
  bool all_pass = true;
  double worst = 0;
  for (int k = 0; k < draws; ++k) {
    const ModeVector& z = zs[static_cast<std::size_t>(k)];
    ModeVector w = to_complex(step_noise(seed, static_cast<std::uint64_t>(k), 1, N));
    w -= z.dot(w).real() * z;  // make Re(z^* . w) = 0
    w.normalize();
    const double witness = beta_witness(z, w, n);
    const double bound = 6.0 * n;
    const bool pass = witness <= bound * (1 + 1e-12);
    all_pass = all_pass && pass;
    worst = std::max(worst, witness / bound);
    table.rows.push_back({static_cast<double>(k), witness, bound, beta_pointwise_bound(z, w, n), pass ? 1.0 : 0.0});
  }
  result.summary["max_witness_over_bound"] = worst;
  result.exit_code = all_pass ? 0 : 2;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["system"]["kind"] = cfg.system_kind;
  j["system"]["N"] = cfg.system.modes();
  j["system"]["n"] = cfg.system.n;
  j["system"]["dissipators"] = cfg.system.Xs.size();
  if (cfg.dnse) {
    j["system"]["c"] = cfg.dnse->c;
    j["system"]["epsilon"] = cfg.dnse->epsilon;
  }
  std::vector<std::array<double, 2>> z0;
  for (Eigen::Index i = 0; i < cfg.z0.size(); ++i) z0.push_back({cfg.z0(i).real(), cfg.z0(i).imag()});
  j["system"]["z0_normalized"] = z0;
  j["sde"]["dt"] = cfg.sde.dt;
  j["sde"]["t_final"] = cfg.sde.t_final;
  j["sde"]["samples"] = cfg.sde.samples;
  j["sde"]["renormalize"] = cfg.sde.renormalize;
  j["sde"]["snapshot_times"] = cfg.sde.snapshot_times;
  std::vector<std::string> names;
  for (const auto& o : cfg.observables) names.push_back(o.name);
  j["observables"] = names;
  return j;
}

}  // namespace

RunResult compute(const RunConfig& cfg, Mode mode, const RunOptions& opts) {
  if (cfg.mode && *cfg.mode != mode)
    throw ValidationError("mode: config says \"" + std::string(mode_name(*cfg.mode)) +
                          "\" but the command line asked for \"" + std::string(mode_name(mode)) + "\"");
  std::uint64_t seed = cfg.sde.seed;
  if (opts.seed) {
    seed = *opts.seed;
  } else if (!cfg.seed_given && stochastic(mode)) {
    throw ValidationError("sde.seed: mode " + std::string(mode_name(mode)) +
                          " needs a seed (set sde.seed or pass --seed)");
  }
  if (opts.workers < 1) throw ValidationError("--workers must be >= 1");

  RunResult result;
  switch (mode) {
    case Mode::kMeanfield:
      result.table = meanfield_table(cfg);
      break;
    case Mode::kSde: {
      require_observables(cfg, mode);
      SdeConfig sde = cfg.sde;
      sde.seed = seed;
      result.table = sde_table(cfg, run_ensemble(cfg.z0, cfg.system, sde, opts.workers));
      break;
    }
    case Mode::kLindblad: {
      require_observables(cfg, mode);
      const FockModel model(cfg.system);
      const DensityMatrix rho0 = pure_density(coherent_product_state(cfg.z0, model.basis()));
      result.table = density_table(cfg, integrate_lindblad(rho0, model, cfg.sde.dt, cfg.sde.snapshot_times),
                                   std::nullopt);
      break;
    }
    case Mode::kRandomwalk: {
      require_observables(cfg, mode);
      const FockModel model(cfg.system);
      const PureState psi0 = coherent_product_state(cfg.z0, model.basis());
      result.table = density_table(
          cfg,
          random_walk_ensemble(psi0, model, cfg.sde.dt, cfg.sde.t_final, cfg.sde.samples, seed,
                               cfg.sde.snapshot_times, opts.workers),
          cfg.sde.samples);
      break;
    }
    case Mode::kVerify:
      verify_table(cfg, seed, opts.workers, result);
      break;
    case Mode::kDnseDemo:
      if (!cfg.dnse) throw ValidationError("system.kind: dnse-demo needs kind = \"dnse\"");
      require_observables(cfg, mode);
      dnse_demo_table(cfg, seed, opts.workers, result);
      break;
    case Mode::kBetaCheck:
      beta_table(cfg, seed, result);
      break;
  }
  result.table.seed = seed;
  result.table.comments.push_back("mode=" + std::string(mode_name(mode)));
  return result;
}

RunResult run(const RunConfig& cfg, Mode mode, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  RunResult result = compute(cfg, mode, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  namespace fs = std::filesystem;
  const fs::path dir = opts.out_dir ? fs::path(*opts.out_dir)
                                    : fs::path(cfg.output_path.empty() ? "." : cfg.output_path);
  fs::create_directories(dir);
  const fs::path csv = dir / (std::string(mode_name(mode)) + ".csv");
  write_csv(csv.string(), result.table);
  result.csv_path = csv.string();

  nlohmann::json m;
  m["program"] = "boson-sde";
  m["version"] = BOSDE_VERSION;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                       "." + std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  m["compiler"] = __VERSION__;
#endif
  m["mode"] = mode_name(mode);
  m["seed"] = result.table.seed;
  m["workers"] = opts.workers;
  m["config_path"] = opts.config_path;
  m["config_text"] = cfg.source_text;
  m["config"] = config_echo(cfg);
  m["started_utc"] = started;
  m["wall_time_seconds"] = wall;
  m["outputs"] = {csv.filename().string()};
  m["exit_code"] = result.exit_code;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, v] : result.summary) summary[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  m["summary"] = summary;

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw Error("cannot write " + manifest.string());
  out << m.dump(2) << '\n';
  result.manifest_path = manifest.string();
  return result;
}

}  // namespace bosde
