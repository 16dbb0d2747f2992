#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bosde/core.hpp"
#include "bosde/dynamics.hpp"

namespace bosde {

// Counter-based draw: (seed, run, step, m) -> two standard normals and a
// fair sign. Pure function of its arguments.
struct PrngDraw {
  double normal0 = 0;
  double normal1 = 0;
  int sign = 1;
};

std::uint64_t mix64(std::uint64_t x);
PrngDraw indexed_prng(std::uint64_t seed, std::uint64_t run, std::uint64_t step, std::uint64_t m);

struct SdeConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  int samples = 1;
  std::uint64_t seed = 0;
  bool renormalize = true;
  std::vector<double> snapshot_times;

  void validate() const;
};

// One snapshot of the ensemble: column k holds the real state of
// trajectory k at the recorded step boundary.
struct Snapshot {
  double requested_time = 0;
  double time = 0;
  long step = 0;
  RealMatrix<double> states;  // 2N x samples
};

struct TrajectoryEnsemble {
  SdeConfig config;
  std::vector<Snapshot> snapshots;
};

// Step-boundary index for a requested time: first boundary >= t.
long snapshot_step(double t, double dt);
long total_steps(double t_final, double dt);

// Per-spec data reused by every Euler-Maruyama step: the nonzero tensor
// entries, sum_m X_m^2, and the dissipators. Immutable and shareable.
class SdeKernel {
 public:
  explicit SdeKernel(const SystemSpec& spec);

  // Scratch space for one thread; sized on first use.
  struct Workspace {
    ModeVector z, xz, drift;
    ComplexMatrix<double> b;
    RealMatrix<double> d;
    RealVector<double> dr, root, u;
    Eigen::SelfAdjointEigenSolver<RealMatrix<double>> eig;
  };

  Eigen::Index modes() const { return modes_; }
  bool has_noise() const { return has_noise_; }

  // In place: r <- em_step(r, spec, dt, noise, renormalize).
  void step(RealState& r, double dt, const RealState& noise, bool renormalize, Workspace& ws) const;

  // sqrt(2 D+_perp) at r, left in ws.d.
  void diffusion_factor(const RealState& r, Workspace& ws) const;

 private:
  struct Entry {
    Eigen::Index j, k, l, m;
    cplx h;
  };
  void assemble(const RealState& r, Workspace& ws) const;

  Eigen::Index modes_;
  int n_;
  ComplexMatrix<double> minus_i_h0_;
  ComplexMatrix<double> x2_over_n_;
  std::vector<ComplexMatrix<double>> xs_;
  std::vector<Entry> entries_;
  bool has_noise_;
};

// sqrt(2 D+_perp(z)) evaluated at the state, projecting along r/|r|.
RealMatrix<double> diffusion_factor(const RealState& r, const SystemSpec& spec);

// One Euler-Maruyama step r' = r + F dt + sqrt(2 D+_perp) noise sqrt(dt),
// followed by r' <- r'/|r'| when renormalize is set.
RealState em_step(const RealState& r, const SystemSpec& spec, double dt,
                  const RealState& noise, bool renormalize = true);

// 2N standard normals for (seed, run, step).
RealState step_noise(std::uint64_t seed, std::uint64_t run, std::uint64_t step, Eigen::Index modes);

// Integrates `samples` independent trajectories from z0; trajectory k draws
// its noise from (seed, k). Trajectories are spread over `workers` threads;
// the result does not depend on the worker count.
TrajectoryEnsemble run_ensemble(const ModeVector& z0, const SystemSpec& spec, const SdeConfig& cfg,
                                int workers = 1);

}  // namespace bosde
