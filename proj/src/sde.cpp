#include "bosde/sde.hpp"

#include <cmath>
#include <numbers>

#include "bosde/diffusion.hpp"
#include "bosde/parallel.hpp"

namespace bosde {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

PrngDraw indexed_prng(std::uint64_t seed, std::uint64_t run, std::uint64_t step, std::uint64_t m) {
  std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
  key = mix64(key ^ (run + 0x632be59bd9b4e019ULL));
  key = mix64(key ^ (step + 0x85157af5ULL * 0x100000001ULL));
  key = mix64(key ^ (m + 0xd1342543de82ef95ULL));
  const std::uint64_t w0 = mix64(key ^ 0x243f6a8885a308d3ULL);
  const std::uint64_t w1 = mix64(key ^ 0x13198a2e03707344ULL);

  constexpr double kTwo53 = 1.0 / 9007199254740992.0;
  const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * kTwo53;  // (0, 1]
  const double u2 = static_cast<double>(w1 >> 11) * kTwo53;          // [0, 1)
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle), (w0 & 1ULL) ? 1 : -1};
}

void SdeConfig::validate() const {
  if (!(dt > 0)) throw ValidationError("sde.dt must be > 0");
  if (!(t_final >= 0)) throw ValidationError("sde.t_final must be >= 0");
  if (samples < 1) throw ValidationError("sde.samples must be positive");
  if (t_final > 0 && dt > t_final) throw ValidationError("sde.dt must not exceed sde.t_final");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double t = snapshot_times[i];
    if (t < 0 || t > t_final * (1 + 1e-12))
      throw ValidationError("sde.snapshot_times: " + std::to_string(t) + " outside [0, t_final]");
    if (i > 0 && t < snapshot_times[i - 1])
      throw ValidationError("sde.snapshot_times must be sorted");
  }
}

long snapshot_step(double t, double dt) {
  return static_cast<long>(std::ceil(t / dt - 1e-9));
}

long total_steps(double t_final, double dt) { return snapshot_step(t_final, dt); }

SdeKernel::SdeKernel(const SystemSpec& spec)
    : modes_(spec.modes()), n_(spec.n), xs_(spec.Xs) {
  spec.validate();
  const cplx i(0, 1);
  minus_i_h0_ = -i * spec.H0;
  x2_over_n_ = ComplexMatrix<double>::Zero(modes_, modes_);
  for (const auto& x : spec.Xs) x2_over_n_ += x * x;
  x2_over_n_ /= static_cast<double>(n_);
  for (Eigen::Index j = 0; j < modes_; ++j)
    for (Eigen::Index k = 0; k < modes_; ++k)
      for (Eigen::Index l = 0; l < modes_; ++l)
        for (Eigen::Index m = 0; m < modes_; ++m) {
          const cplx h = spec.tensor(j, k, l, m);
          if (h != cplx(0)) entries_.push_back({j, k, l, m, h});
        }
  has_noise_ = !entries_.empty() || !xs_.empty();
}

void SdeKernel::assemble(const RealState& r, Workspace& ws) const {
  const Eigen::Index N = modes_;
  ws.z.resize(N);
  ws.z.real() = r.head(N);
  ws.z.imag() = r.tail(N);
  const double norm2 = r.squaredNorm();
  if (!(norm2 > 0)) throw SingularityError("em_step: |z| = 0");

  // B_jk = -(i/2)(H_jklm + H_kjlm) z_l z_m, accumulated from the nonzero entries.
  ws.b.setZero(N, N);
  for (const Entry& e : entries_) {
    const cplx v = cplx(0, -0.5) * e.h * ws.z(e.l) * ws.z(e.m);
    ws.b(e.j, e.k) += v;
    ws.b(e.k, e.j) += v;
  }
  ws.drift.noalias() = minus_i_h0_ * ws.z;
  if (!entries_.empty()) ws.drift.noalias() += ws.b * ws.z.conjugate() / norm2;
  if (!xs_.empty()) ws.drift.noalias() -= x2_over_n_ * ws.z;

  if (!has_noise_) return;
  ws.d.setZero(2 * N, 2 * N);
  if (!entries_.empty()) {
    ws.d.topLeftCorner(N, N) = 0.25 * ws.b.real();
    ws.d.topRightCorner(N, N) = 0.25 * ws.b.imag();
    ws.d.bottomLeftCorner(N, N) = 0.25 * ws.b.imag();
    ws.d.bottomRightCorner(N, N) = -0.25 * ws.b.real();
  }
  ws.u.resize(2 * N);
  for (const auto& x : xs_) {
    ws.xz.noalias() = x * ws.z;
    ws.u.head(N) = ws.xz.imag();
    ws.u.tail(N) = -ws.xz.real();
    ws.d.noalias() += ws.u * ws.u.transpose();
  }
  ws.d /= static_cast<double>(n_);
}

void SdeKernel::diffusion_factor(const RealState& r, Workspace& ws) const {
  const Eigen::Index dim = 2 * modes_;
  assemble(r, ws);
  if (!has_noise_) {
    ws.d.setZero(dim, dim);
    return;
  }
  // P D P with P = I - r r^T, r normalized
  const RealVector<double> rhat = r / r.norm();
  ws.dr.noalias() = ws.d * rhat;
  const double rdr = rhat.dot(ws.dr);
  ws.d.noalias() -= rhat * ws.dr.transpose();
  ws.d.noalias() -= ws.dr * rhat.transpose();
  ws.d.noalias() += rdr * (rhat * rhat.transpose());
  ws.d = 0.5 * (ws.d + ws.d.transpose()).eval();
  ws.eig.compute(ws.d);
  if (ws.eig.info() != Eigen::Success) throw Error("em_step: eigensolver did not converge");
  ws.root = (2.0 * ws.eig.eigenvalues().cwiseMax(0.0)).cwiseSqrt();
  ws.d.noalias() = ws.eig.eigenvectors() * ws.root.asDiagonal() * ws.eig.eigenvectors().transpose();
}

void SdeKernel::step(RealState& r, double dt, const RealState& noise, bool renormalize,
                     Workspace& ws) const {
  const Eigen::Index N = modes_;
  if (r.size() != 2 * N) throw DimensionError("em_step: state does not match the system size");
  if (noise.size() != r.size()) throw DimensionError("em_step: noise has wrong length");
  diffusion_factor(r, ws);
  if (has_noise_) {
    ws.dr.noalias() = ws.d * noise;
    r += std::sqrt(dt) * ws.dr;
  }
  r.head(N) += dt * ws.drift.real();
  r.tail(N) += dt * ws.drift.imag();
  if (renormalize) {
    const double norm = r.norm();
    if (!(norm > 0)) throw SingularityError("em_step: state collapsed to zero");
    r /= norm;
  }
}

RealMatrix<double> diffusion_factor(const RealState& r, const SystemSpec& spec) {
  const SdeKernel kernel(spec);
  SdeKernel::Workspace ws;
  kernel.diffusion_factor(r, ws);
  return ws.d;
}

RealState em_step(const RealState& r, const SystemSpec& spec, double dt, const RealState& noise,
                  bool renormalize) {
  const SdeKernel kernel(spec);
  SdeKernel::Workspace ws;
  RealState next = r;
  kernel.step(next, dt, noise, renormalize, ws);
  return next;
}

RealState step_noise(std::uint64_t seed, std::uint64_t run, std::uint64_t step, Eigen::Index modes) {
  RealState noise(2 * modes);
  for (Eigen::Index m = 0; m < modes; ++m) {
    const PrngDraw d = indexed_prng(seed, run, step, static_cast<std::uint64_t>(m));
    noise(2 * m) = d.normal0;
    noise(2 * m + 1) = d.normal1;
  }
  return noise;
}

TrajectoryEnsemble run_ensemble(const ModeVector& z0, const SystemSpec& spec, const SdeConfig& cfg,
                                int workers) {
  cfg.validate();
  spec.validate();
  if (z0.size() != spec.modes()) throw DimensionError("run_ensemble: z0 does not match H0");
  if (std::abs(z0.norm() - 1.0) > kUnitNormTol)
    throw PreconditionError("run_ensemble: z0 is not unit norm");

  const Eigen::Index modes = z0.size();
  const long steps = total_steps(cfg.t_final, cfg.dt);
  TrajectoryEnsemble ens;
  ens.config = cfg;
  for (double t : cfg.snapshot_times) {
    Snapshot snap;
    snap.requested_time = t;
    snap.step = std::min(snapshot_step(t, cfg.dt), steps);
    snap.time = static_cast<double>(snap.step) * cfg.dt;
    snap.states.resize(2 * modes, cfg.samples);
    ens.snapshots.push_back(std::move(snap));
  }

  const RealState r0 = to_real(z0);
  const SdeKernel kernel(spec);
  parallel_for(cfg.samples, workers, [&](long k) {
    SdeKernel::Workspace ws;
    RealState noise(2 * modes);
    RealState r = r0;
    std::size_t next_snap = 0;
    auto record = [&](long step) {
      while (next_snap < ens.snapshots.size() && ens.snapshots[next_snap].step == step) {
        ens.snapshots[next_snap].states.col(k) = r;
        ++next_snap;
      }
    };
    record(0);
    for (long s = 0; s < steps; ++s) {
      for (Eigen::Index m = 0; m < modes; ++m) {
        const PrngDraw d = indexed_prng(cfg.seed, static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(m));
        noise(2 * m) = d.normal0;
        noise(2 * m + 1) = d.normal1;
      }
      kernel.step(r, cfg.dt, noise, cfg.renormalize, ws);
      record(s + 1);
    }
  });
  return ens;
}

}  // namespace bosde
