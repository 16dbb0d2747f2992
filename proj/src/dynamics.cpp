#include "bosde/dynamics.hpp"

#include <cmath>

namespace bosde {

OdeSolution integrate_meanfield(const ModeVector& z0, const ModeRhs& rhs, double t_final,
                                double dt, OdeStepper stepper) {
  if (!(dt > 0)) throw ValidationError("integrate_meanfield: dt must be positive");
  if (!(t_final >= 0)) throw ValidationError("integrate_meanfield: t_final must be >= 0");

  OdeSolution sol;
  sol.times.push_back(0.0);
  sol.states.push_back(z0);

  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  ModeVector z = z0;
  for (long s = 0; s < steps; ++s) {
    const double t0 = static_cast<double>(s) * dt;
    const double h = (s + 1 == steps) ? t_final - t0 : dt;
    if (h <= 0) break;
    if (stepper == OdeStepper::kEuler) {
      z += h * rhs(z);
    } else {
      const ModeVector k1 = rhs(z);
      const ModeVector k2 = rhs(z + 0.5 * h * k1);
      const ModeVector k3 = rhs(z + 0.5 * h * k2);
      const ModeVector k4 = rhs(z + h * k3);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    sol.times.push_back(s + 1 == steps ? t_final : t0 + h);
    sol.states.push_back(z);
  }
  return sol;
}

}  // namespace bosde
