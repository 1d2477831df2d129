#include "doseopt/analytic.hpp"

#include "doseopt/error.hpp"

#include <cmath>

namespace doseopt {

double impulse_concentration(const ModelParams& p, double total_dose, double t) {
  if (!(t >= 0)) fail(ErrorKind::InvalidArgument, "impulse response requires t >= 0");
  return p.k1 * p.k7 * total_dose * std::exp(-p.k1 * t);
}

EquilibriumSummary constant_dose_equilibrium(const ModelParams& p, double dose_rate) {
  if (p.c_half)
    fail(ErrorKind::InvalidArgument,
         "equilibrium analysis assumes acute tolerance is off (c_half = inf)");
  if (!(dose_rate >= 0) || !std::isfinite(dose_rate))
    fail(ErrorKind::InvalidArgument, "dose rate must be finite and >= 0");
  const double c = p.k7 * dose_rate;
  return {
      .c_eq = c,
      .c_mem_eq = c,
      .e_drug = p.e0 + p.k6 * c,
      .e_drug_tol = p.e0 + (p.k6 - p.k4) * c,
      .e_withdrawal = p.e0 - p.k4 * c,
  };
}

double estimate_k4(double k6, double e0, double e_drug, double e_drug_tol) {
  if (e_drug == e0)
    fail(ErrorKind::InvalidArgument, "cannot estimate k4: e_drug equals e0 (no initial drug effect)");
  // Dividing by (e_drug - e0) / k6 keeps the textbook case (0.4, 0, 2, 0.5)
  // at the double nearest 0.3; the product-first order lands one ulp above.
  // Both orders are equally accurate in general.
  return (e_drug - e_drug_tol) / ((e_drug - e0) / k6);
}

}  // namespace doseopt
