#pragma once

#include "doseopt/params.hpp"

namespace doseopt {

/// Steady state under a constant dose rate with acute tolerance off.
struct EquilibriumSummary {
  double c_eq = 0.0;          // ug/mL
  double c_mem_eq = 0.0;      // ug/mL
  double e_drug = 0.0;        // effect before tolerance develops
  double e_drug_tol = 0.0;    // effect once tolerance has developed
  double e_withdrawal = 0.0;  // effect right after dosing stops
};

/// Concentration after an instantaneous dose `total_dose` (ug) given at t = 0:
/// k1 k7 D exp(-k1 t).
double impulse_concentration(const ModelParams& p, double total_dose, double t);

/// Requires the acute mechanism to be off (c_half infinite).
EquilibriumSummary constant_dose_equilibrium(const ModelParams& p, double dose_rate);

/// Tolerance strength from observed effects before and after tolerance:
/// k6 (e_drug - e_drug_tol) / (e_drug - e0).
double estimate_k4(double k6, double e0, double e_drug, double e_drug_tol);

}  // namespace doseopt
