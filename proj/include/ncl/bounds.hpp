#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ncl::bounds {

// Monic polynomial x^ell + k_1 x^(ell-1) + ... + k_(ell-1) x + k_ell - K.
// Strictly increasing on x >= 0 for nonnegative k_i, so it has exactly one
// nonnegative root once K exceeds k_ell.
struct RootSpec {
  double k_total = 0;          // K
  std::vector<double> ks;      // k_1 .. k_ell, each nonnegative and < K
};

void validate(const RootSpec& s);
double poly_eval(const RootSpec& s, double x);

// Unique nonnegative root, found by bisection on [0, K^(1/ell) + sum k_i];
// the result satisfies |f(x)| < 1e-9 * max(1, K).
double k_sol_root(const RootSpec& s);

// With x = (K - k_ell) / k_threshold: true iff both the full polynomial and
// the reduced one (arity ell-1, total k_threshold, coefficients k_1..k_(ell-1))
// vanish at x within relative tolerance. Holds exactly when k_threshold was
// chosen so that x is the full spec's root.
bool telescoping_identity_check(const RootSpec& full, double k_threshold,
                                double rel_tol = 1e-8);

// Shape-only curve evaluations. Constants default to 1; plots must label
// these curves as shape-only.
struct BoundValue {
  double value = 0;
  bool regime_ok = true;
  std::string binding;  // which regime constraint is tightest / violated
};

// Query floor for space S algorithms (classical record-keeping bound):
// T >= c * n^(1/(2 ell)) * n0^(1/2) / S^((ell^2-1)/(2 ell)), valid while
// S <= n^(1/(ell^2-1)).
BoundValue classical_lower_T(double n, double n0, uint32_t ell, double s, double c = 1.0);

// Quantum analogue: T >= c * n^(1/(2(ell+1))) * n0^(1/4) / S^((ell+1)/2),
// valid while S <= n^(1/((ell+1)(2 ell+1))).
BoundValue quantum_lower_T(double n, double n0, uint32_t ell, double s, double c = 1.0);

// Unbounded-space algorithm costs.
// Classical: c * n^(1/ell) * n0^(1/(2 ell)), needs n0 = O(n^(2/(ell-1))).
BoundValue classical_upper_T(double n, double n0, uint32_t ell, double c = 1.0);

// Quantum: c * n^(2/(2 ell+1)) * n0^(1/(2 ell+1)). The regime checker
// evaluates the collected-tuple count K and the last-stage search budget T3
// and reports which of the documented constraints binds.
BoundValue quantum_upper_T(double n, double n0, uint32_t ell, double c = 1.0);

// Exponent window (1/ell, 2/(ell-1)] resp. ((4 ell+6)/(2 ell^2-ell-3), 3/(ell-1)]
// for n0 = n^eps where the space-bounded lower bound exceeds the unbounded
// upper bound. Empty when the interval is void (quantum: ell <= 3).
struct Window {
  double lo = 0;
  double hi = 0;
  bool empty = true;
};

Window separation_window_classical(uint32_t ell);
Window separation_window_quantum(uint32_t ell);

// Tail of the same-sum tuple count for a T-query algorithm:
// (c * T^ell / (K^(1/ell) * n))^(K^(1/ell)).
double classical_tail_bound(double t, double k, uint32_t ell, double n, double c = 1.0);

// Expected best same-sum haul of an S-bit segmented algorithm:
// c * S^((ell^2-1)/ell) * T / n^(1/ell).
double segmented_capacity_bound(double s, double t, uint32_t ell, double n, double c = 1.0);

// Success ceiling for finding a labeled collision after T queries given
// database capacity V: c * T^2 * V / n0, with the proof's explicit c = 20.
double collision_capacity_bound(double t, double v, double n0, double c = 20.0);

}  // namespace ncl::bounds
