#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "ncl/quantum/state.hpp"

namespace ncl::q {

// Sparse view of a compressed database under a classical query schedule:
// the algorithm registers stay in a basis state, so only the database is
// in superposition.  Keys pack the m cell digits (⊥ = n) into ceil(log₂(n+1))
// bits each; amplitudes are stored only for keys reachable so far, of which
// there are at most (n+1)^q after q queries.
struct SparseDb {
  uint64_t m = 1;
  uint64_t n = 2;
  std::unordered_map<uint64_t, Amp> amps;
};

// |⊥,…,⊥⟩.  Throws for non-power-of-two n or keys wider than 64 bits.
SparseDb sparse_empty(uint64_t m, uint64_t n);

uint64_t sparse_digit(const SparseDb& db, uint64_t key, uint64_t x);
uint64_t sparse_pack(const SparseDb& db, std::span<const uint64_t> cells);
std::vector<uint64_t> sparse_cells(const SparseDb& db, uint64_t key);
Amp sparse_amp_at(const SparseDb& db, std::span<const uint64_t> cells);

double sparse_norm(const SparseDb& db);

// One lazily-sampled phase query at classical coordinates (x, u), applied
// cell-locally via the closed-form basis action (the three-branch rule for
// decomp · phase · decomp).  Preserves the 2-norm to 1e-10 or throws.
void sparse_cpho(SparseDb& db, uint64_t x, uint64_t u);

// Probability mass on databases with more than t non-⊥ cells.
double sparse_db_size_mass_above(const SparseDb& db, uint64_t t);
// Expected number of non-⊥ cells x with lbl[x] == ystar.
double sparse_expected_labeled(const SparseDb& db, std::span<const uint64_t> lbl,
                               uint64_t ystar);
// Mass on databases holding x ≠ x' with equal non-⊥ values and
// lbl[x] = lbl[x'] = ystar.
double sparse_collision_mass(const SparseDb& db, std::span<const uint64_t> lbl,
                             uint64_t ystar);

// Collision-finding pressure experiment: query cells 0,…,t−1 once each
// (u = 1) against a fresh range-n0 database, recording the expected count
// of sampled cells after each query (v_after), their running mean (v_mean),
// the collision-present mass at the end (success), and the capacity ceiling
// 20·t²·v_mean/n0 that success must stay below.
struct CapacityPoint {
  uint64_t m = 0;
  uint64_t n0 = 0;
  uint64_t t = 0;
  std::vector<double> v_after;
  double v_mean = 0;
  double success = 0;
  double bound = 0;
};

CapacityPoint capacity_vs_collision(uint64_t m, uint64_t n0, uint64_t t);

}  // namespace ncl::q
