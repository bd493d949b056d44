#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ncl::q {

// The joint system is X (query) ⊗ U (answer) ⊗ W (workspace) ⊗ R (output)
// ⊗ D (m database cells). In plain mode a cell holds a value in [n]; in
// compressed mode the alphabet grows by one symbol ⊥ ("still unsampled"),
// encoded as cell digit n.
enum class DbMode { standard, compressed };

struct RegisterLayout {
  uint64_t m = 1;      // cells / query values
  uint64_t n = 2;      // oracle range, must be a power of two
  uint64_t dim_w = 1;  // workspace dimension
  uint64_t dim_r = 1;  // output dimension
  DbMode mode = DbMode::standard;
};

inline constexpr uint64_t max_amplitudes = uint64_t{1} << 24;

// Throws std::invalid_argument for non-power-of-two n, zero dims, or a total
// dimension above max_amplitudes.
void validate(const RegisterLayout& l);

uint64_t cell_dim(const RegisterLayout& l);   // n, or n+1 with ⊥
uint64_t db_dim(const RegisterLayout& l);     // cell_dim^m
uint64_t algo_dim(const RegisterLayout& l);   // m * n * dim_w * dim_r
uint64_t total_dim(const RegisterLayout& l);
inline uint64_t bot_digit(const RegisterLayout& l) { return l.n; }

struct AlgoCoord {
  uint64_t x = 0, u = 0, w = 0, r = 0;
};

// Cell 0 is the most significant digit of the database index, so
// cell x has stride cell_dim^(m-1-x).
uint64_t cell_stride(const RegisterLayout& l, uint64_t x);
uint64_t cell_value(const RegisterLayout& l, uint64_t d, uint64_t x);
uint64_t db_index(const RegisterLayout& l, std::span<const uint64_t> cells);
std::vector<uint64_t> db_cells(const RegisterLayout& l, uint64_t d);
uint64_t algo_index(const RegisterLayout& l, const AlgoCoord& c);

// Count of non-⊥ cells (compressed mode only).
uint64_t db_size(const RegisterLayout& l, uint64_t d);

using Amp = std::complex<double>;

// Dense amplitudes over the joint basis, index = algo_index * db_dim + d.
struct Statevector {
  RegisterLayout layout;
  std::vector<Amp> amps;
};

double norm(const Statevector& s);
// Throws std::runtime_error if the 2-norm strays from 1 beyond tol.
void check_norm(const Statevector& s, double tol = 1e-10);

Statevector zero_state(const RegisterLayout& l);
// |coord⟩ ⊗ |cells⟩.
Statevector basis_state(const RegisterLayout& l, const AlgoCoord& c,
                        std::span<const uint64_t> cells);
// Compressed-mode start: |coord⟩ ⊗ |⊥,…,⊥⟩.
Statevector empty_db_state(const RegisterLayout& l, const AlgoCoord& c = {});
// Plain-mode start: |coord⟩ ⊗ (uniform superposition over all [n]^m tables).
Statevector uniform_table_state(const RegisterLayout& l, const AlgoCoord& c = {});

// Probability of each algorithm-register basis value (marginal over D).
std::vector<double> algo_marginal(const Statevector& s);
// Probability of each database basis value (marginal over the algorithm).
std::vector<double> db_marginal(const Statevector& s);
// (1/2) Σ |p_i - q_i|; spans must be equal length.
double tv_distance(std::span<const double> p, std::span<const double> q);

// Probability mass on databases with more than t non-⊥ cells.
double mass_with_db_size_above(const Statevector& s, uint64_t t);

// Expected number of non-⊥ cells x with lbl[x] == ystar (the per-step
// capacity contribution). lbl.size() must equal m.
double expected_labeled_entries(const Statevector& s,
                                std::span<const uint64_t> lbl, uint64_t ystar);

// Mass on databases holding x ≠ x' with D(x) = D(x') ≠ ⊥ and
// lbl[x] = lbl[x'] = ystar (the collision-present projector).
double collision_mass(const Statevector& s, std::span<const uint64_t> lbl,
                      uint64_t ystar);

}  // namespace ncl::q
