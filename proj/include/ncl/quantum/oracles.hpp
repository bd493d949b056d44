#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ncl/quantum/state.hpp"

namespace ncl::q {

// Query operators on plain-mode states.  Each application preserves the
// 2-norm and ends with check_norm.

// |x,u⟩|D⟩ → |x, u ⊕ D(x)⟩|D⟩: XOR the addressed cell into the answer
// register.  Self-inverse.
void apply_sto(Statevector& s);
// Phase (−1)^{⟨u, D(x)⟩} where ⟨a,b⟩ = parity(a AND b).
void apply_pho(Statevector& s);
// |x,u⟩|D⟩ → |x,u⟩|…, D(x) ⊕ u, …⟩: XOR the answer register into the
// addressed cell.  Self-inverse.
void apply_hao(Statevector& s);

// Hadamard transform H^{⊗log₂ n} on the answer register.  Self-inverse;
// valid in both database modes.
void apply_v(Statevector& s);

// Query operators on compressed-mode states (⊥ marks unsampled cells).

// u ⊕= D(x) treating ⊥ as 0, i.e. identity on unsampled cells.
void apply_csto_raw(Statevector& s);
// Phase (−1)^{⟨u, D(x)⟩}; +1 on unsampled cells.
void apply_cpho_raw(Statevector& s);
// One-cell basis change: swaps |⊥⟩ with the uniform superposition
// (1/√n)Σ_y|y⟩ and fixes the orthogonal complement.  Involution.
void apply_std_decomp_at(Statevector& s, uint64_t x);
// The same basis change at the cell addressed by the X register.
void apply_std_decomp(Statevector& s);
// Lazily-sampled query operators: decomp · raw · decomp.
void apply_csto(Statevector& s);
void apply_cpho(Statevector& s);
// Basis change at every cell; sends |⊥,…,⊥⟩ to the uniform table
// superposition.
void decompress_all(Statevector& s);

// Apply an algo_dim × algo_dim unitary on the algorithm registers.
void apply_algo_unitary(Statevector& s, const Eigen::MatrixXcd& u);

// Haar-style random unitary: complex Gaussian matrix, QR decomposition,
// R-diagonal phases absorbed.  Deterministic in seed.
Eigen::MatrixXcd random_unitary(uint64_t dim, uint64_t seed);

// Dense matrix of an operator, built column-by-column from basis states.
Eigen::MatrixXcd operator_matrix(const RegisterLayout& l,
                                 const std::function<void(Statevector&)>& op);

// A circuit is a list of named operations.  JSON form:
//   [{"op":"local","seed":7}, {"op":"sto"}, {"op":"decomp","x":1}, …]
struct CircuitOp {
  enum class Kind { sto, pho, csto, cpho, hao, decomp, local };
  Kind kind = Kind::sto;
  uint64_t x = 0;     // decomp: which cell
  uint64_t seed = 0;  // local: seed of the algorithm-register unitary
};

using Circuit = std::vector<CircuitOp>;

void to_json(nlohmann::json& j, const CircuitOp& op);
void from_json(const nlohmann::json& j, CircuitOp& op);

// Applies one op literally; throws std::invalid_argument when the op does
// not exist in the state's database mode.
void apply_op(Statevector& s, const CircuitOp& op);
void run_circuit(Statevector& s, const Circuit& c);

// `queries` XOR queries, each preceded by a fresh random local unitary,
// plus one closing local unitary.
Circuit random_circuit(uint64_t queries, uint64_t seed);

// Total-variation distance between the algorithm-register output
// distributions of two runs of the same circuit: (a) plain mode starting
// from the uniform table superposition, queries applied as written, and
// (b) compressed mode starting from |⊥,…,⊥⟩, every XOR query conjugated to
// V · CPhO · V.  `l` must be a plain-mode layout; the circuit may contain
// only sto/pho/local ops.
double equivalence_tv(const RegisterLayout& l, const Circuit& c);

}  // namespace ncl::q
