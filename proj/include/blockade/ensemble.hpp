#pragma once

#include <array>
#include <cstdint>

#include "blockade/rng.hpp"
#include "blockade/state.hpp"

// Blockade-restricted ensemble qudit. The collective levels are
// g (= |0>_L, all atoms in g), e, s (= |1>_L, one symmetric s excitation)
// and r1 (one symmetric Rydberg excitation). The blockade forbids a second
// Rydberg excitation, so these four collective states span everything the
// protocol reaches.
namespace blockade::ensemble {

enum Level : std::uint8_t { kG = 0, kE = 1, kS = 2, kR1 = 3 };

const char* level_name(std::uint8_t level);

struct AbsorptionModel {
  double p_abs = 1.0;
  void validate() const;
};

// Logical 2x2 unitary on {g, s}: row/column order (g, s).
using LogicalUnitary = std::array<std::array<Complex, 2>, 2>;

LogicalUnitary pauli_x();
LogicalUnitary hadamard();
LogicalUnitary phase(double phi);  // exp(-i phi Z / 2)

// Single-qubit gates are defined only on the storage levels; population
// outside {g, s} above kAlgebraTol raises PreconditionError.
HybridState apply_logical(const HybridState& s, std::size_t ensemble, const LogicalUnitary& u);
DensityOperator apply_logical(const DensityOperator& rho, std::size_t ensemble,
                              const LogicalUnitary& u);

HybridState gate_x(const HybridState& s, std::size_t ensemble);
HybridState gate_h(const HybridState& s, std::size_t ensemble);
HybridState gate_phase(const HybridState& s, std::size_t ensemble, double phi);
DensityOperator gate_x(const DensityOperator& rho, std::size_t ensemble);
DensityOperator gate_phase(const DensityOperator& rho, std::size_t ensemble, double phi);

// Blockaded absorption from `mode` into `ensemble`:
//   |e, n>  -> sqrt(P) |r1, n-1> + sqrt(1-P) |e, n>   (n >= 1)
//   |r1, n> -> |r1, n>  (a second excitation is blocked)
//   anything else unchanged.
// The unabsorbed branch stays coherent with the absorbed one. The map is an
// isometry provided no component |e, n> coexists with |r1, n-1> at the same
// remaining labels; such input raises PreconditionError.
HybridState blockade_absorb(const HybridState& s, std::size_t ensemble, std::size_t mode,
                            const AbsorptionModel& absorption);

// r1 -> s and e -> g, phases preserved.
HybridState transfer_to_storage(const HybridState& s, std::size_t ensemble);
DensityOperator transfer_to_storage(const DensityOperator& rho, std::size_t ensemble);

struct ReadoutResult {
  int bit = 0;  // 0: no fluorescence (g), 1: fluorescence (s)
  HybridState post_state;
};

ReadoutResult readout(const HybridState& s, std::size_t ensemble, Rng& rng);

}  // namespace blockade::ensemble
