#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockade/rng.hpp"
#include "blockade/state.hpp"

namespace blockade::optics {

struct DetectorModel {
  double efficiency = 1.0;       // combined source and detection efficiency
  double dark_count_rate = 0.0;  // Hz
  double gate_time = 5e-6;       // s, one gated detection window
  bool number_resolving = false;

  void validate() const;

  // 1 - exp(-rate * t): dark click in one gate.
  double dark_click_probability() const;

  // Non-resolving POVM: P(click | n photons) = 1 - (1 - eta)^n (1 - P_dc).
  double click_probability(int photons) const;

  // Resolving POVM: binomial loss, then one extra count on a dark click.
  double count_probability(int count, int photons) const;
};

// Per-detector outcome. For non-resolving detectors each entry is 0 or 1.
struct HeraldPattern {
  std::vector<std::uint8_t> counts;
  bool number_resolving = false;

  bool clicked(std::size_t detector) const { return counts.at(detector) > 0; }
  int total_clicks() const;
  std::string to_string() const;

  auto operator<=>(const HeraldPattern&) const = default;
};

// 2x2 unitary acting on the creation operators of two modes:
// a_first^dag -> u[0][0] a_first^dag + u[1][0] a_second^dag,
// a_second^dag -> u[0][1] a_first^dag + u[1][1] a_second^dag.
using ModeUnitary = std::array<std::array<Complex, 2>, 2>;

// The single 50:50 convention used everywhere:
// a_i^dag -> (a_j^dag + i a_i^dag)/sqrt2, a_j^dag -> (a_i^dag + i a_j^dag)/sqrt2,
// so that |1,1> -> (i/sqrt2)(|0,2> + |2,0>).
ModeUnitary beam_splitter_matrix();
ModeUnitary adjoint(const ModeUnitary& u);

// Column map for an arbitrary passive two-mode transformation. Throws
// CutoffOverflow when a non-zero output component exceeds a mode cutoff.
LabelMap mode_unitary_map(const Layout& layout, std::size_t first, std::size_t second,
                          const ModeUnitary& u);

HybridState apply_mode_unitary(const HybridState& s, std::size_t first, std::size_t second,
                               const ModeUnitary& u);
HybridState beam_splitter(const HybridState& s, std::size_t mode_i, std::size_t mode_j);
HybridState beam_splitter_inverse(const HybridState& s, std::size_t mode_i, std::size_t mode_j);

// |n> -> exp(i theta n) |n> on one mode.
HybridState phase_shift(const HybridState& s, std::size_t mode, double theta);

struct DetectionSample {
  HeraldPattern pattern;  // single entry
  HybridState post_state; // detected mode reset to vacuum, normalized
};

// Samples one gated detection of `mode` (photon number by the Born rule,
// then loss and dark clicks). Deterministic given the rng state.
DetectionSample detect(const HybridState& s, std::size_t mode, const DetectorModel& det, Rng& rng);

struct PatternBranch {
  double probability = 0.0;
  std::optional<DensityOperator> post_state;  // empty when probability is zero
};

// Exact enumeration of every detector pattern over `modes`; each measured
// mode is left in vacuum in the post-measurement states.
std::map<HeraldPattern, PatternBranch> detect_all_probabilities(
    const DensityOperator& rho, const std::vector<std::size_t>& modes, const DetectorModel& det);
std::map<HeraldPattern, PatternBranch> detect_all_probabilities(
    const HybridState& s, const std::vector<std::size_t>& modes, const DetectorModel& det);

}  // namespace blockade::optics
