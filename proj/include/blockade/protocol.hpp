#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "blockade/ensemble.hpp"
#include "blockade/optics.hpp"
#include "blockade/state.hpp"

namespace blockade::protocol {

using ensemble::AbsorptionModel;
using optics::DetectorModel;
using optics::HeraldPattern;

// How a two-detector outcome is read as a herald.
//  kMarginal:  a click on a detector heralds its Bell state whatever the other
//              detector did (a double click counts for both).
//  kExclusive: exactly one of the two detectors must click.
enum class HeraldPolicy { kMarginal, kExclusive };

// Output ports of the pair entangler. kUp watches the second mode (b) and
// heralds psi+ = (|sg> + i|gs>)/sqrt2; kDown watches mode a and heralds psi-.
enum class Detector { kUp, kDown };

const char* to_string(HeraldPolicy policy);
const char* to_string(Detector detector);

// Subsystem indices of the pair entangler: ensembles A, B, then modes a, b.
inline constexpr std::size_t kEnsA = 0, kEnsB = 1, kModeA = 2, kModeB = 3;

Layout pair_layout(int cutoff = kDefaultCutoff);
HybridState pair_initial_state();  // |e e> |1 1>

// First beam splitter, absorption in both ensembles, second beam splitter and
// a -pi/2 phase plate on port a. The plate only fixes the output phase
// reference; it has no effect on click statistics or heralded states.
HybridState pair_interferometer(const HybridState& input, std::size_t ens_a, std::size_t ens_b,
                                std::size_t mode_a, std::size_t mode_b,
                                const AbsorptionModel& absorption);

HybridState entangler_pre_detection(const AbsorptionModel& absorption);

// (|sg> +/- i|gs>)/sqrt2 over two ensembles.
HybridState bell_target(Detector detector);

struct HeraldBranch {
  Detector detector = Detector::kUp;
  double probability = 0.0;
  DensityOperator conditional_state;  // ensembles A, B after storage transfer
  double fidelity = 0.0;              // against bell_target(detector)
};

struct EntangleOutcome {
  bool heralded = false;              // some branch has non-zero probability
  HeraldPolicy policy = HeraldPolicy::kMarginal;
  double success_probability = 0.0;   // probability the run is accepted
  std::array<std::optional<HeraldBranch>, 2> branches;  // [kUp, kDown]
  HybridState pre_detection;

  const std::optional<HeraldBranch>& branch(Detector d) const {
    return branches[static_cast<std::size_t>(d)];
  }
};

EntangleOutcome entangle_pair_exact(const AbsorptionModel& absorption, const DetectorModel& det,
                                    HeraldPolicy policy = HeraldPolicy::kMarginal);

// One sampled run of the entangler.
struct EntangleShot {
  HeraldPattern pattern;                // [up, down]
  bool heralded = false;
  std::optional<Detector> which;        // double clicks resolve to kUp
  std::optional<HybridState> conditional_state;  // ensembles + vacuum modes, after storage
};

EntangleShot entangle_pair_shot(const HybridState& pre_detection, const DetectorModel& det,
                                HeraldPolicy policy, Rng& rng);

struct SampledEntangleStats {
  std::uint64_t trials = 0;
  std::uint64_t heralded = 0;
  std::uint64_t up_clicks = 0;
  std::uint64_t down_clicks = 0;
  std::uint64_t double_clicks = 0;

  double herald_rate() const { return trials ? double(heralded) / double(trials) : 0.0; }
  // Fraction of single-detector heralds that came from kUp.
  double up_fraction() const;

  bool operator==(const SampledEntangleStats&) const = default;
};

// Trial t draws from Rng(derive_seed(seed, t)); the parallel and serial
// kernels produce identical statistics.
SampledEntangleStats entangle_pair_sampled(const AbsorptionModel& absorption,
                                           const DetectorModel& det, std::uint64_t seed,
                                           std::uint64_t trials,
                                           HeraldPolicy policy = HeraldPolicy::kMarginal);
SampledEntangleStats entangle_pair_sampled_serial(const AbsorptionModel& absorption,
                                                  const DetectorModel& det, std::uint64_t seed,
                                                  std::uint64_t trials,
                                                  HeraldPolicy policy = HeraldPolicy::kMarginal);

// ------------------------------------------------------------------ GHZ

// Four-ensemble interferometer: ensembles A..D, then modes a..d.
inline constexpr std::size_t kGhzEnsembles = 4;
inline constexpr int kGhzCutoff = 4;

Layout ghz_layout();
HybridState ghz_initial_state();  // |eeee> |1111>

// Two pair interferometers on (A,B;a,b) and (C,D;c,d), then beam splitters on
// (a,c) and (b,d).
HybridState ghz_pre_detection(const AbsorptionModel& absorption);

// Detector Dk watches ghz_detector_modes()[k-1]: D1=a, D2=b, D3=d, D4=c.
const std::vector<std::size_t>& ghz_detector_modes();

// (|gggg> + |ssss>)/sqrt2.
HybridState ghz_target();

struct GhzCorrection {
  std::vector<std::size_t> x_on;  // ensembles that receive X
  double phase_on_a = 0.0;        // Phi(phase_on_a) on ensemble A after the X gates
};

struct AcceptedPattern {
  HeraldPattern pattern;
  double probability = 0.0;
  GhzCorrection correction;
  std::optional<DensityOperator> conditional_state;  // corrected; empty if probability is 0
  double fidelity = 0.0;
};

struct RawPattern {
  double probability = 0.0;
  std::optional<DensityOperator> ensembles;  // after storage transfer, uncorrected
};

struct GhzOutcome {
  std::vector<AcceptedPattern> accepted;
  double success_probability = 0.0;
  std::optional<DensityOperator> conditional_state;  // mixture over accepted patterns
  std::map<HeraldPattern, RawPattern> all_patterns;
};

// The four accepted two-click patterns with their fixed corrections.
const std::vector<std::pair<HeraldPattern, GhzCorrection>>& ghz_accepted_patterns();

DensityOperator apply_correction(const DensityOperator& rho, const GhzCorrection& correction);

GhzOutcome ghz4_exact(const AbsorptionModel& absorption, const DetectorModel& det);

// eta^(Q/2) (Q-2) / 2^(Q-2) for even Q >= 4.
double ghz_success_probability(int qubits, double eta);

// --------------------------------------------------------------- linking

inline constexpr double kLinkSuccessScale = 1.0 / 8.0;

struct Cluster {
  int size = 0;
  bool operator==(const Cluster&) const = default;
};

struct LinkResult {
  bool success = false;
  std::optional<Cluster> merged;    // on success
  std::optional<Cluster> remnant_a; // on failure; empty when the cluster is consumed
  std::optional<Cluster> remnant_b;
};

double link_success_probability(double eta_prime);

// Success (probability eta'/8) fuses the clusters; failure measures one link
// qubit out of each cluster. A cluster of size 1 is consumed by a failure.
LinkResult link_clusters(const Cluster& a, const Cluster& b, double eta_prime, Rng& rng);

}  // namespace blockade::protocol
