#include "blockade/protocol.hpp"

#include <cmath>
#include <numbers>

#include "blockade/errors.hpp"

namespace blockade::protocol {

using ensemble::kE;
using ensemble::kG;
using ensemble::kR1;
using ensemble::kS;

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

// Mode index watched by each pair detector, ordered [kUp, kDown].
constexpr std::array<std::size_t, 2> kPairDetectorModes = {kModeB, kModeA};

bool accepts(HeraldPolicy policy, const HeraldPattern& pattern, Detector d) {
  const std::size_t self = static_cast<std::size_t>(d);
  const std::size_t other = 1 - self;
  if (!pattern.clicked(self)) return false;
  return policy == HeraldPolicy::kMarginal || !pattern.clicked(other);
}

DensityOperator ensembles_after_storage(const DensityOperator& rho, std::size_t count) {
  std::set<std::size_t> keep;
  for (std::size_t k = 0; k < count; ++k) keep.insert(k);
  DensityOperator out = partial_trace(rho, keep);
  for (std::size_t k = 0; k < count; ++k) out = ensemble::transfer_to_storage(out, k);
  return out;
}

}  // namespace

const char* to_string(HeraldPolicy policy) {
  return policy == HeraldPolicy::kMarginal ? "marginal" : "exclusive";
}

const char* to_string(Detector detector) { return detector == Detector::kUp ? "up" : "down"; }

// ------------------------------------------------------------ pair entangler

Layout pair_layout(int cutoff) {
  return {Subsystem::ensemble("A"), Subsystem::ensemble("B"), Subsystem::mode("a", cutoff),
          Subsystem::mode("b", cutoff)};
}

HybridState pair_initial_state() { return HybridState::basis(pair_layout(), {kE, kE, 1, 1}); }

HybridState pair_interferometer(const HybridState& input, std::size_t ens_a, std::size_t ens_b,
                                std::size_t mode_a, std::size_t mode_b,
                                const AbsorptionModel& absorption) {
  HybridState s = optics::beam_splitter(input, mode_a, mode_b);
  s = ensemble::blockade_absorb(s, ens_a, mode_a, absorption);
  s = ensemble::blockade_absorb(s, ens_b, mode_b, absorption);
  s = optics::beam_splitter(s, mode_a, mode_b);
  return optics::phase_shift(s, mode_a, -std::numbers::pi / 2.0);
}

HybridState entangler_pre_detection(const AbsorptionModel& absorption) {
  return pair_interferometer(pair_initial_state(), kEnsA, kEnsB, kModeA, kModeB, absorption);
}

HybridState bell_target(Detector detector) {
  const Layout layout = {Subsystem::ensemble("A"), Subsystem::ensemble("B")};
  const double sign = detector == Detector::kUp ? 1.0 : -1.0;
  return HybridState(layout, {{{kS, kG}, Complex{kInvSqrt2, 0.0}},
                              {{kG, kS}, Complex{0.0, sign * kInvSqrt2}}});
}

EntangleOutcome entangle_pair_exact(const AbsorptionModel& absorption, const DetectorModel& det,
                                    HeraldPolicy policy) {
  absorption.validate();
  det.validate();

  EntangleOutcome outcome;
  outcome.policy = policy;
  outcome.pre_detection = entangler_pre_detection(absorption);

  const std::vector<std::size_t> modes(kPairDetectorModes.begin(), kPairDetectorModes.end());
  const auto patterns = optics::detect_all_probabilities(outcome.pre_detection, modes, det);

  for (Detector d : {Detector::kUp, Detector::kDown}) {
    DensityOperator joint;
    double probability = 0.0;
    for (const auto& [pattern, branch] : patterns) {
      if (!accepts(policy, pattern, d) || !branch.post_state) continue;
      joint.accumulate(*branch.post_state, branch.probability);
      probability += branch.probability;
    }
    if (probability <= kPruneTol) continue;
    HeraldBranch herald;
    herald.detector = d;
    herald.probability = probability;
    herald.conditional_state = ensembles_after_storage(joint.normalized(), 2);
    herald.fidelity = fidelity(herald.conditional_state, bell_target(d));
    outcome.branches[static_cast<std::size_t>(d)] = std::move(herald);
  }

  for (const auto& [pattern, branch] : patterns) {
    if (accepts(policy, pattern, Detector::kUp) || accepts(policy, pattern, Detector::kDown)) {
      outcome.success_probability += branch.probability;
    }
  }
  outcome.heralded = outcome.branches[0].has_value() || outcome.branches[1].has_value();
  return outcome;
}

EntangleShot entangle_pair_shot(const HybridState& pre_detection, const DetectorModel& det,
                                HeraldPolicy policy, Rng& rng) {
  auto up = optics::detect(pre_detection, kPairDetectorModes[0], det, rng);
  auto down = optics::detect(up.post_state, kPairDetectorModes[1], det, rng);

  EntangleShot shot;
  shot.pattern.number_resolving = det.number_resolving;
  shot.pattern.counts = {up.pattern.counts[0], down.pattern.counts[0]};
  const bool up_ok = accepts(policy, shot.pattern, Detector::kUp);
  const bool down_ok = accepts(policy, shot.pattern, Detector::kDown);
  shot.heralded = up_ok || down_ok;
  if (!shot.heralded) return shot;
  shot.which = up_ok ? Detector::kUp : Detector::kDown;
  HybridState s = down.post_state;
  s = ensemble::transfer_to_storage(s, kEnsA);
  s = ensemble::transfer_to_storage(s, kEnsB);
  shot.conditional_state = std::move(s);
  return shot;
}

double SampledEntangleStats::up_fraction() const {
  const std::uint64_t singles = up_clicks + down_clicks - 2 * double_clicks;
  if (singles == 0) return 0.0;
  return double(up_clicks - double_clicks) / double(singles);
}

// ------------------------------------------------------------------- GHZ

namespace {

constexpr std::size_t kModeOffset = kGhzEnsembles;
constexpr std::size_t kGa = kModeOffset + 0, kGb = kModeOffset + 1, kGc = kModeOffset + 2,
                      kGd = kModeOffset + 3;

HeraldPattern two_clicks(std::size_t first, std::size_t second) {
  HeraldPattern p{{0, 0, 0, 0}, false};
  p.counts[first - 1] = 1;
  p.counts[second - 1] = 1;
  return p;
}

}  // namespace

Layout ghz_layout() {
  return {Subsystem::ensemble("A"),       Subsystem::ensemble("B"),
          Subsystem::ensemble("C"),       Subsystem::ensemble("D"),
          Subsystem::mode("a", kGhzCutoff), Subsystem::mode("b", kGhzCutoff),
          Subsystem::mode("c", kGhzCutoff), Subsystem::mode("d", kGhzCutoff)};
}

HybridState ghz_initial_state() {
  return HybridState::basis(ghz_layout(), {kE, kE, kE, kE, 1, 1, 1, 1});
}

HybridState ghz_pre_detection(const AbsorptionModel& absorption) {
  HybridState s = ghz_initial_state();
  s = pair_interferometer(s, 0, 1, kGa, kGb, absorption);
  s = pair_interferometer(s, 2, 3, kGc, kGd, absorption);
  s = optics::beam_splitter(s, kGa, kGc);
  return optics::beam_splitter(s, kGb, kGd);
}

const std::vector<std::size_t>& ghz_detector_modes() {
  static const std::vector<std::size_t> modes = {kGa, kGb, kGd, kGc};
  return modes;
}

HybridState ghz_target() {
  Layout layout;
  for (const char* name : {"A", "B", "C", "D"}) layout.push_back(Subsystem::ensemble(name));
  return HybridState(layout, {{{kG, kG, kG, kG}, Complex{kInvSqrt2, 0.0}},
                              {{kS, kS, kS, kS}, Complex{kInvSqrt2, 0.0}}});
}

const std::vector<std::pair<HeraldPattern, GhzCorrection>>& ghz_accepted_patterns() {
  // Derived by exact computation of the uncorrected conditional states:
  // (D1,D2) and (D4,D3) herald |sgsg> + |gsgs>; (D1,D3) and (D4,D2) herald
  // |sggs> - |gssg>.
  static const std::vector<std::pair<HeraldPattern, GhzCorrection>> table = {
      {two_clicks(1, 2), GhzCorrection{{1, 3}, 0.0}},
      {two_clicks(1, 3), GhzCorrection{{1, 2}, std::numbers::pi}},
      {two_clicks(4, 2), GhzCorrection{{1, 2}, std::numbers::pi}},
      {two_clicks(4, 3), GhzCorrection{{1, 3}, 0.0}},
  };
  return table;
}

DensityOperator apply_correction(const DensityOperator& rho, const GhzCorrection& correction) {
  DensityOperator out = rho;
  for (std::size_t k : correction.x_on) out = ensemble::gate_x(out, k);
  if (correction.phase_on_a != 0.0) out = ensemble::gate_phase(out, 0, correction.phase_on_a);
  return out;
}

GhzOutcome ghz4_exact(const AbsorptionModel& absorption, const DetectorModel& det) {
  absorption.validate();
  det.validate();
  if (det.number_resolving) {
    throw ParameterError("ghz4_exact: the GHZ herald is defined for click/no-click detectors");
  }

  const HybridState pre = ghz_pre_detection(absorption);
  const auto patterns = optics::detect_all_probabilities(pre, ghz_detector_modes(), det);

  GhzOutcome outcome;
  for (const auto& [pattern, branch] : patterns) {
    RawPattern raw;
    raw.probability = branch.probability;
    if (branch.post_state) raw.ensembles = ensembles_after_storage(*branch.post_state, kGhzEnsembles);
    outcome.all_patterns.emplace(pattern, std::move(raw));
  }

  const HybridState target = ghz_target();
  DensityOperator mixture;
  for (const auto& [pattern, correction] : ghz_accepted_patterns()) {
    const RawPattern& raw = outcome.all_patterns.at(pattern);
    AcceptedPattern accepted;
    accepted.pattern = pattern;
    accepted.probability = raw.probability;
    accepted.correction = correction;
    if (raw.ensembles) {
      accepted.conditional_state = apply_correction(*raw.ensembles, correction);
      accepted.fidelity = fidelity(*accepted.conditional_state, target);
      mixture.accumulate(*accepted.conditional_state, raw.probability);
    }
    outcome.success_probability += raw.probability;
    outcome.accepted.push_back(std::move(accepted));
  }
  if (outcome.success_probability > kPruneTol) outcome.conditional_state = mixture.normalized();
  return outcome;
}

double ghz_success_probability(int qubits, double eta) {
  if (qubits < 4 || qubits % 2 != 0) {
    throw ParameterError("ghz_success_probability: qubit count must be even and at least 4");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("ghz_success_probability: eta outside [0, 1]");
  return std::pow(eta, qubits / 2) * (qubits - 2) / std::ldexp(1.0, qubits - 2);
}

// --------------------------------------------------------------- linking

double link_success_probability(double eta_prime) {
  if (!(eta_prime >= 0.0 && eta_prime <= 1.0)) throw ParameterError("eta' must lie in [0, 1]");
  return eta_prime * kLinkSuccessScale;
}

LinkResult link_clusters(const Cluster& a, const Cluster& b, double eta_prime, Rng& rng) {
  if (a.size < 1 || b.size < 1) throw ParameterError("link_clusters: clusters must be non-empty");
  const double p = link_success_probability(eta_prime);
  LinkResult result;
  if (bernoulli(rng, p)) {
    result.success = true;
    result.merged = Cluster{a.size + b.size};
    return result;
  }
  if (a.size > 1) result.remnant_a = Cluster{a.size - 1};
  if (b.size > 1) result.remnant_b = Cluster{b.size - 1};
  return result;
}

}  // namespace blockade::protocol
