// Monte Carlo kernels for the pair entangler. The OpenMP kernel and the serial
// reference share the per-trial body and differ only in the loop.
#include <vector>

#include "blockade/errors.hpp"
#include "blockade/protocol.hpp"

namespace blockade::protocol {

namespace {

// bit 0: heralded, bit 1: up clicked, bit 2: down clicked
std::uint8_t run_trial(const HybridState& pre, const DetectorModel& det, HeraldPolicy policy,
                       std::uint64_t seed, std::uint64_t trial) {
  Rng rng(derive_seed(seed, trial));
  const EntangleShot shot = entangle_pair_shot(pre, det, policy, rng);
  return static_cast<std::uint8_t>((shot.heralded ? 1 : 0) | (shot.pattern.clicked(0) ? 2 : 0) |
                                   (shot.pattern.clicked(1) ? 4 : 0));
}

SampledEntangleStats reduce(const std::vector<std::uint8_t>& flags) {
  SampledEntangleStats stats;
  stats.trials = flags.size();
  for (std::uint8_t f : flags) {
    stats.heralded += f & 1;
    stats.up_clicks += (f >> 1) & 1;
    stats.down_clicks += (f >> 2) & 1;
    stats.double_clicks += ((f & 6) == 6) ? 1 : 0;
  }
  return stats;
}

void check(const AbsorptionModel& absorption, const DetectorModel& det, std::uint64_t trials) {
  absorption.validate();
  det.validate();
  if (trials < 1) throw ParameterError("entangle_pair_sampled: trials must be at least 1");
}

}  // namespace

SampledEntangleStats entangle_pair_sampled(const AbsorptionModel& absorption,
                                           const DetectorModel& det, std::uint64_t seed,
                                           std::uint64_t trials, HeraldPolicy policy) {
  check(absorption, det, trials);
  const HybridState pre = entangler_pre_detection(absorption);
  std::vector<std::uint8_t> flags(trials);
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n; ++t) {
    flags[t] = run_trial(pre, det, policy, seed, static_cast<std::uint64_t>(t));
  }
  return reduce(flags);
}

SampledEntangleStats entangle_pair_sampled_serial(const AbsorptionModel& absorption,
                                                  const DetectorModel& det, std::uint64_t seed,
                                                  std::uint64_t trials, HeraldPolicy policy) {
  check(absorption, det, trials);
  const HybridState pre = entangler_pre_detection(absorption);
  std::vector<std::uint8_t> flags(trials);
  for (std::uint64_t t = 0; t < trials; ++t) flags[t] = run_trial(pre, det, policy, seed, t);
  return reduce(flags);
}

}  // namespace blockade::protocol
