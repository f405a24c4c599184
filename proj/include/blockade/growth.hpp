#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockade/rng.hpp"

// Resource economics of growing a large cluster from probabilistically
// generated GHZ blocks. Clusters are tracked by size only.
namespace blockade::growth {

enum class PairingRule { kLargestFirst, kSmallestFirst, kRandom };

const char* to_string(PairingRule rule);
PairingRule parse_pairing_rule(const std::string& name);

struct GrowthPolicy {
  int block_size = 4;        // Q, even and >= 4
  int target_size = 8;       // stop once any cluster reaches this size
  PairingRule pairing = PairingRule::kLargestFirst;
  int pool_size = 2;         // blocks are generated while fewer clusters are held
  std::uint64_t step_cap = 1'000'000;

  void validate() const;
};

struct ClusterInventory {
  std::vector<int> clusters;  // sorted ascending, every entry >= 2
  std::uint64_t consumed_blocks = 0;
  std::uint64_t generation_attempts = 0;
  std::uint64_t link_attempts = 0;
  std::uint64_t failed_links = 0;
  std::uint64_t discarded_remnants = 0;  // size-1 clusters dropped after a failed link
  std::uint64_t elapsed_steps = 0;

  std::uint64_t qubits_created(int block_size) const;
  std::uint64_t qubits_held() const;
  std::uint64_t qubits_measured() const { return 2 * failed_links; }
};

struct TrialResult {
  bool reached_target = false;
  bool cap_hit = false;
  ClusterInventory inventory;
};

TrialResult run_growth_trial(const GrowthPolicy& policy, double eta, double eta_prime, Rng& rng);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  bool operator==(const Moments&) const = default;
};

struct GrowthStats {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t cap_hits = 0;
  Moments blocks;
  Moments generation_attempts;
  Moments link_attempts;
  Moments steps;
  bool accounting_ok = true;  // qubit ledger balanced in every trial

  double success_fraction() const { return trials ? double(successes) / double(trials) : 0.0; }
  bool operator==(const GrowthStats&) const = default;
};

// Trial t uses Rng(derive_seed(seed, t)). Both kernels return identical stats.
GrowthStats simulate_growth(const GrowthPolicy& policy, double eta, double eta_prime,
                            std::uint64_t seed, std::uint64_t trials);
GrowthStats simulate_growth_serial(const GrowthPolicy& policy, double eta, double eta_prime,
                                   std::uint64_t seed, std::uint64_t trials);

struct ExpectedCost {
  double blocks = 0.0;
  double generation_attempts = 0.0;
  double link_attempts = 0.0;
  double steps = 0.0;
  std::size_t transient_states = 0;
};

// Exact expectations of the same rules by an absorbing-chain solve over
// inventory states. `max_states` bounds the transient state space.
ExpectedCost expected_cost_markov(const GrowthPolicy& policy, double eta, double eta_prime,
                                  std::size_t max_states = 20000);

}  // namespace blockade::growth
