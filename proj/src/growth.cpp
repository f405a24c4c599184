#include "blockade/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blockade/errors.hpp"
#include "blockade/protocol.hpp"

namespace blockade::growth {

const char* to_string(PairingRule rule) {
  switch (rule) {
    case PairingRule::kLargestFirst: return "largest-first";
    case PairingRule::kSmallestFirst: return "smallest-first";
    case PairingRule::kRandom: return "random";
  }
  return "?";
}

PairingRule parse_pairing_rule(const std::string& name) {
  if (name == "largest-first") return PairingRule::kLargestFirst;
  if (name == "smallest-first") return PairingRule::kSmallestFirst;
  if (name == "random") return PairingRule::kRandom;
  throw ParameterError("unknown pairing rule '" + name + "'");
}

void GrowthPolicy::validate() const {
  if (block_size < 4 || block_size % 2 != 0) throw ParameterError("block size must be even and >= 4");
  if (target_size < block_size) throw ParameterError("target size must be at least the block size");
  if (pool_size < 2) throw ParameterError("pool size must be at least 2");
  if (step_cap < 1) throw ParameterError("step cap must be at least 1");
}

std::uint64_t ClusterInventory::qubits_created(int block_size) const {
  return consumed_blocks * static_cast<std::uint64_t>(block_size);
}

std::uint64_t ClusterInventory::qubits_held() const {
  return std::accumulate(clusters.begin(), clusters.end(), std::uint64_t{0});
}

namespace {

void check_rates(double eta, double eta_prime) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
  if (!(eta_prime >= 0.0 && eta_prime <= 1.0)) throw ParameterError("eta' must lie in [0, 1]");
}

std::uint64_t sample_attempts(double p, Rng& rng) {
  if (p >= 1.0) return 1;
  const double u = uniform01(rng);
  return 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

// Indices into the sorted cluster list chosen for the next link.
std::pair<std::size_t, std::size_t> choose_pair(PairingRule rule, std::size_t count, Rng& rng) {
  switch (rule) {
    case PairingRule::kLargestFirst: return {count - 2, count - 1};
    case PairingRule::kSmallestFirst: return {0, 1};
    case PairingRule::kRandom: {
      const auto i = static_cast<std::size_t>(uniform01(rng) * count);
      auto j = static_cast<std::size_t>(uniform01(rng) * (count - 1));
      if (j >= i) ++j;
      return {std::min(i, j), std::max(i, j)};
    }
  }
  return {0, 1};
}

}  // namespace

TrialResult run_growth_trial(const GrowthPolicy& policy, double eta, double eta_prime, Rng& rng) {
  const double p_block = protocol::ghz_success_probability(policy.block_size, eta);
  TrialResult result;
  ClusterInventory& inv = result.inventory;

  while (true) {
    if (!inv.clusters.empty() && inv.clusters.back() >= policy.target_size) {
      result.reached_target = true;
      break;
    }
    if (inv.elapsed_steps >= policy.step_cap) {
      result.cap_hit = true;
      break;
    }
    ++inv.elapsed_steps;

    if (static_cast<int>(inv.clusters.size()) < policy.pool_size) {
      inv.generation_attempts += sample_attempts(p_block, rng);
      ++inv.consumed_blocks;
      inv.clusters.insert(std::upper_bound(inv.clusters.begin(), inv.clusters.end(), policy.block_size),
                          policy.block_size);
      continue;
    }

    const auto [i, j] = choose_pair(policy.pairing, inv.clusters.size(), rng);
    const protocol::Cluster a{inv.clusters[i]};
    const protocol::Cluster b{inv.clusters[j]};
    inv.clusters.erase(inv.clusters.begin() + static_cast<std::ptrdiff_t>(j));
    inv.clusters.erase(inv.clusters.begin() + static_cast<std::ptrdiff_t>(i));
    ++inv.link_attempts;

    const protocol::LinkResult link = protocol::link_clusters(a, b, eta_prime, rng);
    std::vector<int> returned;
    if (link.success) {
      returned.push_back(link.merged->size);
    } else {
      ++inv.failed_links;
      for (const auto& remnant : {link.remnant_a, link.remnant_b}) {
        if (remnant && remnant->size >= 2) returned.push_back(remnant->size);
        else if (remnant) ++inv.discarded_remnants;
      }
    }
    for (int size : returned) {
      inv.clusters.insert(std::upper_bound(inv.clusters.begin(), inv.clusters.end(), size), size);
    }
  }
  return result;
}

namespace {

struct TrialRecord {
  bool reached = false;
  bool cap_hit = false;
  bool balanced = true;
  double blocks = 0, generation = 0, links = 0, steps = 0;
};

TrialRecord run_record(const GrowthPolicy& policy, double eta, double eta_prime, std::uint64_t seed,
                       std::uint64_t trial) {
  Rng rng(derive_seed(seed, trial));
  const TrialResult r = run_growth_trial(policy, eta, eta_prime, rng);
  const ClusterInventory& inv = r.inventory;
  TrialRecord rec;
  rec.reached = r.reached_target;
  rec.cap_hit = r.cap_hit;
  rec.balanced = inv.qubits_created(policy.block_size) ==
                 inv.qubits_held() + inv.qubits_measured() + inv.discarded_remnants;
  rec.blocks = double(inv.consumed_blocks);
  rec.generation = double(inv.generation_attempts);
  rec.links = double(inv.link_attempts);
  rec.steps = double(inv.elapsed_steps);
  return rec;
}

Moments moments(const std::vector<TrialRecord>& records, double TrialRecord::*field) {
  Moments m;
  const double n = double(records.size());
  for (const auto& r : records) m.mean += r.*field;
  m.mean /= n;
  double ss = 0.0;
  for (const auto& r : records) ss += (r.*field - m.mean) * (r.*field - m.mean);
  m.stddev = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return m;
}

GrowthStats reduce(const std::vector<TrialRecord>& records) {
  GrowthStats stats;
  stats.trials = records.size();
  for (const auto& r : records) {
    stats.successes += r.reached ? 1 : 0;
    stats.cap_hits += r.cap_hit ? 1 : 0;
    stats.accounting_ok = stats.accounting_ok && r.balanced;
  }
  stats.blocks = moments(records, &TrialRecord::blocks);
  stats.generation_attempts = moments(records, &TrialRecord::generation);
  stats.link_attempts = moments(records, &TrialRecord::links);
  stats.steps = moments(records, &TrialRecord::steps);
  return stats;
}

void check(const GrowthPolicy& policy, double eta, double eta_prime, std::uint64_t trials) {
  policy.validate();
  check_rates(eta, eta_prime);
  if (trials < 1) throw ParameterError("simulate_growth: trials must be at least 1");
}

}  // namespace

GrowthStats simulate_growth(const GrowthPolicy& policy, double eta, double eta_prime,
                            std::uint64_t seed, std::uint64_t trials) {
  check(policy, eta, eta_prime, trials);
  std::vector<TrialRecord> records(trials);
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t t = 0; t < n; ++t) {
    records[t] = run_record(policy, eta, eta_prime, seed, static_cast<std::uint64_t>(t));
  }
  return reduce(records);
}

GrowthStats simulate_growth_serial(const GrowthPolicy& policy, double eta, double eta_prime,
                                   std::uint64_t seed, std::uint64_t trials) {
  check(policy, eta, eta_prime, trials);
  std::vector<TrialRecord> records(trials);
  for (std::uint64_t t = 0; t < trials; ++t) records[t] = run_record(policy, eta, eta_prime, seed, t);
  return reduce(records);
}

}  // namespace blockade::growth
