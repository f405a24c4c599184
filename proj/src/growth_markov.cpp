// Absorbing-chain evaluation of the growth rules. Kept separate from the
// trial simulator: it enumerates inventories and solves for expectations
// instead of sampling.
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <deque>
#include <map>
#include <vector>

#include "blockade/errors.hpp"
#include "blockade/growth.hpp"
#include "blockade/protocol.hpp"

namespace blockade::growth {

namespace {

using Inventory = std::vector<int>;  // sorted ascending

struct Transition {
  double probability;
  Inventory next;  // ignored when absorbed
  bool absorbed;
};

struct StepCost {
  double blocks = 0, generation = 0, links = 0;
};

Inventory with(Inventory inv, int size) {
  inv.insert(std::upper_bound(inv.begin(), inv.end(), size), size);
  return inv;
}

}  // namespace

ExpectedCost expected_cost_markov(const GrowthPolicy& policy, double eta, double eta_prime,
                                  std::size_t max_states) {
  policy.validate();
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
  if (!(eta_prime > 0.0 && eta_prime <= 1.0)) {
    throw ParameterError("expected_cost_markov: eta' must lie in (0, 1] for the chain to absorb");
  }
  const double p_block = protocol::ghz_success_probability(policy.block_size, eta);
  const double p_link = protocol::link_success_probability(eta_prime);
  const int target = policy.target_size;

  auto successors = [&](const Inventory& inv, StepCost& cost) {
    std::vector<Transition> out;
    cost = {};
    if (static_cast<int>(inv.size()) < policy.pool_size) {
      cost.blocks = 1.0;
      cost.generation = 1.0 / p_block;
      out.push_back({1.0, with(inv, policy.block_size), policy.block_size >= target});
      return out;
    }
    cost.links = 1.0;
    // Candidate pairs with their selection probabilities.
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> pairs;
    const std::size_t k = inv.size();
    switch (policy.pairing) {
      case PairingRule::kLargestFirst: pairs.push_back({{k - 2, k - 1}, 1.0}); break;
      case PairingRule::kSmallestFirst: pairs.push_back({{0, 1}, 1.0}); break;
      case PairingRule::kRandom: {
        const double w = 2.0 / (double(k) * double(k - 1));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = i + 1; j < k; ++j) pairs.push_back({{i, j}, w});
        break;
      }
    }
    for (const auto& [ij, w] : pairs) {
      Inventory rest;
      for (std::size_t m = 0; m < k; ++m) {
        if (m != ij.first && m != ij.second) rest.push_back(inv[m]);
      }
      const int a = inv[ij.first];
      const int b = inv[ij.second];
      out.push_back({w * p_link, with(rest, a + b), a + b >= target});
      Inventory failed = rest;
      if (a - 1 >= 2) failed = with(failed, a - 1);
      if (b - 1 >= 2) failed = with(failed, b - 1);
      out.push_back({w * (1.0 - p_link), failed, false});
    }
    return out;
  };

  // Enumerate transient states reachable from the empty inventory.
  std::map<Inventory, std::size_t> index;
  std::vector<Inventory> states;
  std::deque<Inventory> frontier{Inventory{}};
  index.emplace(Inventory{}, 0);
  states.push_back(Inventory{});
  while (!frontier.empty()) {
    const Inventory inv = frontier.front();
    frontier.pop_front();
    StepCost cost;
    for (const auto& t : successors(inv, cost)) {
      if (t.absorbed || index.contains(t.next)) continue;
      if (states.size() >= max_states) {
        throw ParameterError("expected_cost_markov: state space exceeds bound of " +
                             std::to_string(max_states));
      }
      index.emplace(t.next, states.size());
      states.push_back(t.next);
      frontier.push_back(t.next);
    }
  }

  // (I - T) x = c for each cost column.
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 4);
  for (Eigen::Index s = 0; s < n; ++s) {
    triplets.emplace_back(s, s, 1.0);
    StepCost cost;
    for (const auto& t : successors(states[s], cost)) {
      if (!t.absorbed && t.probability != 0.0) {
        triplets.emplace_back(s, static_cast<Eigen::Index>(index.at(t.next)), -t.probability);
      }
    }
    rhs(s, 0) = cost.blocks;
    rhs(s, 1) = cost.generation;
    rhs(s, 2) = cost.links;
    rhs(s, 3) = 1.0;
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success) throw std::runtime_error("expected_cost_markov: singular chain");
  const Eigen::MatrixXd x = solver.solve(rhs);

  ExpectedCost cost;
  cost.blocks = x(0, 0);
  cost.generation_attempts = x(0, 1);
  cost.link_attempts = x(0, 2);
  cost.steps = x(0, 3);
  cost.transient_states = states.size();
  return cost;
}

}  // namespace blockade::growth
