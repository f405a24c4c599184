#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blockade/errors.hpp"
#include "blockade/state.hpp"
#include "support.hpp"

using namespace blockade;
using blockade::ensemble::kG;
using blockade::ensemble::kS;

namespace {

const double kR = std::numbers::sqrt2 / 2.0;

Layout qubit_pair() { return {Subsystem::ensemble("A"), Subsystem::ensemble("B")}; }

HybridState bell_pair() {
  return HybridState(qubit_pair(), {{{kG, kS}, Complex{kR, 0}}, {{kS, kG}, Complex{kR, 0}}});
}

}  // namespace

TEST(HybridState, DropsExactZerosAndRejectsOutOfRangeLabels) {
  HybridState s({Subsystem::mode("a")}, {{{0}, Complex{1, 0}}, {{1}, Complex{0, 0}}});
  EXPECT_EQ(s.amplitudes().size(), 1u);
  EXPECT_THROW(HybridState::basis({Subsystem::mode("a")}, {3}), CutoffOverflow);
  EXPECT_THROW(HybridState::basis({Subsystem::mode("a")}, {0, 0}), DimensionMismatch);
}

TEST(Tensor, ProductOfBasisKets) {
  auto g = HybridState::basis({Subsystem::ensemble("A")}, {kG});
  auto one = HybridState::basis({Subsystem::mode("a")}, {1});
  auto s = tensor(g, one);
  ASSERT_EQ(s.amplitudes().size(), 1u);
  EXPECT_EQ(s.amplitude({kG, 1}), Complex(1, 0));
  EXPECT_EQ(s.layout().size(), 2u);
}

TEST(Tensor, Linearity) {
  HybridState plus({Subsystem::mode("a")}, {{{0}, Complex{kR, 0}}, {{1}, Complex{kR, 0}}});
  auto s = tensor(plus, HybridState::basis({Subsystem::mode("b")}, {0}));
  EXPECT_NEAR(std::abs(s.amplitude({0, 0}) - kR), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.amplitude({1, 0}) - kR), 0.0, 1e-15);
  EXPECT_EQ(s.amplitudes().size(), 2u);
}

TEST(Tensor, NormIsMultiplicative) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = support::random_state({Subsystem::ensemble("A"), Subsystem::mode("a")}, rng).scaled(0.7);
    auto b = support::random_state({Subsystem::mode("b")}, rng).scaled(Complex{0.0, 1.3});
    const double expected = std::sqrt(a.norm_squared()) * std::sqrt(b.norm_squared());
    EXPECT_NEAR(std::sqrt(tensor(a, b).norm_squared()), expected, 1e-12);
  }
}

TEST(MeasureProjective, BellLikeModeState) {
  const Layout modes = {Subsystem::mode("a"), Subsystem::mode("b")};
  HybridState s(modes, {{{0, 1}, Complex{0, kR}}, {{1, 0}, Complex{0, kR}}});
  auto outcome = measure_projective(s, 1, {1});
  EXPECT_NEAR(outcome.probability, 0.5, 1e-15);
  ASSERT_TRUE(outcome.post_state);
  EXPECT_NEAR(std::abs(outcome.post_state->amplitude({0, 1})), 1.0, 1e-15);
}

TEST(MeasureProjective, NonMatchingLabelGivesNullOutcome) {
  auto s = HybridState::basis({Subsystem::mode("a")}, {0});
  auto outcome = measure_projective(s, 0, {2});
  EXPECT_EQ(outcome.probability, 0.0);
  EXPECT_FALSE(outcome.post_state);
}

TEST(MeasureProjective, Errors) {
  auto s = HybridState::basis({Subsystem::mode("a")}, {0});
  EXPECT_THROW(measure_projective(s, 1, {0}), std::out_of_range);
  EXPECT_THROW(measure_projective(s, 0, {}), ParameterError);
}

TEST(MeasureProjective, CompletePartitionSumsToOne) {
  std::mt19937_64 rng(5);
  const Layout layout = {Subsystem::ensemble("A"), Subsystem::mode("a"), Subsystem::mode("b")};
  for (int trial = 0; trial < 200; ++trial) {
    auto s = support::random_state(layout, rng);
    for (std::size_t sub = 0; sub < layout.size(); ++sub) {
      double total = 0.0;
      for (std::uint8_t v = 0; v < layout[sub].dim; ++v) total += measure_projective(s, sub, {v}).probability;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Fidelity, PureSelfFidelityIsOne) {
  EXPECT_NEAR(fidelity(DensityOperator::pure(bell_pair()), bell_pair()), 1.0, 1e-15);
}

TEST(Fidelity, OrthogonalAdmixtureGivesOneMinusTwoEpsilon) {
  const double eps = 0.011;
  HybridState orth(qubit_pair(), {{{kG, kS}, Complex{kR, 0}}, {{kS, kG}, Complex{-kR, 0}}});
  DensityOperator rho = DensityOperator::pure(bell_pair());
  rho = DensityOperator(rho.layout(), {});
  rho.accumulate(DensityOperator::pure(bell_pair()), 1.0 - 2.0 * eps);
  rho.accumulate(DensityOperator::pure(orth), 2.0 * eps);
  EXPECT_NEAR(fidelity(rho, bell_pair()), 1.0 - 2.0 * eps, 1e-14);
}

TEST(Fidelity, MaximallyMixedTwoQubitsIsQuarter) {
  // Tr(I/4 |psi><psi|) = 1/4 for any logical psi.
  std::map<DensityOperator::Key, Complex> entries;
  for (auto a : {kG, kS})
    for (auto b : {kG, kS}) entries[{{a, b}, {a, b}}] = 0.25;
  DensityOperator mixed(qubit_pair(), entries);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    EXPECT_NEAR(fidelity(mixed, support::random_logical_state(qubit_pair(), rng)), 0.25, 1e-12);
  }
}

TEST(Fidelity, LayoutMismatchThrows) {
  EXPECT_THROW(fidelity(DensityOperator::pure(bell_pair()),
                        HybridState::basis({Subsystem::ensemble("A")}, {kG})),
               DimensionMismatch);
}

TEST(PartialTrace, ProductWithVacuumModeGivesBellPair) {
  auto joint = tensor(bell_pair(), HybridState::basis({Subsystem::mode("a")}, {0}));
  auto reduced = partial_trace(DensityOperator::pure(joint), {0, 1});
  EXPECT_NEAR(fidelity(reduced, bell_pair()), 1.0, 1e-15);
  EXPECT_EQ(reduced.layout(), qubit_pair());
}

TEST(PartialTrace, HalfOfBellPairIsMaximallyMixed) {
  auto reduced = partial_trace(DensityOperator::pure(bell_pair()), {0});
  EXPECT_NEAR(reduced.element({kG}, {kG}).real(), 0.5, 1e-15);
  EXPECT_NEAR(reduced.element({kS}, {kS}).real(), 0.5, 1e-15);
  EXPECT_EQ(std::abs(reduced.element({kG}, {kS})), 0.0);
}

TEST(PartialTrace, EmptyKeepSetThrows) {
  EXPECT_THROW(partial_trace(DensityOperator::pure(bell_pair()), {}), ParameterError);
}

TEST(PartialTrace, PreservesTraceAndHermiticity) {
  std::mt19937_64 rng(17);
  const Layout layout = {Subsystem::ensemble("A"), Subsystem::mode("a"), Subsystem::ensemble("B")};
  for (int trial = 0; trial < 100; ++trial) {
    auto rho = support::random_density(layout, rng);
    for (const std::set<std::size_t>& keep : {std::set<std::size_t>{0}, {1, 2}, {0, 2}}) {
      auto reduced = partial_trace(rho, keep);
      EXPECT_NEAR(reduced.trace(), 1.0, 1e-12);
      EXPECT_TRUE(reduced.is_hermitian());
      EXPECT_GE(reduced.min_eigenvalue(), -kPositivityTol);
    }
  }
}

TEST(PartialTrace, UndoesTensorWithPureAncilla) {
  std::mt19937_64 rng(23);
  const Layout system = {Subsystem::ensemble("A"), Subsystem::mode("a")};
  for (int trial = 0; trial < 50; ++trial) {
    auto rho = support::random_density(system, rng);
    auto ancilla = DensityOperator::pure(support::random_state({Subsystem::mode("x")}, rng));
    auto reduced = partial_trace(tensor(rho, ancilla), {0, 1});
    for (const auto& [key, value] : rho.entries()) {
      EXPECT_NEAR(std::abs(reduced.element(key.first, key.second) - value), 0.0, 1e-12);
    }
  }
}

TEST(DensityOperator, PureStateIsPositiveWithUnitTrace) {
  std::mt19937_64 rng(29);
  auto rho = DensityOperator::pure(support::random_state({Subsystem::ensemble("A"), Subsystem::mode("a")}, rng));
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
  EXPECT_TRUE(rho.is_hermitian());
  EXPECT_GE(rho.min_eigenvalue(), -kPositivityTol);
}
