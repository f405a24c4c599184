#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blockade/errors.hpp"
#include "blockade/optics.hpp"
#include "blockade/protocol.hpp"
#include "support.hpp"

using namespace blockade;
using namespace blockade::optics;

namespace {

const double kR = std::numbers::sqrt2 / 2.0;

Layout two_modes(int cutoff = kDefaultCutoff) { return {Subsystem::mode("a", cutoff), Subsystem::mode("b", cutoff)}; }

HybridState fock(int n, int cutoff = kDefaultCutoff) {
  return HybridState::basis({Subsystem::mode("a", cutoff)}, {static_cast<std::uint8_t>(n)});
}

DetectorModel detector(double eta, double dark_rate = 0.0) {
  DetectorModel det;
  det.efficiency = eta;
  det.dark_count_rate = dark_rate;
  return det;
}

}  // namespace

TEST(BeamSplitter, HongOuMandel) {
  auto out = beam_splitter(HybridState::basis(two_modes(), {1, 1}), 0, 1);
  HybridState expected(two_modes(), {{{0, 2}, Complex{0, kR}}, {{2, 0}, Complex{0, kR}}});
  support::expect_state_near(out, expected);
  EXPECT_EQ(out.amplitude({1, 1}), Complex(0, 0));
}

TEST(BeamSplitter, VacuumInvariant) {
  auto out = beam_splitter(HybridState::basis(two_modes(), {0, 0}), 0, 1);
  support::expect_state_near(out, HybridState::basis(two_modes(), {0, 0}));
}

TEST(BeamSplitter, InverseUndoesForward) {
  std::mt19937_64 rng(101);
  const Layout layout = {Subsystem::mode("a", 3), Subsystem::ensemble("A"), Subsystem::mode("b", 3)};
  for (int trial = 0; trial < 100; ++trial) {
    auto s = support::random_state(layout, rng, [](const Label& l) { return l[0] + l[2] <= 3; });
    auto back = beam_splitter_inverse(beam_splitter(s, 0, 2), 0, 2);
    support::expect_state_near(back, s);
  }
}

TEST(BeamSplitter, MatchesPermanentFormula) {
  const auto u = beam_splitter_matrix();
  const int cutoff = 4;
  for (int n1 = 0; n1 <= 2; ++n1) {
    for (int n2 = 0; n2 <= 2; ++n2) {
      auto out = beam_splitter(HybridState::basis(two_modes(cutoff), {std::uint8_t(n1), std::uint8_t(n2)}), 0, 1);
      for (int p = 0; p <= n1 + n2; ++p) {
        const int q = n1 + n2 - p;
        const Complex expected = support::two_mode_amplitude(u, n1, n2, p, q);
        EXPECT_NEAR(std::abs(out.amplitude({std::uint8_t(p), std::uint8_t(q)}) - expected), 0.0, 1e-12)
            << n1 << n2 << " -> " << p << q;
      }
    }
  }
}

TEST(BeamSplitter, UnitaryAndNumberConservingOnRandomStates) {
  std::mt19937_64 rng(7);
  const Layout layout = {Subsystem::mode("a", 4), Subsystem::mode("b", 4)};
  for (int trial = 0; trial < 1000; ++trial) {
    auto s = support::random_state(layout, rng, [](const Label& l) { return l[0] + l[1] <= 4; });
    auto out = beam_splitter(s, 0, 1);
    EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
    std::map<int, double> weight_in, weight_out;
    for (const auto& [l, a] : s.amplitudes()) weight_in[l[0] + l[1]] += std::norm(a);
    for (const auto& [l, a] : out.amplitudes()) weight_out[l[0] + l[1]] += std::norm(a);
    for (const auto& [n, w] : weight_in) EXPECT_NEAR(weight_out[n], w, 1e-12);
  }
}

TEST(BeamSplitter, Errors) {
  EXPECT_THROW(beam_splitter(HybridState::basis(two_modes(1), {1, 1}), 0, 1), CutoffOverflow);
  const Layout mixed = {Subsystem::ensemble("A"), Subsystem::mode("a")};
  EXPECT_THROW(beam_splitter(HybridState::basis(mixed, {0, 0}), 0, 1), ParameterError);
  EXPECT_THROW(beam_splitter(HybridState::basis(two_modes(), {0, 0}), 0, 0), ParameterError);
}

TEST(PhaseShift, AppliesPerPhoton) {
  HybridState s({Subsystem::mode("a")}, {{{1}, Complex{kR, 0}}, {{2}, Complex{kR, 0}}});
  auto out = phase_shift(s, 0, std::numbers::pi / 2);
  EXPECT_NEAR(std::abs(out.amplitude({1}) - Complex(0, kR)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out.amplitude({2}) - Complex(-kR, 0)), 0.0, 1e-15);
}

TEST(DetectorModel, ValidationRejectsBadValues) {
  EXPECT_THROW(detector(1.2).validate(), ParameterError);
  EXPECT_THROW(detector(-0.1).validate(), ParameterError);
  EXPECT_THROW(detector(0.5, -1.0).validate(), ParameterError);
  DetectorModel zero_gate;
  zero_gate.gate_time = 0.0;
  EXPECT_THROW(zero_gate.validate(), ParameterError);
}

TEST(DetectorModel, ClickProbabilityMatchesLossEnumeration) {
  EXPECT_NEAR(detector(0.3).click_probability(1), 0.3, 1e-15);
  EXPECT_NEAR(detector(0.3).click_probability(2), 0.51, 1e-15);
  EXPECT_NEAR(support::click_probability_by_enumeration(2, 0.3, 0.0), 0.51, 1e-15);
  for (double eta : {0.0, 0.1, 0.3, 0.77, 1.0}) {
    for (double rate : {0.0, 20.0, 5e4}) {
      auto det = detector(eta, rate);
      for (int n = 0; n <= 4; ++n) {
        EXPECT_NEAR(det.click_probability(n),
                    support::click_probability_by_enumeration(n, eta, det.dark_click_probability()), 1e-14);
      }
    }
  }
}

TEST(DetectorModel, ResolvingCountsFormDistribution) {
  auto det = detector(0.4, 1e4);
  det.number_resolving = true;
  for (int n = 0; n <= 3; ++n) {
    double total = 0.0;
    for (int c = 0; c <= n + 1; ++c) total += det.count_probability(c, n);
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(Detect, PerfectDetectorIsDeterministic) {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    auto sample = detect(fock(1), 0, detector(1.0), rng);
    EXPECT_TRUE(sample.pattern.clicked(0));
    EXPECT_EQ(sample.post_state.amplitude({0}), Complex(1, 0));
    EXPECT_FALSE(detect(fock(0), 0, detector(1.0), rng).pattern.clicked(0));
  }
}

TEST(Detect, FrequenciesMatchExactEnumeration) {
  const auto det = detector(0.3, 2e4);
  HybridState s({Subsystem::ensemble("A"), Subsystem::mode("a")},
                {{{0, 0}, Complex{0.5, 0}}, {{1, 1}, Complex{0, 0.5}}, {{2, 2}, Complex{std::sqrt(0.5), 0}}});
  const auto exact = detect_all_probabilities(s, {1}, det);
  double p_click = 0.0;
  for (const auto& [pattern, branch] : exact)
    if (pattern.clicked(0)) p_click += branch.probability;
  Rng rng(2024);
  const int trials = 100000;
  int clicks = 0;
  for (int t = 0; t < trials; ++t) clicks += detect(s, 1, det, rng).pattern.clicked(0);
  EXPECT_NEAR(double(clicks) / trials, p_click, 3.0 * support::binomial_sigma(p_click, trials));
}

TEST(Detect, PostStateIsNormalizedConditional) {
  // A in g with 0 photons, A in s with 2 photons: a click selects s.
  HybridState s({Subsystem::ensemble("A"), Subsystem::mode("a")},
                {{{0, 0}, Complex{kR, 0}}, {{2, 2}, Complex{kR, 0}}});
  Rng rng(3);
  auto sample = detect(s, 1, detector(1.0), rng);
  ASSERT_NEAR(sample.post_state.norm_squared(), 1.0, 1e-12);
  if (sample.pattern.clicked(0)) {
    EXPECT_NEAR(std::abs(sample.post_state.amplitude({2, 0})), 1.0, 1e-12);
  } else {
    EXPECT_NEAR(std::abs(sample.post_state.amplitude({0, 0})), 1.0, 1e-12);
  }
}

TEST(DetectAll, SingleModePerfect) {
  auto all = detect_all_probabilities(fock(1), {0}, detector(1.0));
  ASSERT_EQ(all.count(HeraldPattern{{1}, false}), 1u);
  const auto& click = all.at(HeraldPattern{{1}, false});
  EXPECT_NEAR(click.probability, 1.0, 1e-15);
  ASSERT_TRUE(click.post_state);
  EXPECT_NEAR(click.post_state->element({0}, {0}).real(), 1.0, 1e-15);
  auto none = all.find(HeraldPattern{{0}, false});
  if (none != all.end()) {
    EXPECT_EQ(none->second.probability, 0.0);
    EXPECT_FALSE(none->second.post_state);
  }
}

TEST(DetectAll, PreDetectionPairStateSplitsEvenly) {
  const auto pre = protocol::entangler_pre_detection(ensemble::AbsorptionModel{1.0});
  auto all = detect_all_probabilities(pre, {protocol::kModeB, protocol::kModeA}, detector(1.0));
  EXPECT_NEAR(all.at(HeraldPattern{{1, 0}, false}).probability, 0.5, 1e-12);
  EXPECT_NEAR(all.at(HeraldPattern{{0, 1}, false}).probability, 0.5, 1e-12);
}

TEST(DetectAll, CompletenessOnRandomStates) {
  std::mt19937_64 rng(77);
  const Layout layout = {Subsystem::ensemble("A"), Subsystem::mode("a"), Subsystem::mode("b")};
  for (int trial = 0; trial < 1000; ++trial) {
    auto s = support::random_state(layout, rng);
    DetectorModel det = detector(std::uniform_real_distribution<double>(0, 1)(rng), 1e4);
    det.number_resolving = trial % 2 == 1;
    double total = 0.0;
    for (const auto& [pattern, branch] : detect_all_probabilities(s, {1, 2}, det)) {
      total += branch.probability;
      if (branch.post_state) EXPECT_NEAR(branch.post_state->trace(), 1.0, 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(DetectAll, DuplicateModesRejected) {
  EXPECT_THROW(detect_all_probabilities(HybridState::basis(two_modes(), {0, 0}), {0, 0}, detector(1.0)),
               ParameterError);
}
