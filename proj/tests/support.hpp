// Test-only assertion helpers on top of the shared generators.
#pragma once

#include <gtest/gtest.h>

#include <set>

#include "random_states.hpp"

namespace blockade::support {

inline void expect_state_near(const HybridState& actual, const HybridState& expected,
                              double tol = kAlgebraTol) {
  ASSERT_EQ(actual.layout(), expected.layout());
  std::set<Label> labels;
  for (const auto& [l, a] : actual.amplitudes()) labels.insert(l);
  for (const auto& [l, a] : expected.amplitudes()) labels.insert(l);
  for (const auto& l : labels) {
    EXPECT_NEAR(std::abs(actual.amplitude(l) - expected.amplitude(l)), 0.0, tol);
  }
}

}  // namespace blockade::support
