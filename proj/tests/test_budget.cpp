#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "blockade/budget.hpp"
#include "blockade/errors.hpp"

using namespace blockade;
using namespace blockade::budget;

namespace {

const double kPi = std::numbers::pi;
const double kLambda43 = 485.766e-9;
const double kMass = 87.0 * constants::kAtomicMassUnit;

const Quantity& find(const std::vector<Quantity>& list, const std::string& name) {
  for (const auto& q : list)
    if (q.name == name) return q;
  throw std::runtime_error("missing quantity " + name);
}

}  // namespace

TEST(Absorption, PaperConfiguration) {
  const double w0 = kPi * kLambda43;
  const double sigma0 = 3 * kLambda43 * kLambda43 / (2 * kPi);
  EXPECT_NEAR(sigma0 / (kPi * w0 * w0), 3.0 / (2 * std::pow(kPi, 4)), 1e-15);
  EXPECT_NEAR(3.0 / (2 * std::pow(kPi, 4)), 0.0154, 1e-4);
  EXPECT_NEAR(p_absorption(300, kLambda43, w0), 0.989, 0.002);
}

TEST(Absorption, Limits) {
  EXPECT_EQ(p_absorption(0, kLambda43, 1e-6), 0.0);
  EXPECT_GT(p_absorption(1e6, kLambda43, kPi * kLambda43), 0.9999);
  double last = -1;
  for (double n : {1.0, 10.0, 100.0, 300.0, 1000.0}) {
    const double p = p_absorption(n, kLambda43, 3e-6);
    EXPECT_GT(p, last);
    last = p;
  }
  EXPECT_THROW(p_absorption(-1, kLambda43, 1e-6), ParameterError);
  EXPECT_THROW(p_absorption(300, 0, 1e-6), ParameterError);
  EXPECT_THROW(p_absorption(300, kLambda43, 0), ParameterError);
}

TEST(DoubleExcitation, BackSolvedCoupling) {
  const double g0 = coupling_for_double_excitation(300, 0.25, 0.26);
  EXPECT_NEAR(g0, 0.25 * std::sqrt(2 * 0.26 / 299), 1e-15);
  EXPECT_NEAR(g0, 0.0104, 1e-4);
  EXPECT_NEAR(p_double_excitation(300, g0, 0.25), 0.26, 1e-14);
}

TEST(DoubleExcitation, PerfectBlockadeLimit) {
  EXPECT_NEAR(p_double_excitation(300, 0.01, 1e3), 299 * 1e-4 / 2e6, 1e-22);
  EXPECT_LT(p_double_excitation(100, 0.01, 1e3), 1e-8);
  EXPECT_LT(p_double_excitation(300, 0.01, 1e5), p_double_excitation(300, 0.01, 1e3));
}

TEST(DoubleExcitation, InverseSquareInShift) {
  for (double b : {0.1, 0.25, 2.9}) {
    EXPECT_NEAR(p_double_excitation(300, 0.01, 2 * b), p_double_excitation(300, 0.01, b) / 4, 1e-16);
  }
  double last = 1e9;
  for (double b : {0.1, 0.2, 0.5, 1.0, 3.0}) {
    const double p = p_double_excitation(300, 0.01, b);
    EXPECT_LT(p, last);
    last = p;
  }
}

TEST(DoubleExcitation, CollectiveScaling) {
  const double g0 = 0.01, b = 0.5;
  for (double n : {2.0, 10.0, 300.0, 1e4}) {
    const double gn = std::sqrt(n) * g0;
    EXPECT_NEAR(p_double_excitation(n, g0, b), (n - 1) * gn * gn / (2 * n * b * b), 1e-16);
    EXPECT_NEAR(p_double_excitation(n, g0, b), g0 * g0 / (2 * b * b) * n * (n - 1) / n, 1e-16);
  }
}

TEST(DoubleExcitation, Errors) {
  EXPECT_THROW(p_double_excitation(1, 0.01, 0.25), ParameterError);
  EXPECT_THROW(p_double_excitation(300, 0.01, 0), ParameterError);
}

TEST(DarkCount, PaperValue) {
  EXPECT_NEAR(p_dark_count(20, 5e-6, 0.2), 5.0e-4, 0.02 * 5.0e-4);
  EXPECT_EQ(p_dark_count(0, 5e-6, 0.2), 0.0);
}

TEST(DarkCount, LinearAtSmallRates) {
  const double p1 = p_dark_count(20, 5e-6, 0.3);
  const double p2 = p_dark_count(40, 5e-6, 0.3);
  EXPECT_NEAR(p2 / p1, 2.0, 2.0 * 1e-3);
  EXPECT_GT(p_dark_count(20, 1e-5, 0.3), p1);
}

TEST(DarkCount, Errors) {
  EXPECT_THROW(p_dark_count(20, 5e-6, 0), ParameterError);
  EXPECT_THROW(p_dark_count(-1, 5e-6, 0.3), ParameterError);
}

TEST(Collision, PaperConfiguration) {
  const double rate = collision_rate(1e12, 1e-14, kMass, 1e-3);
  EXPECT_NEAR(rate, 0.5354, 1e-3);
  EXPECT_GT(rate, 2.0 / 4);
  EXPECT_LT(rate, 2.0 * 4);
}

TEST(Collision, ScalingAndLimits) {
  EXPECT_EQ(collision_rate(1e12, 1e-14, kMass, 0.0), 0.0);
  EXPECT_NEAR(collision_rate(1e12, 1e-14, kMass, 4e-3), 2 * collision_rate(1e12, 1e-14, kMass, 1e-3), 1e-14);
  const double base = collision_rate(1e12, 1e-14, kMass, 1e-3);
  EXPECT_GT(collision_rate(2e12, 1e-14, kMass, 1e-3), base);
  EXPECT_GT(collision_rate(1e12, 2e-14, kMass, 1e-3), base);
  EXPECT_GT(collision_rate(1e12, 1e-14, kMass, 2e-3), base);
  EXPECT_THROW(collision_rate(0, 1e-14, kMass, 1e-3), ParameterError);
}

TEST(Collision, SiAndCgsPathsAgree) {
  for (double n : {1e10, 1e12, 3e13}) {
    const double cgs = collision_rate(n, 1e-14, kMass, 1e-3);
    const double si = collision_rate_si(n * 1e6, 1e-14 * 1e-4, kMass, 1e-3);
    EXPECT_NEAR(si / cgs, 1.0, 1e-10);
  }
}

TEST(FidelityEstimate, Values) {
  EXPECT_NEAR(fidelity_estimate(0.011), 0.978, 1e-12);
  EXPECT_EQ(fidelity_estimate(0.0), 1.0);
  EXPECT_EQ(fidelity_estimate(0.25), 0.5);
  for (double eps = 0.0; eps <= 0.5; eps += 0.01) EXPECT_EQ(fidelity_estimate(eps) + 2 * eps, 1.0);
  EXPECT_THROW(fidelity_estimate(-0.01), ParameterError);
  EXPECT_THROW(fidelity_estimate(0.6), ParameterError);
}

TEST(Presets, EncodeQuotedParameters) {
  auto p43 = preset("paper-43d");
  auto p58 = preset("paper-58d");
  for (const auto& p : {p43, p58}) {
    EXPECT_EQ(p.atoms, 300);
    EXPECT_EQ(p.atoms_in_beam, 300);
    EXPECT_EQ(p.cloud_sigma, 3.0e-6);
    EXPECT_EQ(p.dark_count_rate, 20);
    EXPECT_EQ(p.protocol_time, 5e-6);
    EXPECT_NEAR(p.beam_waist, kPi * p.wavelength, 1e-20);
  }
  EXPECT_EQ(p43.wavelength, 485.766e-9);
  EXPECT_EQ(p58.wavelength, 485.081e-9);
  EXPECT_EQ(p43.blockade_shift, 0.25);
  EXPECT_EQ(p58.blockade_shift, 2.9);
  EXPECT_THROW(preset("paper-99x"), ParameterError);
}

TEST(Report, Paper43d) {
  auto r = budget_report(preset("paper-43d"));
  EXPECT_NEAR(find(r.derived, "p_abs").value, 0.989, 0.002);
  EXPECT_NEAR(find(r.mechanisms, "double_excitation").value, 0.26, 1e-12);
  const double pdc = find(r.mechanisms, "dark_count").value;
  EXPECT_GT(pdc, 5e-4 / 3);
  EXPECT_LT(pdc, 5e-4 * 3);
  const double col = find(r.derived, "collision_rate").value;
  EXPECT_GT(col, 2.0 / 4);
  EXPECT_LT(col, 2.0 * 4);
  EXPECT_EQ(find(r.derived, "collision_rate").unit, "Hz");
  EXPECT_EQ(find(r.constants, "rydberg_decay_rate").value, 1e3);
  EXPECT_EQ(find(r.constants, "hom_coincidence_rate").value, 1500);
}

TEST(Report, Paper58dDominatedByMissedAbsorption) {
  auto p = preset("paper-58d");
  EXPECT_NEAR(p.coupling, 0.0057, 1e-4);
  auto r = budget_report(p);
  EXPECT_NEAR(find(r.mechanisms, "double_excitation").value, 0.57e-3, 1e-15);
  EXPECT_EQ(r.dominant_error, "no_absorption");
  EXPECT_NEAR(r.fidelity, 1 - 2 * (1 - find(r.derived, "p_abs").value), 1e-15);
}

TEST(Report, ErrorFreeLimit) {
  auto p = preset("paper-58d");
  p.atoms_in_beam = 1e6;
  p.dark_count_rate = 0;
  auto r = budget_report(p);
  EXPECT_EQ(find(r.derived, "p_abs").value, 1.0);
  EXPECT_EQ(find(r.mechanisms, "dark_count").value, 0.0);
  EXPECT_EQ(r.fidelity, 1.0);
}

TEST(Report, InvalidParametersPropagate) {
  auto p = preset("paper-43d");
  p.temperature = -1;
  EXPECT_THROW(budget_report(p), ParameterError);
}

TEST(Report, TextListsEveryInputFieldOnce) {
  const std::string text = to_text(budget_report(preset("paper-43d")));
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string key;
    words >> key;
    if (key.rfind("input.", 0) == 0) ++seen[key.substr(6)];
  }
  ASSERT_EQ(seen.size(), budget_fields().size());
  for (const auto& f : budget_fields()) EXPECT_EQ(seen[f.name], 1) << f.name;
}

TEST(Report, JsonRoundTrip) {
  auto r = budget_report(preset("paper-58d"));
  const auto j = nlohmann::json::parse(to_json(r).dump());
  EXPECT_EQ(j.at("schema_version").get<int>(), kReportSchemaVersion);
  EXPECT_EQ(j.at("dominant_error").get<std::string>(), r.dominant_error);
  EXPECT_DOUBLE_EQ(j.at("fidelity_estimate").get<double>(), r.fidelity);
  for (const auto& f : budget_fields()) {
    EXPECT_DOUBLE_EQ(j.at("inputs").at(f.name).at("value").get<double>(), r.params.*f.member) << f.name;
  }
  EXPECT_EQ(to_json(r).dump(), to_json(budget_report(preset("paper-58d"))).dump());
}

TEST(Report, MonotoneOverGrids) {
  auto base = preset("paper-43d");
  double last = -1;
  for (double rate : {0.0, 10.0, 20.0, 100.0}) {
    auto p = base;
    p.dark_count_rate = rate;
    const double v = find(budget_report(p).mechanisms, "dark_count").value;
    EXPECT_GT(v, last);
    last = v;
  }
  last = -1;
  for (double t : {1e-6, 5e-6, 2e-5}) {
    auto p = base;
    p.protocol_time = t;
    const double v = find(budget_report(p).mechanisms, "dark_count").value;
    EXPECT_GT(v, last);
    last = v;
  }
}
