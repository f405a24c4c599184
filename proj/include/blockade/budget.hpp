#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace blockade::budget {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
// Literature rates quoted as fixed inputs; they are not derived here.
inline constexpr double kRydbergDecayRate = 1e3;          // Hz, spontaneous + black-body
inline constexpr double kHomCoincidenceRate = 1500.0;     // counts/s
}  // namespace constants

// Experimental inputs of the error budget. Units are fixed per field and are
// part of the report format.
struct BudgetParams {
  double atoms_in_beam = 300.0;             // N_i
  double wavelength = 485.766e-9;           // m
  double beam_waist = 0.0;                  // m
  double atoms = 300.0;                     // N
  double coupling = 0.0;                    // g0, MHz
  double blockade_shift = 0.25;             // B, MHz
  double dark_count_rate = 20.0;            // Hz
  double protocol_time = 5e-6;              // s
  double success_probability = 0.3;         // p_success
  double number_density = 1e12;             // cm^-3
  double collision_cross_section = 1e-14;   // cm^2
  double atomic_mass = 87.0 * constants::kAtomicMassUnit;  // kg
  double boltzmann = constants::kBoltzmann; // J/K
  double temperature = 1e-3;                // K
  double cloud_sigma = 3.0e-6;              // m (metadata)

  void validate() const;
};

struct FieldInfo {
  const char* name;
  const char* unit;
  double BudgetParams::*member;
};

// Every BudgetParams field, in report order.
const std::vector<FieldInfo>& budget_fields();

// 1 - exp(-N_i sigma0 / A) with sigma0 = 3 lambda^2 / (2 pi), A = pi w0^2.
double p_absorption(double atoms_in_beam, double wavelength, double beam_waist);

// (N - 1) g_N^2 / (2 N B^2) with g_N = sqrt(N) g0, i.e. (N - 1) g0^2 / (2 B^2).
double p_double_excitation(double atoms, double coupling, double blockade_shift);

// g0 that makes p_double_excitation(atoms, g0, B) equal `target`.
double coupling_for_double_excitation(double atoms, double blockade_shift, double target);

// 1 - exp(-gamma_dc t / p_success).
double p_dark_count(double dark_count_rate, double protocol_time, double success_probability);

// n sigma_col sqrt(3 k_B T / M), density in cm^-3 and cross section in cm^2.
double collision_rate(double number_density_cm3, double cross_section_cm2, double mass_kg,
                      double temperature, double boltzmann = constants::kBoltzmann);
// Same rate with SI density (m^-3) and cross section (m^2).
double collision_rate_si(double number_density_m3, double cross_section_m2, double mass_kg,
                         double temperature, double boltzmann = constants::kBoltzmann);

// First-order heralded-state fidelity 1 - 2 epsilon, epsilon in [0, 0.5].
double fidelity_estimate(double epsilon);

// Named parameter sets for the two Rydberg levels (43D5/2 and 58D3/2).
// The coupling g0 is back-solved from the double-excitation probability
// quoted for each level, since it is not given directly.
BudgetParams preset(const std::string& name);
std::vector<std::string> preset_names();

struct Quantity {
  std::string name;
  double value = 0.0;
  std::string unit;
};

struct BudgetReport {
  BudgetParams params;
  std::vector<Quantity> derived;
  std::vector<Quantity> mechanisms;   // error probabilities per protocol run
  std::vector<Quantity> constants;
  std::string dominant_error;
  double fidelity = 0.0;              // fidelity_estimate(1 - P_abs)
};

BudgetReport budget_report(const BudgetParams& params);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const BudgetReport& report);
std::string to_text(const BudgetReport& report);

}  // namespace blockade::budget
