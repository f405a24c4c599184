#include "blockade/budget.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "blockade/errors.hpp"

namespace blockade::budget {

namespace {

constexpr double kCm3ToM3 = 1e6;   // cm^-3 -> m^-3
constexpr double kCm2ToM2 = 1e-4;  // cm^2 -> m^2

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(what) + " must be positive");
  }
}

void require_non_negative(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(what) + " must be non-negative");
  }
}

}  // namespace

const std::vector<FieldInfo>& budget_fields() {
  static const std::vector<FieldInfo> fields = {
      {"atoms_in_beam", "1", &BudgetParams::atoms_in_beam},
      {"wavelength", "m", &BudgetParams::wavelength},
      {"beam_waist", "m", &BudgetParams::beam_waist},
      {"atoms", "1", &BudgetParams::atoms},
      {"coupling", "MHz", &BudgetParams::coupling},
      {"blockade_shift", "MHz", &BudgetParams::blockade_shift},
      {"dark_count_rate", "Hz", &BudgetParams::dark_count_rate},
      {"protocol_time", "s", &BudgetParams::protocol_time},
      {"success_probability", "1", &BudgetParams::success_probability},
      {"number_density", "cm^-3", &BudgetParams::number_density},
      {"collision_cross_section", "cm^2", &BudgetParams::collision_cross_section},
      {"atomic_mass", "kg", &BudgetParams::atomic_mass},
      {"boltzmann", "J/K", &BudgetParams::boltzmann},
      {"temperature", "K", &BudgetParams::temperature},
      {"cloud_sigma", "m", &BudgetParams::cloud_sigma},
  };
  return fields;
}

void BudgetParams::validate() const {
  require_non_negative(atoms_in_beam, "atoms_in_beam");
  require_positive(wavelength, "wavelength");
  require_positive(beam_waist, "beam_waist");
  if (!(atoms >= 2.0)) throw ParameterError("atoms must be at least 2");
  require_positive(coupling, "coupling");
  require_positive(blockade_shift, "blockade_shift");
  require_non_negative(dark_count_rate, "dark_count_rate");
  require_positive(protocol_time, "protocol_time");
  if (!(success_probability > 0.0 && success_probability <= 1.0)) {
    throw ParameterError("success_probability must lie in (0, 1]");
  }
  require_positive(number_density, "number_density");
  require_positive(collision_cross_section, "collision_cross_section");
  require_positive(atomic_mass, "atomic_mass");
  require_positive(boltzmann, "boltzmann");
  require_positive(temperature, "temperature");
  require_positive(cloud_sigma, "cloud_sigma");
}

double p_absorption(double atoms_in_beam, double wavelength, double beam_waist) {
  require_non_negative(atoms_in_beam, "atoms_in_beam");
  require_positive(wavelength, "wavelength");
  require_positive(beam_waist, "beam_waist");
  const double cross_section = 3.0 * wavelength * wavelength / (2.0 * std::numbers::pi);
  const double area = std::numbers::pi * beam_waist * beam_waist;
  return -std::expm1(-atoms_in_beam * cross_section / area);
}

double p_double_excitation(double atoms, double coupling, double blockade_shift) {
  if (!(atoms >= 2.0)) throw ParameterError("p_double_excitation: N must be at least 2");
  require_positive(coupling, "coupling");
  require_positive(blockade_shift, "blockade_shift");
  const double collective = std::sqrt(atoms) * coupling;
  return (atoms - 1.0) * collective * collective / (2.0 * atoms * blockade_shift * blockade_shift);
}

double coupling_for_double_excitation(double atoms, double blockade_shift, double target) {
  if (!(atoms >= 2.0)) throw ParameterError("coupling_for_double_excitation: N must be at least 2");
  require_positive(blockade_shift, "blockade_shift");
  require_positive(target, "target probability");
  return blockade_shift * std::sqrt(2.0 * target / (atoms - 1.0));
}

double p_dark_count(double dark_count_rate, double protocol_time, double success_probability) {
  require_non_negative(dark_count_rate, "dark_count_rate");
  require_positive(protocol_time, "protocol_time");
  if (!(success_probability > 0.0 && success_probability <= 1.0)) {
    throw ParameterError("p_dark_count: p_success must lie in (0, 1]");
  }
  return -std::expm1(-dark_count_rate * protocol_time / success_probability);
}

double collision_rate_si(double number_density_m3, double cross_section_m2, double mass_kg,
                         double temperature, double boltzmann) {
  require_positive(number_density_m3, "number_density");
  require_positive(cross_section_m2, "collision_cross_section");
  require_positive(mass_kg, "atomic_mass");
  require_non_negative(temperature, "temperature");
  require_positive(boltzmann, "boltzmann");
  return number_density_m3 * cross_section_m2 * std::sqrt(3.0 * boltzmann * temperature / mass_kg);
}

double collision_rate(double number_density_cm3, double cross_section_cm2, double mass_kg,
                      double temperature, double boltzmann) {
  return collision_rate_si(number_density_cm3 * kCm3ToM3, cross_section_cm2 * kCm2ToM2, mass_kg,
                           temperature, boltzmann);
}

double fidelity_estimate(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw ParameterError("fidelity_estimate: epsilon outside [0, 0.5]");
  return 1.0 - 2.0 * epsilon;
}

std::vector<std::string> preset_names() { return {"paper-43d", "paper-58d"}; }

BudgetParams preset(const std::string& name) {
  BudgetParams p;
  double quoted_double_excitation = 0.0;
  if (name == "paper-43d") {
    p.wavelength = 485.766e-9;
    p.blockade_shift = 0.25;
    quoted_double_excitation = 0.26;
  } else if (name == "paper-58d") {
    p.wavelength = 485.081e-9;
    p.blockade_shift = 2.9;
    quoted_double_excitation = 0.57e-3;
  } else {
    throw ParameterError("unknown preset '" + name + "'");
  }
  p.atoms_in_beam = 300.0;
  p.atoms = 300.0;
  p.beam_waist = std::numbers::pi * p.wavelength;
  p.coupling = coupling_for_double_excitation(p.atoms, p.blockade_shift, quoted_double_excitation);
  p.dark_count_rate = 20.0;
  p.protocol_time = 5e-6;
  p.success_probability = 0.3;  // p = eta for the single-click entangler
  p.number_density = 1e12;
  p.collision_cross_section = 1e-14;
  p.atomic_mass = 87.0 * constants::kAtomicMassUnit;
  p.temperature = 1e-3;
  p.cloud_sigma = 3.0e-6;
  return p;
}

BudgetReport budget_report(const BudgetParams& params) {
  params.validate();
  BudgetReport report;
  report.params = params;

  const double cross_section = 3.0 * params.wavelength * params.wavelength / (2.0 * std::numbers::pi);
  const double area = std::numbers::pi * params.beam_waist * params.beam_waist;
  const double p_abs = p_absorption(params.atoms_in_beam, params.wavelength, params.beam_waist);
  const double p_double = p_double_excitation(params.atoms, params.coupling, params.blockade_shift);
  const double p_dark = p_dark_count(params.dark_count_rate, params.protocol_time,
                                     params.success_probability);
  const double collisions = collision_rate(params.number_density, params.collision_cross_section,
                                           params.atomic_mass, params.temperature, params.boltzmann);
  const double thermal_speed = std::sqrt(3.0 * params.boltzmann * params.temperature / params.atomic_mass);

  report.derived = {
      {"absorption_cross_section", cross_section, "m^2"},
      {"beam_area", area, "m^2"},
      {"optical_depth", params.atoms_in_beam * cross_section / area, "1"},
      {"p_abs", p_abs, "1"},
      {"collective_coupling", std::sqrt(params.atoms) * params.coupling, "MHz"},
      {"thermal_speed", thermal_speed, "m/s"},
      {"collision_rate", collisions, "Hz"},
  };
  report.mechanisms = {
      {"no_absorption", 1.0 - p_abs, "1"},
      {"double_excitation", p_double, "1"},
      {"dark_count", p_dark, "1"},
      {"collision", -std::expm1(-collisions * params.protocol_time), "1"},
  };
  report.constants = {
      {"rydberg_decay_rate", constants::kRydbergDecayRate, "Hz"},
      {"hom_coincidence_rate", constants::kHomCoincidenceRate, "1/s"},
  };
  const auto dominant = std::max_element(
      report.mechanisms.begin(), report.mechanisms.end(),
      [](const Quantity& a, const Quantity& b) { return a.value < b.value; });
  report.dominant_error = dominant->name;
  report.fidelity = fidelity_estimate(std::min(1.0 - p_abs, 0.5));
  return report;
}

nlohmann::json to_json(const BudgetReport& report) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& field : budget_fields()) {
    inputs[field.name] = {{"value", report.params.*field.member}, {"unit", field.unit}};
  }
  auto list = [](const std::vector<Quantity>& quantities) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& q : quantities) out.push_back({{"name", q.name}, {"value", q.value}, {"unit", q.unit}});
    return out;
  };
  return {
      {"schema_version", kReportSchemaVersion},
      {"inputs", inputs},
      {"derived", list(report.derived)},
      {"mechanisms", list(report.mechanisms)},
      {"constants", list(report.constants)},
      {"dominant_error", report.dominant_error},
      {"fidelity_estimate", report.fidelity},
  };
}

std::string to_text(const BudgetReport& report) {
  std::string out;
  char line[160];
  auto emit = [&](const std::string& key, double value, const std::string& unit) {
    std::snprintf(line, sizeof line, "%-36s %-22.10g %s\n", key.c_str(), value, unit.c_str());
    out += line;
  };
  for (const auto& field : budget_fields()) {
    emit(std::string("input.") + field.name, report.params.*field.member, field.unit);
  }
  for (const auto& q : report.derived) emit("derived." + q.name, q.value, q.unit);
  for (const auto& q : report.mechanisms) emit("mechanism." + q.name, q.value, q.unit);
  for (const auto& q : report.constants) emit("constant." + q.name, q.value, q.unit);
  std::snprintf(line, sizeof line, "%-36s %s\n", "dominant_error", report.dominant_error.c_str());
  out += line;
  emit("fidelity_estimate", report.fidelity, "1");
  return out;
}

}  // namespace blockade::budget
