#include "blockade/ensemble.hpp"

#include <cmath>
#include <numbers>

#include "blockade/errors.hpp"

namespace blockade::ensemble {

namespace {

bool is_logical(std::uint8_t level) { return level == kG || level == kS; }

void require_logical(const HybridState& s, std::size_t ensemble, const char* op) {
  require_ensemble(s.layout(), ensemble, op);
  for (const auto& [label, amp] : s.amplitudes()) {
    if (!is_logical(label[ensemble]) && std::abs(amp) > kAlgebraTol) {
      throw PreconditionError(std::string(op) + ": amplitude outside the {g, s} subspace");
    }
  }
}

void require_logical(const DensityOperator& rho, std::size_t ensemble, const char* op) {
  require_ensemble(rho.layout(), ensemble, op);
  for (const auto& [key, value] : rho.entries()) {
    if (key.first == key.second && !is_logical(key.first[ensemble]) &&
        std::abs(value) > kAlgebraTol) {
      throw PreconditionError(std::string(op) + ": population outside the {g, s} subspace");
    }
  }
}

LabelMap logical_map(std::size_t ensemble, const LogicalUnitary& u) {
  return [=](const Label& in, SparseColumn& out) {
    const std::uint8_t level = in[ensemble];
    if (!is_logical(level)) {
      out.emplace_back(in, Complex{1.0, 0.0});
      return;
    }
    const int column = level == kG ? 0 : 1;
    Label to_g = in;
    to_g[ensemble] = kG;
    Label to_s = in;
    to_s[ensemble] = kS;
    if (u[0][column] != Complex{}) out.emplace_back(std::move(to_g), u[0][column]);
    if (u[1][column] != Complex{}) out.emplace_back(std::move(to_s), u[1][column]);
  };
}

LabelMap storage_map(std::size_t ensemble) {
  return [=](const Label& in, SparseColumn& out) {
    Label image = in;
    if (image[ensemble] == kR1) image[ensemble] = kS;
    else if (image[ensemble] == kE) image[ensemble] = kG;
    out.emplace_back(std::move(image), Complex{1.0, 0.0});
  };
}

}  // namespace

const char* level_name(std::uint8_t level) {
  switch (level) {
    case kG: return "g";
    case kE: return "e";
    case kS: return "s";
    case kR1: return "r1";
    default: return "?";
  }
}

void AbsorptionModel::validate() const {
  if (!(p_abs >= 0.0 && p_abs <= 1.0)) throw ParameterError("P_abs must lie in [0, 1]");
}

LogicalUnitary pauli_x() { return {{{Complex{0, 0}, Complex{1, 0}}, {Complex{1, 0}, Complex{0, 0}}}}; }

LogicalUnitary hadamard() {
  const double r = std::numbers::sqrt2 / 2.0;
  return {{{Complex{r, 0}, Complex{r, 0}}, {Complex{r, 0}, Complex{-r, 0}}}};
}

LogicalUnitary phase(double phi) {
  return {{{std::polar(1.0, -phi / 2.0), Complex{}}, {Complex{}, std::polar(1.0, phi / 2.0)}}};
}

HybridState apply_logical(const HybridState& s, std::size_t ensemble, const LogicalUnitary& u) {
  require_logical(s, ensemble, "logical gate");
  return s.apply(logical_map(ensemble, u));
}

DensityOperator apply_logical(const DensityOperator& rho, std::size_t ensemble,
                              const LogicalUnitary& u) {
  require_logical(rho, ensemble, "logical gate");
  return rho.apply(logical_map(ensemble, u));
}

HybridState gate_x(const HybridState& s, std::size_t ensemble) {
  return apply_logical(s, ensemble, pauli_x());
}
HybridState gate_h(const HybridState& s, std::size_t ensemble) {
  return apply_logical(s, ensemble, hadamard());
}
HybridState gate_phase(const HybridState& s, std::size_t ensemble, double phi) {
  return apply_logical(s, ensemble, phase(phi));
}
DensityOperator gate_x(const DensityOperator& rho, std::size_t ensemble) {
  return apply_logical(rho, ensemble, pauli_x());
}
DensityOperator gate_phase(const DensityOperator& rho, std::size_t ensemble, double phi) {
  return apply_logical(rho, ensemble, phase(phi));
}

HybridState blockade_absorb(const HybridState& s, std::size_t ensemble, std::size_t mode,
                            const AbsorptionModel& absorption) {
  require_ensemble(s.layout(), ensemble, "blockade_absorb");
  require_mode(s.layout(), mode, "blockade_absorb");
  absorption.validate();

  for (const auto& [label, amp] : s.amplitudes()) {
    if (label[ensemble] != kE || label[mode] == 0) continue;
    Label partner = label;
    partner[ensemble] = kR1;
    partner[mode] = static_cast<std::uint8_t>(label[mode] - 1);
    if (s.amplitudes().contains(partner)) {
      throw PreconditionError("blockade_absorb: |e,n> and |r1,n-1> components overlap");
    }
  }

  const double absorbed = std::sqrt(absorption.p_abs);
  const double survived = std::sqrt(1.0 - absorption.p_abs);
  return s.apply([=](const Label& in, SparseColumn& out) {
    if (in[ensemble] != kE || in[mode] == 0) {
      out.emplace_back(in, Complex{1.0, 0.0});
      return;
    }
    Label image = in;
    image[ensemble] = kR1;
    image[mode] = static_cast<std::uint8_t>(in[mode] - 1);
    if (absorbed != 0.0) out.emplace_back(std::move(image), Complex{absorbed, 0.0});
    if (survived != 0.0) out.emplace_back(in, Complex{survived, 0.0});
  });
}

HybridState transfer_to_storage(const HybridState& s, std::size_t ensemble) {
  require_ensemble(s.layout(), ensemble, "transfer_to_storage");
  return s.apply(storage_map(ensemble));
}

DensityOperator transfer_to_storage(const DensityOperator& rho, std::size_t ensemble) {
  require_ensemble(rho.layout(), ensemble, "transfer_to_storage");
  return rho.apply(storage_map(ensemble));
}

ReadoutResult readout(const HybridState& s, std::size_t ensemble, Rng& rng) {
  require_logical(s, ensemble, "readout");
  auto bright = measure_projective(s, ensemble, {kS});
  auto dark = measure_projective(s, ensemble, {kG});
  const double p1 = bright.probability / (bright.probability + dark.probability);
  if (bernoulli(rng, p1)) return {1, *bright.post_state};
  return {0, *dark.post_state};
}

}  // namespace blockade::ensemble
