#include "blockade/optics.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "blockade/errors.hpp"

namespace blockade::optics {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Complex ipow(Complex base, int exponent) {
  Complex out{1.0, 0.0};
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

}  // namespace

// -------------------------------------------------------------- detector

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw ParameterError("detector efficiency must lie in [0, 1]");
  }
  if (!(dark_count_rate >= 0.0) || !std::isfinite(dark_count_rate)) {
    throw ParameterError("dark count rate must be non-negative");
  }
  if (!(gate_time > 0.0) || !std::isfinite(gate_time)) {
    throw ParameterError("gate time must be positive");
  }
}

double DetectorModel::dark_click_probability() const {
  return -std::expm1(-dark_count_rate * gate_time);
}

double DetectorModel::click_probability(int photons) const {
  const double miss = std::pow(1.0 - efficiency, photons);
  return 1.0 - miss * (1.0 - dark_click_probability());
}

double DetectorModel::count_probability(int count, int photons) const {
  const double dark = dark_click_probability();
  auto loss = [&](int k) {
    if (k < 0 || k > photons) return 0.0;
    return binomial(photons, k) * std::pow(efficiency, k) * std::pow(1.0 - efficiency, photons - k);
  };
  return (1.0 - dark) * loss(count) + dark * loss(count - 1);
}

int HeraldPattern::total_clicks() const {
  int total = 0;
  for (auto c : counts) total += c > 0 ? 1 : 0;
  return total;
}

std::string HeraldPattern::to_string() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < counts.size(); ++k) out << (k ? "," : "") << int(counts[k]);
  return out.str();
}

// -------------------------------------------------------- beam splitters

ModeUnitary beam_splitter_matrix() {
  const double r = std::numbers::sqrt2 / 2.0;
  return {{{Complex{0.0, r}, Complex{r, 0.0}}, {Complex{r, 0.0}, Complex{0.0, r}}}};
}

ModeUnitary adjoint(const ModeUnitary& u) {
  ModeUnitary out{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out[r][c] = std::conj(u[c][r]);
  }
  return out;
}

LabelMap mode_unitary_map(const Layout& layout, std::size_t first, std::size_t second,
                          const ModeUnitary& u) {
  require_mode(layout, first, "beam_splitter");
  require_mode(layout, second, "beam_splitter");
  if (first == second) throw ParameterError("beam_splitter: modes must be distinct");
  const int cut_first = layout[first].cutoff();
  const int cut_second = layout[second].cutoff();

  return [=](const Label& in, SparseColumn& out) {
    const int n1 = in[first];
    const int n2 = in[second];
    const int total = n1 + n2;
    std::vector<Complex> amp(total + 1);  // indexed by occupation of `first`
    for (int k = 0; k <= n1; ++k) {
      const Complex a = binomial(n1, k) * ipow(u[0][0], k) * ipow(u[1][0], n1 - k);
      for (int l = 0; l <= n2; ++l) {
        const Complex b = binomial(n2, l) * ipow(u[0][1], l) * ipow(u[1][1], n2 - l);
        amp[k + l] += a * b;
      }
    }
    const double norm_in = std::sqrt(factorial(n1) * factorial(n2));
    for (int p = 0; p <= total; ++p) {
      const int q = total - p;
      const Complex c = amp[p] * std::sqrt(factorial(p) * factorial(q)) / norm_in;
      if (std::abs(c) <= kPruneTol) continue;
      if (p > cut_first || q > cut_second) {
        throw CutoffOverflow("beam_splitter: output occupation (" + std::to_string(p) + "," +
                             std::to_string(q) + ") exceeds mode cutoff");
      }
      Label image = in;
      image[first] = static_cast<std::uint8_t>(p);
      image[second] = static_cast<std::uint8_t>(q);
      out.emplace_back(std::move(image), c);
    }
  };
}

HybridState apply_mode_unitary(const HybridState& s, std::size_t first, std::size_t second,
                               const ModeUnitary& u) {
  return s.apply(mode_unitary_map(s.layout(), first, second, u));
}

HybridState beam_splitter(const HybridState& s, std::size_t mode_i, std::size_t mode_j) {
  return apply_mode_unitary(s, mode_i, mode_j, beam_splitter_matrix());
}

HybridState beam_splitter_inverse(const HybridState& s, std::size_t mode_i, std::size_t mode_j) {
  return apply_mode_unitary(s, mode_i, mode_j, adjoint(beam_splitter_matrix()));
}

HybridState phase_shift(const HybridState& s, std::size_t mode, double theta) {
  require_mode(s.layout(), mode, "phase_shift");
  return s.apply([=](const Label& in, SparseColumn& out) {
    out.emplace_back(in, std::polar(1.0, theta * in[mode]));
  });
}

// -------------------------------------------------------------- detection

DetectionSample detect(const HybridState& s, std::size_t mode, const DetectorModel& det, Rng& rng) {
  require_mode(s.layout(), mode, "detect");
  det.validate();

  std::vector<double> weight(s.layout()[mode].dim, 0.0);
  double total = 0.0;
  for (const auto& [label, amp] : s.amplitudes()) {
    weight[label[mode]] += std::norm(amp);
    total += std::norm(amp);
  }
  if (total <= 0.0) throw PreconditionError("detect: zero state");

  int photons = 0;
  double u = uniform01(rng) * total;
  for (int n = 0; n < static_cast<int>(weight.size()); ++n) {
    if (weight[n] <= 0.0) continue;
    photons = n;
    if (u < weight[n]) break;
    u -= weight[n];
  }

  int detected = 0;
  for (int k = 0; k < photons; ++k) detected += bernoulli(rng, det.efficiency) ? 1 : 0;
  const bool dark = bernoulli(rng, det.dark_click_probability());
  const int count = detected + (dark ? 1 : 0);

  std::map<Label, Complex> kept;
  for (const auto& [label, amp] : s.amplitudes()) {
    if (label[mode] != photons) continue;
    Label reset = label;
    reset[mode] = 0;
    kept.emplace(std::move(reset), amp);
  }

  DetectionSample sample;
  sample.pattern.number_resolving = det.number_resolving;
  sample.pattern.counts = {static_cast<std::uint8_t>(det.number_resolving ? count : (count > 0))};
  sample.post_state = HybridState(s.layout(), std::move(kept)).normalized();
  return sample;
}

std::map<HeraldPattern, PatternBranch> detect_all_probabilities(
    const DensityOperator& rho, const std::vector<std::size_t>& modes, const DetectorModel& det) {
  det.validate();
  std::set<std::size_t> seen;
  for (std::size_t m : modes) {
    require_mode(rho.layout(), m, "detect_all_probabilities");
    if (!seen.insert(m).second) throw ParameterError("detect_all_probabilities: duplicate mode");
  }

  // Outcome alphabet per detector.
  std::vector<int> outcomes;
  for (std::size_t m : modes) {
    outcomes.push_back(det.number_resolving ? rho.layout()[m].cutoff() + 2 : 2);
  }

  std::vector<HeraldPattern> patterns;
  {
    std::vector<std::uint8_t> counts(modes.size(), 0);
    while (true) {
      patterns.push_back(HeraldPattern{counts, det.number_resolving});
      std::size_t k = 0;
      for (; k < counts.size(); ++k) {
        if (++counts[k] < outcomes[k]) break;
        counts[k] = 0;
      }
      if (k == counts.size()) break;
    }
  }

  auto outcome_weight = [&](int outcome, int photons) {
    if (det.number_resolving) return det.count_probability(outcome, photons);
    const double click = det.click_probability(photons);
    return outcome ? click : 1.0 - click;
  };

  std::vector<std::map<DensityOperator::Key, Complex>> accumulated(patterns.size());
  for (const auto& [key, value] : rho.entries()) {
    bool diagonal = true;
    for (std::size_t m : modes) diagonal = diagonal && key.first[m] == key.second[m];
    if (!diagonal) continue;  // coherences between photon numbers do not survive detection

    DensityOperator::Key reset = key;
    for (std::size_t m : modes) reset.first[m] = reset.second[m] = 0;

    for (std::size_t p = 0; p < patterns.size(); ++p) {
      double w = 1.0;
      for (std::size_t k = 0; k < modes.size() && w != 0.0; ++k) {
        w *= outcome_weight(patterns[p].counts[k], key.first[modes[k]]);
      }
      if (w != 0.0) accumulated[p][reset] += w * value;
    }
  }

  std::map<HeraldPattern, PatternBranch> result;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    DensityOperator branch(rho.layout(), std::move(accumulated[p]));
    PatternBranch entry;
    entry.probability = branch.trace();
    if (entry.probability > kPruneTol) entry.post_state = branch.normalized();
    else entry.probability = std::max(entry.probability, 0.0);
    result.emplace(patterns[p], std::move(entry));
  }
  return result;
}

std::map<HeraldPattern, PatternBranch> detect_all_probabilities(
    const HybridState& s, const std::vector<std::size_t>& modes, const DetectorModel& det) {
  return detect_all_probabilities(DensityOperator::pure(s), modes, det);
}

}  // namespace blockade::optics
