#include "blockade/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "blockade/errors.hpp"

namespace blockade {

namespace {

void validate_label(const Layout& layout, const Label& label) {
  if (label.size() != layout.size()) {
    throw DimensionMismatch("label length " + std::to_string(label.size()) +
                            " does not match layout of " + std::to_string(layout.size()));
  }
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (label[k] >= layout[k].dim) {
      throw CutoffOverflow("label value " + std::to_string(label[k]) + " exceeds dimension of '" +
                           layout[k].name + "'");
    }
  }
}

void require_same_layout(const Layout& a, const Layout& b, const char* op) {
  if (a != b) throw DimensionMismatch(std::string(op) + ": subsystem layouts differ");
}

Label concat(const Label& a, const Label& b) {
  Label out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

Subsystem Subsystem::ensemble(std::string name) {
  return Subsystem{SubsystemKind::kEnsemble, 4, std::move(name)};
}

Subsystem Subsystem::mode(std::string name, int cutoff) {
  if (cutoff < 0 || cutoff > 250) throw ParameterError("mode cutoff out of range");
  return Subsystem{SubsystemKind::kOpticalMode, static_cast<std::uint8_t>(cutoff + 1),
                   std::move(name)};
}

void require_mode(const Layout& layout, std::size_t index, const char* op) {
  if (index >= layout.size()) {
    throw std::out_of_range(std::string(op) + ": subsystem index out of range");
  }
  if (!layout[index].is_mode()) {
    throw ParameterError(std::string(op) + ": subsystem '" + layout[index].name +
                         "' is not an optical mode");
  }
}

void require_ensemble(const Layout& layout, std::size_t index, const char* op) {
  if (index >= layout.size()) {
    throw std::out_of_range(std::string(op) + ": subsystem index out of range");
  }
  if (!layout[index].is_ensemble()) {
    throw ParameterError(std::string(op) + ": subsystem '" + layout[index].name +
                         "' is not an ensemble");
  }
}

// ---------------------------------------------------------------- HybridState

HybridState::HybridState(Layout layout, std::map<Label, Complex> amplitudes)
    : layout_(std::move(layout)) {
  for (auto& [label, amp] : amplitudes) {
    validate_label(layout_, label);
    if (amp != Complex{0.0, 0.0}) amplitudes_.emplace(label, amp);
  }
}

HybridState HybridState::basis(Layout layout, Label label) {
  std::map<Label, Complex> amps;
  amps.emplace(std::move(label), Complex{1.0, 0.0});
  return HybridState(std::move(layout), std::move(amps));
}

Complex HybridState::amplitude(const Label& label) const {
  auto it = amplitudes_.find(label);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

double HybridState::norm_squared() const {
  double total = 0.0;
  for (const auto& [label, amp] : amplitudes_) total += std::norm(amp);
  return total;
}

HybridState HybridState::normalized() const {
  const double n2 = norm_squared();
  if (n2 <= 0.0) throw PreconditionError("cannot normalize a zero vector");
  return scaled(1.0 / std::sqrt(n2));
}

HybridState HybridState::scaled(Complex factor) const {
  std::map<Label, Complex> out;
  for (const auto& [label, amp] : amplitudes_) out.emplace(label, amp * factor);
  return HybridState(layout_, std::move(out));
}

HybridState HybridState::apply(const LabelMap& op) const {
  std::map<Label, Complex> out;
  SparseColumn column;
  for (const auto& [label, amp] : amplitudes_) {
    column.clear();
    op(label, column);
    for (const auto& [image, coeff] : column) out[image] += amp * coeff;
  }
  std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) <= kPruneTol; });
  return HybridState(layout_, std::move(out));
}

// ------------------------------------------------------------ DensityOperator

DensityOperator::DensityOperator(Layout layout, std::map<Key, Complex> entries)
    : layout_(std::move(layout)) {
  for (auto& [key, value] : entries) {
    validate_label(layout_, key.first);
    validate_label(layout_, key.second);
    if (value != Complex{0.0, 0.0}) entries_.emplace(key, value);
  }
}

DensityOperator DensityOperator::pure(const HybridState& psi) {
  std::map<Key, Complex> entries;
  for (const auto& [row, a] : psi.amplitudes()) {
    for (const auto& [col, b] : psi.amplitudes()) entries.emplace(Key{row, col}, a * std::conj(b));
  }
  return DensityOperator(psi.layout(), std::move(entries));
}

Complex DensityOperator::element(const Label& row, const Label& col) const {
  auto it = entries_.find(Key{row, col});
  return it == entries_.end() ? Complex{} : it->second;
}

double DensityOperator::trace() const {
  double total = 0.0;
  for (const auto& [key, value] : entries_) {
    if (key.first == key.second) total += value.real();
  }
  return total;
}

DensityOperator DensityOperator::normalized() const {
  const double tr = trace();
  if (tr <= 0.0) throw PreconditionError("cannot normalize an operator with zero trace");
  std::map<Key, Complex> out;
  for (const auto& [key, value] : entries_) out.emplace(key, value / tr);
  return DensityOperator(layout_, std::move(out));
}

DensityOperator DensityOperator::apply(const LabelMap& op) const {
  std::map<Label, SparseColumn> cache;
  auto image = [&](const Label& label) -> const SparseColumn& {
    auto it = cache.find(label);
    if (it != cache.end()) return it->second;
    SparseColumn column;
    op(label, column);
    return cache.emplace(label, std::move(column)).first->second;
  };

  std::map<Key, Complex> out;
  for (const auto& [key, value] : entries_) {
    const SparseColumn& rows = image(key.first);
    const SparseColumn& cols = image(key.second);
    for (const auto& [r, cr] : rows) {
      for (const auto& [c, cc] : cols) out[Key{r, c}] += value * cr * std::conj(cc);
    }
  }
  std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) <= kPruneTol; });
  return DensityOperator(layout_, std::move(out));
}

void DensityOperator::accumulate(const DensityOperator& other, double weight) {
  if (layout_.empty() && entries_.empty()) layout_ = other.layout_;
  require_same_layout(layout_, other.layout_, "accumulate");
  for (const auto& [key, value] : other.entries_) entries_[key] += weight * value;
  std::erase_if(entries_, [](const auto& kv) { return kv.second == Complex{0.0, 0.0}; });
}

bool DensityOperator::is_hermitian(double tol) const {
  for (const auto& [key, value] : entries_) {
    if (std::abs(value - std::conj(element(key.second, key.first))) > tol) return false;
  }
  return true;
}

double DensityOperator::min_eigenvalue() const {
  std::map<Label, Eigen::Index> index;
  for (const auto& [key, value] : entries_) {
    index.emplace(key.first, 0);
    index.emplace(key.second, 0);
  }
  Eigen::Index next = 0;
  for (auto& [label, idx] : index) idx = next++;

  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(next, next);
  for (const auto& [key, value] : entries_) dense(index[key.first], index[key.second]) = value;
  // Symmetrize so round-off asymmetry does not leak into the solver.
  dense = 0.5 * (dense + dense.adjoint()).eval();

  double full_dim = 1.0;
  for (const auto& sub : layout_) full_dim *= sub.dim;

  double smallest = next == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (static_cast<double>(next) < full_dim) smallest = std::min(smallest, 0.0);
  return smallest;
}

// ------------------------------------------------------------ free functions

HybridState tensor(const HybridState& a, const HybridState& b) {
  Layout layout = a.layout();
  layout.insert(layout.end(), b.layout().begin(), b.layout().end());
  std::map<Label, Complex> amps;
  for (const auto& [la, va] : a.amplitudes()) {
    for (const auto& [lb, vb] : b.amplitudes()) amps.emplace(concat(la, lb), va * vb);
  }
  return HybridState(std::move(layout), std::move(amps));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Layout layout = a.layout();
  layout.insert(layout.end(), b.layout().begin(), b.layout().end());
  std::map<DensityOperator::Key, Complex> entries;
  for (const auto& [ka, va] : a.entries()) {
    for (const auto& [kb, vb] : b.entries()) {
      entries.emplace(DensityOperator::Key{concat(ka.first, kb.first), concat(ka.second, kb.second)},
                      va * vb);
    }
  }
  return DensityOperator(std::move(layout), std::move(entries));
}

Complex inner_product(const HybridState& bra, const HybridState& ket) {
  require_same_layout(bra.layout(), ket.layout(), "inner_product");
  Complex total{};
  for (const auto& [label, amp] : bra.amplitudes()) total += std::conj(amp) * ket.amplitude(label);
  return total;
}

namespace {

void check_projector(const Layout& layout, std::size_t subsystem,
                     const std::set<std::uint8_t>& labels) {
  if (subsystem >= layout.size()) {
    throw std::out_of_range("measure_projective: subsystem index out of range");
  }
  if (labels.empty()) throw ParameterError("measure_projective: empty projector set");
  if (*labels.rbegin() >= layout[subsystem].dim) {
    throw ParameterError("measure_projective: projector label outside subsystem basis");
  }
}

}  // namespace

ProjectiveOutcome measure_projective(const HybridState& s, std::size_t subsystem,
                                     const std::set<std::uint8_t>& labels) {
  check_projector(s.layout(), subsystem, labels);
  std::map<Label, Complex> kept;
  double probability = 0.0;
  for (const auto& [label, amp] : s.amplitudes()) {
    if (labels.contains(label[subsystem])) {
      kept.emplace(label, amp);
      probability += std::norm(amp);
    }
  }
  ProjectiveOutcome outcome;
  outcome.probability = probability;
  if (probability > 0.0) {
    outcome.post_state = HybridState(s.layout(), std::move(kept)).normalized();
  }
  return outcome;
}

MixedProjectiveOutcome measure_projective(const DensityOperator& rho, std::size_t subsystem,
                                          const std::set<std::uint8_t>& labels) {
  check_projector(rho.layout(), subsystem, labels);
  std::map<DensityOperator::Key, Complex> kept;
  for (const auto& [key, value] : rho.entries()) {
    if (labels.contains(key.first[subsystem]) && labels.contains(key.second[subsystem])) {
      kept.emplace(key, value);
    }
  }
  DensityOperator projected(rho.layout(), std::move(kept));
  MixedProjectiveOutcome outcome;
  outcome.probability = projected.trace();
  if (outcome.probability > 0.0) outcome.post_state = projected.normalized();
  return outcome;
}

double fidelity(const DensityOperator& rho, const HybridState& psi) {
  require_same_layout(rho.layout(), psi.layout(), "fidelity");
  Complex total{};
  for (const auto& [key, value] : rho.entries()) {
    total += std::conj(psi.amplitude(key.first)) * value * psi.amplitude(key.second);
  }
  return std::clamp(total.real(), 0.0, 1.0);
}

DensityOperator partial_trace(const DensityOperator& rho, const std::set<std::size_t>& keep) {
  if (keep.empty()) throw ParameterError("partial_trace: keep set is empty");
  if (*keep.rbegin() >= rho.num_subsystems()) {
    throw std::out_of_range("partial_trace: subsystem index out of range");
  }
  Layout layout;
  for (std::size_t k : keep) layout.push_back(rho.layout()[k]);

  auto split = [&](const Label& label, Label& kept, Label& traced) {
    kept.clear();
    traced.clear();
    for (std::size_t k = 0; k < label.size(); ++k) {
      (keep.contains(k) ? kept : traced).push_back(label[k]);
    }
  };

  std::map<DensityOperator::Key, Complex> out;
  Label row_kept, row_traced, col_kept, col_traced;
  for (const auto& [key, value] : rho.entries()) {
    split(key.first, row_kept, row_traced);
    split(key.second, col_kept, col_traced);
    if (row_traced == col_traced) out[DensityOperator::Key{row_kept, col_kept}] += value;
  }
  std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) <= kPruneTol; });
  return DensityOperator(std::move(layout), std::move(out));
}

}  // namespace blockade
