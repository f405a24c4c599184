#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace blockade {

using Complex = std::complex<double>;

// One basis label per subsystem, in declaration order.
using Label = std::vector<std::uint8_t>;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
// Amplitudes at or below this magnitude after a linear map are round-off
// residue and are dropped to keep states sparse.
inline constexpr double kPruneTol = 1e-15;

inline constexpr int kDefaultCutoff = 2;

enum class SubsystemKind : std::uint8_t { kEnsemble, kOpticalMode };

struct Subsystem {
  SubsystemKind kind = SubsystemKind::kEnsemble;
  std::uint8_t dim = 4;
  std::string name;

  static Subsystem ensemble(std::string name);
  static Subsystem mode(std::string name, int cutoff = kDefaultCutoff);

  bool is_mode() const { return kind == SubsystemKind::kOpticalMode; }
  bool is_ensemble() const { return kind == SubsystemKind::kEnsemble; }
  int cutoff() const { return dim - 1; }

  bool operator==(const Subsystem&) const = default;
};

using Layout = std::vector<Subsystem>;

// Image of a single basis label under a linear operator.
using SparseColumn = std::vector<std::pair<Label, Complex>>;

// A linear operator given column-by-column: appends the image of `in` to
// `out`. Operators may throw (e.g. CutoffOverflow) for labels they cannot map.
using LabelMap = std::function<void(const Label& in, SparseColumn& out)>;

// Pure state over ensembles and optical modes, stored sparsely.
class HybridState {
 public:
  HybridState() = default;
  HybridState(Layout layout, std::map<Label, Complex> amplitudes);

  static HybridState basis(Layout layout, Label label);

  const Layout& layout() const { return layout_; }
  const std::map<Label, Complex>& amplitudes() const { return amplitudes_; }
  std::size_t num_subsystems() const { return layout_.size(); }

  Complex amplitude(const Label& label) const;
  double norm_squared() const;
  HybridState normalized() const;
  HybridState scaled(Complex factor) const;

  HybridState apply(const LabelMap& op) const;

 private:
  Layout layout_;
  std::map<Label, Complex> amplitudes_;
};

class DensityOperator {
 public:
  using Key = std::pair<Label, Label>;

  DensityOperator() = default;
  DensityOperator(Layout layout, std::map<Key, Complex> entries);

  static DensityOperator pure(const HybridState& psi);

  const Layout& layout() const { return layout_; }
  const std::map<Key, Complex>& entries() const { return entries_; }
  std::size_t num_subsystems() const { return layout_.size(); }

  Complex element(const Label& row, const Label& col) const;
  double trace() const;
  DensityOperator normalized() const;

  // rho -> A rho A^dagger
  DensityOperator apply(const LabelMap& op) const;

  // this += weight * other (layouts must match)
  void accumulate(const DensityOperator& other, double weight = 1.0);

  bool is_hermitian(double tol = kAlgebraTol) const;
  // Smallest eigenvalue; zero-padded when the support is smaller than the
  // full Hilbert space.
  double min_eigenvalue() const;

 private:
  Layout layout_;
  std::map<Key, Complex> entries_;
};

HybridState tensor(const HybridState& a, const HybridState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

Complex inner_product(const HybridState& bra, const HybridState& ket);

struct ProjectiveOutcome {
  double probability = 0.0;
  std::optional<HybridState> post_state;  // empty when probability is zero
};

struct MixedProjectiveOutcome {
  double probability = 0.0;
  std::optional<DensityOperator> post_state;
};

// Projects `subsystem` onto span{|l> : l in labels}.
ProjectiveOutcome measure_projective(const HybridState& s, std::size_t subsystem,
                                     const std::set<std::uint8_t>& labels);
MixedProjectiveOutcome measure_projective(const DensityOperator& rho, std::size_t subsystem,
                                          const std::set<std::uint8_t>& labels);

// <psi| rho |psi>, clamped to [0, 1].
double fidelity(const DensityOperator& rho, const HybridState& psi);

DensityOperator partial_trace(const DensityOperator& rho, const std::set<std::size_t>& keep);

// Validation helpers shared by the physics modules.
void require_mode(const Layout& layout, std::size_t index, const char* op);
void require_ensemble(const Layout& layout, std::size_t index, const char* op);

}  // namespace blockade
