#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace floquet_sep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Coefficients A(θ_t ω), B(θ_t ω) at one time.
struct CoefficientSample {
  Matrix A;
  Matrix B;
  double t = 0.0;

  /// Operator 2-norms a = ‖A‖, b = ‖B‖.
  double a_norm() const;
  double b_norm() const;
};

enum class DriverKind { IidSwitching, MarkovSwitching, Quasiperiodic };

const char* to_string(DriverKind kind);

/// One (A, B) pair of a switching driver.
struct CoefficientState {
  Matrix A;
  Matrix B;
};

/// cos(2π k·x) * cos_coeff + sin(2π k·x) * sin_coeff, where x is the torus
/// phase. A term with k = 0 contributes the constant cos_coeff.
struct FourierTerm {
  std::vector<int> k;
  Matrix cos_coeff;
  Matrix sin_coeff;
};

struct QuasiperiodicTables {
  Vector rotation;
  std::vector<FourierTerm> a_terms;
  std::vector<FourierTerm> b_terms;
};

/// A realization ω of the ergodic base flow together with the coefficient
/// map ω ↦ (A(ω), B(ω)).
///
/// Every evaluation is a pure function of (seed, phase + t). Two-sided iid
/// switching draws the state of cell k from a counter-based hash of
/// (seed, k), so θ_s is a phase change and no history is stored. Markov
/// switching restarts the chain from its stationary law every
/// `kMarkovBlock` cells (hash-anchored) and runs it forward from there.
/// Quasi-periodic drivers rotate a torus phase x(t) = x0(seed) + ρ t.
///
/// Values on a cell boundary belong to the right-hand cell.
///
/// Instances are immutable; copies share the parameter tables.
class Driver {
 public:
  static constexpr std::int64_t kMarkovBlock = 64;

  static Driver iid_switching(std::uint64_t seed,
                              std::vector<CoefficientState> states,
                              double cell_length);
  static Driver markov_switching(std::uint64_t seed,
                                 std::vector<CoefficientState> states,
                                 double cell_length, Matrix transition);
  static Driver quasiperiodic(std::uint64_t seed, int n,
                              QuasiperiodicTables tables);
  /// Single-state iid driver: A(θ_t ω) = A, B(θ_t ω) = B for all t.
  static Driver constant(Matrix A, Matrix B);

  DriverKind kind() const;
  std::uint64_t seed() const;
  double phase() const { return phase_; }
  int dim() const;

  bool piecewise_constant() const;
  double cell_length() const;
  std::size_t state_count() const;
  const CoefficientState& state(std::size_t i) const;
  const QuasiperiodicTables& tables() const;
  const Matrix& transition() const;

  /// θ_s ω.
  Driver shifted(double s) const;
  Driver with_seed(std::uint64_t seed) const;

  CoefficientSample sample(double t) const;

  /// Index of the switching cell containing t (phase included).
  std::int64_t cell_index(double t) const;
  /// State drawn for the cell containing t. Switching drivers only.
  std::size_t state_index(double t) const;
  /// State drawn for absolute cell k. Switching drivers only.
  std::size_t state_of_cell(std::int64_t k) const;

  /// Cell boundaries strictly inside (t0, t1), in this driver's time frame.
  /// Boundaries closer than 1e-12 (relative) to an endpoint are dropped.
  std::vector<double> breakpoints(double t0, double t1) const;

  /// Stationary law of the Markov chain (uniform for iid).
  Vector stationary_law() const;
  /// Strong connectivity of the transition graph; always true for iid.
  bool chain_irreducible() const;

 private:
  struct Params;
  Driver(std::shared_ptr<const Params> params, double phase)
      : params_(std::move(params)), phase_(phase) {}

  std::shared_ptr<const Params> params_;
  double phase_ = 0.0;
};

/// ∫_{t0}^{t1} f(sample(s)) ds. Exact (midpoint per piece) on
/// piecewise-constant drivers; composite trapezoid with `per_unit`
/// subintervals per time unit on smooth ones.
double integrate_along(const Driver& driver, double t0, double t1,
                       const std::function<double(const CoefficientSample&)>& f,
                       int per_unit = 256);

/// Entrywise ∫ of a matrix-valued functional, same quadrature rules.
Matrix integrate_matrix_along(
    const Driver& driver, double t0, double t1,
    const std::function<Matrix(const CoefficientSample&)>& f,
    int per_unit = 256);

/// ess sup of f over [t0, t1] (cell values for switching drivers, grid
/// samples for smooth ones).
double sup_along(const Driver& driver, double t0, double t1,
                 const std::function<double(const CoefficientSample&)>& f,
                 int per_unit = 256);

}  // namespace floquet_sep
