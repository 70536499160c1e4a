#include "floquet_sep/driver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <limits>
#include <string>

#include "floquet_sep/errors.hpp"
#include "floquet_sep/linalg.hpp"

namespace floquet_sep {

namespace {

constexpr std::uint64_t kStreamCell = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamAnchor = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kStreamTorus = 0x165667b19e3779f9ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::int64_t counter,
                           std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ stream) ^
                    static_cast<std::uint64_t>(counter));
}

double unit_uniform(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::size_t draw_categorical(const Vector& probs, double u) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(probs.size() - 1);
}

Matrix evaluate_series(const std::vector<FourierTerm>& terms,
                       const Vector& x, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (const auto& term : terms) {
    double arg = 0.0;
    for (std::size_t i = 0; i < term.k.size(); ++i) {
      arg += term.k[i] * x[static_cast<Eigen::Index>(i)];
    }
    arg *= 2.0 * std::numbers::pi;
    if (term.cos_coeff.size() != 0) out += std::cos(arg) * term.cos_coeff;
    if (term.sin_coeff.size() != 0) out += std::sin(arg) * term.sin_coeff;
  }
  return out;
}

void check_square(const Matrix& m, int n, const std::string& what) {
  if (m.rows() != n || m.cols() != n) {
    throw InvalidArgument(what + " must be " + std::to_string(n) + "x" +
                          std::to_string(n) + ", got " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw InvalidArgument(what + " has non-finite entries");
}

}  // namespace

double CoefficientSample::a_norm() const { return operator_norm(A); }
double CoefficientSample::b_norm() const { return operator_norm(B); }

const char* to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::IidSwitching:
      return "iid";
    case DriverKind::MarkovSwitching:
      return "markov";
    case DriverKind::Quasiperiodic:
      return "quasiperiodic";
  }
  return "unknown";
}

struct Driver::Params {
  DriverKind kind = DriverKind::IidSwitching;
  std::uint64_t seed = 0;
  int n = 0;
  double cell_length = 1.0;
  std::vector<CoefficientState> states;
  Matrix transition;
  Vector stationary;
  bool chain_irreducible = true;
  QuasiperiodicTables tables;
  Vector torus_origin;
};

namespace {

void validate_states(const std::vector<CoefficientState>& states) {
  if (states.empty()) throw InvalidArgument("driver state list is empty");
  const auto n = static_cast<int>(states.front().A.rows());
  if (n < 2) throw InvalidArgument("system dimension N must be >= 2");
  for (std::size_t i = 0; i < states.size(); ++i) {
    check_square(states[i].A, n, "state " + std::to_string(i) + " A");
    check_square(states[i].B, n, "state " + std::to_string(i) + " B");
  }
}

Vector markov_stationary(const Matrix& P) {
  // Left Perron vector of a row-stochastic matrix by power iteration on the
  // lazy chain (I + P) / 2, which converges for any irreducible P.
  const auto s = P.rows();
  Vector pi = Vector::Constant(s, 1.0 / static_cast<double>(s));
  const Matrix lazy = 0.5 * (Matrix::Identity(s, s) + P);
  for (int it = 0; it < 100000; ++it) {
    Vector next = lazy.transpose() * pi;
    next /= next.sum();
    if ((next - pi).lpNorm<Eigen::Infinity>() < 1e-15) return next;
    pi = next;
  }
  return pi;
}

}  // namespace

Driver Driver::iid_switching(std::uint64_t seed,
                             std::vector<CoefficientState> states,
                             double cell_length) {
  validate_states(states);
  if (!(cell_length > 0.0) || !std::isfinite(cell_length)) {
    throw InvalidArgument("cell_length must be a positive finite number");
  }
  auto p = std::make_shared<Params>();
  p->kind = DriverKind::IidSwitching;
  p->seed = seed;
  p->n = static_cast<int>(states.front().A.rows());
  p->cell_length = cell_length;
  p->stationary = Vector::Constant(static_cast<Eigen::Index>(states.size()),
                                   1.0 / static_cast<double>(states.size()));
  p->states = std::move(states);
  return Driver(std::move(p), 0.0);
}

Driver Driver::markov_switching(std::uint64_t seed,
                                std::vector<CoefficientState> states,
                                double cell_length, Matrix transition) {
  validate_states(states);
  if (!(cell_length > 0.0) || !std::isfinite(cell_length)) {
    throw InvalidArgument("cell_length must be a positive finite number");
  }
  const auto s = static_cast<Eigen::Index>(states.size());
  if (transition.rows() != s || transition.cols() != s) {
    throw InvalidArgument("transition matrix must be " + std::to_string(s) +
                          "x" + std::to_string(s));
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    if ((transition.row(i).array() < 0.0).any() ||
        std::abs(transition.row(i).sum() - 1.0) > 1e-12) {
      throw InvalidArgument("transition row " + std::to_string(i) +
                            " is not a probability vector");
    }
  }
  auto p = std::make_shared<Params>();
  p->kind = DriverKind::MarkovSwitching;
  p->seed = seed;
  p->n = static_cast<int>(states.front().A.rows());
  p->cell_length = cell_length;
  p->states = std::move(states);
  p->chain_irreducible = graph_strongly_connected(transition);
  if (!p->chain_irreducible) {
    std::clog << "warning: Markov transition graph is not strongly connected;"
                 " the switching process is not ergodic\n";
  }
  p->stationary = markov_stationary(transition);
  p->transition = std::move(transition);
  return Driver(std::move(p), 0.0);
}

Driver Driver::quasiperiodic(std::uint64_t seed, int n,
                             QuasiperiodicTables tables) {
  if (n < 2) throw InvalidArgument("system dimension N must be >= 2");
  const auto d = tables.rotation.size();
  if (d < 1) throw InvalidArgument("rotation vector is empty");
  auto check_terms = [&](const std::vector<FourierTerm>& terms,
                         const char* which) {
    for (const auto& t : terms) {
      if (static_cast<Eigen::Index>(t.k.size()) != d) {
        throw InvalidArgument(std::string("fourier term for ") + which +
                              " has wave vector of wrong length");
      }
      if (t.cos_coeff.size() != 0) check_square(t.cos_coeff, n, which);
      if (t.sin_coeff.size() != 0) check_square(t.sin_coeff, n, which);
    }
  };
  check_terms(tables.a_terms, "A");
  check_terms(tables.b_terms, "B");
  auto p = std::make_shared<Params>();
  p->kind = DriverKind::Quasiperiodic;
  p->seed = seed;
  p->n = n;
  p->torus_origin.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    p->torus_origin[i] = unit_uniform(counter_hash(seed, i, kStreamTorus));
  }
  p->tables = std::move(tables);
  return Driver(std::move(p), 0.0);
}

Driver Driver::constant(Matrix A, Matrix B) {
  return iid_switching(0, {CoefficientState{std::move(A), std::move(B)}}, 1.0);
}

DriverKind Driver::kind() const { return params_->kind; }
std::uint64_t Driver::seed() const { return params_->seed; }
int Driver::dim() const { return params_->n; }

bool Driver::piecewise_constant() const {
  return params_->kind != DriverKind::Quasiperiodic;
}

double Driver::cell_length() const { return params_->cell_length; }
std::size_t Driver::state_count() const { return params_->states.size(); }
const CoefficientState& Driver::state(std::size_t i) const {
  return params_->states.at(i);
}
const QuasiperiodicTables& Driver::tables() const { return params_->tables; }
const Matrix& Driver::transition() const { return params_->transition; }

Driver Driver::shifted(double s) const { return Driver(params_, phase_ + s); }

Driver Driver::with_seed(std::uint64_t seed) const {
  auto p = std::make_shared<Params>(*params_);
  p->seed = seed;
  if (p->kind == DriverKind::Quasiperiodic) {
    for (Eigen::Index i = 0; i < p->torus_origin.size(); ++i) {
      p->torus_origin[i] = unit_uniform(counter_hash(seed, i, kStreamTorus));
    }
  }
  return Driver(std::move(p), phase_);
}

std::int64_t Driver::cell_index(double t) const {
  return static_cast<std::int64_t>(
      std::floor((phase_ + t) / params_->cell_length));
}

std::size_t Driver::state_of_cell(std::int64_t k) const {
  const auto& p = *params_;
  const auto count = p.states.size();
  if (count == 1) return 0;
  if (p.kind == DriverKind::IidSwitching) {
    auto u = unit_uniform(counter_hash(p.seed, k, kStreamCell));
    return std::min(count - 1,
                    static_cast<std::size_t>(u * static_cast<double>(count)));
  }
  if (p.kind == DriverKind::MarkovSwitching) {
    // floor division so negative cells anchor to the block on their left
    std::int64_t block = k >= 0 ? k / kMarkovBlock
                                : -((-k + kMarkovBlock - 1) / kMarkovBlock);
    std::int64_t start = block * kMarkovBlock;
    auto s = draw_categorical(
        p.stationary, unit_uniform(counter_hash(p.seed, block, kStreamAnchor)));
    for (std::int64_t c = start + 1; c <= k; ++c) {
      s = draw_categorical(p.transition.row(static_cast<Eigen::Index>(s)),
                           unit_uniform(counter_hash(p.seed, c, kStreamCell)));
    }
    return s;
  }
  throw InvalidArgument("state_of_cell requires a switching driver");
}

std::size_t Driver::state_index(double t) const {
  if (!piecewise_constant()) {
    throw InvalidArgument("state_index requires a switching driver");
  }
  return state_of_cell(cell_index(t));
}

CoefficientSample Driver::sample(double t) const {
  const auto& p = *params_;
  if (piecewise_constant()) {
    const auto& st = p.states[state_index(t)];
    return {st.A, st.B, t};
  }
  Vector x = p.torus_origin + p.tables.rotation * (phase_ + t);
  return {evaluate_series(p.tables.a_terms, x, p.n),
          evaluate_series(p.tables.b_terms, x, p.n), t};
}

std::vector<double> Driver::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  if (!piecewise_constant() || !(t1 > t0)) return out;
  const double L = params_->cell_length;
  const double eps = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  auto k = static_cast<std::int64_t>(std::floor((phase_ + t0) / L)) + 1;
  for (;; ++k) {
    double b = static_cast<double>(k) * L - phase_;
    if (b >= t1 - eps) break;
    if (b > t0 + eps) out.push_back(b);
  }
  return out;
}

Vector Driver::stationary_law() const {
  if (!piecewise_constant()) {
    throw InvalidArgument("stationary_law requires a switching driver");
  }
  return params_->stationary;
}

bool Driver::chain_irreducible() const { return params_->chain_irreducible; }

namespace {

template <typename Accumulate>
void for_each_piece(const Driver& driver, double t0, double t1, int per_unit,
                    Accumulate&& acc) {
  if (driver.piecewise_constant()) {
    auto cuts = driver.breakpoints(t0, t1);
    double a = t0;
    cuts.push_back(t1);
    for (double b : cuts) {
      acc(driver.sample(0.5 * (a + b)), b - a, true);
      a = b;
    }
    return;
  }
  const auto n = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil((t1 - t0) * per_unit)));
  const double h = (t1 - t0) / static_cast<double>(n);
  for (std::int64_t i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 0.5 * h : h;
    acc(driver.sample(t0 + static_cast<double>(i) * h), w, false);
  }
}

}  // namespace

double integrate_along(const Driver& driver, double t0, double t1,
                       const std::function<double(const CoefficientSample&)>& f,
                       int per_unit) {
  if (t1 < t0) throw InvalidArgument("integrate_along: t1 < t0");
  double total = 0.0;
  for_each_piece(driver, t0, t1, per_unit,
                         [&](const CoefficientSample& s, double w, bool) {
                           total += w * f(s);
                         });
  return total;
}

Matrix integrate_matrix_along(
    const Driver& driver, double t0, double t1,
    const std::function<Matrix(const CoefficientSample&)>& f, int per_unit) {
  if (t1 < t0) throw InvalidArgument("integrate_matrix_along: t1 < t0");
  Matrix total = Matrix::Zero(driver.dim(), driver.dim());
  for_each_piece(driver, t0, t1, per_unit,
                         [&](const CoefficientSample& s, double w, bool) {
                           total += w * f(s);
                         });
  return total;
}

double sup_along(const Driver& driver, double t0, double t1,
                 const std::function<double(const CoefficientSample&)>& f,
                 int per_unit) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_piece(driver, t0, t1, per_unit,
                         [&](const CoefficientSample& s, double, bool) {
                           best = std::max(best, f(s));
                         });
  return best;
}

}  // namespace floquet_sep
