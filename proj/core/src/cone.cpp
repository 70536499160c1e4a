#include "floquet_sep/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floquet_sep/errors.hpp"
#include "floquet_sep/linalg.hpp"

namespace floquet_sep {

namespace {

constexpr double kZeroThreshold = 1e-12;

std::optional<CooperativityViolation> first_violation(const CoefficientSample& s) {
  const auto n = s.A.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && s.A(i, j) < 0.0) {
        return CooperativityViolation{'A', static_cast<int>(i) + 1,
                                      static_cast<int>(j) + 1, s.t, s.A(i, j)};
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (s.B(i, j) < 0.0) {
        return CooperativityViolation{'B', static_cast<int>(i) + 1,
                                      static_cast<int>(j) + 1, s.t, s.B(i, j)};
      }
    }
  }
  return std::nullopt;
}

struct PathSearch {
  const Eigen::MatrixXd& W;
  int n;
  std::vector<int> path;
  std::vector<char> used;
  std::vector<int> best;
  double best_bottleneck = 0.0;

  void run(int current, double bottleneck) {
    if (static_cast<int>(path.size()) == n) {
      if (best.empty() || bottleneck > best_bottleneck) {
        best = path;
        best_bottleneck = bottleneck;
      }
      return;
    }
    for (int next = 0; next < n; ++next) {
      if (used[static_cast<std::size_t>(next)]) continue;
      const double w = W(next, current);
      if (!(w > 0.0)) continue;
      const double b = std::min(bottleneck, w);
      // bottlenecks only shrink along a path
      if (!best.empty() && b <= best_bottleneck) continue;
      used[static_cast<std::size_t>(next)] = 1;
      path.push_back(next);
      run(next, b);
      path.pop_back();
      used[static_cast<std::size_t>(next)] = 0;
    }
  }
};

Eigen::MatrixXd window_weights(const Driver& omega, double t, int M, int per_unit) {
  return integrate_matrix_along(
      omega, t, t + M,
      [](const CoefficientSample& s) -> Matrix { return s.A + s.B; }, per_unit);
}

double product_k_delta(const Driver& omega, const IrreducibilityReport& irr,
                       int T, std::vector<double>* K_out, int per_unit) {
  double k = 1.0;
  const int n = omega.dim();
  std::vector<double> K;
  for (int j = 0; j < n; ++j) {
    const double integral = integrate_along(
        omega, 0.0, T,
        [j](const CoefficientSample& s) { return std::abs(s.A(j, j)); }, per_unit);
    K.push_back(std::exp(-integral));
    k *= K.back();
  }
  for (double d : irr.delta_values) k *= d;
  if (K_out) *K_out = std::move(K);
  return k;
}

}  // namespace

CooperativityResult check_cooperativity(const Driver& omega, double horizon,
                                        int per_unit) {
  if (!(horizon > 0.0)) throw InvalidArgument("check_cooperativity: horizon must be > 0");
  CooperativityResult out;
  auto visit = [&](double t) {
    if (auto v = first_violation(omega.sample(t))) {
      out.ok = false;
      out.first_violation = v;
      return false;
    }
    return true;
  };
  if (omega.piecewise_constant()) {
    auto cuts = omega.breakpoints(0.0, horizon);
    cuts.push_back(horizon);
    double a = 0.0;
    for (double b : cuts) {
      if (!visit(0.5 * (a + b))) return out;
      a = b;
    }
    return out;
  }
  const auto steps = static_cast<std::int64_t>(std::ceil(horizon * per_unit));
  for (std::int64_t i = 0; i <= steps; ++i) {
    if (!visit(horizon * static_cast<double>(i) / static_cast<double>(steps))) {
      return out;
    }
  }
  return out;
}

std::vector<int> best_hamiltonian_path(const Eigen::MatrixXd& W, int start,
                                       double* bottleneck) {
  const int n = static_cast<int>(W.rows());
  PathSearch search{W, n, {start}, std::vector<char>(static_cast<std::size_t>(n), 0),
                    {}, 0.0};
  search.used[static_cast<std::size_t>(start)] = 1;
  search.run(start, std::numeric_limits<double>::infinity());
  if (bottleneck) *bottleneck = search.best.empty() ? 0.0 : search.best_bottleneck;
  return search.best;
}

IrreducibilityReport check_irreducibility(const Driver& omega, int M, int per_unit) {
  if (M < 1) throw InvalidArgument("check_irreducibility: M must be >= 1");
  IrreducibilityReport rep;
  rep.N = omega.dim();
  rep.M = M;
  const int n = rep.N;
  for (int k = 2; k <= n; ++k) rep.window_times.push_back(k + (k - 2) * M);
  rep.paths.assign(static_cast<std::size_t>(n), {});
  rep.bottleneck.assign(static_cast<std::size_t>(n), {});
  rep.satisfied = true;
  std::vector<Eigen::MatrixXd> windows;
  for (double t : rep.window_times) windows.push_back(window_weights(omega, t, M, per_unit));
  for (std::size_t w = 0; w < windows.size(); ++w) {
    double delta = 1.0;
    for (int i = 0; i < n; ++i) {
      double b = 0.0;
      auto path = best_hamiltonian_path(windows[w], i, &b);
      for (int& j : path) ++j;
      if (path.empty()) {
        b = 0.0;
        if (rep.satisfied) {
          rep.satisfied = false;
          rep.failing_start = i + 1;
          rep.failing_window = rep.window_times[w];
        }
      }
      rep.paths[static_cast<std::size_t>(i)].push_back(std::move(path));
      rep.bottleneck[static_cast<std::size_t>(i)].push_back(b);
      delta = std::min(delta, b);
    }
    rep.delta_values.push_back(delta);
  }
  return rep;
}

double unit_cell_c(const Semiflow& flow, double t0) {
  const int m = flow.resolution();
  std::vector<Eigen::MatrixXd> steps;
  steps.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    steps.push_back(flow.fundamental_matrix(t0 + static_cast<double>(k) / m,
                                            t0 + static_cast<double>(k + 1) / m));
  }
  double best = 1.0;
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd P = steps[static_cast<std::size_t>(i)];
    best = std::max(best, operator_norm(P));
    for (int k = i + 1; k < m; ++k) {
      P = steps[static_cast<std::size_t>(k)] * P;
      best = std::max(best, operator_norm(P));
    }
  }
  return best;
}

double unit_cell_d(const Driver& omega, const SpaceNorm& space, double t0,
                   int per_unit) {
  auto b = [](const CoefficientSample& s) { return s.b_norm(); };
  switch (space.kind()) {
    case SpaceKind::Lp: {
      const double q = space.q();
      const double integral = integrate_along(
          omega, t0, t0 + 1.0,
          [q](const CoefficientSample& s) { return std::pow(s.b_norm(), q); },
          per_unit);
      return std::pow(integral, 1.0 / q);
    }
    case SpaceKind::L1hat:
      return sup_along(omega, t0, t0 + 1.0, b, per_unit);
    case SpaceKind::C:
    case SpaceKind::AC:
      return integrate_along(omega, t0, t0 + 1.0, b, per_unit);
  }
  return 0.0;
}

double log_kappa_from(double k_delta, const std::vector<double>& c,
                      const std::vector<double>& d, int T) {
  if (!(k_delta > 0.0)) throw InvalidArgument("log_kappa_from: k_delta must be > 0");
  if (static_cast<int>(c.size()) != T - 1 || static_cast<int>(d.size()) != T - 1) {
    throw InvalidArgument("log_kappa_from: need T - 1 values of c and d");
  }
  double s = -std::log(k_delta) + (T - 1) * std::log(3.0);
  for (int j = 0; j < T - 1; ++j) {
    s += std::log(c[static_cast<std::size_t>(j)]) +
         std::log1p(d[static_cast<std::size_t>(j)]);
  }
  return s;
}

FocusingReport focusing_constants(const Semiflow& flow, int M, const SpaceNorm& space) {
  const Driver& omega = flow.driver();
  FocusingReport rep;
  rep.N = omega.dim();
  rep.M = M;
  rep.H = (rep.N - 1) * M + 1;
  rep.T = rep.N + rep.H;
  rep.space = space;
  rep.irreducibility = check_irreducibility(omega, M);
  if (!rep.irreducibility.satisfied) {
    throw ContractViolation(
        "irreducibility fails: no admissible path from start " +
        std::to_string(rep.irreducibility.failing_start) + " in window t = " +
        std::to_string(rep.irreducibility.failing_window));
  }
  rep.k_delta = product_k_delta(omega, rep.irreducibility, rep.T, &rep.K, 256);
  for (int j = 0; j <= rep.T - 2; ++j) {
    rep.c.push_back(unit_cell_c(flow, j + 1.0));
    rep.d.push_back(unit_cell_d(omega, space, j + 1.0));
  }
  rep.c0 = unit_cell_c(flow, 0.0);
  rep.d0 = unit_cell_d(omega, space, 0.0);
  rep.log_kappa = log_kappa_from(rep.k_delta, rep.c, rep.d, rep.T);
  rep.kappa = std::exp(rep.log_kappa);
  return rep;
}

DichotomyResult dichotomy_test(const Semiflow& flow, const Segment& u, int T,
                               const SpaceNorm& space) {
  if (!u.in_cone()) throw InvalidArgument("dichotomy_test: u is not in the cone");
  const double n0 = norm(u, space);
  if (!(n0 > 0.0)) throw InvalidArgument("dichotomy_test: u is zero");
  const Segment out = flow.apply(T, u, space);
  DichotomyResult res;
  res.relative_norm = norm(out, space) / n0;
  if (res.relative_norm <= kZeroThreshold) {
    res.outcome = DichotomyOutcome::Dies;
    return res;
  }
  res.margin = out.min_entry();
  if (res.margin > kZeroThreshold * n0) {
    res.outcome = DichotomyOutcome::StrictlyPositive;
    return res;
  }
  throw ContractViolation("dichotomy: U(T)u is nonzero (relative norm " +
                          std::to_string(res.relative_norm) +
                          ") but not strictly positive (min component " +
                          std::to_string(res.margin) + ")");
}

DichotomyResult dichotomy_test(const Semiflow& flow, const Segment& u,
                               const FocusingReport& report) {
  return dichotomy_test(flow, u, report.T, report.space);
}

SandwichResult focusing_sandwich_check(const Semiflow& flow, const Segment& u,
                                       const FocusingReport& report) {
  const Segment outT = flow.apply(report.T, u, report.space);
  if (!(outT.flat().lpNorm<Eigen::Infinity>() > 0.0)) {
    throw ContractViolation("focusing_sandwich_check: U(T)u = 0");
  }
  const Segment out1 = flow.apply(1.0, u, report.space);
  SandwichResult res;
  res.lower = norm(out1, SpaceNorm::C()) * report.k_delta;
  res.upper = report.kappa * res.lower;
  res.beta = report.space.is_product_space()
                 ? 2.0 * std::sqrt(static_cast<double>(report.N)) * res.lower
                 : res.lower;
  res.min_component = outT.min_entry();
  res.max_component = outT.max_entry();
  // relative slack covers rounding in the products only
  res.ok = res.min_component >= res.lower * (1.0 - 1e-12) &&
           res.max_component <= res.upper * (1.0 + 1e-12);
  return res;
}

Segment focusing_unit_vector(int n, int m, const SpaceNorm& space) {
  const double level =
      space.is_product_space() ? 1.0 / (2.0 * std::sqrt(static_cast<double>(n))) : 1.0;
  return Segment::constant(Eigen::VectorXd::Constant(n, level), m);
}

BirkhoffBound birkhoff_beta_lowerbound(const Semiflow& flow, int n,
                                       const FocusingReport& report) {
  if (n < 1) throw InvalidArgument("birkhoff_beta_lowerbound: n must be >= 1");
  const Segment e = focusing_unit_vector(report.N, flow.resolution(), report.space);
  const double scale = report.space.is_product_space()
                           ? 2.0 * std::sqrt(static_cast<double>(report.N))
                           : 1.0;
  BirkhoffBound out;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Semiflow fiber = flow.shifted(static_cast<double>(k) * report.T);
    const auto irr = check_irreducibility(fiber.driver(), report.M);
    if (!irr.satisfied) {
      throw ContractViolation("irreducibility fails on fiber k = " + std::to_string(k));
    }
    const double kd = product_k_delta(fiber.driver(), irr, report.T, nullptr, 256);
    const double beta =
        scale * norm(fiber.apply(1.0, e, report.space), SpaceNorm::C()) * kd;
    if (!(beta > 0.0)) {
      throw ContractViolation("beta <= 0 on fiber k = " + std::to_string(k));
    }
    out.log_beta.push_back(std::log(beta));
    sum += out.log_beta.back();
  }
  out.bound = sum / (static_cast<double>(n) * report.T);
  return out;
}

}  // namespace floquet_sep
