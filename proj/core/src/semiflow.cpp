#include "floquet_sep/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floquet_sep/errors.hpp"
#include "floquet_sep/linalg.hpp"

namespace floquet_sep {

namespace {

Eigen::Index block(int n, int node) { return static_cast<Eigen::Index>(n) * (1 + node); }

}  // namespace

struct Semiflow::Cache {
  // per switching state: E = exp(A h), (h/2) E B, (h/2) B
  std::vector<Matrix> E, EBh, Bh;
};

Semiflow::Semiflow(Driver omega, int m) : omega_(std::move(omega)), m_(m) {
  if (m < 2) throw InvalidArgument("grid resolution m must be >= 2");
  n_ = omega_.dim();
  auto cache = std::make_shared<Cache>();
  if (omega_.piecewise_constant()) {
    const double h = 1.0 / m_;
    for (std::size_t i = 0; i < omega_.state_count(); ++i) {
      const auto& st = omega_.state(i);
      Matrix E = matrix_exponential(st.A * h);
      cache->EBh.push_back(0.5 * h * E * st.B);
      cache->Bh.push_back(0.5 * h * st.B);
      cache->E.push_back(std::move(E));
    }
  }
  cache_ = std::move(cache);
}

Semiflow Semiflow::shifted(double s) const {
  ticks_of(s);
  Semiflow out = *this;
  out.omega_ = omega_.shifted(s);
  return out;
}

std::int64_t Semiflow::ticks_of(double t) const {
  const double r = t * m_;
  const double k = std::round(r);
  if (!std::isfinite(r) || std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) {
    throw InvalidArgument("time " + std::to_string(t) +
                          " is not a multiple of 1/m (m = " +
                          std::to_string(m_) + ")");
  }
  return static_cast<std::int64_t>(k);
}

void Semiflow::check_segment(const Segment& u) const {
  if (u.dim() != n_) {
    throw InvalidArgument("segment dimension " + std::to_string(u.dim()) +
                          " does not match system dimension " +
                          std::to_string(n_));
  }
  if (u.resolution() != m_) {
    throw InvalidArgument("segment resolution " +
                          std::to_string(u.resolution()) +
                          " does not match grid m = " + std::to_string(m_));
  }
}

void Semiflow::tick_switching(Eigen::Ref<Eigen::MatrixXd> z,
                              const Eigen::Ref<const Eigen::MatrixXd>& g0,
                              const Eigen::Ref<const Eigen::MatrixXd>& g1,
                              std::int64_t tick) const {
  const double h = 1.0 / m_;
  const double ta = static_cast<double>(tick) / m_;
  const double tb = static_cast<double>(tick + 1) / m_;
  auto cuts = omega_.breakpoints(ta, tb);
  if (cuts.empty()) {
    const auto s = omega_.state_index(0.5 * (ta + tb));
    Eigen::MatrixXd next = cache_->E[s] * z;
    next.noalias() += cache_->EBh[s] * g0;
    next.noalias() += cache_->Bh[s] * g1;
    z = next;
    return;
  }
  // tick straddles a cell boundary: propagate piece by piece
  cuts.push_back(tb);
  double a = ta;
  Eigen::MatrixXd ga = g0;
  for (double b : cuts) {
    const double len = b - a;
    Eigen::MatrixXd gb = g0 + ((b - ta) / h) * (g1 - g0);
    const auto& st = omega_.state(omega_.state_index(0.5 * (a + b)));
    Matrix E = matrix_exponential(st.A * len);
    Eigen::MatrixXd next = E * z;
    next.noalias() += (0.5 * len) * (E * st.B) * ga;
    next.noalias() += (0.5 * len) * st.B * gb;
    z = next;
    ga = std::move(gb);
    a = b;
  }
}

void Semiflow::tick_smooth(Eigen::Ref<Eigen::MatrixXd> z,
                           const Eigen::Ref<const Eigen::MatrixXd>& g0,
                           const Eigen::Ref<const Eigen::MatrixXd>& g1,
                           std::int64_t tick) const {
  const double h = 1.0 / m_;
  const double ta = static_cast<double>(tick) / m_;
  const auto s0 = omega_.sample(ta);
  const auto sm = omega_.sample(ta + 0.5 * h);
  const auto s1 = omega_.sample(static_cast<double>(tick + 1) / m_);
  const Eigen::MatrixXd gm = 0.5 * (g0 + g1);
  const Eigen::MatrixXd mid_force = sm.B * gm;
  Eigen::MatrixXd k1 = s0.A * z + s0.B * g0;
  Eigen::MatrixXd k2 = sm.A * (z + 0.5 * h * k1) + mid_force;
  Eigen::MatrixXd k3 = sm.A * (z + 0.5 * h * k2) + mid_force;
  Eigen::MatrixXd k4 = s1.A * (z + h * k3) + s1.B * g1;
  z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void Semiflow::advance_chunk(Eigen::MatrixXd& x, std::int64_t tick0, int k) const {
  const int n = n_, m = m_;
  const auto cols = x.cols();
  Eigen::MatrixXd y(x.rows(), cols);
  // persisted history shifts left by k nodes; node m-k is the old z(0)
  if (m - k > 0) {
    y.middleRows(block(n, 0), static_cast<Eigen::Index>(n) * (m - k)) =
        x.middleRows(block(n, k), static_cast<Eigen::Index>(n) * (m - k));
  }
  y.middleRows(block(n, m - k), n) = x.topRows(n);
  Eigen::MatrixXd z = x.topRows(n);
  const bool switching = omega_.piecewise_constant();
  for (int i = 0; i < k; ++i) {
    auto g0 = x.middleRows(block(n, i), n);
    auto g1 = x.middleRows(block(n, i + 1), n);
    if (switching) {
      tick_switching(z, g0, g1, tick0 + i);
    } else {
      tick_smooth(z, g0, g1, tick0 + i);
    }
    y.middleRows(block(n, m - k + 1 + i), n) = z;
  }
  y.topRows(n) = z;
  if (!z.allFinite()) {
    throw IntegrationFailure("non-finite state at t = " +
                             std::to_string(static_cast<double>(tick0 + k) / m) +
                             " (coefficient blow-up?)");
  }
  x.swap(y);
}

void Semiflow::advance(Eigen::MatrixXd& x, std::int64_t tick0,
                       std::int64_t ticks) const {
  if (x.rows() != flat_size()) {
    throw InvalidArgument("advance: batch has " + std::to_string(x.rows()) +
                          " rows, expected " + std::to_string(flat_size()));
  }
  if (ticks < 0) throw InvalidArgument("advance: negative tick count");
  while (ticks > 0) {
    const int k = static_cast<int>(std::min<std::int64_t>(ticks, m_));
    advance_chunk(x, tick0, k);
    tick0 += k;
    ticks -= k;
  }
}

Segment Semiflow::apply_from(double t0, double t, const Segment& u) const {
  check_segment(u);
  if (t < 0.0) throw InvalidArgument("apply: negative time " + std::to_string(t));
  Eigen::MatrixXd x = u.flat();
  advance(x, ticks_of(t0), ticks_of(t));
  return Segment(n_, m_, Eigen::VectorXd(x.col(0)));
}

Segment Semiflow::apply(double t, const Segment& u, const SpaceNorm& space) const {
  check_segment(u);
  if (!space.is_product_space()) {
    const double scale = std::max(1.0, u.flat().lpNorm<Eigen::Infinity>());
    if (!u.is_continuous(1e-12 * scale)) {
      throw InvalidArgument("segment is not continuous (head != u(0)) but space " +
                            space.name() + " requires it");
    }
  }
  return apply_from(0.0, t, u);
}

Segment Semiflow::step_unit(const Segment& u, double t0) const {
  return apply_from(t0, 1.0, u);
}

Eigen::MatrixXd Semiflow::discretize_from(double t0, double t,
                                          Eigen::Index cap) const {
  const auto f = flat_size();
  if (f > cap) {
    throw ResourceLimit("discretized operator size " + std::to_string(f) +
                        " exceeds cap " + std::to_string(cap));
  }
  if (t < 0.0) throw InvalidArgument("discretize: negative time");
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(f, f);
  advance(x, ticks_of(t0), ticks_of(t));
  return x;
}

Eigen::MatrixXd Semiflow::discretize(double t, Eigen::Index cap) const {
  return discretize_from(0.0, t, cap);
}

Trajectory Semiflow::trajectory(const Segment& u, double horizon) const {
  check_segment(u);
  if (horizon < 0.0) throw InvalidArgument("trajectory: negative horizon");
  const auto total = ticks_of(horizon);
  Trajectory tr{omega_, m_, {}, {}};
  tr.z.resize(n_, m_ + 1 + total);
  tr.t_grid.resize(static_cast<std::size_t>(m_ + 1 + total));
  for (std::int64_t i = 0; i < m_ + 1 + total; ++i) {
    tr.t_grid[static_cast<std::size_t>(i)] = static_cast<double>(i - m_) / m_;
  }
  for (int j = 0; j < m_; ++j) tr.z.col(j) = u.node(j);
  tr.z.col(m_) = u.head();
  Eigen::MatrixXd x = u.flat();
  std::int64_t done = 0;
  while (done < total) {
    const int k = static_cast<int>(std::min<std::int64_t>(total - done, m_));
    advance_chunk(x, done, k);
    for (int i = 0; i < k; ++i) {
      tr.z.col(m_ + 1 + done + i) = x.middleRows(block(n_, m_ - k + 1 + i), n_);
    }
    done += k;
  }
  return tr;
}

Segment Trajectory::seg_at(double t) const {
  const double r = t * m;
  const auto k = static_cast<std::int64_t>(std::llround(r));
  if (std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, std::abs(r)) ||
      k < 0 || k + m >= z.cols()) {
    throw InvalidArgument("seg_at: time " + std::to_string(t) +
                          " outside the trajectory grid");
  }
  const auto n = static_cast<int>(z.rows());
  Segment s(n, m);
  for (int j = 0; j <= m; ++j) s.node(j) = z.col(k + j);
  s.head() = z.col(k + m);
  return s;
}

Eigen::MatrixXd Semiflow::fundamental_matrix(double t1, double t2) const {
  if (t1 > t2) throw InvalidArgument("fundamental_matrix: t1 > t2");
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n_, n_);
  if (t1 == t2) return phi;
  if (omega_.piecewise_constant()) {
    auto cuts = omega_.breakpoints(t1, t2);
    cuts.push_back(t2);
    double a = t1;
    for (double b : cuts) {
      const auto& st = omega_.state(omega_.state_index(0.5 * (a + b)));
      phi = matrix_exponential(st.A * (b - a)) * phi;
      a = b;
    }
    return phi;
  }
  const auto steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil((t2 - t1) * m_)));
  const double h = (t2 - t1) / static_cast<double>(steps);
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = t1 + static_cast<double>(i) * h;
    const Matrix A0 = omega_.sample(t).A;
    const Matrix Am = omega_.sample(t + 0.5 * h).A;
    const Matrix A1 = omega_.sample(t + h).A;
    Eigen::MatrixXd k1 = A0 * phi;
    Eigen::MatrixXd k2 = Am * (phi + 0.5 * h * k1);
    Eigen::MatrixXd k3 = Am * (phi + 0.5 * h * k2);
    Eigen::MatrixXd k4 = A1 * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

Eigen::MatrixXd fundamental_matrix(const Driver& omega, double t1, double t2,
                                   int m) {
  return Semiflow(omega, m).fundamental_matrix(t1, t2);
}

}  // namespace floquet_sep
