#include "floquet_sep/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floquet_sep/errors.hpp"

namespace floquet_sep {

Segment::Segment(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) throw InvalidArgument("segment needs n >= 1 and m >= 1");
  flat_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * (m + 2));
}

Segment::Segment(int n, int m, Eigen::VectorXd flat)
    : n_(n), m_(m), flat_(std::move(flat)) {
  if (n < 1 || m < 1) throw InvalidArgument("segment needs n >= 1 and m >= 1");
  if (flat_.size() != static_cast<Eigen::Index>(n) * (m + 2)) {
    throw InvalidArgument("flat segment has size " +
                          std::to_string(flat_.size()) + ", expected " +
                          std::to_string(n * (m + 2)));
  }
}

Segment Segment::constant(const Eigen::VectorXd& c, int m) {
  Segment u(static_cast<int>(c.size()), m);
  u.head() = c;
  for (int j = 0; j <= m; ++j) u.node(j) = c;
  return u;
}

Segment Segment::from_function(
    int n, int m, const std::function<Eigen::VectorXd(double)>& f) {
  Segment u(n, m);
  for (int j = 0; j <= m; ++j) u.node(j) = f(u.node_time(j));
  u.head() = u.node(m);
  return u;
}

Segment Segment::l_element(const Eigen::VectorXd& head, int m,
                           const std::function<Eigen::VectorXd(double)>& f) {
  const auto n = static_cast<int>(head.size());
  Segment u(n, m);
  for (int j = 0; j <= m; ++j) u.node(j) = f(u.node_time(j));
  u.head() = head;
  return u;
}

bool Segment::is_continuous(double tol) const {
  return (head() - node(m_)).lpNorm<Eigen::Infinity>() <= tol;
}

bool Segment::in_cone() const { return (flat_.array() >= 0.0).all(); }
bool Segment::all_finite() const { return flat_.allFinite(); }
double Segment::min_entry() const { return flat_.minCoeff(); }
double Segment::max_entry() const { return flat_.maxCoeff(); }

Segment& Segment::operator+=(const Segment& o) {
  if (o.n_ != n_ || o.m_ != m_) throw InvalidArgument("segment shape mismatch");
  flat_ += o.flat_;
  return *this;
}

Segment& Segment::operator-=(const Segment& o) {
  if (o.n_ != n_ || o.m_ != m_) throw InvalidArgument("segment shape mismatch");
  flat_ -= o.flat_;
  return *this;
}

Segment& Segment::operator*=(double a) {
  flat_ *= a;
  return *this;
}

SpaceNorm SpaceNorm::Lp(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("Lp requires 1 < p < inf");
  }
  return SpaceNorm(SpaceKind::Lp, p);
}

SpaceNorm SpaceNorm::parse(const std::string& tag, double p) {
  if (tag == "C") return C();
  if (tag == "Lp" || tag == "L") return Lp(p);
  if (tag == "L1" || tag == "L1hat") return L1hat();
  if (tag == "AC") return AC();
  throw InvalidArgument("unknown space tag '" + tag +
                        "' (expected C, Lp, L1 or AC)");
}

double SpaceNorm::q() const {
  switch (kind_) {
    case SpaceKind::Lp:
      return p_ / (p_ - 1.0);
    case SpaceKind::L1hat:
      return std::numeric_limits<double>::infinity();
    case SpaceKind::C:
    case SpaceKind::AC:
      return 1.0;
  }
  return 1.0;
}

std::string SpaceNorm::name() const {
  switch (kind_) {
    case SpaceKind::C:
      return "C";
    case SpaceKind::Lp: {
      std::string s = std::to_string(p_);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "L" + s;
    }
    case SpaceKind::L1hat:
      return "L1";
    case SpaceKind::AC:
      return "AC";
  }
  return "?";
}

double norm(const Segment& u, const SpaceNorm& space) {
  const int m = u.resolution();
  const double h = 1.0 / m;
  switch (space.kind()) {
    case SpaceKind::C: {
      double best = u.head().norm();
      for (int j = 0; j <= m; ++j) best = std::max(best, u.node(j).norm());
      return best;
    }
    case SpaceKind::Lp:
    case SpaceKind::L1hat: {
      const double p = space.kind() == SpaceKind::Lp ? space.p() : 1.0;
      double integral = 0.0;
      for (int j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 * h : h;
        integral += w * std::pow(u.node(j).norm(), p);
      }
      return u.head().norm() + std::pow(integral, 1.0 / p);
    }
    case SpaceKind::AC: {
      if (m < 2) throw InvalidArgument("AC norm requires m >= 2");
      double sup = 0.0;
      for (int j = 0; j <= m; ++j) sup = std::max(sup, u.node(j).norm());
      double variation = 0.0;
      for (int j = 0; j < m; ++j) variation += (u.node(j + 1) - u.node(j)).norm();
      return sup + variation;
    }
  }
  return 0.0;
}

Segment embed_J(const Segment& u) {
  const double scale = std::max(1.0, u.flat().lpNorm<Eigen::Infinity>());
  if (!u.is_continuous(1e-12 * scale)) {
    throw InvalidArgument("embed_J requires a continuous segment (head == u(0))");
  }
  Segment out = u;
  out.head() = u.node(u.resolution());
  return out;
}

Eigen::VectorXd grid_weights(int n, int m) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(n) * (m + 2));
  const double h = 1.0 / m;
  w.head(n).setOnes();
  for (int j = 0; j <= m; ++j) {
    w.segment(static_cast<Eigen::Index>(n) * (1 + j), n)
        .setConstant((j == 0 || j == m) ? 0.5 * h : h);
  }
  return w;
}

double grid_inner(const Segment& u, const Segment& v) {
  if (u.dim() != v.dim() || u.resolution() != v.resolution()) {
    throw InvalidArgument("segment shape mismatch");
  }
  const auto w = grid_weights(u.dim(), u.resolution());
  return (w.array() * u.flat().array() * v.flat().array()).sum();
}

}  // namespace floquet_sep
