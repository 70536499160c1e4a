#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace floquet_sep {

/// A history function on [-1, 0] sampled at s_j = -1 + j/m, j = 0..m,
/// plus a separate head value for the point s = 0.
///
/// For elements of C and AC the head equals the last node. Elements of
/// L = R^N × L_p keep the head independent of the history samples, which
/// is how the pair (u₁, u₂) is carried.
///
/// Storage is a single flat vector [head; node_0; ...; node_m], each block
/// N long. That layout is also the coordinate system of the discretized
/// solution operators.
class Segment {
 public:
  Segment() = default;
  /// Zero segment.
  Segment(int n, int m);
  Segment(int n, int m, Eigen::VectorXd flat);

  /// u(s) ≡ c.
  static Segment constant(const Eigen::VectorXd& c, int m);
  /// u(s_j) = f(s_j), head = f(0).
  static Segment from_function(
      int n, int m, const std::function<Eigen::VectorXd(double)>& f);
  /// L-type element (head, u₂) with u₂(s_j) = f(s_j).
  static Segment l_element(const Eigen::VectorXd& head, int m,
                           const std::function<Eigen::VectorXd(double)>& f);

  int dim() const { return n_; }
  int resolution() const { return m_; }
  Eigen::Index flat_size() const { return flat_.size(); }

  double node_time(int j) const { return -1.0 + static_cast<double>(j) / m_; }

  auto head() { return flat_.segment(0, n_); }
  auto head() const { return flat_.segment(0, n_); }
  auto node(int j) { return flat_.segment(static_cast<Eigen::Index>(n_) * (1 + j), n_); }
  auto node(int j) const { return flat_.segment(static_cast<Eigen::Index>(n_) * (1 + j), n_); }

  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  /// head == node(m) up to `tol` (max-abs).
  bool is_continuous(double tol = 0.0) const;
  /// All samples and the head are >= 0.
  bool in_cone() const;
  bool all_finite() const;
  /// Smallest entry over head and nodes.
  double min_entry() const;
  double max_entry() const;

  Segment& operator+=(const Segment& o);
  Segment& operator-=(const Segment& o);
  Segment& operator*=(double a);
  friend Segment operator+(Segment a, const Segment& b) { return a += b; }
  friend Segment operator-(Segment a, const Segment& b) { return a -= b; }
  friend Segment operator*(double a, Segment b) { return b *= a; }

 private:
  int n_ = 0;
  int m_ = 0;
  Eigen::VectorXd flat_;
};

enum class SpaceKind { C, Lp, L1hat, AC };

/// Which Banach-space norm interprets a Segment.
class SpaceNorm {
 public:
  static SpaceNorm C() { return SpaceNorm(SpaceKind::C, 1.0); }
  /// R^N × L_p with 1 < p < ∞.
  static SpaceNorm Lp(double p);
  /// R^N × L_1.
  static SpaceNorm L1hat() { return SpaceNorm(SpaceKind::L1hat, 1.0); }
  static SpaceNorm AC() { return SpaceNorm(SpaceKind::AC, 1.0); }
  /// "C", "Lp", "L1", "AC" (p is used for "Lp" only).
  static SpaceNorm parse(const std::string& tag, double p = 2.0);

  SpaceKind kind() const { return kind_; }
  double p() const { return p_; }
  /// Hölder conjugate of p; 1 for C/AC (integral of b), ∞ for L1hat.
  double q() const;
  /// Whether the head is an independent coordinate (L and L̂).
  bool is_product_space() const {
    return kind_ == SpaceKind::Lp || kind_ == SpaceKind::L1hat;
  }
  std::string name() const;

  friend bool operator==(const SpaceNorm&, const SpaceNorm&) = default;

 private:
  SpaceNorm(SpaceKind k, double p) : kind_(k), p_(p) {}
  SpaceKind kind_ = SpaceKind::C;
  double p_ = 1.0;
};

/// ‖u‖ in the given space.
///  C:  max over nodes (and head) of the Euclidean norm.
///  Lp: ‖head‖ + (trapezoid ∫ ‖u(s)‖^p ds)^{1/p}; L1hat is p = 1.
///  AC: C-norm + Σ_j ‖u(s_{j+1}) − u(s_j)‖ (∫‖u'‖ for the piecewise-linear
///      interpolant). Requires m >= 2.
double norm(const Segment& u, const SpaceNorm& space);

/// J u = (u(0), u): C-type segment viewed as an L-element.
Segment embed_J(const Segment& u);

/// Trapezoid weights of the grid inner product, per flat coordinate:
/// 1 on the head block, h/2 on the end nodes, h on interior nodes.
Eigen::VectorXd grid_weights(int n, int m);

/// Grid inner product ⟨u, v⟩ with the weights above.
double grid_inner(const Segment& u, const Segment& v);

}  // namespace floquet_sep
