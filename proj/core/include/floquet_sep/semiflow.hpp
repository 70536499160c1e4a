#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "floquet_sep/driver.hpp"
#include "floquet_sep/segment.hpp"

namespace floquet_sep {

/// Solution path z(t) of the delay system on a uniform grid.
struct Trajectory {
  Driver omega;
  int m = 0;
  /// t_grid[i] = (i - m) / m, starting at -1.
  std::vector<double> t_grid;
  /// Column i is z(t_grid[i]). The first m+1 columns are the initial history
  /// (node m replaced by the head at t = 0).
  Eigen::MatrixXd z;

  /// z_t as a continuous Segment. Requires t grid-aligned, 0 <= t <= end.
  Segment seg_at(double t) const;
  double end_time() const { return t_grid.back(); }
};

/// Solution operators of z' = A(θ_t ω) z + B(θ_t ω) z(t - 1) by the method of
/// steps on a grid of m ticks per unit delay.
///
/// Each tick of length h = 1/m advances
///     z_{j+1} = E z_j + (h/2) (E B g_j + B g_{j+1}),   E = exp(A h),
/// where g_j are the delayed samples. This is the trapezoid rule applied to
/// the Duhamel integral, exact for the homogeneous part. Ticks containing a
/// driver-cell boundary are split at the boundary. Smooth (quasi-periodic)
/// drivers use classical RK4 per tick with linear interpolation of the
/// delayed term.
///
/// Times passed to apply() and friends must be multiples of 1/m.
class Semiflow {
 public:
  Semiflow(Driver omega, int m);

  const Driver& driver() const { return omega_; }
  int resolution() const { return m_; }
  int dim() const { return n_; }
  Eigen::Index flat_size() const { return static_cast<Eigen::Index>(n_) * (m_ + 2); }

  /// Semiflow over θ_s ω (s grid-aligned). Shares the exponential cache.
  Semiflow shifted(double s) const;

  /// z_t(ω, u), t >= 0 grid-aligned. For product-space inputs the head is
  /// carried as z(0); the result is continuous once t >= 1. `space` only
  /// checks that the input is admissible (continuous for C and AC).
  Segment apply(double t, const Segment& u, const SpaceNorm& space) const;
  /// Same, with the driver clock starting at t0 (equivalent to shifted(t0)).
  Segment apply_from(double t0, double t, const Segment& u) const;

  /// One unit of delay from driver time t0.
  Segment step_unit(const Segment& u, double t0 = 0.0) const;

  /// Advance every column of `x` (flat segments) by `ticks` ticks starting
  /// at driver time t0 = tick0 / m. Works in place. Chunks longer than m
  /// are processed unit by unit.
  void advance(Eigen::MatrixXd& x, std::int64_t tick0, std::int64_t ticks) const;

  /// Matrix of the discretized U_ω(t) in flat coordinates (size N(m+2)).
  /// Throws ResourceLimit when N(m+2) exceeds `cap`.
  Eigen::MatrixXd discretize(double t, Eigen::Index cap = 4096) const;
  /// Same operator started at driver time t0.
  Eigen::MatrixXd discretize_from(double t0, double t, Eigen::Index cap = 4096) const;

  /// Full path on [-1, horizon].
  Trajectory trajectory(const Segment& u, double horizon) const;

  /// Fundamental matrix of z' = A(θ_t ω) z from t1 to t2.
  Eigen::MatrixXd fundamental_matrix(double t1, double t2) const;

  /// Converts a grid-aligned time into a tick count; throws otherwise.
  std::int64_t ticks_of(double t) const;

 private:
  struct Cache;
  void advance_chunk(Eigen::MatrixXd& x, std::int64_t tick0, int k) const;
  void tick_switching(Eigen::Ref<Eigen::MatrixXd> z,
                      const Eigen::Ref<const Eigen::MatrixXd>& g0,
                      const Eigen::Ref<const Eigen::MatrixXd>& g1,
                      std::int64_t tick) const;
  void tick_smooth(Eigen::Ref<Eigen::MatrixXd> z,
                   const Eigen::Ref<const Eigen::MatrixXd>& g0,
                   const Eigen::Ref<const Eigen::MatrixXd>& g1,
                   std::int64_t tick) const;
  void check_segment(const Segment& u) const;

  Driver omega_;
  int m_ = 0;
  int n_ = 0;
  std::shared_ptr<const Cache> cache_;
};

/// Fundamental matrix of the delay-free part, free-function form.
Eigen::MatrixXd fundamental_matrix(const Driver& omega, double t1, double t2,
                                   int m = 200);

}  // namespace floquet_sep
