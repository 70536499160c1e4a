#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "floquet_sep/cone.hpp"
#include "floquet_sep/segment.hpp"
#include "floquet_sep/semiflow.hpp"
#include "floquet_sep/stats.hpp"

namespace floquet_sep {

/// Sentinel for a −∞ exponent (vector in the kernel). Never averaged.
inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

struct LyapunovEstimate {
  double lambda1 = 0.0;
  double stderr_ = 0.0;
  /// running (1/t) Σ ln‖·‖ at the end of every renormalization step
  std::vector<double> t;
  std::vector<double> running;
};

/// Forward growth rate of u0: iterate u <- U(renorm) u / ‖·‖ and average the
/// log increments over the second half of the horizon. Throws KernelVector if
/// the norm drops below 1e-12 of its previous value.
LyapunovEstimate top_lyapunov(const Semiflow& flow, const Segment& u0,
                              double horizon, double renorm,
                              const SpaceNorm& space);

struct FloquetEstimate {
  Segment w;
  /// slope of ln‖U_{θ_{-t_k}ω}(t_k) u0‖ over the tail of the ladder
  double lambda1 = 0.0;
  double lambda1_stderr = 0.0;
  double sigma_forward = 0.0;
  double sigma_r2 = 0.0;
  double residual = 0.0;
  /// ladder t_k and ln‖v_k − v_last‖ (the last entry is −∞)
  std::vector<double> t;
  std::vector<double> log_dist;
  /// [first, last) indices of the ladder used for the σ fit
  int fit_begin = 0;
  int fit_end = 0;
};

struct PullbackOptions {
  double step = 1.0;
  /// start of the σ fit window (usually T)
  double fit_from = 1.0;
  /// NotConverged above this
  double tolerance = 1e-8;
};

/// w(ω) as the limit of U_{θ_{-t}ω}(t) u0 / ‖·‖ over the ladder
/// t_k = k·step <= t_back.
FloquetEstimate pullback_floquet(const Semiflow& flow, double t_back,
                                 const Segment& u0, const SpaceNorm& space,
                                 const PullbackOptions& opts = {});

struct VolumeEstimate {
  /// partial[j] ≈ λ_1 + ... + λ_{j+1}
  std::vector<double> partial;
  /// successive differences of partial
  std::vector<double> exponents;
  double renorm_used = 1.0;
};

/// vol(v_1..v_l) = ‖v_l‖ ∏_{i<l} dist(v_i, span{v_{i+1}..v_l}) in the grid
/// inner product.
double volume(const std::vector<Segment>& v);
double volume_columns(const Eigen::MatrixXd& x, const Eigen::VectorXd& weights);

/// Growth rates of k-dimensional volumes, k <= 6, horizon >= 50·T_scale.
VolumeEstimate volume_growth_exponents(const Semiflow& flow, int k, double horizon,
                                       const SpaceNorm& space, double renorm = 1.0,
                                       std::uint64_t seed = 1, double T_scale = 1.0);

struct OseledetsEstimate {
  std::vector<double> lambdas;
  /// number of exponents within `resolution` of lambdas[0]
  int leading_dim = 0;
  double resolution = 5e-2;
  /// final weighted-orthonormal frame
  Eigen::MatrixXd Q;
  double E1_angle_to_w = 0.0;
  /// ‖P̃(θ_t ω)‖ on the interior window, with the sample times
  std::vector<double> proj_t;
  std::vector<double> proj_norms;
  /// leading direction and adjoint direction at the window start
  Segment w_start;
  Segment adjoint_start;
  double window_start = 0.0;
};

struct OseledetsOptions {
  int k = 4;
  double resolution = 5e-2;
  /// discarded at both ends for the projection series
  double transient = 25.0;
  Eigen::Index cap = 4096;
  std::uint64_t seed = 1;
};

OseledetsEstimate oseledets_split(const Semiflow& flow, double T_op, double horizon,
                                  const SpaceNorm& space,
                                  const OseledetsOptions& opts = {});

/// First exponent below lambdas[0] by more than `resolution`; −∞ if none.
double second_exponent(const std::vector<double>& lambdas, double resolution);

struct TemperednessResult {
  double slope = 0.0;
  double r2 = 0.0;
  bool pass = false;
};

/// Slope of ln‖P̃‖ against t. Needs >= 20 samples spanning >= 10·T.
TemperednessResult temperedness_diagnostic(const std::vector<double>& t,
                                           const std::vector<double>& proj_norms,
                                           double T, double tol = 1e-2);

struct SeparationConfig {
  SpaceNorm space = SpaceNorm::C();
  int M = 1;
  /// N + (N-1) M + 1 when <= 0
  int T = 0;
  double horizon = 300.0;
  double renorm = 1.0;
  double t_back = 60.0;
  double T_op = 1.0;
  int k = 4;
  double resolution = 5e-2;
  double lambda2_tol = 5e-2;
  double tempered_tol = 1e-2;
  double transient = 25.0;
  int census = 200;
  std::uint64_t seed = 1;
};

struct SeparationReport {
  SpaceNorm space = SpaceNorm::C();
  double lambda1 = 0.0;
  double lambda1_stderr = 0.0;
  double lambda1_pullback = 0.0;
  double lambda1_pullback_stderr = 0.0;
  double lambda2 = 0.0;
  double lambda2_volume = 0.0;
  double lambda2_qr = 0.0;
  double sigma = 0.0;
  bool sigma_infinite = false;
  double sigma_fit = 0.0;
  int leading_dim = 0;
  std::vector<double> exponents_qr;
  std::vector<double> exponents_volume;
  FloquetEstimate floquet;
  LyapunovEstimate forward;
  std::vector<double> proj_t;
  std::vector<double> proj_norms;
  TemperednessResult tempered;
  double E1_angle_to_w = 0.0;
  /// cone vectors tested against the F₁ proxy
  int census_tested = 0;
  int census_members = 0;
  int kernel_dim_witness = 0;
  int census_violations = 0;
  std::vector<std::string> inconsistencies;
  bool pass() const { return inconsistencies.empty() && sigma > 0.0 && tempered.pass; }
};

SeparationReport separation_report(const Semiflow& flow, const SeparationConfig& cfg);

struct CrossSpaceRow {
  SpaceNorm space = SpaceNorm::C();
  double lambda1 = 0.0;
  double stderr_ = 0.0;
  double lambda1_pullback = 0.0;
  bool dies = false;
};

struct CrossSpaceTable {
  std::vector<CrossSpaceRow> rows;
  double max_deviation = 0.0;
  /// deviation[i][j] = |λ_i − λ_j| (0 when both die, ∞ when one does)
  std::vector<std::vector<double>> deviation;
};

/// Every space starts from `u0` (the constant 1 when absent).
CrossSpaceTable cross_space_compare(const Semiflow& flow,
                                    const std::vector<SpaceNorm>& spaces,
                                    double horizon, double t_back = 40.0,
                                    const std::optional<Segment>& u0 = std::nullopt);

/// Random cone segment (continuous unless `product`), entries uniform in
/// [0, 1), from a seeded mt19937_64.
Segment random_cone_segment(int n, int m, std::uint64_t seed, bool product);

}  // namespace floquet_sep
