#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floquet_sep/driver.hpp"
#include "floquet_sep/segment.hpp"
#include "floquet_sep/semiflow.hpp"

namespace floquet_sep {

/// Where cooperativity first fails (1-based indices).
struct CooperativityViolation {
  char matrix = 'A';
  int row = 0;
  int col = 0;
  double t = 0.0;
  double value = 0.0;
};

struct CooperativityResult {
  bool ok = true;
  std::optional<CooperativityViolation> first_violation;
};

/// Off-diagonal a_ij >= 0 and all b_ij >= 0 on [0, horizon]. Switching
/// drivers are checked once per cell; smooth ones on `per_unit` samples per
/// unit time.
CooperativityResult check_cooperativity(const Driver& omega, double horizon,
                                        int per_unit = 256);

struct IrreducibilityReport {
  int N = 0;
  int M = 1;
  /// t_k = k + (k - 2) M for k = 2..N.
  std::vector<double> window_times;
  /// paths[i][w]: 1-based Hamiltonian path from start i+1 in window w
  /// (empty when none exists).
  std::vector<std::vector<std::vector<int>>> paths;
  /// bottleneck[i][w]: smallest edge weight of that path (0 if none).
  std::vector<std::vector<double>> bottleneck;
  /// δ(θ_{t_k} ω) = min(1, min_i bottleneck[i][w]) per window.
  std::vector<double> delta_values;
  bool satisfied = false;
  /// 1-based start index and window time of the first failure.
  int failing_start = 0;
  double failing_window = 0.0;
};

/// S4(i) on the windows [t_k, t_k + M]. Edge j -> j' carries weight
/// ∫ (a_{j'j} + b_{j'j}); the search is a lexicographic DFS over
/// permutations that prunes non-positive edges and keeps the first path with
/// the largest bottleneck.
IrreducibilityReport check_irreducibility(const Driver& omega, int M,
                                          int per_unit = 256);

/// Max-bottleneck Hamiltonian path from `start` (0-based) in the weight
/// matrix W (edge j -> j' weighs W(j', j)). Empty if none.
std::vector<int> best_hamiltonian_path(const Eigen::MatrixXd& W, int start,
                                       double* bottleneck = nullptr);

struct FocusingReport {
  int N = 0;
  int M = 1;
  int T = 0;
  int H = 0;
  SpaceNorm space = SpaceNorm::C();
  /// K_j = exp(−∫_0^T |a_jj|), per component j.
  std::vector<double> K;
  double k_delta = 0.0;
  double kappa = 0.0;
  double log_kappa = 0.0;
  /// c(θ_{j+1} ω), d(θ_{j+1} ω) for j = 0..T-2.
  std::vector<double> c;
  std::vector<double> d;
  /// c(ω), d(ω) of the first unit cell.
  double c0 = 1.0;
  double d0 = 0.0;
  IrreducibilityReport irreducibility;
};

/// c(ω) = sup over grid pairs 0 <= t1 <= t2 <= 1 of ‖U⁰(t2 − t1)‖, starting
/// at driver time t0.
double unit_cell_c(const Semiflow& flow, double t0 = 0.0);

/// d(ω) for the given space: (∫_0^1 b^q)^{1/q} for Lp, ess sup b for L1hat,
/// ∫_0^1 b for C and AC.
double unit_cell_d(const Driver& omega, const SpaceNorm& space, double t0 = 0.0,
                   int per_unit = 256);

/// κ = k_δ⁻¹ 3^{T−1} ∏_{j=0}^{T−2} c_j (1 + d_j), returned as its logarithm.
double log_kappa_from(double k_delta, const std::vector<double>& c,
                      const std::vector<double>& d, int T);

/// Focusing constants of the system along `flow`'s driver. Throws
/// ContractViolation if irreducibility fails.
FocusingReport focusing_constants(const Semiflow& flow, int M,
                                  const SpaceNorm& space);

enum class DichotomyOutcome { Dies, StrictlyPositive };

struct DichotomyResult {
  DichotomyOutcome outcome = DichotomyOutcome::Dies;
  /// Smallest component of z on [T − 1, T] (StrictlyPositive only).
  double margin = 0.0;
  /// norm(U(T) u) / norm(u).
  double relative_norm = 0.0;
};

/// Evolves u >= 0 to time T and classifies it. Throws ContractViolation for
/// an outcome that is neither (nonzero but not strictly positive).
DichotomyResult dichotomy_test(const Semiflow& flow, const Segment& u, int T,
                               const SpaceNorm& space);
DichotomyResult dichotomy_test(const Semiflow& flow, const Segment& u,
                               const FocusingReport& report);

struct SandwichResult {
  bool ok = false;
  /// β̃ (C, AC) or β of the product-space form.
  double beta = 0.0;
  /// ‖U(1)u‖_C k_δ: the componentwise lower level of both forms.
  double lower = 0.0;
  double upper = 0.0;
  double min_component = 0.0;
  double max_component = 0.0;
};

/// β e <= U(T) u <= κ β e at every grid node (head included).
/// Requires U(T) u != 0.
SandwichResult focusing_sandwich_check(const Semiflow& flow, const Segment& u,
                                       const FocusingReport& report);

/// The unit vector e of the focusing inequality: (1/(2√N))(𝟙, 𝟙) in the
/// product spaces, the constant function 𝟙 otherwise.
Segment focusing_unit_vector(int n, int m, const SpaceNorm& space);

struct BirkhoffBound {
  double bound = 0.0;
  std::vector<double> log_beta;
};

/// (1/(nT)) Σ_{k<n} ln β(θ_{kT} ω, e), recomputing k_δ at each shifted
/// fiber. Throws ContractViolation if some β <= 0.
BirkhoffBound birkhoff_beta_lowerbound(const Semiflow& flow, int n,
                                       const FocusingReport& report);

}  // namespace floquet_sep
