#include "floquet_sep/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/QR>

#include "floquet_sep/errors.hpp"

namespace floquet_sep {

namespace {

struct WeightedQR {
  Eigen::MatrixXd Q;
  Eigen::VectorXd rdiag;
};

// QR in the grid inner product: columns of Q are orthonormal w.r.t. the
// trapezoid weights, R has a nonnegative diagonal.
WeightedQR weighted_qr(const Eigen::MatrixXd& x, const Eigen::VectorXd& sqrt_w) {
  const auto f = x.rows();
  const auto k = x.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sqrt_w.asDiagonal() * x);
  Eigen::MatrixXd qy = qr.householderQ() * Eigen::MatrixXd::Identity(f, k);
  WeightedQR out;
  out.rdiag.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double r = qr.matrixQR()(i, i);
    if (r < 0.0) qy.col(i) = -qy.col(i);
    out.rdiag(i) = std::abs(r);
  }
  out.Q = sqrt_w.cwiseInverse().asDiagonal() * qy;
  return out;
}

double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& w) {
  return (a.array() * b.array() * w.array()).sum();
}

double weighted_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& w) {
  return std::sqrt(weighted_dot(a, a, w));
}

Eigen::MatrixXd random_frame(int n, int m, int k, std::uint64_t seed, bool product) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto f = static_cast<Eigen::Index>(n) * (m + 2);
  Eigen::MatrixXd x(f, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < f; ++r) x(r, c) = unif(rng);
    if (!product) x.col(c).head(n) = x.col(c).segment(static_cast<Eigen::Index>(n) * (1 + m), n);
  }
  return x;
}

std::int64_t step_count(double horizon, double step, const char* what) {
  if (!(step > 0.0)) throw InvalidArgument(std::string(what) + ": step must be > 0");
  const double r = horizon / step;
  const auto k = static_cast<std::int64_t>(std::llround(r));
  if (std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r) || k < 1) {
    throw InvalidArgument(std::string(what) + ": horizon " + std::to_string(horizon) +
                          " is not a positive multiple of " + std::to_string(step));
  }
  return k;
}

}  // namespace

LyapunovEstimate top_lyapunov(const Semiflow& flow, const Segment& u0,
                              double horizon, double renorm,
                              const SpaceNorm& space) {
  const auto ticks = flow.ticks_of(renorm);
  if (ticks < 1) throw InvalidArgument("top_lyapunov: renorm must be >= 1/m");
  const auto steps = step_count(horizon, renorm, "top_lyapunov");
  if (steps < 2) throw InvalidArgument("top_lyapunov: need at least 2 steps");
  const int n = flow.dim(), m = flow.resolution();
  const double n0 = norm(u0, space);
  if (!(n0 > 0.0)) throw KernelVector("top_lyapunov: u0 is zero");
  Eigen::MatrixXd x = u0.flat() / n0;
  LyapunovEstimate est;
  std::vector<double> inc;
  inc.reserve(static_cast<std::size_t>(steps));
  double sum = 0.0;
  for (std::int64_t s = 0; s < steps; ++s) {
    flow.advance(x, s * ticks, ticks);
    const double nrm = norm(Segment(n, m, Eigen::VectorXd(x.col(0))), space);
    if (!std::isfinite(nrm)) throw IntegrationFailure("top_lyapunov: non-finite norm");
    if (!(nrm > 1e-12)) {
      throw KernelVector("top_lyapunov: u0 dies (norm below 1e-12 at t = " +
                         std::to_string(static_cast<double>(s + 1) * renorm) + ")");
    }
    x /= nrm;
    inc.push_back(std::log(nrm));
    sum += inc.back();
    est.t.push_back(static_cast<double>(s + 1) * renorm);
    est.running.push_back(sum / est.t.back());
  }
  std::vector<double> tail(inc.begin() + static_cast<std::ptrdiff_t>(steps / 2), inc.end());
  est.lambda1 = mean(tail) / renorm;
  est.stderr_ = batch_means_stderr(tail) / renorm;
  return est;
}

FloquetEstimate pullback_floquet(const Semiflow& flow, double t_back,
                                 const Segment& u0, const SpaceNorm& space,
                                 const PullbackOptions& opts) {
  flow.ticks_of(opts.step);
  const auto K = step_count(t_back, opts.step, "pullback_floquet");
  if (K < 3) throw InvalidArgument("pullback_floquet: ladder needs at least 3 rungs");
  const double n0 = norm(u0, space);
  if (!(n0 > 0.0)) throw KernelVector("pullback_floquet: u0 is zero");

  std::vector<Segment> v;
  std::vector<double> t, log_norm;
  for (std::int64_t k = 1; k <= K; ++k) {
    const double tk = static_cast<double>(k) * opts.step;
    Segment s = flow.apply_from(-tk, tk, u0);
    const double nrm = norm(s, space);
    if (!(nrm > 1e-12 * n0)) {
      throw KernelVector("pullback_floquet: u0 dies on the fiber at -" + std::to_string(tk));
    }
    s *= 1.0 / nrm;
    v.push_back(std::move(s));
    t.push_back(tk);
    log_norm.push_back(std::log(nrm / n0));
  }
  FloquetEstimate est;
  est.w = v.back();
  est.residual = norm(v.back() - v[v.size() - 2], space);
  est.t = t;
  for (const auto& vk : v) {
    const double d = norm(vk - est.w, space);
    est.log_dist.push_back(d > 0.0 ? std::log(d) : kMinusInfinity);
  }

  // σ: tail above the final-error floor
  const double floor = 100.0 * std::max(est.residual, 1e-14);
  std::vector<double> fx, fy;
  int first = -1, last = -1;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (t[i] < opts.fit_from) continue;
    if (!(std::exp(est.log_dist[i]) >= floor)) break;
    if (first < 0) first = static_cast<int>(i);
    last = static_cast<int>(i) + 1;
    fx.push_back(t[i]);
    fy.push_back(est.log_dist[i]);
  }
  if (fx.size() >= 2) {
    const auto fit = linear_fit(fx, fy);
    est.sigma_forward = -fit.slope;
    est.sigma_r2 = fit.r2;
    est.fit_begin = first;
    est.fit_end = last;
  } else {
    est.sigma_forward = std::numeric_limits<double>::quiet_NaN();
  }

  // growth: slope of ln‖U_{θ_{-t}ω}(t) u0‖ from fit_from on
  std::vector<double> gx, gy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= opts.fit_from) {
      gx.push_back(t[i]);
      gy.push_back(log_norm[i]);
    }
  }
  if (gx.size() >= 3) {
    const auto fit = linear_fit(gx, gy);
    est.lambda1 = fit.slope;
    const double mx = mean(gx);
    double sxx = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      sxx += (gx[i] - mx) * (gx[i] - mx);
      const double r = gy[i] - fit.intercept - fit.slope * gx[i];
      sse += r * r;
    }
    est.lambda1_stderr = std::sqrt(sse / static_cast<double>(gx.size() - 2) / sxx);
  }

  if (!(est.residual <= opts.tolerance)) {
    throw NotConverged("pullback_floquet: residual " + std::to_string(est.residual) +
                       " above tolerance " + std::to_string(opts.tolerance) +
                       " at t_back = " + std::to_string(t_back) +
                       "; fitted sigma = " + std::to_string(est.sigma_forward));
  }
  return est;
}

double volume_columns(const Eigen::MatrixXd& x, const Eigen::VectorXd& weights) {
  const auto l = x.cols();
  if (l == 0) return 1.0;
  std::vector<Eigen::VectorXd> basis;
  double vol = 1.0;
  for (Eigen::Index i = l - 1; i >= 0; --i) {
    Eigen::VectorXd r = x.col(i);
    // twice is enough for modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) r -= weighted_dot(r, q, weights) * q;
    }
    const double d = weighted_norm(r, weights);
    vol *= d;
    if (!(d > 0.0)) return 0.0;
    basis.push_back(r / d);
  }
  return vol;
}

double volume(const std::vector<Segment>& v) {
  if (v.empty()) return 1.0;
  const int n = v.front().dim(), m = v.front().resolution();
  Eigen::MatrixXd x(v.front().flat_size(), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].dim() != n || v[i].resolution() != m) {
      throw InvalidArgument("volume: segment shape mismatch");
    }
    x.col(static_cast<Eigen::Index>(i)) = v[i].flat();
  }
  return volume_columns(x, grid_weights(n, m));
}

VolumeEstimate volume_growth_exponents(const Semiflow& flow, int k, double horizon,
                                       const SpaceNorm& space, double renorm,
                                       std::uint64_t seed, double T_scale) {
  if (k < 1 || k > 6) throw ResourceLimit("volume_growth_exponents: k must be in 1..6");
  if (horizon < 50.0 * T_scale) {
    throw InvalidArgument("volume_growth_exponents: horizon must be >= 50 T");
  }
  const int n = flow.dim(), m = flow.resolution();
  const Eigen::VectorXd w = grid_weights(n, m);
  const Eigen::VectorXd sw = w.cwiseSqrt();

  auto attempt = [&](double dt, VolumeEstimate& out) -> bool {
    const auto ticks = flow.ticks_of(dt);
    const auto steps = step_count(horizon, dt, "volume_growth_exponents");
    Eigen::MatrixXd q =
        weighted_qr(random_frame(n, m, k, seed, space.is_product_space()), sw).Q;
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    std::int64_t used = 0;
    for (std::int64_t s = 0; s < steps; ++s) {
      flow.advance(q, s * ticks, ticks);
      std::vector<double> lv(static_cast<std::size_t>(k));
      for (int j = 1; j <= k; ++j) {
        const double vol = volume_columns(q.leftCols(j), w);
        if (!(vol > 0.0) || !std::isfinite(vol)) return false;
        lv[static_cast<std::size_t>(j - 1)] = std::log(vol);
      }
      if (s >= steps / 2) {
        ++used;
        for (int j = 0; j < k; ++j) sums[static_cast<std::size_t>(j)] += lv[static_cast<std::size_t>(j)];
      }
      q = weighted_qr(q, sw).Q;
    }
    out.partial.clear();
    out.exponents.clear();
    for (int j = 0; j < k; ++j) {
      out.partial.push_back(sums[static_cast<std::size_t>(j)] / (static_cast<double>(used) * dt));
      out.exponents.push_back(j == 0 ? out.partial[0]
                                     : out.partial[static_cast<std::size_t>(j)] -
                                           out.partial[static_cast<std::size_t>(j) - 1]);
    }
    out.renorm_used = dt;
    return true;
  };

  VolumeEstimate est;
  if (attempt(renorm, est)) return est;
  if (attempt(0.5 * renorm, est)) return est;
  throw NotConverged("volume_growth_exponents: volume collapsed even at renorm " +
                     std::to_string(0.5 * renorm));
}

double second_exponent(const std::vector<double>& lambdas, double resolution) {
  if (lambdas.empty()) return kMinusInfinity;
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (lambdas[i] < lambdas[0] - resolution) return lambdas[i];
  }
  return kMinusInfinity;
}

OseledetsEstimate oseledets_split(const Semiflow& flow, double T_op, double horizon,
                                  const SpaceNorm& space, const OseledetsOptions& opts) {
  const auto f = flow.flat_size();
  if (f > opts.cap) {
    throw ResourceLimit("oseledets_split: operator size " + std::to_string(f) +
                        " exceeds cap " + std::to_string(opts.cap));
  }
  if (T_op < 1.0) throw InvalidArgument("oseledets_split: T_op must be >= 1");
  const auto ticks = flow.ticks_of(T_op);
  const auto steps = step_count(horizon, T_op, "oseledets_split");
  if (opts.k < 1 || opts.k > f) throw InvalidArgument("oseledets_split: bad k");
  const int n = flow.dim(), m = flow.resolution();
  const Eigen::VectorXd w = grid_weights(n, m);
  const Eigen::VectorXd sw = w.cwiseSqrt();

  OseledetsEstimate est;
  est.resolution = opts.resolution;
  Eigen::MatrixXd q =
      weighted_qr(random_frame(n, m, opts.k, opts.seed, space.is_product_space()), sw).Q;
  Eigen::MatrixXd lead(f, steps + 1);
  auto orient = [](Eigen::MatrixXd& frame) {
    if (frame.col(0).sum() < 0.0) frame.col(0) = -frame.col(0);
  };
  orient(q);
  lead.col(0) = q.col(0);
  std::vector<double> sums(static_cast<std::size_t>(opts.k), 0.0);
  std::int64_t used = 0;
  for (std::int64_t s = 0; s < steps; ++s) {
    flow.advance(q, s * ticks, ticks);
    auto qr = weighted_qr(q, sw);
    if (!qr.rdiag.allFinite()) throw NotConverged("oseledets_split: QR breakdown");
    q = std::move(qr.Q);
    orient(q);
    lead.col(s + 1) = q.col(0);
    if (s >= steps / 2) {
      ++used;
      for (int j = 0; j < opts.k; ++j) {
        sums[static_cast<std::size_t>(j)] += std::log(qr.rdiag(j));
      }
    }
  }
  for (double s : sums) est.lambdas.push_back(s / (static_cast<double>(used) * T_op));
  est.Q = q;
  est.leading_dim = 0;
  for (double l : est.lambdas) {
    if (std::abs(l - est.lambdas[0]) <= opts.resolution) ++est.leading_dim;
  }

  // adjoint pass: ψ_s ∝ U_{θ_{sT}ω}(T)* ψ_{s+1}, adjoint in the grid inner product
  const double transient = std::min(opts.transient, horizon / 4.0);
  const auto skip = static_cast<std::int64_t>(std::ceil(transient / T_op - 1e-9));
  Eigen::VectorXd psi = Eigen::VectorXd::Ones(f);
  psi /= weighted_norm(psi, w);
  std::vector<std::pair<double, double>> series;
  for (std::int64_t s = steps - 1; s >= 0; --s) {
    const Eigen::MatrixXd M = flow.discretize_from(static_cast<double>(s) * T_op, T_op, opts.cap);
    Eigen::VectorXd next = (M.transpose() * w.asDiagonal() * psi).cwiseQuotient(w);
    const double nn = weighted_norm(next, w);
    if (!(nn > 0.0) || !std::isfinite(nn)) {
      throw NotConverged("oseledets_split: adjoint iterate vanished");
    }
    psi = next / nn;
    if (psi.sum() < 0.0) psi = -psi;
    if (s >= skip && s <= steps - skip) {
      const Eigen::VectorXd lw = lead.col(s);
      const double c = std::abs(weighted_dot(lw, psi, w)) / weighted_norm(lw, w);
      series.emplace_back(static_cast<double>(s) * T_op, 1.0 / c);
      if (s == skip) {
        est.window_start = static_cast<double>(s) * T_op;
        est.w_start = Segment(n, m, lw / weighted_norm(lw, w));
        est.adjoint_start = Segment(n, m, psi);
      }
    }
  }
  std::reverse(series.begin(), series.end());
  for (const auto& [t, p] : series) {
    est.proj_t.push_back(t);
    est.proj_norms.push_back(p);
  }

  // leading direction against an independent pullback at the final fiber
  const Semiflow final_fiber = flow.shifted(static_cast<double>(steps) * T_op);
  const Segment ones = Segment::constant(Eigen::VectorXd::Ones(n), m);
  PullbackOptions po;
  po.tolerance = 1e-6;
  const double tb = std::max(3.0, std::floor(std::min(horizon / 2.0, 60.0)));
  const auto pb = pullback_floquet(final_fiber, tb, ones, space, po);
  const Eigen::VectorXd a = pb.w.flat() / weighted_norm(pb.w.flat(), w);
  const Eigen::VectorXd b = q.col(0);
  const double along = weighted_dot(a, b, w);
  est.E1_angle_to_w = std::atan2(weighted_norm(a - along * b, w), std::abs(along));
  return est;
}

TemperednessResult temperedness_diagnostic(const std::vector<double>& t,
                                           const std::vector<double>& proj_norms,
                                           double T, double tol) {
  if (t.size() != proj_norms.size()) {
    throw InvalidArgument("temperedness_diagnostic: size mismatch");
  }
  if (t.size() < 20) {
    throw InvalidArgument("temperedness_diagnostic: need at least 20 samples, got " +
                          std::to_string(t.size()));
  }
  if (t.back() - t.front() < 10.0 * T) {
    throw InvalidArgument("temperedness_diagnostic: samples must span at least 10 T");
  }
  std::vector<double> y;
  y.reserve(proj_norms.size());
  for (double p : proj_norms) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("temperedness_diagnostic: projection norms must be positive");
    }
    y.push_back(std::log(p));
  }
  const auto fit = linear_fit(t, y);
  return {fit.slope, fit.r2, std::abs(fit.slope) <= tol};
}

Segment random_cone_segment(int n, int m, std::uint64_t seed, bool product) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Segment u(n, m);
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i < n; ++i) u.node(j)(i) = unif(rng);
  }
  if (product) {
    for (int i = 0; i < n; ++i) u.head()(i) = unif(rng);
  } else {
    u.head() = u.node(m);
  }
  return u;
}

SeparationReport separation_report(const Semiflow& flow, const SeparationConfig& cfg) {
  const int n = flow.dim(), m = flow.resolution();
  const int T = cfg.T > 0 ? cfg.T : n + (n - 1) * cfg.M + 1;
  SeparationReport rep;
  rep.space = cfg.space;
  const Segment u0 = Segment::constant(Eigen::VectorXd::Ones(n), m);

  rep.forward = top_lyapunov(flow, u0, cfg.horizon, cfg.renorm, cfg.space);
  rep.lambda1 = rep.forward.lambda1;
  rep.lambda1_stderr = rep.forward.stderr_;

  PullbackOptions po;
  po.fit_from = T;
  rep.floquet = pullback_floquet(flow, cfg.t_back, u0, cfg.space, po);
  rep.lambda1_pullback = rep.floquet.lambda1;
  rep.lambda1_pullback_stderr = rep.floquet.lambda1_stderr;
  rep.sigma_fit = rep.floquet.sigma_forward;

  const double joint = std::sqrt(rep.lambda1_stderr * rep.lambda1_stderr +
                                 rep.lambda1_pullback_stderr * rep.lambda1_pullback_stderr);
  const double l1_tol = std::max(3.0 * joint, 1e-3);
  if (std::abs(rep.lambda1 - rep.lambda1_pullback) > l1_tol) {
    rep.inconsistencies.push_back(
        "lambda1: forward " + std::to_string(rep.lambda1) + " vs pullback growth " +
        std::to_string(rep.lambda1_pullback) + " differ by more than " +
        std::to_string(l1_tol));
  }

  const auto vol = volume_growth_exponents(flow, cfg.k, cfg.horizon, cfg.space,
                                           cfg.renorm, cfg.seed, T);
  rep.exponents_volume = vol.exponents;
  OseledetsOptions oo;
  oo.k = cfg.k;
  oo.resolution = cfg.resolution;
  oo.transient = cfg.transient;
  oo.seed = cfg.seed;
  const auto ose = oseledets_split(flow, cfg.T_op, cfg.horizon, cfg.space, oo);
  rep.exponents_qr = ose.lambdas;
  rep.leading_dim = ose.leading_dim;
  rep.E1_angle_to_w = ose.E1_angle_to_w;
  rep.proj_t = ose.proj_t;
  rep.proj_norms = ose.proj_norms;

  rep.lambda2_volume = second_exponent(vol.exponents, cfg.resolution);
  rep.lambda2_qr = second_exponent(ose.lambdas, cfg.resolution);
  rep.lambda2 = rep.lambda2_qr;
  const bool both_finite = std::isfinite(rep.lambda2_volume) && std::isfinite(rep.lambda2_qr);
  if (both_finite && std::abs(rep.lambda2_volume - rep.lambda2_qr) > cfg.lambda2_tol) {
    rep.inconsistencies.push_back(
        "lambda2: volume " + std::to_string(rep.lambda2_volume) + " vs QR " +
        std::to_string(rep.lambda2_qr) + " differ by more than " +
        std::to_string(cfg.lambda2_tol));
  } else if (std::isfinite(rep.lambda2_volume) != std::isfinite(rep.lambda2_qr)) {
    rep.inconsistencies.push_back("lambda2: only one estimator resolved a second exponent");
  }
  if (rep.leading_dim != 1) {
    rep.inconsistencies.push_back("leading Oseledets dimension is " +
                                  std::to_string(rep.leading_dim) + ", expected 1");
  }
  if (std::isfinite(rep.lambda2)) {
    rep.sigma = rep.lambda1 - rep.lambda2;
    if (!(rep.lambda2 <= rep.lambda1 - 1e-3)) {
      rep.inconsistencies.push_back("lambda2 is not below lambda1 - 1e-3");
    }
  } else {
    rep.sigma = std::numeric_limits<double>::infinity();
    rep.sigma_infinite = true;
  }

  rep.tempered = temperedness_diagnostic(rep.proj_t, rep.proj_norms, T, cfg.tempered_tol);

  // kernel census at the first fiber of the projection window
  const Semiflow fiber = flow.shifted(ose.window_start);
  const Eigen::VectorXd w = grid_weights(n, m);
  const Eigen::VectorXd& psi = ose.adjoint_start.flat();
  const bool product = cfg.space.is_product_space();
  for (int i = 0; i < cfg.census; ++i) {
    Segment u = random_cone_segment(n, m, cfg.seed * 7919ULL + static_cast<std::uint64_t>(i),
                                    product);
    // half of the product-space samples carry no head, the natural kernel candidates
    if (product && i % 2 == 1) u.head().setZero();
    ++rep.census_tested;
    const double un = weighted_norm(u.flat(), w);
    const bool member = std::abs(weighted_dot(u.flat(), psi, w)) <= 1e-10 * un;
    const Segment img = fiber.apply(1.0, u, cfg.space);
    const bool dies = norm(img, cfg.space) <= 1e-12 * norm(u, cfg.space);
    if (member) ++rep.census_members;
    if (member && dies) ++rep.kernel_dim_witness;
    if (member != dies) ++rep.census_violations;
  }
  if (rep.census_violations > 0) {
    rep.inconsistencies.push_back(std::to_string(rep.census_violations) +
                                  " cone vectors disagree between F1 membership and U(1)u = 0");
  }
  return rep;
}

CrossSpaceTable cross_space_compare(const Semiflow& flow,
                                    const std::vector<SpaceNorm>& spaces,
                                    double horizon, double t_back,
                                    const std::optional<Segment>& start) {
  const int n = flow.dim(), m = flow.resolution();
  const Segment u0 = start ? *start : Segment::constant(Eigen::VectorXd::Ones(n), m);
  CrossSpaceTable table;
  for (const auto& sp : spaces) {
    CrossSpaceRow row;
    row.space = sp;
    try {
      const auto est = top_lyapunov(flow, u0, horizon, 1.0, sp);
      row.lambda1 = est.lambda1;
      row.stderr_ = est.stderr_;
      PullbackOptions po;
      po.tolerance = 1e-6;
      po.fit_from = std::min(t_back / 2.0, static_cast<double>(n + n));
      row.lambda1_pullback = pullback_floquet(flow, t_back, u0, sp, po).lambda1;
    } catch (const KernelVector&) {
      row.dies = true;
      row.lambda1 = kMinusInfinity;
      row.lambda1_pullback = kMinusInfinity;
    }
    table.rows.push_back(row);
  }
  const auto k = table.rows.size();
  table.deviation.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      double d = 0.0;
      if (a.dies != b.dies) {
        d = std::numeric_limits<double>::infinity();
      } else if (!a.dies) {
        d = std::abs(a.lambda1 - b.lambda1);
      }
      table.deviation[i][j] = d;
      table.max_deviation = std::max(table.max_deviation, d);
    }
  }
  return table;
}

}  // namespace floquet_sep
