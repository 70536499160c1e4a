#include "floquet_sep/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "floquet_sep/cli/config.hpp"
#include "floquet_sep/cone.hpp"
#include "floquet_sep/errors.hpp"
#include "floquet_sep/oracle.hpp"
#include "floquet_sep/segment_io.hpp"
#include "floquet_sep/spectrum.hpp"

namespace floquet_sep::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::string space;
  bool quiet = false;
};

// JSON cannot hold ±inf/nan; they are spelled out as strings
json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json quantity(const json& value, const std::string& estimator, const json& tolerance) {
  return json{{"value", value}, {"estimator", estimator}, {"tolerance", tolerance}};
}

json quantity(double value, const std::string& estimator, const json& tolerance) {
  return quantity(number_json(value), estimator, tolerance);
}

json count(int value) { return quantity(json(value), "count", "exact"); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) {
    fs::create_directories(dir_);
  }

  void json_file(const std::string& name, const json& doc) const {
    if (!cfg_.wants("json")) return;
    std::ofstream os(dir_ / name, std::ios::binary);
    os << doc.dump(2) << '\n';
    check(os, name);
  }

  // header plus rows; every cell is formatted with 17 significant digits
  void csv_file(const std::string& name, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) const {
    if (!cfg_.wants("csv")) return;
    std::ofstream os(dir_ / name, std::ios::binary);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
      os << '\n';
    }
    check(os, name);
  }

  void segment_file(const std::string& name, const Segment& s) const {
    if (!cfg_.wants("csv")) return;
    std::ofstream os(dir_ / name, std::ios::binary);
    write_segment_csv(os, s);
    check(os, name);
  }

 private:
  void check(const std::ostream& os, const std::string& name) const {
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
  }
  const RunConfig& cfg_;
  fs::path dir_;
};

std::vector<std::string> z_header(const char* first, int n, const char* prefix = "z_") {
  std::vector<std::string> h = {first};
  for (int i = 1; i <= n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

json config_echo(const RunConfig& cfg, std::uint64_t seed) {
  return json{{"N", cfg.N},          {"driver", cfg.driver.kind}, {"space", cfg.space.name()},
              {"m", cfg.m},          {"M", cfg.M},                {"T", cfg.T()},
              {"horizon", cfg.horizon}, {"seed", seed}};
}

std::string discretization_note(const RunConfig& cfg) {
  return "O(m^-2) discretization, m = " + std::to_string(cfg.m);
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto seed = cfg.seeds.front();
  const Semiflow flow(cfg.make_driver(seed), cfg.m);
  const Segment u0 = cfg.make_initial(seed);
  const auto tr = flow.trajectory(u0, cfg.horizon);
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.t_grid.size());
  for (std::size_t i = 0; i < tr.t_grid.size(); ++i) {
    std::vector<double> r = {tr.t_grid[i]};
    for (int c = 0; c < cfg.N; ++c) r.push_back(tr.z(c, static_cast<Eigen::Index>(i)));
    rows.push_back(std::move(r));
  }
  Writer w(cfg);
  w.csv_file("trajectory.csv", z_header("t", cfg.N), rows);
  const Segment last = tr.seg_at(cfg.horizon);
  const double n0 = norm(u0, cfg.space);
  const double nT = norm(last, cfg.space);
  json summary = {
      {"subcommand", "simulate"},
      {"config", config_echo(cfg, seed)},
      {"initial_norm", quantity(n0, "space norm of z_0", "exact")},
      {"final_norm", quantity(nT, "space norm of z_T", discretization_note(cfg))},
      {"mean_growth", quantity(std::log(nT / n0) / cfg.horizon, "ln(|z_T|/|z_0|)/T", discretization_note(cfg))},
  };
  w.json_file("summary.json", summary);
  w.segment_file("final_segment.csv", last);
  if (!opt.quiet) {
    out << "simulate: " << rows.size() << " samples, |z_T| = " << format_double(nT) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------- verify-assumptions

json irreducibility_json(const IrreducibilityReport& r) {
  json paths = json::array();
  for (const auto& per_start : r.paths) paths.push_back(per_start);
  json bottleneck = json::array();
  for (const auto& b : r.bottleneck) bottleneck.push_back(numbers(b));
  const std::string integral = "grid integral of a_ij + b_ij over the window";
  return json{{"satisfied", r.satisfied},
              {"M", r.M},
              {"window_times", numbers(r.window_times)},
              {"paths", paths},
              {"bottleneck", quantity(bottleneck, "smallest edge weight on the path; " + integral, "1/256 quadrature")},
              {"delta_values", quantity(numbers(r.delta_values), "min(1, bottleneck)", "1/256 quadrature")},
              {"failing_start", r.failing_start},
              {"failing_window", r.failing_window}};
}

int cmd_verify(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto seed = cfg.seeds.front();
  const Semiflow flow(cfg.make_driver(seed), cfg.m);
  json report = {{"subcommand", "verify-assumptions"}, {"config", config_echo(cfg, seed)}};
  bool ok = true;

  const auto coop = check_cooperativity(flow.driver(), cfg.horizon);
  json cj = {{"satisfied", coop.ok}, {"horizon", cfg.horizon}};
  if (coop.first_violation) {
    const auto& v = *coop.first_violation;
    cj["first_violation"] = {{"matrix", std::string(1, v.matrix)}, {"row", v.row}, {"col", v.col},
                             {"t", v.t}, {"value", v.value}};
  }
  report["cooperativity"] = cj;
  ok = ok && coop.ok;

  const auto irr = check_irreducibility(flow.driver(), cfg.M);
  report["irreducibility"] = irreducibility_json(irr);
  ok = ok && irr.satisfied;

  std::vector<std::vector<double>> rows;
  if (ok) {
    const auto rep = focusing_constants(flow, cfg.M, cfg.space);
    report["focusing"] = {
        {"T", rep.T},
        {"H", rep.H},
        {"K", quantity(numbers(rep.K), "exp(-integral of |a_jj| over [0, T])", "exact on switching cells")},
        {"k_delta", quantity(rep.k_delta, "product of K_j and window deltas", "exact on switching cells")},
        {"kappa", quantity(rep.kappa, "closed-form product over unit cells", "exact on switching cells")},
        {"log_kappa", quantity(rep.log_kappa, "logarithm of kappa", "exact on switching cells")},
        {"c", quantity(numbers(rep.c), "sup of the delay-free solution operator norm over grid pairs", "grid sup")},
        {"d", quantity(numbers(rep.d), "norm of b over the unit cell", "1/256 quadrature")},
    };
    json table = json::array();
    int third = 0, failed = 0, died = 0;
    const int tested = std::max(cfg.census / 10, 10);
    for (int i = 0; i < tested; ++i) {
      const Segment u = i == 0 ? cfg.make_initial(seed)
                               : random_cone_segment(cfg.N, cfg.m, seed * 104729ULL + static_cast<std::uint64_t>(i),
                                                     cfg.space.is_product_space());
      json row = {{"index", i}};
      try {
        const auto d = dichotomy_test(flow, u, rep);
        if (d.outcome == DichotomyOutcome::Dies) {
          ++died;
          row["outcome"] = "dies";
          rows.push_back({static_cast<double>(i), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
        } else {
          const auto s = focusing_sandwich_check(flow, u, rep);
          row["outcome"] = "strictly_positive";
          row["margin"] = quantity(d.margin, "min component on [T - 1, T]", "> 0");
          row["beta"] = quantity(s.beta, "focusing level", "exact");
          row["lower"] = quantity(s.lower, "beta e", "1e-12 relative");
          row["upper"] = quantity(s.upper, "kappa beta e", "1e-12 relative");
          row["min_component"] = quantity(s.min_component, "min over grid of U(T)u", "exact");
          row["max_component"] = quantity(s.max_component, "max over grid of U(T)u", "exact");
          row["sandwich_ok"] = s.ok;
          if (!s.ok) ++failed;
          rows.push_back({static_cast<double>(i), 1.0, s.beta, s.lower, s.upper, s.min_component,
                          s.max_component});
        }
      } catch (const ContractViolation& e) {
        ++third;
        row["outcome"] = "violation";
        row["message"] = e.what();
      }
      table.push_back(row);
    }
    report["sandwich"] = table;
    report["sandwich_summary"] = {
        {"tested", count(tested)}, {"died", count(died)}, {"failed", count(failed)},
        {"third_outcomes", count(third)}};
    ok = ok && third == 0 && failed == 0;
  }
  report["satisfied"] = ok;

  Writer w(cfg);
  w.json_file("assumptions.json", report);
  w.csv_file("sandwich.csv", {"index", "positive", "beta", "lower", "upper", "min_component", "max_component"},
             rows);
  if (!opt.quiet) out << "verify-assumptions: " << (ok ? "satisfied" : "NOT satisfied") << '\n';
  return ok ? kExitOk : kExitContract;
}

// ---------------------------------------------------------------- lyapunov

int cmd_lyapunov(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const int n_seeds = static_cast<int>(cfg.seeds.size());
  struct Result {
    bool dies = false;
    LyapunovEstimate est;
  };
  std::vector<Result> results(static_cast<std::size_t>(n_seeds));
  parallel_for(n_seeds, [&](int i) {
    const auto seed = cfg.seeds[static_cast<std::size_t>(i)];
    const Semiflow flow(cfg.make_driver(seed), cfg.m);
    auto& r = results[static_cast<std::size_t>(i)];
    try {
      r.est = top_lyapunov(flow, cfg.make_initial(seed), cfg.horizon, cfg.renorm, cfg.space);
    } catch (const KernelVector&) {
      r.dies = true;
    }
  });

  const std::string estimator = "forward renormalized growth, second-half mean";
  std::vector<std::vector<double>> rows;
  json per_seed = json::array();
  std::vector<double> finite;
  bool any_dies = false;
  for (int i = 0; i < n_seeds; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    const auto seed = static_cast<double>(cfg.seeds[static_cast<std::size_t>(i)]);
    if (r.dies) {
      any_dies = true;
      per_seed.push_back({{"seed", cfg.seeds[static_cast<std::size_t>(i)]},
                          {"lambda1", quantity(kMinusInfinity, "kernel vector sentinel", "exact")}});
      continue;
    }
    for (std::size_t k = 0; k < r.est.t.size(); ++k) rows.push_back({seed, r.est.t[k], r.est.running[k]});
    finite.push_back(r.est.lambda1);
    per_seed.push_back({{"seed", cfg.seeds[static_cast<std::size_t>(i)]},
                        {"lambda1", quantity(r.est.lambda1, estimator, 3.0 * r.est.stderr_)},
                        {"stderr", quantity(r.est.stderr_, "batch means, 10 batches", "n/a")}});
  }
  json summary = {{"subcommand", "lyapunov"}, {"config", config_echo(cfg, cfg.seeds.front())}, {"seeds", per_seed}};
  if (!finite.empty()) {
    const double mu = mean(finite);
    double spread = 0.0;
    if (finite.size() > 1) {
      for (double x : finite) spread += (x - mu) * (x - mu);
      spread = std::sqrt(spread / static_cast<double>(finite.size() - 1) / static_cast<double>(finite.size()));
    }
    summary["ensemble_lambda1"] = quantity(mu, "mean over seeds", 3.0 * spread);
  }

  int code = any_dies ? kExitContract : kExitOk;
  Writer w(cfg);
  if (!cfg.compare_spaces.empty()) {
    const Semiflow flow(cfg.make_driver(cfg.seeds.front()), cfg.m);
    const double t_back = std::min(cfg.t_back, 40.0);
    const auto tab = cross_space_compare(flow, cfg.compare_spaces, cfg.horizon, t_back,
                                         cfg.make_initial(cfg.seeds.front()));
    json rows_json = json::array();
    std::vector<std::vector<double>> crows;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
      const auto& r = tab.rows[i];
      rows_json.push_back({{"space", r.space.name()},
                           {"lambda1", quantity(r.lambda1, estimator, 3.0 * r.stderr_)},
                           {"lambda1_pullback", quantity(r.lambda1_pullback, "pullback growth slope", 1e-6)},
                           {"dies", r.dies}});
      crows.push_back({static_cast<double>(i), r.lambda1, r.stderr_, r.lambda1_pullback});
    }
    const double tol = 2e-3;
    summary["cross_space"] = {
        {"rows", rows_json},
        {"max_deviation", quantity(tab.max_deviation, "max pairwise |lambda1_i - lambda1_j|", tol)},
        {"agree", tab.max_deviation <= tol}};
    w.csv_file("cross_space.csv", {"space_index", "lambda1", "stderr", "lambda1_pullback"}, crows);
    if (!(tab.max_deviation <= tol)) code = kExitContract;
  }
  w.csv_file("lyapunov.csv", {"seed", "t", "running_lambda1"}, rows);
  w.json_file("summary.json", summary);
  if (!opt.quiet) {
    for (const auto& s : per_seed) out << "lyapunov: seed " << s["seed"] << " lambda1 = " << s["lambda1"]["value"] << '\n';
  }
  return code;
}

// ---------------------------------------------------------------- floquet

void write_floquet(const Writer& w, const FloquetEstimate& est) {
  w.segment_file("floquet_w.csv", est.w);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < est.t.size(); ++i) rows.push_back({est.t[i], est.log_dist[i]});
  w.csv_file("floquet_dist.csv", {"t", "ln_dist_to_w"}, rows);
}

json floquet_json(const FloquetEstimate& est, const RunConfig& cfg) {
  return json{
      {"lambda1", quantity(est.lambda1, "pullback growth slope", 3.0 * est.lambda1_stderr)},
      {"sigma_forward", quantity(est.sigma_forward, "-slope of ln|v_k - w| over the converged tail", "fit R^2 in sigma_fit_r2")},
      {"sigma_fit_r2", quantity(est.sigma_r2, "coefficient of determination of the sigma fit", ">= 0.9")},
      {"residual", quantity(est.residual, "|v_last - v_prev|", cfg.tol.pullback)},
      {"w_norm", quantity(norm(est.w, cfg.space), "space norm of w", 1e-10)},
      {"w_min_component", quantity(est.w.min_entry(), "min over grid", 0.0)},
      {"fit_window", {est.fit_begin, est.fit_end}},
  };
}

int cmd_floquet(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto seed = cfg.seeds.front();
  const Semiflow flow(cfg.make_driver(seed), cfg.m);
  PullbackOptions po;
  po.fit_from = cfg.T();
  po.tolerance = cfg.tol.pullback;
  const auto est = pullback_floquet(flow, cfg.t_back, cfg.make_initial(seed), cfg.space, po);
  Writer w(cfg);
  write_floquet(w, est);
  w.json_file("summary.json", json{{"subcommand", "floquet"}, {"config", config_echo(cfg, seed)},
                                   {"floquet", floquet_json(est, cfg)}});
  if (!opt.quiet) {
    out << "floquet: residual = " << format_double(est.residual)
        << ", sigma_forward = " << format_double(est.sigma_forward) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- separation

int cmd_separation(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto seed = cfg.seeds.front();
  const Semiflow flow(cfg.make_driver(seed), cfg.m);
  SeparationConfig sc;
  sc.space = cfg.space;
  sc.M = cfg.M;
  sc.horizon = cfg.horizon;
  sc.renorm = cfg.renorm;
  sc.t_back = cfg.t_back;
  sc.T_op = cfg.T_op;
  sc.k = cfg.k;
  sc.resolution = cfg.resolution;
  sc.lambda2_tol = cfg.tol.lambda2;
  sc.tempered_tol = cfg.tol.tempered;
  sc.transient = cfg.transient;
  sc.census = cfg.census;
  sc.seed = seed;
  const auto rep = separation_report(flow, sc);

  Writer w(cfg);
  std::vector<std::vector<double>> lrows;
  for (std::size_t i = 0; i < rep.forward.t.size(); ++i) lrows.push_back({rep.forward.t[i], rep.forward.running[i]});
  w.csv_file("lyapunov.csv", {"t", "running_lambda1"}, lrows);
  write_floquet(w, rep.floquet);
  std::vector<std::vector<double>> prows;
  for (std::size_t i = 0; i < rep.proj_t.size(); ++i) prows.push_back({rep.proj_t[i], std::log(rep.proj_norms[i])});
  w.csv_file("projection.csv", {"t", "ln_proj_norm"}, prows);
  std::vector<std::vector<double>> erows;
  const auto ne = std::max(rep.exponents_qr.size(), rep.exponents_volume.size());
  for (std::size_t i = 0; i < ne; ++i) {
    const double q = i < rep.exponents_qr.size() ? rep.exponents_qr[i] : std::nan("");
    const double v = i < rep.exponents_volume.size() ? rep.exponents_volume[i] : std::nan("");
    erows.push_back({static_cast<double>(i + 1), q, v});
  }
  w.csv_file("exponents.csv", {"index", "lambda_qr", "lambda_volume"}, erows);

  const double joint = std::sqrt(rep.lambda1_stderr * rep.lambda1_stderr +
                                 rep.lambda1_pullback_stderr * rep.lambda1_pullback_stderr);
  json summary = {
      {"subcommand", "separation"},
      {"config", config_echo(cfg, seed)},
      {"lambda1", quantity(rep.lambda1, "forward renormalized growth, second-half mean", 3.0 * rep.lambda1_stderr)},
      {"lambda1_pullback", quantity(rep.lambda1_pullback, "pullback growth slope", std::max(3.0 * joint, 1e-3))},
      {"lambda2", quantity(rep.lambda2, "QR on discretized operators", cfg.tol.lambda2)},
      {"lambda2_volume", quantity(rep.lambda2_volume, "volume growth", cfg.tol.lambda2)},
      {"lambda2_qr", quantity(rep.lambda2_qr, "QR on discretized operators", cfg.tol.lambda2)},
      {"sigma", rep.sigma_infinite
                    ? quantity(rep.sigma, "sigma = inf (kernel-dominated)", "n/a")
                    : quantity(rep.sigma, "lambda1 - lambda2", cfg.tol.lambda2)},
      {"sigma_fit", quantity(rep.sigma_fit, "pullback contraction fit", "fit R^2 in floquet.sigma_fit_r2")},
      {"leading_dim", quantity(json(rep.leading_dim), "exponents within resolution of lambda1", cfg.resolution)},
      {"exponents_qr", quantity(numbers(rep.exponents_qr), "QR on discretized operators", cfg.tol.lambda2)},
      {"exponents_volume", quantity(numbers(rep.exponents_volume), "volume growth", cfg.tol.lambda2)},
      {"E1_angle_to_w", quantity(rep.E1_angle_to_w, "angle between leading QR column and pullback w", 1e-6)},
      {"tempered_slope", quantity(rep.tempered.slope, "least-squares slope of ln|P| vs t", cfg.tol.tempered)},
      {"tempered", rep.tempered.pass},
      {"census", {{"tested", count(rep.census_tested)},
                  {"members", count(rep.census_members)},
                  {"kernel_dim_witness", count(rep.kernel_dim_witness)},
                  {"violations", count(rep.census_violations)}}},
      {"floquet", floquet_json(rep.floquet, cfg)},
      {"inconsistencies", rep.inconsistencies},
      {"pass", rep.pass()},
  };
  w.json_file("summary.json", summary);
  if (!opt.quiet) {
    out << "separation: lambda1 = " << format_double(rep.lambda1) << ", lambda2 = " << format_double(rep.lambda2)
        << ", sigma = " << format_double(rep.sigma) << (rep.pass() ? " (pass)" : " (FAIL)") << '\n';
    for (const auto& msg : rep.inconsistencies) out << "  inconsistency: " << msg << '\n';
  }
  return rep.pass() ? kExitOk : kExitContract;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto roots = delay_char_roots(cfg.oracle.a, cfg.oracle.b, cfg.oracle.count);
  json rj = json::array();
  for (std::size_t i = 0; i < roots.roots.size(); ++i) {
    rj.push_back({{"re", roots.roots[i].real()},
                  {"im", roots.roots[i].imag()},
                  {"residual", quantity(roots.residuals[i], "|lambda - a - b exp(-lambda)|", 1e-10)}});
  }
  json doc = {{"subcommand", "oracle"},
              {"char_roots", {{"a", cfg.oracle.a}, {"b", cfg.oracle.b}, {"complete", roots.complete}, {"roots", rj}}}};
  const auto seed = cfg.seeds.front();
  const Driver drv = cfg.make_driver(seed);
  if (cfg.driver.kind == "constant" && drv.state(0).B.isZero(0.0)) {
    try {
      const auto p = perron_oracle(drv.state(0).A);
      std::vector<double> v(p.v.data(), p.v.data() + p.v.size());
      doc["perron"] = {{"lambda", quantity(p.lambda, "power iteration on exp(A)", 1e-10)},
                       {"v", quantity(numbers(v), "positive eigenvector, unit Euclidean norm", 1e-10)},
                       {"residual", quantity(p.residual, "|A v - lambda v|", 1e-10)}};
    } catch (const ContractViolation& e) {
      doc["perron"] = {{"error", e.what()}};
    }
  }
  if (cfg.m <= 40 && cfg.N <= 3) {
    const int steps = static_cast<int>(std::lround(cfg.horizon / cfg.T_op));
    const auto ex = dense_product_oracle(drv, cfg.T_op, steps, cfg.space, cfg.m);
    std::vector<double> lead(ex.begin(), ex.begin() + std::min<std::ptrdiff_t>(6, static_cast<std::ptrdiff_t>(ex.size())));
    doc["dense_product"] = quantity(numbers(lead), "QR on dense operator products, second-half mean",
                                    "1/horizon averaging");
  }
  Writer w(cfg);
  w.json_file("oracle.json", doc);
  if (!opt.quiet) out << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("FLOQUET_SEP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential separation diagnostics for cooperative random delay systems", "floquet_sep"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"simulate", "integrate one trajectory and write it as CSV"},
      {"verify-assumptions", "check cooperativity, irreducibility and focusing"},
      {"lyapunov", "top Lyapunov exponent over the configured seeds"},
      {"floquet", "pullback estimate of the principal Floquet direction"},
      {"separation", "full exponential-separation report"},
      {"oracle", "print certified reference values"},
  };
  std::vector<std::pair<CLI::App*, CLI::Option*>> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "run configuration (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory (overrides outputs.directory)");
    auto* seed = sub->add_option("--seed-override", opt.seed, "replace the seed list with this seed");
    sub->add_option("--space", opt.space, "state space norm")->check(CLI::IsMember({"C", "Lp", "L1", "AC"}));
    sub->add_flag("--quiet", opt.quiet, "suppress the console summary");
    subs.emplace_back(sub, seed);
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = nullptr;
  CLI::Option* seed_opt = nullptr;
  for (const auto& [sub, seed] : subs) {
    if (sub->parsed()) {
      chosen = sub;
      seed_opt = seed;
    }
  }
  const std::string name = chosen->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (!opt.out.empty()) cfg.out_dir = opt.out;
    if (seed_opt->count() > 0) cfg.seeds = {opt.seed};
    if (!opt.space.empty()) {
      const double p = cfg.space.kind() == SpaceKind::Lp ? cfg.space.p() : 2.0;
      cfg.space = SpaceNorm::parse(opt.space, p);
    }
    validate(cfg);
    // exponent estimates average over at least 50 focusing periods
    if (name == "separation" && cfg.horizon < 50.0 * cfg.T()) {
      throw ConfigError("/numerics/horizon", "separation needs horizon >= 50 T = " + std::to_string(50 * cfg.T()));
    }
  } catch (const ConfigError& e) {
    err << "config error at " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (name == "simulate") return cmd_simulate(cfg, opt, out);
    if (name == "verify-assumptions") return cmd_verify(cfg, opt, out);
    if (name == "lyapunov") return cmd_lyapunov(cfg, opt, out);
    if (name == "floquet") return cmd_floquet(cfg, opt, out);
    if (name == "separation") return cmd_separation(cfg, opt, out);
    return cmd_oracle(cfg, opt, out);
  } catch (const ConfigError& e) {
    err << "config error at " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return kExitContract;
  } catch (const KernelVector& e) {
    err << "kernel vector: " << e.what() << '\n';
    return kExitContract;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace floquet_sep::cli
