#include "floquet_sep/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "floquet_sep/errors.hpp"
#include "floquet_sep/segment_io.hpp"
#include "floquet_sep/spectrum.hpp"

namespace floquet_sep::cli {

namespace {

using nlohmann::json;

std::string child(const std::string& ptr, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return ptr + "/" + escaped;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "expected an object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw ConfigError(child(ptr, key), "unknown key '" + key + "'");
  }
  return j;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "expected a finite number");
  return x;
}

long long integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  return j.get<long long>();
}

std::string string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ConfigError(ptr, "expected a string");
  return j.get<std::string>();
}

Vector vector(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], child(ptr, i));
  return v;
}

Matrix matrix(const json& j, const std::string& ptr, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError(ptr, "expected an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    const auto row = child(ptr, static_cast<std::size_t>(i));
    const json& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<int>(r.size()) != n) {
      throw ConfigError(row, "expected a row of " + std::to_string(n) + " numbers");
    }
    for (int k = 0; k < n; ++k) {
      a(i, k) = number(r[static_cast<std::size_t>(k)], child(row, static_cast<std::size_t>(k)));
    }
  }
  return a;
}

SpaceNorm space_from(const std::string& tag, double p, const std::string& ptr) {
  try {
    return SpaceNorm::parse(tag, p);
  } catch (const InvalidArgument& e) {
    throw ConfigError(ptr, e.what());
  }
}

std::vector<FourierTerm> fourier_terms(const json& j, const std::string& ptr, int n, std::size_t dim) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of Fourier terms");
  std::vector<FourierTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = child(ptr, i);
    const json& t = object(j[i], p, {"k", "cos", "sin"});
    FourierTerm term;
    if (!t.contains("k")) throw ConfigError(child(p, "k"), "missing");
    const Vector k = vector(t["k"], child(p, "k"));
    if (static_cast<std::size_t>(k.size()) != dim) {
      throw ConfigError(child(p, "k"), "needs one entry per rotation frequency");
    }
    for (Eigen::Index c = 0; c < k.size(); ++c) {
      if (k(c) != std::round(k(c))) throw ConfigError(child(p, "k"), "entries must be integers");
      term.k.push_back(static_cast<int>(k(c)));
    }
    term.cos_coeff = t.contains("cos") ? matrix(t["cos"], child(p, "cos"), n) : Matrix::Zero(n, n);
    term.sin_coeff = t.contains("sin") ? matrix(t["sin"], child(p, "sin"), n) : Matrix::Zero(n, n);
    out.push_back(std::move(term));
  }
  return out;
}

DriverSpec driver_spec(const json& j, const std::string& ptr, int n) {
  const json& d = object(j, ptr, {"kind", "A", "B", "states", "cell_length", "transition", "rotation",
                                  "a_terms", "b_terms"});
  DriverSpec spec;
  if (!d.contains("kind")) throw ConfigError(child(ptr, "kind"), "missing");
  spec.kind = string(d["kind"], child(ptr, "kind"));
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
      if (d.contains(key)) {
        throw ConfigError(child(ptr, key), std::string("not used by driver kind '") + spec.kind + "'");
      }
    }
  };
  if (spec.kind == "constant") {
    forbid({"states", "cell_length", "transition", "rotation", "a_terms", "b_terms"});
    for (const char* key : {"A", "B"}) {
      if (!d.contains(key)) throw ConfigError(child(ptr, key), "missing");
    }
    spec.states.push_back({matrix(d["A"], child(ptr, "A"), n), matrix(d["B"], child(ptr, "B"), n)});
  } else if (spec.kind == "iid" || spec.kind == "markov") {
    forbid({"A", "B", "rotation", "a_terms", "b_terms"});
    if (spec.kind == "iid") forbid({"transition"});
    const auto sp = child(ptr, "states");
    if (!d.contains("states") || !d["states"].is_array() || d["states"].empty()) {
      throw ConfigError(sp, "expected a non-empty array of {A, B} states");
    }
    for (std::size_t i = 0; i < d["states"].size(); ++i) {
      const auto p = child(sp, i);
      const json& s = object(d["states"][i], p, {"A", "B"});
      for (const char* key : {"A", "B"}) {
        if (!s.contains(key)) throw ConfigError(child(p, key), "missing");
      }
      spec.states.push_back({matrix(s["A"], child(p, "A"), n), matrix(s["B"], child(p, "B"), n)});
    }
    if (d.contains("cell_length")) {
      spec.cell_length = number(d["cell_length"], child(ptr, "cell_length"));
      if (!(spec.cell_length > 0.0)) throw ConfigError(child(ptr, "cell_length"), "must be > 0");
    }
    if (spec.kind == "markov") {
      if (!d.contains("transition")) throw ConfigError(child(ptr, "transition"), "missing");
      spec.transition =
          matrix(d["transition"], child(ptr, "transition"), static_cast<int>(spec.states.size()));
    }
  } else if (spec.kind == "quasiperiodic") {
    forbid({"A", "B", "states", "cell_length", "transition"});
    if (!d.contains("rotation")) throw ConfigError(child(ptr, "rotation"), "missing");
    spec.tables.rotation = vector(d["rotation"], child(ptr, "rotation"));
    if (spec.tables.rotation.size() == 0) throw ConfigError(child(ptr, "rotation"), "must not be empty");
    const auto dim = static_cast<std::size_t>(spec.tables.rotation.size());
    if (d.contains("a_terms")) spec.tables.a_terms = fourier_terms(d["a_terms"], child(ptr, "a_terms"), n, dim);
    if (d.contains("b_terms")) spec.tables.b_terms = fourier_terms(d["b_terms"], child(ptr, "b_terms"), n, dim);
  } else {
    throw ConfigError(child(ptr, "kind"),
                      "unknown driver kind '" + spec.kind + "' (constant, iid, markov, quasiperiodic)");
  }
  return spec;
}

InitialSpec initial_spec(const json& j, const std::string& ptr, int n) {
  const json& o = object(j, ptr, {"kind", "value", "product", "path"});
  InitialSpec spec;
  if (o.contains("kind")) spec.kind = string(o["kind"], child(ptr, "kind"));
  if (spec.kind == "constant") {
    spec.value = o.contains("value") ? vector(o["value"], child(ptr, "value")) : Vector::Ones(n);
    if (spec.value.size() != n) throw ConfigError(child(ptr, "value"), "needs N entries");
    if ((spec.value.array() < 0.0).any()) throw ConfigError(child(ptr, "value"), "must lie in the cone");
  } else if (spec.kind == "random_cone") {
    if (o.contains("product")) {
      if (!o["product"].is_boolean()) throw ConfigError(child(ptr, "product"), "expected a boolean");
      spec.product = o["product"].get<bool>();
    }
  } else if (spec.kind == "csv") {
    if (!o.contains("path")) throw ConfigError(child(ptr, "path"), "missing");
    spec.path = string(o["path"], child(ptr, "path"));
  } else {
    throw ConfigError(child(ptr, "kind"), "unknown initial kind '" + spec.kind + "' (constant, random_cone, csv)");
  }
  return spec;
}

}  // namespace

Driver RunConfig::make_driver(std::uint64_t seed) const {
  if (driver.kind == "constant") return Driver::constant(driver.states[0].A, driver.states[0].B);
  if (driver.kind == "iid") return Driver::iid_switching(seed, driver.states, driver.cell_length);
  if (driver.kind == "markov") {
    return Driver::markov_switching(seed, driver.states, driver.cell_length, driver.transition);
  }
  return Driver::quasiperiodic(seed, N, driver.tables);
}

Segment RunConfig::make_initial(std::uint64_t seed) const {
  if (initial.kind == "random_cone") return random_cone_segment(N, m, seed, initial.product);
  if (initial.kind == "csv") {
    std::ifstream in(initial.path);
    if (!in) throw ConfigError("/initial/path", "cannot open '" + initial.path + "'");
    Segment s = read_segment_csv(in);
    if (s.dim() != N || s.resolution() != m) {
      throw ConfigError("/initial/path", "segment shape does not match N and m");
    }
    return s;
  }
  return Segment::constant(initial.value, m);
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

void validate(const RunConfig& cfg) {
  if (cfg.N < 2) throw ConfigError("/system/N", "N must be ≥ 2");
  if (cfg.m < 10) throw ConfigError("/numerics/m", "m must be ≥ 10");
  if (cfg.M < 1) throw ConfigError("/numerics/M", "M must be ≥ 1");
  if (cfg.horizon < 10.0 * cfg.T()) {
    throw ConfigError("/numerics/horizon", "horizon must be ≥ 10 T = " + std::to_string(10 * cfg.T()));
  }
  auto aligned = [&](double t, const char* ptr, double min) {
    const double r = t * cfg.m;
    if (!(t >= min) || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
      throw ConfigError(ptr, "must be a multiple of 1/m and ≥ " + std::to_string(min));
    }
  };
  aligned(cfg.horizon, "/numerics/horizon", 0.0);
  aligned(cfg.renorm, "/numerics/renorm", 1.0 / cfg.m);
  aligned(cfg.t_back, "/numerics/t_back", 3.0);
  aligned(cfg.T_op, "/numerics/T_op", 1.0);
  if (cfg.k < 1 || cfg.k > 6) throw ConfigError("/numerics/k", "k must be in 1..6");
  if (cfg.census < 0) throw ConfigError("/numerics/census", "must be ≥ 0");
  if (!(cfg.resolution > 0.0)) throw ConfigError("/numerics/resolution", "must be > 0");
  if (!(cfg.transient >= 0.0)) throw ConfigError("/numerics/transient", "must be ≥ 0");
  if (cfg.seeds.empty()) throw ConfigError("/numerics/seeds", "needs at least one seed");
  if (cfg.oracle.count < 1 || cfg.oracle.count > 8) throw ConfigError("/oracle/count", "must be in 1..8");
  if (!(cfg.oracle.b > 0.0)) throw ConfigError("/oracle/b", "must be > 0");
}

RunConfig parse_config(const json& doc) {
  const json& root = object(doc, "", {"version", "system", "numerics", "outputs", "initial", "oracle"});
  if (!root.contains("version")) throw ConfigError("/version", "missing");
  const auto version = integer(root["version"], "/version");
  if (version != kConfigVersion) {
    throw ConfigError("/version", "unsupported version " + std::to_string(version) + " (expected " +
                                      std::to_string(kConfigVersion) + ")");
  }
  RunConfig cfg;
  if (!root.contains("system")) throw ConfigError("/system", "missing");
  const json& sys = object(root["system"], "/system", {"N", "driver", "space", "p", "compare_spaces"});
  if (!sys.contains("N")) throw ConfigError("/system/N", "missing");
  const auto n = integer(sys["N"], "/system/N");
  if (n < 2) throw ConfigError("/system/N", "N must be ≥ 2");
  if (n > 64) throw ConfigError("/system/N", "N must be ≤ 64");
  cfg.N = static_cast<int>(n);
  double p = 2.0;
  if (sys.contains("p")) p = number(sys["p"], "/system/p");
  if (sys.contains("space")) cfg.space = space_from(string(sys["space"], "/system/space"), p, "/system/space");
  if (sys.contains("compare_spaces")) {
    const json& list = sys["compare_spaces"];
    if (!list.is_array()) throw ConfigError("/system/compare_spaces", "expected an array of space tags");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto ptr = child("/system/compare_spaces", i);
      cfg.compare_spaces.push_back(space_from(string(list[i], ptr), p, ptr));
    }
  }
  if (!sys.contains("driver")) throw ConfigError("/system/driver", "missing");
  cfg.driver = driver_spec(sys["driver"], "/system/driver", cfg.N);

  if (root.contains("initial")) {
    cfg.initial = initial_spec(root["initial"], "/initial", cfg.N);
  } else {
    cfg.initial.value = Vector::Ones(cfg.N);
  }

  if (root.contains("numerics")) {
    const std::string np = "/numerics";
    const json& num = object(root["numerics"], np,
                             {"m", "M", "horizon", "renorm", "t_back", "T_op", "k", "resolution",
                              "transient", "census", "tolerances", "seeds"});
    auto int_field = [&](const char* key, int& out) {
      if (num.contains(key)) {
        const auto v = integer(num[key], child(np, key));
        if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(child(np, key), "out of range");
        out = static_cast<int>(v);
      }
    };
    auto real_field = [&](const char* key, double& out) {
      if (num.contains(key)) out = number(num[key], child(np, key));
    };
    int_field("m", cfg.m);
    int_field("M", cfg.M);
    int_field("k", cfg.k);
    int_field("census", cfg.census);
    real_field("horizon", cfg.horizon);
    real_field("renorm", cfg.renorm);
    real_field("t_back", cfg.t_back);
    real_field("T_op", cfg.T_op);
    real_field("resolution", cfg.resolution);
    real_field("transient", cfg.transient);
    if (num.contains("tolerances")) {
      const std::string tp = child(np, "tolerances");
      const json& t = object(num["tolerances"], tp, {"lambda2", "tempered", "pullback"});
      if (t.contains("lambda2")) cfg.tol.lambda2 = number(t["lambda2"], child(tp, "lambda2"));
      if (t.contains("tempered")) cfg.tol.tempered = number(t["tempered"], child(tp, "tempered"));
      if (t.contains("pullback")) cfg.tol.pullback = number(t["pullback"], child(tp, "pullback"));
    }
    if (num.contains("seeds")) {
      const std::string sp = child(np, "seeds");
      const json& s = num["seeds"];
      if (!s.is_array()) throw ConfigError(sp, "expected an array of non-negative integers");
      cfg.seeds.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number_unsigned()) throw ConfigError(child(sp, i), "expected a non-negative integer");
        cfg.seeds.push_back(s[i].get<std::uint64_t>());
      }
    }
  }

  if (root.contains("outputs")) {
    const json& out = object(root["outputs"], "/outputs", {"directory", "formats"});
    if (out.contains("directory")) cfg.out_dir = string(out["directory"], "/outputs/directory");
    if (out.contains("formats")) {
      const json& f = out["formats"];
      if (!f.is_array()) throw ConfigError("/outputs/formats", "expected an array");
      cfg.formats.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto ptr = child("/outputs/formats", i);
        const auto tag = string(f[i], ptr);
        if (tag != "csv" && tag != "json") throw ConfigError(ptr, "format must be 'csv' or 'json'");
        cfg.formats.push_back(tag);
      }
    }
  }

  if (root.contains("oracle")) {
    const json& o = object(root["oracle"], "/oracle", {"a", "b", "count"});
    if (o.contains("a")) cfg.oracle.a = number(o["a"], "/oracle/a");
    if (o.contains("b")) cfg.oracle.b = number(o["b"], "/oracle/b");
    if (o.contains("count")) cfg.oracle.count = static_cast<int>(integer(o["count"], "/oracle/count"));
  }

  validate(cfg);
  // the driver factories check shapes, stochasticity and finiteness
  try {
    (void)cfg.make_driver(cfg.seeds.front());
  } catch (const InvalidArgument& e) {
    throw ConfigError("/system/driver", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace floquet_sep::cli
