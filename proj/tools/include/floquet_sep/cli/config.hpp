#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef FLOQUET_SEP_VENDOR_JSON
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif

#include "floquet_sep/driver.hpp"
#include "floquet_sep/segment.hpp"

namespace floquet_sep::cli {

inline constexpr int kConfigVersion = 1;

/// Schema violation; `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct DriverSpec {
  std::string kind = "constant";
  double cell_length = 1.0;
  std::vector<CoefficientState> states;
  Matrix transition;
  QuasiperiodicTables tables;
};

struct InitialSpec {
  /// "constant", "random_cone" or "csv"
  std::string kind = "constant";
  Vector value;
  bool product = false;
  std::string path;
};

struct Tolerances {
  double lambda2 = 5e-2;
  double tempered = 1e-2;
  double pullback = 1e-8;
};

struct OracleSpec {
  double a = 0.0;
  double b = 1.0;
  int count = 5;
};

struct RunConfig {
  int N = 2;
  DriverSpec driver;
  SpaceNorm space = SpaceNorm::C();
  /// extra spaces for the cross-space table of `lyapunov`
  std::vector<SpaceNorm> compare_spaces;
  InitialSpec initial;

  int m = 200;
  int M = 1;
  double horizon = 300.0;
  double renorm = 1.0;
  double t_back = 60.0;
  double T_op = 1.0;
  int k = 4;
  double resolution = 5e-2;
  double transient = 25.0;
  int census = 200;
  Tolerances tol;
  std::vector<std::uint64_t> seeds = {1};

  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  OracleSpec oracle;

  int T() const { return N + (N - 1) * M + 1; }
  Driver make_driver(std::uint64_t seed) const;
  Segment make_initial(std::uint64_t seed) const;
  bool wants(const std::string& format) const;
};

/// Validates and converts a parsed document. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Re-checks the cross-field rules after command-line overrides.
void validate(const RunConfig& cfg);

}  // namespace floquet_sep::cli
