#pragma once

/// @file
/// @brief Scenario configuration, command dispatch, report emission and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlab/estimate_engine.hpp"
#include "hlab/geometry.hpp"
#include "hlab/harnack_core.hpp"
#include "hlab/harnack_ineq.hpp"
#include "hlab/pme_solver.hpp"

namespace hlab {

/// Failure to read or write a report or configuration file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric defaults applied when a scenario omits a key.
struct ScenarioDefaults {
  static constexpr int kGridNr = 257;
  static constexpr int kGridNt = 129;
  static constexpr double kFinalTime = 1.0;
  /// Positivity floor as a fraction of max u(., 0).
  static constexpr double kFloorFactor = 1e-6;
  static constexpr double kTolerance = 1e-6;
  static constexpr double kHarnackTolerance = 1e-8;
  static constexpr int kHarnackPairs = 128;
  static constexpr double kIdentityTolerance = 1e-9;
  static constexpr double kEvolutionTolerance = 1e-7;
  static constexpr int kSweepCap = 64;
  static constexpr double kNegativeControlScale = 0.5;
};

struct GeometryConfig {
  /// Named preset; empty when coefficient lists are given.
  std::string preset;
  std::string base = "euclidean";
  GeometryFamily family = GeometryFamily::kStaticWarp;
  GeometryCoefficients coefficients;
  int n = 2;
  double r_min = 0.0;
  double r_max = 1.5;
};

/// Exact pressure profile: time-shifted Barenblatt or v = sum_k c_k exp(rate_k t) r^{2k}.
struct ProfileConfig {
  enum class Kind { kBarenblatt, kEvenPolynomial };
  Kind kind = Kind::kBarenblatt;
  double C = 1.0;
  double shift = 0.1;
  std::vector<double> coefficients;
  std::vector<double> rates;
};

struct NonlinearityConfig {
  enum class Kind { kZero, kPowerSum, kSeparableX, kManufactured };
  Kind kind = Kind::kZero;
  PowerSumCoefficients power_sum;
  double c0 = 0, c1 = 0, kappa = 0, q = 1;
};

struct PdeConfig {
  double p = 2.0;
  NonlinearityConfig nonlinearity;
  int nr = ScenarioDefaults::kGridNr;
  int nt = ScenarioDefaults::kGridNt;
  double T = ScenarioDefaults::kFinalTime;
  OuterBoundary boundary = OuterBoundary::kDirichlet;
  /// Exact sampling of the profile, or a numerical solve from its initial data.
  bool numeric = false;
  double floor_factor = ScenarioDefaults::kFloorFactor;
  int substeps = 1;
  ProfileConfig profile;
};

struct AlphaConfig {
  enum class Kind { kConstant, kExp, kCoth, kLinear };
  Kind kind = Kind::kConstant;
  double value = 2.0;
  double gamma = 0.0;
};

struct HarnackConfig {
  double m = 2.0;
  AlphaConfig alpha;
  /// Constant beta; preset alphas carry their own beta.
  double beta = 0.0;
  std::vector<double> epsilon_fractions = {0.5, 0.1, 0.9};
};

struct VerificationConfig {
  std::vector<EstimateVariant> variants = {EstimateVariant::kThm21Local,
                                           EstimateVariant::kCor22Global};
  double R = 0.5;
  double tolerance = ScenarioDefaults::kTolerance;
  double rhs_scale = 1.0;
  int pairs = ScenarioDefaults::kHarnackPairs;
  HarnackForm harnack_form = HarnackForm::kFirst;
  double harnack_tolerance = ScenarioDefaults::kHarnackTolerance;
};

struct SweepAxis {
  std::string path;
  std::vector<nlohmann::json> values;
};

struct SweepConfig {
  std::string command = "check-estimate";
  std::vector<SweepAxis> axes;
  int cap = ScenarioDefaults::kSweepCap;
};

struct Scenario {
  GeometryConfig geometry;
  PdeConfig pde;
  HarnackConfig harnack;
  VerificationConfig verification;
  std::uint64_t seed = 1;
  std::optional<SweepConfig> sweep;
  /// Parsed document with the sweep block removed.
  nlohmann::json document;
};

/// Strict parse: unknown keys and type mismatches raise ConfigError naming the JSON path.
Scenario parse_config(const nlohmann::json& document);
Scenario parse_config_text(const std::string& text);
Scenario load_config(const std::filesystem::path& path);

Geometry build_geometry(const Scenario& s);
RadialFn build_profile(const Scenario& s);
Nonlinearity build_nonlinearity(const Scenario& s, const Geometry& geom);
HarnackParams build_params(const Scenario& s);

struct PressureData {
  Grid grid;
  ScalarField v;
  std::optional<SolveStats> stats;
};
PressureData build_pressure(const Scenario& s, const Geometry& geom, const Nonlinearity& g);

enum class Command { kSolve, kCheckIdentities, kCheckEstimate, kCheckHarnack, kReport };
Command parse_command(const std::string& name);
std::string to_string(Command c);

/// Exit-code contract.
enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

struct RunOptions {
  /// No files are written when empty.
  std::filesystem::path out_dir;
  bool negative_control = false;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string summary;
  int violations = 0;
  double min_margin = 0;
  /// Suprema of the first estimate variant checked.
  std::optional<Suprema> sups;
  double M_sup = 0, M_inf = 0;
  std::vector<VerificationReport> estimates;
  std::optional<HarnackReport> harnack;
  std::vector<std::pair<std::string, ResidualSummary>> identities;
  std::vector<std::string> commutator_consistent;
};

/// Runs one command; exceptions map to exit codes 2 (configuration), 3 (numerical), 4 (I/O).
RunResult run_scenario(const Scenario& s, Command command, const RunOptions& opts);

struct SweepOptions {
  std::filesystem::path out_dir;
  int workers = 1;
  bool negative_control = false;
};

struct SweepResult {
  int exit_code = kExitPass;
  int rows = 0;
  /// Deterministic aggregate CSV; runtimes go to a separate file.
  std::string csv;
  std::string timing_csv;
};

/// Cartesian product of the axes in declaration order, last axis fastest.
SweepResult sweep(const Scenario& tmpl, const SweepOptions& opts);

/// Sets the value at a dotted path, creating missing objects; the result is re-validated by
/// parse_config.
void set_dotted(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

}  // namespace hlab
