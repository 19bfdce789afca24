#include "hlab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_path(const std::string& parent, const std::string& key) {
  return parent + "." + key;
}

// Strict view of one JSON object: every key must be consumed from `allowed`.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' at " + path_);
    }
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string child(const std::string& key) const { return join_path(path_, key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(child(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(child(key) + ": expected a finite number");
    return x;
  }

  double required_number(const std::string& key) const {
    if (!has(key)) throw ConfigError(child(key) + ": missing required key");
    return number(key, 0.0);
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    return v.get<long>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ConfigError(child(key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

GeometryFamily parse_family(const std::string& name, const std::string& path) {
  if (name == "static-warp") return GeometryFamily::kStaticWarp;
  if (name == "conformal-evolving") return GeometryFamily::kConformalEvolving;
  if (name == "evolving-warp") return GeometryFamily::kEvolvingWarp;
  throw ConfigError(path + ": unknown geometry family '" + name + "'");
}

GeometryConfig parse_geometry(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"preset", "base", "family", "coefficients", "n", "r_min", "r_max"});
  GeometryConfig g;
  g.n = static_cast<int>(r.integer("n", 2));
  if (g.n < 1) throw ConfigError(r.child("n") + ": dimension must be >= 1");
  g.r_max = r.number("r_max", 1.5);
  g.r_min = r.number("r_min", 0.0);
  if (!(g.r_max > g.r_min) || g.r_min < 0.0)
    throw ConfigError(path + ": need 0 <= r_min < r_max");
  const bool preset = r.has("preset"), coeffs = r.has("coefficients");
  if (preset == coeffs) throw ConfigError(path + ": give exactly one of 'preset' or 'coefficients'");
  if (preset) {
    if (r.has("family")) throw ConfigError(r.child("family") + ": not used with a preset");
    g.preset = r.string("preset", "");
    g.base = r.string("base", "euclidean");
    return g;
  }
  if (r.has("base")) throw ConfigError(r.child("base") + ": only used with a preset");
  g.family = parse_family(r.string("family", "static-warp"), r.child("family"));
  const ObjectReader c(r.at("coefficients"), r.child("coefficients"),
                       {"warp", "warp_rate", "potential", "potential_rate", "conformal_rate"});
  g.coefficients.warp = c.numbers("warp", {0.0, 1.0});
  g.coefficients.warp_rate = c.numbers("warp_rate", {});
  g.coefficients.potential = c.numbers("potential", {});
  g.coefficients.potential_rate = c.numbers("potential_rate", {});
  g.coefficients.conformal_rate = c.number("conformal_rate", 0.0);
  return g;
}

ProfileConfig parse_profile(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"type", "C", "shift", "coefficients", "rates"});
  ProfileConfig p;
  const std::string type = r.string("type", "barenblatt");
  if (type == "barenblatt") {
    p.kind = ProfileConfig::Kind::kBarenblatt;
    p.C = r.number("C", 1.0);
    p.shift = r.number("shift", 0.1);
    if (!(p.C > 0.0)) throw ConfigError(r.child("C") + ": must be > 0");
    if (!(p.shift > 0.0)) throw ConfigError(r.child("shift") + ": must be > 0");
    if (r.has("coefficients") || r.has("rates"))
      throw ConfigError(path + ": coefficients apply to the even-polynomial profile only");
  } else if (type == "even-polynomial") {
    p.kind = ProfileConfig::Kind::kEvenPolynomial;
    p.coefficients = r.numbers("coefficients", {});
    p.rates = r.numbers("rates", std::vector<double>(p.coefficients.size(), 0.0));
    if (p.coefficients.empty()) throw ConfigError(r.child("coefficients") + ": must be non-empty");
    if (p.rates.size() != p.coefficients.size())
      throw ConfigError(r.child("rates") + ": length must match coefficients");
    if (!(p.coefficients[0] > 0.0)) throw ConfigError(r.child("coefficients") + "[0]: must be > 0");
  } else {
    throw ConfigError(r.child("type") + ": unknown profile '" + type + "'");
  }
  return p;
}

NonlinearityConfig parse_nonlinearity(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"type", "A", "a", "B", "b", "c0", "c1", "kappa", "q"});
  NonlinearityConfig n;
  const std::string type = r.string("type", "zero");
  const bool power_keys = r.has("A") || r.has("a") || r.has("B") || r.has("b");
  const bool sep_keys = r.has("c0") || r.has("c1") || r.has("kappa") || r.has("q");
  if (type == "zero" || type == "manufactured") {
    if (power_keys || sep_keys) throw ConfigError(path + ": '" + type + "' takes no parameters");
    n.kind = type == "zero" ? NonlinearityConfig::Kind::kZero : NonlinearityConfig::Kind::kManufactured;
  } else if (type == "power-sum") {
    if (sep_keys) throw ConfigError(path + ": separable-x keys given for power-sum");
    n.kind = NonlinearityConfig::Kind::kPowerSum;
    n.power_sum = {r.numbers("A", {}), r.numbers("a", {}), r.numbers("B", {}), r.numbers("b", {})};
  } else if (type == "separable-x") {
    if (power_keys) throw ConfigError(path + ": power-sum keys given for separable-x");
    n.kind = NonlinearityConfig::Kind::kSeparableX;
    n.c0 = r.number("c0", 0.0);
    n.c1 = r.number("c1", 0.0);
    n.kappa = r.number("kappa", 0.0);
    n.q = r.number("q", 1.0);
  } else {
    throw ConfigError(r.child("type") + ": unknown nonlinearity '" + type + "'");
  }
  return n;
}

PdeConfig parse_pde(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"p", "nonlinearity", "grid", "boundary", "solution",
                                 "floor_factor", "substeps", "profile"});
  PdeConfig d;
  d.p = r.number("p", 2.0);
  if (!(d.p > 1.0)) throw ConfigError(r.child("p") + ": p must be > 1");
  if (r.has("nonlinearity")) d.nonlinearity = parse_nonlinearity(r.at("nonlinearity"), r.child("nonlinearity"));
  if (r.has("grid")) {
    const ObjectReader g(r.at("grid"), r.child("grid"), {"nr", "nt", "T"});
    d.nr = static_cast<int>(g.integer("nr", d.nr));
    d.nt = static_cast<int>(g.integer("nt", d.nt));
    d.T = g.number("T", d.T);
    if (d.nr < 8) throw ConfigError(g.child("nr") + ": need at least 8 radial nodes");
    if (d.nt < 4) throw ConfigError(g.child("nt") + ": need at least 4 time levels");
    if (!(d.T > 0.0)) throw ConfigError(g.child("T") + ": must be > 0");
  }
  const std::string boundary = r.string("boundary", "dirichlet");
  if (boundary == "dirichlet") d.boundary = OuterBoundary::kDirichlet;
  else if (boundary == "neumann") d.boundary = OuterBoundary::kNeumannZero;
  else throw ConfigError(r.child("boundary") + ": expected 'dirichlet' or 'neumann'");
  const std::string solution = r.string("solution", "exact");
  if (solution != "exact" && solution != "numeric")
    throw ConfigError(r.child("solution") + ": expected 'exact' or 'numeric'");
  d.numeric = solution == "numeric";
  d.floor_factor = r.number("floor_factor", d.floor_factor);
  if (!(d.floor_factor > 0.0 && d.floor_factor < 1.0))
    throw ConfigError(r.child("floor_factor") + ": must lie in (0, 1)");
  d.substeps = static_cast<int>(r.integer("substeps", 1));
  if (d.substeps < 1) throw ConfigError(r.child("substeps") + ": must be >= 1");
  if (r.has("profile")) d.profile = parse_profile(r.at("profile"), r.child("profile"));
  return d;
}

HarnackConfig parse_harnack(const json& j, const std::string& path, int n) {
  const ObjectReader r(j, path, {"m", "alpha", "beta", "epsilon_fractions"});
  HarnackConfig h;
  h.m = r.number("m", n);
  if (!(h.m >= n)) throw ConfigError(r.child("m") + ": m must be >= n");
  if (r.has("alpha")) {
    const json& a = r.at("alpha");
    if (a.is_number()) {
      h.alpha.value = a.get<double>();
      if (!(h.alpha.value > 1.0))
        throw ConfigError(r.child("alpha") + ": alpha must be > 1 (got " + a.dump() + ")");
    } else {
      const ObjectReader ar(a, r.child("alpha"), {"preset", "gamma"});
      const std::string preset = ar.string("preset", "");
      if (preset == "exp") h.alpha.kind = AlphaConfig::Kind::kExp;
      else if (preset == "coth") h.alpha.kind = AlphaConfig::Kind::kCoth;
      else if (preset == "linear") h.alpha.kind = AlphaConfig::Kind::kLinear;
      else throw ConfigError(ar.child("preset") + ": expected 'exp', 'coth' or 'linear'");
      h.alpha.gamma = ar.required_number("gamma");
      if (!(h.alpha.gamma > 0.0))
        throw ConfigError(ar.child("gamma") + ": gamma must be > 0 so that alpha > 1 for t > 0");
    }
  }
  h.beta = r.number("beta", 0.0);
  if (h.alpha.kind != AlphaConfig::Kind::kConstant && r.has("beta"))
    throw ConfigError(r.child("beta") + ": alpha presets determine beta");
  h.epsilon_fractions = r.numbers("epsilon_fractions", h.epsilon_fractions);
  if (h.epsilon_fractions.empty()) throw ConfigError(r.child("epsilon_fractions") + ": must be non-empty");
  for (double f : h.epsilon_fractions)
    if (!(f >= 0.0 && f < 1.0))
      throw ConfigError(r.child("epsilon_fractions") + ": fractions must lie in [0, 1)");
  return h;
}

VerificationConfig parse_verification(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"variants", "R", "tolerance", "rhs_scale", "pairs",
                                 "harnack_form", "harnack_tolerance"});
  VerificationConfig v;
  if (r.has("variants")) {
    const json& a = r.at("variants");
    if (!a.is_array() || a.empty()) throw ConfigError(r.child("variants") + ": expected a non-empty array");
    v.variants.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string at = r.child("variants") + "[" + std::to_string(i) + "]";
      if (!a[i].is_string()) throw ConfigError(at + ": expected a string");
      try {
        v.variants.push_back(parse_variant(a[i].get<std::string>()));
      } catch (const ConfigError& e) {
        throw ConfigError(at + ": " + e.what());
      }
    }
  }
  v.R = r.number("R", v.R);
  if (!(v.R > 0.0)) throw ConfigError(r.child("R") + ": must be > 0");
  v.tolerance = r.number("tolerance", v.tolerance);
  if (!(v.tolerance >= 0.0)) throw ConfigError(r.child("tolerance") + ": must be >= 0");
  v.rhs_scale = r.number("rhs_scale", 1.0);
  if (!(v.rhs_scale > 0.0)) throw ConfigError(r.child("rhs_scale") + ": must be > 0");
  v.pairs = static_cast<int>(r.integer("pairs", v.pairs));
  if (v.pairs < 1) throw ConfigError(r.child("pairs") + ": must be >= 1");
  const std::string form = r.string("harnack_form", "first");
  if (form == "first") v.harnack_form = HarnackForm::kFirst;
  else if (form == "second") v.harnack_form = HarnackForm::kSecond;
  else throw ConfigError(r.child("harnack_form") + ": expected 'first' or 'second'");
  v.harnack_tolerance = r.number("harnack_tolerance", v.harnack_tolerance);
  if (!(v.harnack_tolerance >= 0.0)) throw ConfigError(r.child("harnack_tolerance") + ": must be >= 0");
  return v;
}

SweepConfig parse_sweep(const json& j, const std::string& path) {
  const ObjectReader r(j, path, {"command", "axes", "cap"});
  SweepConfig s;
  s.command = r.string("command", s.command);
  if (s.command == "sweep") throw ConfigError(r.child("command") + ": sweeps cannot nest");
  try {
    parse_command(s.command);
  } catch (const ConfigError& e) {
    throw ConfigError(r.child("command") + ": " + e.what());
  }
  s.cap = static_cast<int>(r.integer("cap", s.cap));
  if (s.cap < 1) throw ConfigError(r.child("cap") + ": must be >= 1");
  if (!r.has("axes") || !r.at("axes").is_array() || r.at("axes").empty())
    throw ConfigError(r.child("axes") + ": expected a non-empty array");
  const json& axes = r.at("axes");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string at = r.child("axes") + "[" + std::to_string(i) + "]";
    const ObjectReader ar(axes[i], at, {"path", "values"});
    SweepAxis axis;
    axis.path = ar.string("path", "");
    if (axis.path.empty()) throw ConfigError(ar.child("path") + ": must be a non-empty string");
    if (axis.path == "seed" || axis.path.rfind("sweep", 0) == 0)
      throw ConfigError(ar.child("path") + ": cannot sweep '" + axis.path + "'");
    if (!ar.has("values") || !ar.at("values").is_array())
      throw ConfigError(ar.child("values") + ": expected an array");
    for (const json& v : ar.at("values")) axis.values.push_back(v);
    if (axis.values.empty()) throw ConfigError(ar.child("values") + ": axis '" + axis.path + "' is empty");
    s.axes.push_back(std::move(axis));
  }
  return s;
}

// True when the sampled profile solves the configured equation on the configured geometry.
bool profile_solves(const Scenario& s) {
  const auto kind = s.pde.nonlinearity.kind;
  if (kind == NonlinearityConfig::Kind::kManufactured) return true;
  return s.pde.profile.kind == ProfileConfig::Kind::kBarenblatt &&
         kind == NonlinearityConfig::Kind::kZero && s.geometry.preset == "euclidean";
}

void check_exact_consistency(const Scenario& s) {
  if (s.pde.numeric || profile_solves(s)) return;
  throw ConfigError(
      "$.pde.solution: the exact profile solves the equation only with the manufactured "
      "nonlinearity, or as Barenblatt on the euclidean preset with a zero nonlinearity; use "
      "\"numeric\" otherwise");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string short_fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string describe(const Scenario& s, const Geometry& geom) {
  std::ostringstream os;
  os << "geometry: " << geom.name() << " (" << to_string(geom.family()) << "), n = " << geom.n()
     << ", m = " << s.harnack.m << ", r in [" << geom.r_min() << ", " << geom.r_max() << "]\n";
  os << "pde: p = " << s.pde.p << ", grid " << s.pde.nr << " x " << s.pde.nt << ", T = " << s.pde.T
     << ", solution = " << (s.pde.numeric ? "numeric" : "exact") << "\n";
  os << "alpha: ";
  switch (s.harnack.alpha.kind) {
    case AlphaConfig::Kind::kConstant:
      os << s.harnack.alpha.value << " (constant), beta = " << s.harnack.beta;
      break;
    case AlphaConfig::Kind::kExp: os << "exp preset, gamma = " << s.harnack.alpha.gamma; break;
    case AlphaConfig::Kind::kCoth: os << "coth preset, gamma = " << s.harnack.alpha.gamma; break;
    case AlphaConfig::Kind::kLinear: os << "linear preset, gamma = " << s.harnack.alpha.gamma; break;
  }
  os << "\nseed: " << s.seed << "\n";
  return os.str();
}

struct Context {
  Geometry geom;
  Nonlinearity g;
  HarnackParams params;
};

Context make_context(const Scenario& s) {
  Geometry geom = build_geometry(s);
  geom.validate(s.pde.T);
  Nonlinearity g = build_nonlinearity(s, geom);
  HarnackParams params = build_params(s);
  params.validate(geom.n(), s.pde.T);
  return {std::move(geom), std::move(g), std::move(params)};
}

// Nonlinearity for the analytic identities, consistent with the profile on any geometry.
Nonlinearity identity_nonlinearity(const Scenario& s, const Geometry& geom, const RadialFn& profile) {
  if (s.pde.profile.kind == ProfileConfig::Kind::kBarenblatt && s.geometry.preset == "euclidean")
    return Nonlinearity::zero();
  return Nonlinearity::from_source(density_source(profile, geom, s.pde.p), s.pde.p);
}

int run_identities(const Scenario& s, const Context& c, const RunOptions& opts, RunResult& res,
                   std::ostringstream& sum) {
  const Geometry& geom = c.geom;
  const RadialFn profile = build_profile(s);
  const Nonlinearity gid = identity_nonlinearity(s, geom, profile);
  const double r_lo = std::max(geom.r_min(), 0.0) + 0.05 * (geom.r_max() - geom.r_min());
  const double r_hi = geom.r_min() + 0.6 * (geom.r_max() - geom.r_min());
  const auto samples = sample_points(r_lo, r_hi, 0.1 * s.pde.T, 0.9 * s.pde.T, 9, 9);
  const RadialFn aux = make_radial_fn([](auto r, auto t) { return 1.0 + 0.5 * r * r + 0.25 * t; });

  struct Row {
    std::string name;
    ResidualSummary r;
    double tol;
  };
  std::vector<Row> rows;
  rows.push_back({"pressure_equation", residual_pressure_eq(profile, geom, s.pde.p, gid, samples),
                  ScenarioDefaults::kIdentityTolerance});
  rows.push_back({"quotient_rule", residual_quotient_rule(profile, aux, profile, geom, s.pde.p, samples),
                  ScenarioDefaults::kIdentityTolerance});
  rows.push_back({"weighted_bochner", residual_bochner(profile, geom, samples),
                  ScenarioDefaults::kIdentityTolerance});
  rows.push_back({"harnack_evolution", residual_F_evolution(profile, geom, c.params, gid, samples),
                  ScenarioDefaults::kEvolutionTolerance});
  const auto variants = residual_commutator(profile, geom, samples);
  res.commutator_consistent = consistent_variants({variants}, ScenarioDefaults::kIdentityTolerance);

  int failures = 0;
  std::ostringstream csv;
  csv << "identity,count,max_abs,max_rel,mean_rel,r_at_max,t_at_max,tolerance,pass\n";
  sum << "identities (relative tolerance per row):\n";
  for (const Row& row : rows) {
    const bool pass = row.r.max_rel <= row.tol;
    if (!pass) ++failures;
    res.identities.emplace_back(row.name, row.r);
    csv << row.name << "," << row.r.count << "," << fmt(row.r.max_abs) << "," << fmt(row.r.max_rel)
        << "," << fmt(row.r.mean_rel) << "," << fmt(row.r.r_at_max) << "," << fmt(row.r.t_at_max)
        << "," << fmt(row.tol) << "," << (pass ? 1 : 0) << "\n";
    sum << "  " << std::left << std::setw(20) << row.name << " max_rel = " << short_fmt(row.r.max_rel)
        << " (tol " << short_fmt(row.tol) << ") " << (pass ? "ok" : "FAIL") << "\n";
  }
  std::ostringstream ccsv;
  ccsv << "variant,max_abs,max_rel\n";
  for (const auto& v : variants)
    ccsv << "\"" << v.name << "\"," << fmt(v.residual.max_abs) << "," << fmt(v.residual.max_rel) << "\n";
  sum << "commutator variants with residual <= " << short_fmt(ScenarioDefaults::kIdentityTolerance)
      << ":";
  if (res.commutator_consistent.empty()) sum << " none";
  for (const auto& name : res.commutator_consistent) sum << " " << name;
  sum << "\n";
  if (!opts.out_dir.empty()) {
    write_file(opts.out_dir / "identities.csv", csv.str());
    write_file(opts.out_dir / "commutator.csv", ccsv.str());
  }
  res.violations += failures;
  return failures ? kExitViolation : kExitPass;
}

int run_estimates(const Scenario& s, const Context& c, const PressureData& pd,
                  const RunOptions& opts, RunResult& res, std::ostringstream& sum) {
  const GridGeometry gg(c.geom, pd.grid);
  VerifyOptions vo;
  vo.R = s.verification.R;
  vo.epsilon_fractions = s.harnack.epsilon_fractions;
  vo.tolerance_factor = s.verification.tolerance;
  vo.rhs_scale = s.verification.rhs_scale *
                 (opts.negative_control ? ScenarioDefaults::kNegativeControlScale : 1.0);
  int violations = 0;
  double min_margin = kInf;
  if (opts.negative_control) sum << "negative control: right-hand sides scaled by " << vo.rhs_scale << "\n";
  for (EstimateVariant variant : s.verification.variants) {
    VerificationReport rep = verify_estimate(pd.v, gg, c.g, c.params, variant, vo);
    violations += rep.violations;
    min_margin = std::min(min_margin, rep.min_margin);
    if (!res.sups) {
      res.sups = rep.sups;
      res.M_sup = rep.M_sup;
      res.M_inf = rep.M_inf;
    }
    sum << "estimate " << to_string(variant) << (rep.truncated_global ? " (truncated global)" : "")
        << ": violations = " << rep.violations << ", min margin = " << short_fmt(rep.min_margin)
        << " at (r, t) = (" << short_fmt(rep.r_at_min) << ", " << short_fmt(rep.t_at_min)
        << "), tolerance = " << short_fmt(rep.tolerance) << "\n";
    sum << "  epsilon scan:";
    for (const EpsilonResult& e : rep.scan)
      sum << " [eps " << short_fmt(e.epsilon) << ": margin " << short_fmt(e.min_margin) << ", "
          << e.violations << " viol]";
    sum << "\n";
    if (!opts.out_dir.empty()) {
      std::ostringstream csv;
      csv << "r,t,lhs,rhs,margin\n";
      for (std::size_t k = 0; k < rep.r.size(); ++k)
        csv << fmt(rep.r[k]) << "," << fmt(rep.t[k]) << "," << fmt(rep.lhs[k]) << ","
            << fmt(rep.rhs[k]) << "," << fmt(rep.margin[k]) << "\n";
      write_file(opts.out_dir / ("estimate_" + to_string(variant) + ".csv"), csv.str());
    }
    res.estimates.push_back(std::move(rep));
  }
  res.violations += violations;
  res.min_margin = std::min(res.min_margin, min_margin);
  return violations ? kExitViolation : kExitPass;
}

int run_harnack(const Scenario& s, const Context& c, const PressureData& pd, const RunOptions& opts,
                RunResult& res, std::ostringstream& sum) {
  if (s.harnack.alpha.kind != AlphaConfig::Kind::kConstant)
    throw ConfigError("$.harnack.alpha: the Harnack check needs a constant alpha");
  const GridGeometry gg(c.geom, pd.grid);
  HarnackOptions ho;
  ho.form = s.verification.harnack_form;
  ho.pairs = s.verification.pairs;
  ho.seed = s.seed;
  ho.epsilon_fraction = s.harnack.epsilon_fractions.front();
  ho.tolerance_factor = s.verification.harnack_tolerance;
  HarnackReport rep = verify_harnack(pd.v, gg, c.g, c.params, ho);
  const double alpha = s.harnack.alpha.value, b = c.params.b();
  int chain_failures = 0;
  std::ostringstream csv;
  csv << "r1,t1,r2,t2,ratio,bound,slack,violated,log_lhs,log_middle,log_rhs,chain_holds\n";
  for (const PairCheck& pc : rep.pairs) {
    const double r1 = pd.grid.r(pc.i1), t1 = pd.grid.t(pc.j1);
    const double r2 = pd.grid.r(pc.i2), t2 = pd.grid.t(pc.j2);
    const LogIntegralCheck lc = log_integral_check(pd.v, gg, alpha, b, rep.H, rep.M_inf, r1, t1, r2, t2);
    if (!lc.chain_holds) ++chain_failures;
    csv << fmt(r1) << "," << fmt(t1) << "," << fmt(r2) << "," << fmt(t2) << "," << fmt(pc.ratio)
        << "," << fmt(pc.bound) << "," << fmt(pc.slack) << "," << (pc.violated ? 1 : 0) << ","
        << fmt(lc.lhs) << "," << fmt(lc.middle) << "," << fmt(lc.rhs) << "," << (lc.chain_holds ? 1 : 0)
        << "\n";
  }
  sum << "harnack (" << (ho.form == HarnackForm::kFirst ? "first" : "second") << " form, seed "
      << rep.seed << "): pairs = " << rep.pairs.size() << ", violations = " << rep.violations
      << ", min slack = " << short_fmt(rep.min_slack) << ", H = " << short_fmt(rep.H)
      << ", inf v = " << short_fmt(rep.M_inf) << ", log-integral chain failures = " << chain_failures
      << "\n";
  if (!opts.out_dir.empty()) write_file(opts.out_dir / "harnack.csv", csv.str());
  res.violations += rep.violations + chain_failures;
  res.harnack = std::move(rep);
  return res.harnack->violations + chain_failures ? kExitViolation : kExitPass;
}

int run_solve(const Scenario& s, const Context& c, const RunOptions& opts, RunResult& res,
              std::ostringstream& sum) {
  Scenario numeric = s;
  numeric.pde.numeric = true;
  const PressureData pd = build_pressure(numeric, c.geom, c.g);
  const Grid& grid = pd.grid;
  const SolveStats& st = *pd.stats;
  const double m0 = st.mass.front(), m1 = st.mass.back();
  sum << "solve: clamp fraction = " << short_fmt(st.clamp_fraction())
      << ", weighted mass drift = " << short_fmt(std::abs(m1 - m0) / std::max(std::abs(m0), 1e-300))
      << "\n";
  if (profile_solves(s)) {
    const RadialFn profile = build_profile(s);
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < grid.nt(); ++j)
      for (int i = 0; i < grid.nr(); ++i) {
        const double ve = profile.value(grid.r(i), grid.t(j));
        err = std::max(err, std::abs(pd.v(i, j) - ve));
        scale = std::max(scale, std::abs(ve));
      }
    sum << "solve: max pressure error against the exact profile = " << short_fmt(err)
        << " (relative " << short_fmt(err / scale) << ")\n";
  }
  res.M_inf = *std::min_element(pd.v.values().begin(), pd.v.values().end());
  res.M_sup = *std::max_element(pd.v.values().begin(), pd.v.values().end());
  if (!opts.out_dir.empty()) {
    std::ostringstream csv;
    csv << "r,t,v\n";
    for (int j = 0; j < grid.nt(); ++j)
      for (int i = 0; i < grid.nr(); ++i)
        csv << fmt(grid.r(i)) << "," << fmt(grid.t(j)) << "," << fmt(pd.v(i, j)) << "\n";
    write_file(opts.out_dir / "solution.csv", csv.str());
    std::ostringstream mass;
    mass << "t,mass\n";
    for (int j = 0; j < grid.nt(); ++j) mass << fmt(grid.t(j)) << "," << fmt(st.mass[j]) << "\n";
    write_file(opts.out_dir / "mass.csv", mass.str());
  }
  return kExitPass;
}

}  // namespace

Scenario parse_config(const json& document) {
  const ObjectReader r(document, "$", {"geometry", "pde", "harnack", "verification", "seed", "sweep"});
  Scenario s;
  if (!r.has("geometry")) throw ConfigError("$.geometry: missing required key");
  s.geometry = parse_geometry(r.at("geometry"), r.child("geometry"));
  if (r.has("pde")) s.pde = parse_pde(r.at("pde"), r.child("pde"));
  s.harnack = r.has("harnack") ? parse_harnack(r.at("harnack"), r.child("harnack"), s.geometry.n)
                               : parse_harnack(json::object(), r.child("harnack"), s.geometry.n);
  if (r.has("verification")) s.verification = parse_verification(r.at("verification"), r.child("verification"));
  const long seed = r.integer("seed", 1);
  if (seed < 0) throw ConfigError("$.seed: must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  if (r.has("sweep")) s.sweep = parse_sweep(r.at("sweep"), r.child("sweep"));
  s.document = document;
  s.document.erase("sweep");
  check_exact_consistency(s);
  // Referenced presets must exist and the geometry must be admissible.
  build_geometry(s).validate(s.pde.T);
  return s;
}

Scenario parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return parse_config_text(os.str());
}

Geometry build_geometry(const Scenario& s) {
  const GeometryConfig& g = s.geometry;
  if (!g.preset.empty())
    return make_preset(g.preset, g.n, s.harnack.m, g.r_max, g.base, g.r_min > 0.0 ? g.r_min : -1.0);
  return make_coefficient_geometry(g.family, g.n, s.harnack.m, g.r_min, g.r_max, g.coefficients);
}

RadialFn build_profile(const Scenario& s) {
  const ProfileConfig& p = s.pde.profile;
  if (p.kind == ProfileConfig::Kind::kBarenblatt)
    return barenblatt_pressure(s.geometry.n, s.pde.p, p.C, p.shift);
  const std::vector<double> c = p.coefficients, k = p.rates;
  return make_radial_fn([c, k](auto r, auto t) {
    using std::exp;
    const auto r2 = r * r;
    auto power = 1.0 + 0.0 * r2;
    auto sum = 0.0 * r2;
    for (std::size_t i = 0; i < c.size(); ++i) {
      sum = sum + c[i] * exp(k[i] * t) * power;
      power = power * r2;
    }
    return sum;
  });
}

Nonlinearity build_nonlinearity(const Scenario& s, const Geometry& geom) {
  const NonlinearityConfig& n = s.pde.nonlinearity;
  switch (n.kind) {
    case NonlinearityConfig::Kind::kZero: return Nonlinearity::zero();
    case NonlinearityConfig::Kind::kPowerSum: return Nonlinearity::power_sum(n.power_sum);
    case NonlinearityConfig::Kind::kSeparableX: return Nonlinearity::separable_x(n.c0, n.c1, n.kappa, n.q);
    case NonlinearityConfig::Kind::kManufactured:
      return manufactured_forcing(build_profile(s), geom, s.pde.p);
  }
  throw ConfigError("unknown nonlinearity");
}

HarnackParams build_params(const Scenario& s) {
  HarnackParams hp;
  hp.p = s.pde.p;
  hp.m = s.harnack.m;
  const AlphaConfig& a = s.harnack.alpha;
  if (a.kind == AlphaConfig::Kind::kConstant) {
    hp.alpha = constant_time_fn(a.value);
    hp.beta = constant_time_fn(s.harnack.beta);
    return hp;
  }
  const AlphaBetaPreset which = a.kind == AlphaConfig::Kind::kExp    ? AlphaBetaPreset::kExp
                                : a.kind == AlphaConfig::Kind::kCoth ? AlphaBetaPreset::kCoth
                                                                     : AlphaBetaPreset::kLinear;
  AlphaBeta ab = alpha_beta_preset(which, a.gamma, hp.b());
  hp.alpha = std::move(ab.alpha);
  hp.beta = std::move(ab.beta);
  hp.gamma = a.gamma;
  return hp;
}

PressureData build_pressure(const Scenario& s, const Geometry& geom, const Nonlinearity& g) {
  const Grid grid(s.pde.nr, s.pde.nt, geom.r_max(), s.pde.T, geom.r_min());
  const RadialFn profile = build_profile(s);
  if (!s.pde.numeric) {
    ScalarField v(grid, [&](double r, double t) { return profile.value(r, t); }, Parity::kEven);
    for (double x : v.values())
      if (!(x > 0.0)) throw DomainError("exact profile is not positive on the grid");
    return {grid, std::move(v), std::nullopt};
  }
  const double p = s.pde.p;
  PdeParams pp;
  pp.p = p;
  pp.nonlinearity = g;
  pp.outer = s.pde.boundary;
  pp.substeps = s.pde.substeps;
  double u_max = 0.0;
  for (int i = 0; i < grid.nr(); ++i)
    u_max = std::max(u_max, density_from_pressure(std::max(profile.value(grid.r(i), 0.0), 0.0), p));
  pp.floor = s.pde.floor_factor * u_max;
  const double r_max = geom.r_max();
  if (pp.outer == OuterBoundary::kDirichlet)
    pp.dirichlet = [profile, p, r_max](double t) {
      return density_from_pressure(std::max(profile.value(r_max, t), 0.0), p);
    };
  auto initial = [profile, p](double r) {
    return density_from_pressure(std::max(profile.value(r, 0.0), 0.0), p);
  };
  SolutionField sol = solve(initial, geom, pp, grid);
  return {grid, std::move(sol.v), std::move(sol.stats)};
}

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::kSolve;
  if (name == "check-identities") return Command::kCheckIdentities;
  if (name == "check-estimate") return Command::kCheckEstimate;
  if (name == "check-harnack") return Command::kCheckHarnack;
  if (name == "report") return Command::kReport;
  throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::kSolve: return "solve";
    case Command::kCheckIdentities: return "check-identities";
    case Command::kCheckEstimate: return "check-estimate";
    case Command::kCheckHarnack: return "check-harnack";
    case Command::kReport: return "report";
  }
  return "unknown";
}

RunResult run_scenario(const Scenario& s, Command command, const RunOptions& opts) {
  RunResult res;
  res.min_margin = kInf;
  std::ostringstream sum;
  sum << "command: " << to_string(command) << "\n";
  try {
    const Context c = make_context(s);
    sum << describe(s, c.geom);
    int code = kExitPass;
    auto merge = [&code](int k) { code = std::max(code, k); };
    switch (command) {
      case Command::kSolve: merge(run_solve(s, c, opts, res, sum)); break;
      case Command::kCheckIdentities: merge(run_identities(s, c, opts, res, sum)); break;
      case Command::kCheckEstimate: {
        const PressureData pd = build_pressure(s, c.geom, c.g);
        merge(run_estimates(s, c, pd, opts, res, sum));
        break;
      }
      case Command::kCheckHarnack: {
        const PressureData pd = build_pressure(s, c.geom, c.g);
        merge(run_harnack(s, c, pd, opts, res, sum));
        break;
      }
      case Command::kReport: {
        merge(run_identities(s, c, opts, res, sum));
        const PressureData pd = build_pressure(s, c.geom, c.g);
        merge(run_estimates(s, c, pd, opts, res, sum));
        if (s.harnack.alpha.kind == AlphaConfig::Kind::kConstant)
          merge(run_harnack(s, c, pd, opts, res, sum));
        else
          sum << "harnack: skipped (needs a constant alpha)\n";
        break;
      }
    }
    res.exit_code = code;
    sum << "result: " << (code == kExitPass ? "PASS" : "FAIL") << " (violations = " << res.violations
        << ")\n";
  } catch (const ConfigError& e) {
    res.exit_code = kExitConfig;
    sum << "configuration error: " << e.what() << "\n";
  } catch (const IoError& e) {
    res.exit_code = kExitIo;
    sum << "I/O error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    res.exit_code = kExitNumerical;
    sum << "numerical failure: " << e.what() << "\n";
  } catch (const NumericalError& e) {
    res.exit_code = kExitNumerical;
    sum << "numerical failure: " << e.what() << "\n";
  }
  if (res.min_margin == kInf) res.min_margin = 0.0;
  res.summary = sum.str();
  if (!opts.out_dir.empty() && res.exit_code != kExitIo) {
    try {
      write_file(opts.out_dir / "summary.txt", res.summary);
    } catch (const IoError& e) {
      res.exit_code = kExitIo;
      res.summary += std::string("I/O error: ") + e.what() + "\n";
    }
  }
  return res;
}

void set_dotted(json& doc, const std::string& path, const json& value) {
  if (path.empty()) throw ConfigError("sweep: empty axis path");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("sweep: malformed axis path '" + path + "'");
    if (!node->is_object()) throw ConfigError("sweep: '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

SweepResult sweep(const Scenario& tmpl, const SweepOptions& opts) {
  if (!tmpl.sweep) throw ConfigError("$.sweep: missing sweep block");
  const SweepConfig& sc = *tmpl.sweep;
  const Command command = parse_command(sc.command);
  long total = 1;
  for (const SweepAxis& axis : sc.axes) {
    if (axis.values.empty()) throw ConfigError("sweep: axis '" + axis.path + "' is empty");
    total *= static_cast<long>(axis.values.size());
    if (total > sc.cap)
      throw ConfigError("sweep: " + std::to_string(total) + "+ combinations exceed the cap of " +
                        std::to_string(sc.cap));
  }
  const int workers = std::max(1, opts.workers);

  struct Row {
    std::vector<std::string> values;
    RunResult result;
    double seconds = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(total));
  std::atomic<long> next{0};
  auto worker = [&] {
    while (true) {
      const long idx = next.fetch_add(1);
      if (idx >= total) return;
      Row& row = rows[static_cast<std::size_t>(idx)];
      json doc = tmpl.document;
      long rem = idx;
      std::vector<const json*> picked(sc.axes.size());
      for (std::size_t a = sc.axes.size(); a-- > 0;) {
        const long size = static_cast<long>(sc.axes[a].values.size());
        picked[a] = &sc.axes[a].values[static_cast<std::size_t>(rem % size)];
        rem /= size;
      }
      for (std::size_t a = 0; a < sc.axes.size(); ++a) {
        row.values.push_back(picked[a]->dump());
        set_dotted(doc, sc.axes[a].path, *picked[a]);
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Scenario s = parse_config(doc);
        s.seed = tmpl.seed;
        RunOptions ro;
        ro.negative_control = opts.negative_control;
        row.result = run_scenario(s, command, ro);
      } catch (const ConfigError& e) {
        row.result.exit_code = kExitConfig;
        row.result.summary = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min<long>(workers, total); ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  SweepResult out;
  out.rows = static_cast<int>(total);
  std::ostringstream csv, timing;
  csv << "index";
  for (const SweepAxis& axis : sc.axes) csv << "," << axis.path;
  csv << ",exit_code,violations,min_margin,M_sup,M_inf,mu0,mu1,mu2,mu3,mu4,lambda0,lambda1,lambda2,"
         "lambda3,lambda4\n";
  timing << "index,seconds\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& row = rows[k];
    const RunResult& r = row.result;
    csv << k;
    for (const std::string& v : row.values) {
      std::string quoted = v;
      if (quoted.find(',') != std::string::npos || quoted.find('"') != std::string::npos) {
        std::string esc;
        for (char ch : quoted) esc += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        quoted = "\"" + esc + "\"";
      }
      csv << "," << quoted;
    }
    csv << "," << r.exit_code << "," << r.violations << "," << fmt(r.min_margin) << "," << fmt(r.M_sup)
        << "," << fmt(r.M_inf);
    for (int i = 0; i < 5; ++i) csv << "," << (r.sups ? fmt(r.sups->mu[i]) : std::string());
    for (int i = 0; i < 5; ++i) csv << "," << (r.sups ? fmt(r.sups->lambda[i]) : std::string());
    csv << "\n";
    timing << k << "," << fmt(row.seconds) << "\n";
    out.exit_code = std::max(out.exit_code, r.exit_code);
  }
  out.csv = csv.str();
  out.timing_csv = timing.str();
  if (!opts.out_dir.empty()) {
    write_file(opts.out_dir / "sweep.csv", out.csv);
    write_file(opts.out_dir / "sweep_timing.csv", out.timing_csv);
  }
  return out;
}

}  // namespace hlab
