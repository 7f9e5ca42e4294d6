#include "tikreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tikreg/asymptotics.hpp"
#include "tikreg/errors.hpp"
#include "tikreg/filters.hpp"
#include "tikreg/monte_carlo.hpp"
#include "tikreg/risk.hpp"
#include "tikreg/rng.hpp"

namespace tikreg {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::weights: return "weights";
    case ExperimentKind::risk: return "risk";
    case ExperimentKind::suprisk: return "suprisk";
    case ExperimentKind::minimax_check: return "minimax-check";
    case ExperimentKind::lower_bound: return "lower-bound";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::simulate: return "simulate";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& tag) {
  for (auto k : {ExperimentKind::weights, ExperimentKind::risk, ExperimentKind::suprisk,
                 ExperimentKind::minimax_check, ExperimentKind::lower_bound, ExperimentKind::convergence,
                 ExperimentKind::simulate})
    if (to_string(k) == tag) return k;
  return std::nullopt;
}

namespace {

std::string to_string(WeightsChoice w) {
  switch (w) {
    case WeightsChoice::tikhonov: return "tikhonov";
    case WeightsChoice::minimax_linear: return "minimax-linear";
    case WeightsChoice::exact_inverse: return "exact-inverse";
  }
  return "?";
}

// Reads keys from one JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const Json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(full(key) + ": missing required key");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(full(key) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::uint64_t count(const std::string& key) {
    const auto& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(full(key) + ": expected a non-negative integer");
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) { return has(key) ? count(key) : fallback; }

  std::string text(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(full(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(full(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(full(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  ObjectReader child(const std::string& key) { return ObjectReader(at(key), full(key)); }

  void finish() const {
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(full(key) + ": unknown key");
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

OperatorSpectrum parse_spectrum(ObjectReader s) {
  const std::string family = s.text("family");
  OperatorSpectrum out;
  if (family == "poly") {
    out = PolyDecay{s.number("C", 1.0), s.number("gamma", 0.0)};
  } else if (family == "exp") {
    out = ExpDecay{s.number("C", 1.0), s.number("alpha", 0.0), s.number("B"), s.number("gamma", 1.0)};
  } else if (family == "explicit") {
    out = ExplicitSpectrum{s.numbers("values")};
  } else {
    throw ConfigError(s.full("family") + ": unknown family '" + family + "' (poly, exp, explicit)");
  }
  s.finish();
  return out;
}

Json spectrum_json(const OperatorSpectrum& spectrum) {
  Json j;
  if (const auto* p = std::get_if<PolyDecay>(&spectrum)) {
    j["family"] = "poly";
    j["C"] = p->C;
    j["gamma"] = p->gamma;
  } else if (const auto* e = std::get_if<ExpDecay>(&spectrum)) {
    j["family"] = "exp";
    j["C"] = e->C;
    j["alpha"] = e->alpha;
    j["B"] = e->B;
    j["gamma"] = e->gamma_exp;
  } else {
    j["family"] = "explicit";
    j["values"] = std::get<ExplicitSpectrum>(spectrum).values;
  }
  return j;
}

// Wraps precondition failures raised while interpreting a config.
template <typename F>
auto as_config_error(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  ExperimentConfig cfg;
  ObjectReader root(doc, "");

  if (root.has("experiment")) {
    const auto tag = root.text("experiment");
    const auto kind = parse_experiment_kind(tag);
    if (!kind) throw ConfigError("experiment: unknown experiment '" + tag + "'");
    cfg.experiment = *kind;
  }

  cfg.spectrum = parse_spectrum(root.child("spectrum"));
  as_config_error("spectrum", [&] { validate(cfg.spectrum); return 0; });

  {
    auto n = root.child("noise");
    const auto& sigma = n.has("sigma") ? n.at("sigma") : Json(1.0);
    if (sigma.is_number()) {
      cfg.noise.sigma = sigma.get<double>();
    } else if (sigma.is_array()) {
      cfg.noise.sigma = n.numbers("sigma");
    } else {
      throw ConfigError("noise.sigma: expected a number or an array of numbers");
    }
    cfg.noise.epsilon = n.number("epsilon");
    n.finish();
  }
  {
    auto b = root.child("ball");
    cfg.ball = {b.number("r"), b.number("P0")};
    b.finish();
  }
  if (root.has("N")) {
    const auto n = root.count("N");
    if (n < 1) throw ConfigError("N: must be >= 1");
    cfg.N = n;
  }
  if (root.has("weights")) {
    const auto w = root.text("weights");
    if (w == "tikhonov") cfg.weights = WeightsChoice::tikhonov;
    else if (w == "minimax-linear") cfg.weights = WeightsChoice::minimax_linear;
    else if (w == "exact-inverse") cfg.weights = WeightsChoice::exact_inverse;
    else throw ConfigError("weights: unknown weights '" + w + "' (tikhonov, minimax-linear, exact-inverse)");
  }
  if (root.has("signal")) {
    const auto& s = root.at("signal");
    if (s.is_string()) {
      const auto name = s.get<std::string>();
      if (name != "boundary" && name != "zero") throw ConfigError("signal: expected 'boundary', 'zero' or an array");
      cfg.signal = name;
    } else {
      cfg.signal = root.numbers("signal");
    }
  }
  if (root.has("theta_reading")) {
    const auto t = root.text("theta_reading");
    if (t == "forward") cfg.theta_reading = ThetaReading::forward;
    else if (t == "backward") cfg.theta_reading = ThetaReading::backward;
    else throw ConfigError("theta_reading: expected 'forward' or 'backward'");
  }
  if (root.has("mc")) {
    auto m = root.child("mc");
    cfg.mc.replications = m.count("replications", cfg.mc.replications);
    cfg.mc.seed = m.count("seed", cfg.mc.seed);
    m.finish();
  }
  if (root.has("grids")) {
    auto g = root.child("grids");
    if (g.has("epsilon")) cfg.epsilon_grid = g.numbers("epsilon");
    g.finish();
  }
  if (root.has("lower_bound")) {
    auto l = root.child("lower_bound");
    cfg.lower_bound.delta = l.number("delta", cfg.lower_bound.delta);
    cfg.lower_bound.delta1 = l.number("delta1", cfg.lower_bound.delta1);
    cfg.lower_bound.samples = l.count("samples", cfg.lower_bound.samples);
    const auto conv = l.text("variance_convention", "matched");
    if (conv == "matched") cfg.lower_bound.convention = VarianceConvention::matched;
    else if (conv == "printed") cfg.lower_bound.convention = VarianceConvention::printed;
    else throw ConfigError("lower_bound.variance_convention: expected 'matched' or 'printed'");
    l.finish();
  }
  if (root.has("minimax_check")) {
    auto m = root.child("minimax_check");
    cfg.minimax_check.perturbations = m.count("perturbations", cfg.minimax_check.perturbations);
    cfg.minimax_check.scale_min = m.number("scale_min", cfg.minimax_check.scale_min);
    cfg.minimax_check.scale_max = m.number("scale_max", cfg.minimax_check.scale_max);
    if (!(0.0 < cfg.minimax_check.scale_min && cfg.minimax_check.scale_min <= cfg.minimax_check.scale_max))
      throw ConfigError("minimax_check: need 0 < scale_min <= scale_max");
    m.finish();
  }
  if (root.has("assumptions")) {
    auto a = root.child("assumptions");
    cfg.assumptions.j0 = a.count("j0", cfg.assumptions.j0);
    if (a.has("j_max")) cfg.assumptions.j_max = a.count("j_max");
    if (a.has("sigma_bounds")) {
      const auto b = a.numbers("sigma_bounds");
      if (b.size() != 2 || !(0.0 < b[0] && b[0] < b[1]))
        throw ConfigError("assumptions.sigma_bounds: expected [c, C] with 0 < c < C");
      cfg.assumptions.sigma_bounds = std::make_pair(b[0], b[1]);
    }
    a.finish();
  }
  if (root.has("convergence")) {
    auto c = root.child("convergence");
    cfg.convergence.rel_tol = c.number("rel_tol", cfg.convergence.rel_tol);
    cfg.convergence.max_terms = c.count("max_terms", cfg.convergence.max_terms);
    if (!(cfg.convergence.rel_tol > 0.0)) throw ConfigError("convergence.rel_tol: must be > 0");
    c.finish();
  }
  if (root.has("output")) {
    auto o = root.child("output");
    if (o.has("path")) cfg.output.path = o.text("path");
    const auto fmt = o.text("format", "csv");
    if (fmt == "csv") cfg.output.format = OutputFormat::csv;
    else if (fmt == "json-lines") cfg.output.format = OutputFormat::json_lines;
    else throw ConfigError("output.format: expected 'csv' or 'json-lines'");
    o.finish();
  }
  root.finish();

  // parameter preconditions of the problem itself
  as_config_error("problem", [&] { return SequenceProblem(cfg.spectrum, cfg.noise, cfg.ball, cfg.N.value_or(1)); });
  if (cfg.experiment == ExperimentKind::lower_bound) {
    if (!(cfg.lower_bound.delta > 0.0 && cfg.lower_bound.delta < 1.0))
      throw ConfigError("lower_bound.delta: must lie in (0, 1)");
    if (!(cfg.lower_bound.delta1 > 0.0 && cfg.lower_bound.delta1 < cfg.ball.P0))
      throw ConfigError("lower_bound.delta1: must lie in (0, P0)");
  }
  if (cfg.experiment == ExperimentKind::convergence) {
    if (cfg.epsilon_grid.size() < 4) throw ConfigError("grids.epsilon: convergence needs at least 4 points");
    for (std::size_t i = 1; i < cfg.epsilon_grid.size(); ++i)
      if (!(cfg.epsilon_grid[i] < cfg.epsilon_grid[i - 1]))
        throw ConfigError("grids.epsilon: must be strictly decreasing");
    if (std::holds_alternative<ExplicitSpectrum>(cfg.spectrum))
      throw ConfigError("spectrum.family: convergence needs the poly or exp family");
  }
  if (const auto* values = std::get_if<std::vector<double>>(&cfg.signal); values && cfg.N && values->size() != *cfg.N)
    throw ConfigError("signal: length differs from N");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["experiment"] = to_string(cfg.experiment);
  j["spectrum"] = spectrum_json(cfg.spectrum);
  if (const auto* s = std::get_if<double>(&cfg.noise.sigma)) j["noise"]["sigma"] = *s;
  else j["noise"]["sigma"] = std::get<std::vector<double>>(cfg.noise.sigma);
  j["noise"]["epsilon"] = cfg.noise.epsilon;
  j["ball"] = {{"r", cfg.ball.r}, {"P0", cfg.ball.P0}};
  if (cfg.N) j["N"] = *cfg.N;
  j["weights"] = to_string(cfg.weights);
  if (const auto* s = std::get_if<std::string>(&cfg.signal)) j["signal"] = *s;
  else j["signal"] = std::get<std::vector<double>>(cfg.signal);
  j["theta_reading"] = cfg.theta_reading == ThetaReading::forward ? "forward" : "backward";
  j["mc"] = {{"replications", cfg.mc.replications}, {"seed", cfg.mc.seed}};
  if (!cfg.epsilon_grid.empty()) j["grids"]["epsilon"] = cfg.epsilon_grid;
  j["lower_bound"] = {{"delta", cfg.lower_bound.delta},
                      {"delta1", cfg.lower_bound.delta1},
                      {"samples", cfg.lower_bound.samples},
                      {"variance_convention", to_string(cfg.lower_bound.convention)}};
  j["minimax_check"] = {{"perturbations", cfg.minimax_check.perturbations},
                        {"scale_min", cfg.minimax_check.scale_min},
                        {"scale_max", cfg.minimax_check.scale_max}};
  j["assumptions"]["j0"] = cfg.assumptions.j0;
  if (cfg.assumptions.j_max) j["assumptions"]["j_max"] = *cfg.assumptions.j_max;
  if (cfg.assumptions.sigma_bounds)
    j["assumptions"]["sigma_bounds"] = {cfg.assumptions.sigma_bounds->first, cfg.assumptions.sigma_bounds->second};
  j["convergence"] = {{"rel_tol", cfg.convergence.rel_tol}, {"max_terms", cfg.convergence.max_terms}};
  if (cfg.output.path) j["output"]["path"] = *cfg.output.path;
  j["output"]["format"] = cfg.output.format == OutputFormat::csv ? "csv" : "json-lines";
  return j;
}

SequenceProblem make_problem(const ExperimentConfig& config) {
  std::size_t n = 0;
  if (config.N) {
    n = *config.N;
  } else {
    n = default_truncation(config.spectrum, config.noise, config.ball, 1e-6);
  }
  return SequenceProblem(config.spectrum, config.noise, config.ball, n);
}

Json to_json(const AssumptionReport& report) {
  Json j;
  j["name"] = to_string(report.name);
  j["holds"] = report.holds;
  j["first_violation"] = report.first_violation ? Json(*report.first_violation) : Json(nullptr);
  j["margin"] = report.margin;
  j["checked_to"] = report.checked_to;
  j["analytic"] = to_string(report.analytic);
  return j;
}

std::vector<AssumptionReport> assumption_reports(const ExperimentConfig& config, const SequenceProblem& problem) {
  constexpr std::size_t kMaxScan = 1'000'000;
  const std::size_t j_max = std::max<std::size_t>(
      config.assumptions.j_max.value_or(std::min(10 * problem.size(), kMaxScan)), config.assumptions.j0 + 2);
  auto bounds = config.assumptions.sigma_bounds;
  if (!bounds) {
    // default: sigma^2 bounded within a factor 2 of its observed range
    double lo = INFINITY, hi = 0.0;
    const std::size_t upto = std::min(j_max, problem.noise().defined_length().value_or(j_max));
    if (std::holds_alternative<double>(problem.noise().sigma)) {
      lo = hi = problem.sigma(1) * problem.sigma(1);
    } else {
      for (std::size_t j = 1; j <= upto; ++j) {
        const double s2 = problem.sigma(j) * problem.sigma(j);
        lo = std::min(lo, s2);
        hi = std::max(hi, s2);
      }
    }
    bounds = std::make_pair(lo / 2.0, hi * 2.0);
  }
  return {check_condition_A(problem, j_max), check_B1(problem, config.assumptions.j0, j_max),
          check_B2(problem, bounds->first, bounds->second, j_max),
          check_B3(problem, config.assumptions.j0, j_max)};
}

namespace {

FilterWeights choose_weights(const ExperimentConfig& config, const SequenceProblem& problem) {
  switch (config.weights) {
    case WeightsChoice::tikhonov: return tikhonov_weights(problem);
    case WeightsChoice::minimax_linear: return minimax_linear_weights(problem);
    case WeightsChoice::exact_inverse: return exact_inverse_weights(problem);
  }
  return tikhonov_weights(problem);
}

Signal choose_signal(const ExperimentConfig& config, const SequenceProblem& problem) {
  if (const auto* values = std::get_if<std::vector<double>>(&config.signal)) {
    if (values->size() != problem.size()) throw DimensionError("signal length differs from N");
    return Signal{*values};
  }
  if (std::get<std::string>(config.signal) == "zero") return Signal{std::vector<double>(problem.size(), 0.0)};
  return boundary_signal(problem.ball(), problem.size());
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

void run_weights(const ExperimentConfig& config, const SequenceProblem& problem, ExperimentResult& out) {
  const auto w = choose_weights(config, problem);
  Table t{"weights", {"j", "a_j", "sigma_j", "lambda_j", "a_lambda"}, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j) {
    const double a = problem.a(j), lambda = w.lambdas[j - 1];
    t.add_row({as_int(j), a, problem.sigma(j), lambda, a * lambda});
  }
  out.summary["kind"] = to_string(w.kind);
  out.summary["underflow_count"] = w.underflow_indices.size();
  if (config.weights == WeightsChoice::tikhonov) out.summary["penalty_alpha"] = tikhonov_penalty_view(problem).alpha;
  out.tables.push_back(std::move(t));
}

void run_risk(const ExperimentConfig& config, const SequenceProblem& problem, const RunOptions& options,
              ExperimentResult& out) {
  const auto w = choose_weights(config, problem);
  const auto x = choose_signal(config, problem);
  const auto d = filter_risk_at_signal(problem, w, x);
  Table t{"risk_decomposition", {"j", "variance_j", "bias_j"}, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j)
    t.add_row({as_int(j), d.per_index[j - 1].variance, d.per_index[j - 1].bias});
  out.summary["weights"] = to_string(w.kind);
  out.summary["variance"] = d.variance;
  out.summary["bias"] = d.bias;
  out.summary["total"] = d.total;
  if (config.mc.replications >= 2) {
    const auto mc = monte_carlo_risk(problem, w, x, config.mc.replications, config.mc.seed, options.threads);
    out.summary["mc_mean"] = mc.mean;
    out.summary["mc_std_error"] = mc.std_error;
    out.summary["mc_replications"] = mc.replications;
    out.summary["mc_z_score"] = mc.std_error > 0.0 ? (mc.mean - d.total) / mc.std_error : 0.0;
  }
  out.tables.push_back(std::move(t));
}

void run_suprisk(const ExperimentConfig& config, const SequenceProblem& problem, ExperimentResult& out) {
  const auto w = choose_weights(config, problem);
  const auto s = sup_risk_over_ball(problem, w);
  Table t{"sup_risk", {"j", "u_j", "v_j", "binding"}, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j)
    t.add_row({as_int(j), s.maximizer_u[j - 1], s.maximizer_v[j - 1],
               std::int64_t{s.suffix_binding[j - 1] ? 1 : 0}});
  const auto ml = minimax_linear_risk(problem);
  out.summary["weights"] = to_string(w.kind);
  out.summary["sup_risk"] = s.value;
  out.summary["variance"] = s.variance;
  out.summary["bias"] = s.bias;
  out.summary["tail_bias"] = s.tail_bias;
  out.summary["minimax_linear_risk"] = ml.total;
  out.summary["minimax_linear_in_band"] = ml.in_band;
  out.summary["minimax_linear_tail"] = ml.truncation_tail;
  out.summary["asymptotic_minimax_risk"] = asymptotic_minimax_risk(problem).value;
  if (config.theta_reading == ThetaReading::backward)
    out.summary["minimax_linear_backward_reading"] = minimax_linear_risk_backward_reading(problem);
  out.tables.push_back(std::move(t));
}

void run_minimax_check(const ExperimentConfig& config, const SequenceProblem& problem, ExperimentResult& out) {
  const auto best = minimax_linear_weights(problem);
  const auto best_sup = sup_risk_over_ball(problem, best).value;
  const auto ml = minimax_linear_risk(problem);
  const NormalField field(config.mc.seed, StreamDomain::weight_perturbation);
  const double lmin = std::log(config.minimax_check.scale_min), lmax = std::log(config.minimax_check.scale_max);

  Table t{"perturbations", {"index", "kind", "scale", "sup_risk", "excess"}, {}};
  std::size_t violations = 0;
  double min_excess = INFINITY;
  auto record = [&](std::size_t idx, const char* kind, double scale, const FilterWeights& w) {
    const double sup = sup_risk_over_ball(problem, w).value;
    const double excess = sup - best_sup;
    if (excess < -1e-12 * best_sup) ++violations;
    min_excess = std::min(min_excess, excess);
    t.add_row({as_int(idx), std::string(kind), scale, sup, excess});
  };
  for (std::size_t p = 0; p < config.minimax_check.perturbations; ++p) {
    const double scale = std::exp(lmin + (lmax - lmin) * field.uniform(p, 0));
    FilterWeights w = best;
    w.kind = FilterKind::custom;
    for (std::size_t j = 0; j < w.size(); ++j) w.lambdas[j] *= 1.0 + scale * field.normal(p, j + 2);
    record(p, "random", scale, w);
  }
  if (problem.size() <= 2000) {
    const double scale = config.minimax_check.scale_max;
    for (std::size_t j = 0; j < problem.size(); ++j) {
      for (double sign : {-1.0, 1.0}) {
        FilterWeights w = best;
        w.kind = FilterKind::custom;
        w.lambdas[j] *= 1.0 + sign * scale;
        record(j + 1, sign < 0 ? "coordinate-" : "coordinate+", scale, w);
      }
    }
  }
  out.summary["sup_risk_minimax_linear"] = best_sup;
  out.summary["minimax_linear_risk"] = ml.total;
  out.summary["identity_rel_error"] = std::abs(best_sup - ml.total) / ml.total;
  out.summary["perturbations_tested"] = t.rows.size();
  out.summary["violations"] = violations;
  out.summary["min_excess"] = min_excess;
  out.tables.push_back(std::move(t));
}

void run_lower_bound(const ExperimentConfig& config, SequenceProblem problem, const RunOptions& options,
                     ExperimentResult& out) {
  const auto& lb = config.lower_bound;
  auto prior = build_prior(problem, lb.delta, lb.delta1, lb.convention);
  if (problem.size() < prior.l2) problem = problem.with_size(prior.l2);
  const auto bayes = bayes_risk(prior, problem);
  const auto series =
      adaptive_asymptotic_minimax_risk(problem.spectrum(), problem.noise(), problem.ball(), config.convergence.rel_tol,
                                       config.convergence.max_terms);
  const auto excl = exclusion_probability(prior, problem.ball(), lb.samples, config.mc.seed, options.threads);
  const auto bound = hkz_exclusion_bound(prior, problem.ball());

  out.summary["N_used"] = problem.size();
  out.summary["variance_convention"] = to_string(prior.convention);
  out.summary["k_eps"] = prior.k_eps;
  out.summary["l1"] = prior.l1;
  out.summary["l2"] = prior.l2;
  out.summary["bayes_risk_exact"] = bayes.exact;
  out.summary["bayes_risk_asymptotic"] = bayes.asymptotic;
  out.summary["asymptotic_minimax_risk"] = series.value;
  out.summary["ratio_bayes_to_minimax"] = bayes.exact / series.value;
  out.summary["exclusion_estimate"] = excl.estimate;
  out.summary["exclusion_std_error"] = excl.std_error;
  out.summary["exclusion_samples"] = excl.samples;
  out.summary["union_bound"] = bound.sum_bound;
  out.summary["union_bound_optimal_t"] = bound.sum_optimal_bound;
  out.summary["union_bound_closed_form"] = bound.closed_form;
  out.summary["vacuous_indices"] = bound.vacuous_count;

  Table prior_table{"prior", {"j", "variance_j"}, {}};
  for (std::size_t j = prior.l1; j <= prior.l2; ++j) prior_table.add_row({as_int(j), prior.variance(j)});
  Table bound_table{"tail_bounds", {"i", "J_i_bound", "trace", "threshold", "vacuous", "optimal_bound"}, {}};
  for (const auto& row : bound.rows)
    bound_table.add_row({as_int(row.i), row.bound, row.trace, row.threshold, std::int64_t{row.vacuous ? 1 : 0},
                         row.optimal_bound});
  out.tables.push_back(std::move(prior_table));
  out.tables.push_back(std::move(bound_table));
}

void run_convergence(const ExperimentConfig& config, const RunOptions& options, ExperimentResult& out) {
  ConvergenceOptions opts{config.convergence.rel_tol, config.convergence.max_terms, options.threads};
  const auto study = convergence_study(config.spectrum, config.noise, config.ball, config.epsilon_grid, opts);
  Table t{"convergence", {"epsilon", "N_used", "R_exact", "rate_factor", "ratio"}, {}};
  for (const auto& row : study.rows) t.add_row({row.epsilon, as_int(row.n_used), row.risk, row.rate_factor, row.ratio});
  Table series{"series", {"epsilon", "ratio"}, {}};
  for (const auto& row : study.rows) series.add_row({row.epsilon, row.ratio});

  out.summary["rate_exponent"] = study.prediction.rate_exponent;
  out.summary["constant_limit_integral"] = study.prediction.constant;
  if (study.printed_prediction) {
    out.summary["constant_printed_formula"] = study.printed_prediction->constant;
    out.summary["printed_constant_discrepancy"] =
        study.printed_prediction->constant / study.prediction.constant - 1.0;
  }
  out.summary["fitted_slope"] = study.fitted_slope;
  out.summary["stabilization"] = study.stabilization;
  out.summary["final_ratio"] = study.rows.back().ratio;
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(series));
}

void run_simulate(const ExperimentConfig& config, const SequenceProblem& problem, ExperimentResult& out) {
  const auto x = choose_signal(config, problem);
  const auto y = simulate_observation(problem, x, config.mc.seed, 0);
  Table t{"observation", {"j", "x_j", "y_j"}, {}};
  for (std::size_t j = 1; j <= problem.size(); ++j) t.add_row({as_int(j), x.coeffs[j - 1], y.values[j - 1]});
  out.tables.push_back(std::move(t));
}

}  // namespace

Json echoed_config(const ExperimentConfig& config) {
  // the destination is not part of the result; reruns into different files compare equal
  Json j = to_json(config);
  if (j.contains("output")) j["output"].erase("path");
  return j;
}

ExperimentResult run(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  out.config = echoed_config(config);
  const auto problem = make_problem(config);
  out.assumptions = assumption_reports(config, problem);
  switch (config.experiment) {
    case ExperimentKind::weights: run_weights(config, problem, out); break;
    case ExperimentKind::risk: run_risk(config, problem, options, out); break;
    case ExperimentKind::suprisk: run_suprisk(config, problem, out); break;
    case ExperimentKind::minimax_check: run_minimax_check(config, problem, out); break;
    case ExperimentKind::lower_bound: run_lower_bound(config, problem, options, out); break;
    case ExperimentKind::convergence: run_convergence(config, options, out); break;
    case ExperimentKind::simulate: run_simulate(config, problem, out); break;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string render(const ExperimentResult& result, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::csv) {
    os << "# experiment: " << result.config.value("experiment", "") << '\n';
    os << "# config: " << result.config.dump() << '\n';
    for (const auto& rep : result.assumptions) os << "# assumption: " << to_json(rep).dump() << '\n';
    os << "# summary: " << result.summary.dump() << '\n';
    for (std::size_t i = 0; i < result.tables.size(); ++i) {
      if (i) os << '\n';
      os << "# table: " << result.tables[i].name << '\n' << to_csv(result.tables[i]);
    }
    return os.str();
  }
  os << Json{{"record", "config"}, {"config", result.config}}.dump() << '\n';
  for (const auto& rep : result.assumptions) {
    Json j{{"record", "assumption"}};
    j.update(to_json(rep));
    os << j.dump() << '\n';
  }
  os << Json{{"record", "summary"}, {"summary", result.summary}}.dump() << '\n';
  for (const auto& table : result.tables) {
    for (const auto& row : table.rows) {
      Json j{{"record", "row"}, {"table", table.name}};
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::visit([&](const auto& v) { j[table.columns[c]] = v; }, row[c]);
      }
      os << j.dump() << '\n';
    }
  }
  return os.str();
}

}  // namespace tikreg
