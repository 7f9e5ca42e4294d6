#pragma once

// Configuration-driven experiment runner. A config is a JSON document:
//
//   {
//     "experiment": "weights",
//     "spectrum": {"family": "poly", "C": 1, "gamma": 1},
//     "noise": {"sigma": 1, "epsilon": 0.1},
//     "ball": {"r": 1, "P0": 1},
//     "N": 100,
//     "mc": {"replications": 10000, "seed": 1},
//     "output": {"path": "weights.csv", "format": "csv"}
//   }
//
// Unknown keys are rejected. See README.md for the full key list.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tikreg/assumptions.hpp"
#include "tikreg/lower_bound.hpp"
#include "tikreg/output.hpp"
#include "tikreg/sequence_model.hpp"

namespace tikreg {

using Json = nlohmann::ordered_json;

enum class ExperimentKind { weights, risk, suprisk, minimax_check, lower_bound, convergence, simulate };
enum class OutputFormat { csv, json_lines };
enum class WeightsChoice { tikhonov, minimax_linear, exact_inverse };
enum class ThetaReading { forward, backward };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& tag);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::weights;
  OperatorSpectrum spectrum = PolyDecay{};
  NoiseProfile noise;
  BesovBall ball;
  std::optional<std::size_t> N;

  WeightsChoice weights = WeightsChoice::tikhonov;
  /// "boundary", "zero", or explicit coefficients.
  std::variant<std::string, std::vector<double>> signal = std::string("boundary");
  ThetaReading theta_reading = ThetaReading::forward;

  struct {
    std::size_t replications = 10000;
    std::uint64_t seed = 1;
  } mc;

  std::vector<double> epsilon_grid;

  struct {
    double delta = 0.05;
    double delta1 = 0.01;
    std::size_t samples = 10000;
    VarianceConvention convention = VarianceConvention::matched;
  } lower_bound;

  struct {
    std::size_t perturbations = 200;
    double scale_min = 1e-3;
    double scale_max = 1e-1;
  } minimax_check;

  struct {
    std::size_t j0 = 1;
    std::optional<std::size_t> j_max;
    std::optional<std::pair<double, double>> sigma_bounds;
  } assumptions;

  struct {
    double rel_tol = 1e-8;
    std::size_t max_terms = 100'000'000;
  } convergence;

  struct {
    std::optional<std::string> path;
    OutputFormat format = OutputFormat::csv;
  } output;
};

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
Json to_json(const ExperimentConfig& config);

/// The problem described by the config; N defaults to the truncation whose
/// neglected risk tail is below 1e-6 relative.
SequenceProblem make_problem(const ExperimentConfig& config);

struct ExperimentResult {
  Json config;
  std::vector<AssumptionReport> assumptions;
  Json summary = Json::object();
  std::vector<Table> tables;
  double wall_seconds = 0.0;
};

struct RunOptions {
  unsigned threads = 1;
};

std::vector<AssumptionReport> assumption_reports(const ExperimentConfig& config, const SequenceProblem& problem);

/// to_json(config) without output.path, as echoed in rendered results.
Json echoed_config(const ExperimentConfig& config);

ExperimentResult run(const ExperimentConfig& config, const RunOptions& options = {});

Json to_json(const AssumptionReport& report);

/// Serialized result. Contains no timing information, so reruns with the
/// same config are byte-identical.
std::string render(const ExperimentResult& result, OutputFormat format);

}  // namespace tikreg
