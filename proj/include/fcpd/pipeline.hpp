#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcpd/covariance.hpp"
#include "fcpd/dgp.hpp"
#include "fcpd/fseries.hpp"
#include "fcpd/limits.hpp"
#include "fcpd/stats_amoc.hpp"
#include "fcpd/stats_gradual.hpp"
#include "fcpd/weight.hpp"

namespace fcpd {

/// Everything one detect run needs; mirrors the CLI flags.
struct RunConfig {
  std::string input;
  std::string output;
  Method method = Method::WF;
  std::optional<WeightFn> h;  // present: gradual statistic
  std::string kernel = "bartlett";
  std::optional<double> bandwidth;  // absent: rate-based default
  std::optional<Eigen::Index> num_components;
  std::optional<double> energy;  // PC truncation when no explicit count
  double alpha = 0.05;
  int mc_reps = 2000;
  int grid_steps = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool grid_row = false;
};

struct DetectResult {
  TestReport report;
  std::vector<double> eigenvalues;
  double bandwidth = 0.0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  nlohmann::json document;
};

/// Core detect pipeline on in-memory data: long-run covariance, spectrum,
/// statistic, Monte Carlo calibration with the estimated eigenvalues.
DetectResult detect_on(const FSeries& xs, const RunConfig& cfg);

/// detect_on after loading cfg.input from CSV.
DetectResult detect_pipeline(const RunConfig& cfg);

/// How delta (the change direction) is specified in JSON specs.
struct DeltaSpec {
  enum class Kind { basis, constant, values };
  Kind kind = Kind::basis;
  int basis_index = 1;   // 1-based Fourier basis index
  double constant = 1.0;
  std::vector<double> values;
};

Curve build_delta(const DeltaSpec& spec, const Grid& grid);

/// Dataset simulation spec (JSON file for the `simulate` subcommand).
struct SimSpec {
  Eigen::Index n = 200;
  Eigen::Index m = 51;
  std::uint64_t seed = 1;
  NoiseSpec noise;
  std::optional<ChangeFn> change;  // absent: null data
  DeltaSpec delta;
  double scale = 1.0;
  double mu = 0.0;
};

SimSpec parse_sim_spec(const nlohmann::json& j);
FSeries run_simulate(const SimSpec& spec);

/// One statistic requested in a study.
struct MethodSpec {
  Method method = Method::FF;
  std::optional<WeightFn> h;
  std::optional<Eigen::Index> num_components;
  std::optional<double> energy;

  std::string label() const;
};

/// Simulation-study grid: methods x alternatives x scales x sample sizes,
/// with shared replicates per cell row.
struct StudySpec {
  std::uint64_t seed = 1;
  int replicates = 500;
  double alpha = 0.05;
  int mc_reps = 2000;
  int grid_steps = 1000;
  int threads = 1;
  Eigen::Index m = 51;
  std::vector<Eigen::Index> sample_sizes;
  NoiseSpec noise;
  DeltaSpec delta;
  std::string kernel = "bartlett";
  std::optional<double> bandwidth;
  std::vector<MethodSpec> methods;
  std::vector<std::optional<ChangeFn>> alternatives;  // nullopt = null model
  std::vector<std::string> alternative_labels;
  std::vector<double> scales;
};

StudySpec parse_study_spec(const nlohmann::json& j);

struct StudyRow {
  std::string method;
  std::string alternative;
  Eigen::Index n = 0;
  double scale = 0.0;
  int replicates = 0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  double mean_theta_err = -1.0;  // negative: no reference change point
};

std::vector<StudyRow> power_study(const StudySpec& spec);

std::string study_rows_to_csv(const StudySpec& spec, const std::vector<StudyRow>& rows);

nlohmann::json noise_spec_to_json(const NoiseSpec& spec);
NoiseSpec parse_noise_spec(const nlohmann::json& j);
std::optional<ChangeFn> parse_change_spec(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

}  // namespace fcpd
