#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcpd/csv.hpp"
#include "fcpd/errors.hpp"
#include "fcpd/pipeline.hpp"
#include "fcpd/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad JSON in '" + path + "': " + e.what());
  }
  return j;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

struct DetectArgs {
  fcpd::RunConfig cfg;
  std::string bandwidth = "auto";
  std::string method = "wf";
  std::string weight;
  long long num_components = 0;
  double energy = 0.0;
};

void run_detect(DetectArgs& args) {
  args.cfg.method = fcpd::method_by_name(args.method);
  if (!args.weight.empty()) args.cfg.h = fcpd::WeightFn::parse(args.weight);
  if (args.bandwidth != "auto") {
    try {
      args.cfg.bandwidth = std::stod(args.bandwidth);
    } catch (const std::exception&) {
      throw std::invalid_argument("--bandwidth must be 'auto' or a number");
    }
  }
  if (args.num_components > 0) args.cfg.num_components = args.num_components;
  if (args.energy > 0.0) args.cfg.energy = args.energy;
  const fcpd::DetectResult res = fcpd::detect_pipeline(args.cfg);
  write_text(args.cfg.output, res.document.dump(2) + "\n");
}

struct CritvalArgs {
  std::string eigenvalues;
  std::string eigenvalues_file;
  std::string from_data;
  bool grid_row = false;
  std::string kernel = "bartlett";
  std::string bandwidth = "auto";
  std::string method = "wf";
  std::string weight;
  long long num_components = 1;
  std::string alphas = "0.10,0.05,0.01";
  int mc_reps = 2000;
  int grid_steps = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "json";
  std::string output;
};

void run_critvals(const CritvalArgs& args) {
  std::vector<double> eigenvalues;
  if (!args.eigenvalues.empty()) {
    eigenvalues = parse_double_list(args.eigenvalues, "--eigenvalues");
  } else if (!args.eigenvalues_file.empty()) {
    const json j = load_json_file(args.eigenvalues_file);
    if (!j.is_array()) {
      throw std::invalid_argument("--eigenvalues-file must hold a JSON array");
    }
    eigenvalues = j.get<std::vector<double>>();
  } else if (!args.from_data.empty()) {
    const fcpd::FSeries xs = fcpd::read_csv(args.from_data, args.grid_row);
    const fcpd::KernelFn kern = fcpd::KernelFn::by_name(args.kernel);
    fcpd::Bandwidth bw = args.bandwidth == "auto"
                             ? fcpd::default_bandwidth(xs.n(), kern)
                             : fcpd::Bandwidth{std::stod(args.bandwidth)};
    const fcpd::Spectrum sp = fcpd::eig(fcpd::lrcov(xs, kern, bw));
    eigenvalues.assign(sp.values.data(), sp.values.data() + sp.count());
  } else {
    throw std::invalid_argument(
        "critvals needs --eigenvalues, --eigenvalues-file or --from-data");
  }

  const fcpd::Method method = fcpd::method_by_name(args.method);
  std::optional<fcpd::WeightFn> h;
  if (!args.weight.empty()) h = fcpd::WeightFn::parse(args.weight);
  const std::vector<double> alphas = parse_double_list(args.alphas, "--alphas");

  const auto samples = fcpd::limit_bundle(
      {fcpd::LimitSpec{method, h.has_value(),
                       static_cast<Eigen::Index>(args.num_components)}},
      eigenvalues, h, args.mc_reps, args.grid_steps, args.seed, args.threads);
  const fcpd::LimitSamples& lim = samples.front();

  json rows = json::array();
  for (double alpha : alphas) {
    const double crit_sq = fcpd::crit_value(lim, alpha);
    const double crit =
        method == fcpd::Method::PC ? crit_sq : std::sqrt(crit_sq);
    rows.push_back(json{{"alpha", alpha},
                        {"critical_value", crit},
                        {"critical_value_squared", crit_sq}});
  }
  json doc{{"schema_version", fcpd::kReportSchemaVersion},
           {"library", json{{"name", fcpd::kLibraryName},
                            {"version", fcpd::kLibraryVersion}}},
           {"family", fcpd::limit_family_name(lim.family)},
           {"weight", h ? json(h->describe()) : json()},
           {"d", args.num_components},
           {"mc_reps", args.mc_reps},
           {"grid_steps", args.grid_steps},
           {"seed", args.seed},
           {"eigenvalue_count", eigenvalues.size()},
           {"critical_values", rows}};
  if (args.format == "json") {
    write_text(args.output, doc.dump(2) + "\n");
  } else if (args.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "# " << doc.dump() << "\n";
    os << "alpha,critical_value,critical_value_squared\n";
    for (const auto& row : rows) {
      os << row.at("alpha").get<double>() << ','
         << row.at("critical_value").get<double>() << ','
         << row.at("critical_value_squared").get<double>() << "\n";
    }
    write_text(args.output, os.str());
  } else {
    throw std::invalid_argument("--format must be json or csv");
  }
}

void run_simulate(const std::string& spec_path, const std::string& output,
                  bool grid_row) {
  const json j = load_json_file(spec_path);
  const fcpd::SimSpec spec = fcpd::parse_sim_spec(j);
  const fcpd::FSeries data = fcpd::run_simulate(spec);
  json echo = j;
  echo["library"] =
      json{{"name", fcpd::kLibraryName}, {"version", fcpd::kLibraryVersion}};
  fcpd::write_csv(output, data, grid_row, "fcpd simulate " + echo.dump());
}

void run_power_study(const std::string& spec_path, const std::string& output,
                     int threads_override) {
  const json j = load_json_file(spec_path);
  fcpd::StudySpec spec = fcpd::parse_study_spec(j);
  if (threads_override > 0) spec.threads = threads_override;
  const auto rows = fcpd::power_study(spec);
  write_text(output, fcpd::study_rows_to_csv(spec, rows));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change point tests for functional time series"};
  // Free the short -h for the gradual weight flag; help stays on --help.
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  DetectArgs detect;
  auto* cmd_detect = app.add_subcommand(
      "detect", "Test one dataset for a mean change and emit a JSON report");
  cmd_detect->add_option("--input", detect.cfg.input, "CSV dataset, one row per curve")
      ->required();
  cmd_detect->add_option("--output", detect.cfg.output, "report path (default stdout)");
  cmd_detect->add_option("--method", detect.method, "statistic: pc, ff or wf");
  cmd_detect->add_option("--h", detect.weight,
                         "gradual weight 'power:<alpha>' or 'step' (omit for AMOC)");
  cmd_detect->add_option("--kernel", detect.cfg.kernel, "bartlett, parzen or flattop");
  cmd_detect->add_option("--bandwidth", detect.bandwidth, "'auto' or a value in [1,n]");
  cmd_detect->add_option("--num-components", detect.num_components,
                         "projection dimension for pc");
  cmd_detect->add_option("--energy", detect.energy,
                         "eigenvalue mass for automatic pc dimension");
  cmd_detect->add_option("--alpha", detect.cfg.alpha, "test level");
  cmd_detect->add_option("--mc-reps", detect.cfg.mc_reps, "Monte Carlo draws");
  cmd_detect->add_option("--grid-steps", detect.cfg.grid_steps, "limit time grid steps");
  cmd_detect->add_option("--seed", detect.cfg.seed, "RNG seed");
  cmd_detect->add_option("--threads", detect.cfg.threads, "worker threads (0 = auto)");
  cmd_detect->add_flag("--grid-row", detect.cfg.grid_row,
                       "first CSV row holds the grid points");

  std::string sim_spec, sim_output;
  bool sim_grid_row = false;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  cmd_sim->add_option("--spec", sim_spec, "JSON spec file")->required();
  cmd_sim->add_option("--output", sim_output, "CSV output path")->required();
  cmd_sim->add_flag("--grid-row", sim_grid_row, "write the grid points row");

  CritvalArgs critvals;
  auto* cmd_crit = app.add_subcommand(
      "critvals", "Simulate null critical values for given eigenvalues");
  cmd_crit->add_option("--eigenvalues", critvals.eigenvalues,
                       "comma-separated eigenvalues");
  cmd_crit->add_option("--eigenvalues-file", critvals.eigenvalues_file,
                       "JSON array file");
  cmd_crit->add_option("--from-data", critvals.from_data,
                       "estimate eigenvalues from this CSV dataset");
  cmd_crit->add_flag("--grid-row", critvals.grid_row,
                     "first CSV row holds the grid points");
  cmd_crit->add_option("--kernel", critvals.kernel, "bartlett, parzen or flattop");
  cmd_crit->add_option("--bandwidth", critvals.bandwidth, "'auto' or a value");
  cmd_crit->add_option("--method", critvals.method, "pc, ff or wf");
  cmd_crit->add_option("--h", critvals.weight, "gradual weight (omit for AMOC)");
  cmd_crit->add_option("--num-components", critvals.num_components, "d for pc");
  cmd_crit->add_option("--alphas", critvals.alphas, "comma-separated levels");
  cmd_crit->add_option("--mc-reps", critvals.mc_reps, "Monte Carlo draws");
  cmd_crit->add_option("--grid-steps", critvals.grid_steps, "limit time grid steps");
  cmd_crit->add_option("--seed", critvals.seed, "RNG seed");
  cmd_crit->add_option("--threads", critvals.threads, "worker threads (0 = auto)");
  cmd_crit->add_option("--format", critvals.format, "json or csv");
  cmd_crit->add_option("--output", critvals.output, "output path (default stdout)");

  std::string study_spec, study_output;
  int study_threads = 0;
  auto* cmd_study = app.add_subcommand(
      "power-study", "Run a size/power table over methods x alternatives x scales");
  cmd_study->add_option("--spec", study_spec, "JSON study spec")->required();
  cmd_study->add_option("--output", study_output, "CSV output path (default stdout)");
  cmd_study->add_option("--threads", study_threads, "override spec threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (cmd_detect->parsed()) {
      run_detect(detect);
    } else if (cmd_sim->parsed()) {
      run_simulate(sim_spec, sim_output, sim_grid_row);
    } else if (cmd_crit->parsed()) {
      run_critvals(critvals);
    } else if (cmd_study->parsed()) {
      run_power_study(study_spec, study_output, study_threads);
    }
  } catch (const fcpd::degeneracy_error& e) {
    std::cerr << "error (degenerate data): " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (input): " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
