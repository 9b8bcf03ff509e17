#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "fcpd/csv.hpp"
#include "fcpd/errors.hpp"
#include "fcpd/pipeline.hpp"
#include "support.hpp"

using namespace fcpd;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("fcpd_test_" + name);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("csv round trip") {
  const FSeries xs = testsupport::random_series(5, 7, 42);
  const auto path = temp_file("round.csv");
  write_csv(path.string(), xs, false, "made by a test");
  const FSeries back = read_csv(path.string());
  REQUIRE(back.n() == 5);
  REQUIRE(back.m() == 7);
  REQUIRE((back.data() - xs.data()).cwiseAbs().maxCoeff() == 0.0);
  fs::remove(path);
}

TEST_CASE("csv grid row") {
  const auto path = temp_file("grid.csv");
  write_file(path, "0.0,0.2,0.7,1.0\n1,2,3,4\n5,6,7,8\n");
  const FSeries xs = read_csv(path.string(), true);
  REQUIRE(xs.n() == 2);
  REQUIRE(xs.grid().points()[2] == 0.7);
  REQUIRE(xs.data()(1, 3) == 8.0);
  fs::remove(path);
}

TEST_CASE("csv rejects bad input with diagnostics") {
  const auto path = temp_file("bad.csv");

  write_file(path, "1,2,3\n4,oops,6\n");
  try {
    read_csv(path.string());
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("line 2") != std::string::npos);
    REQUIRE(msg.find("column 2") != std::string::npos);
  }

  write_file(path, "1,2,3\n4,5\n");
  REQUIRE_THROWS_AS(read_csv(path.string()), std::invalid_argument);

  write_file(path, "1,2,3\n4,,6\n");
  REQUIRE_THROWS_AS(read_csv(path.string()), std::invalid_argument);

  write_file(path, "1,2,3\n4,nan,6\n");
  REQUIRE_THROWS_AS(read_csv(path.string()), std::invalid_argument);

  write_file(path, "1,2,3\n");
  REQUIRE_THROWS_AS(read_csv(path.string()), std::invalid_argument);

  REQUIRE_THROWS_AS(read_csv("/nonexistent/nothing.csv"), std::invalid_argument);
  fs::remove(path);
}

TEST_CASE("detect on constant data") {
  Eigen::MatrixXd rows(30, 9);
  rows.setConstant(1.25);
  const FSeries xs(rows, Grid::equispaced01(9));

  RunConfig cfg;
  cfg.method = Method::FF;
  cfg.mc_reps = 200;
  cfg.grid_steps = 100;
  const DetectResult res = detect_on(xs, cfg);
  REQUIRE(res.report.statistic == 0.0);
  REQUIRE(*res.report.pvalue == 1.0);

  cfg.method = Method::WF;
  REQUIRE_THROWS_AS(detect_on(xs, cfg), degeneracy_error);
}

TEST_CASE("detect rejects a strong simulated change and replays bit-identically") {
  SimSpec sim;
  sim.n = 120;
  sim.m = 31;
  sim.seed = 9;
  sim.change = ChangeFn::amoc(0.5);
  sim.delta.kind = DeltaSpec::Kind::basis;
  sim.delta.basis_index = 1;
  sim.scale = 3.0;
  const FSeries xs = run_simulate(sim);

  for (Method method : {Method::FF, Method::WF, Method::PC}) {
    RunConfig cfg;
    cfg.method = method;
    cfg.num_components = method == Method::PC ? std::optional<Eigen::Index>(3)
                                              : std::nullopt;
    cfg.mc_reps = 500;
    cfg.grid_steps = 250;
    cfg.seed = 31;
    const DetectResult res = detect_on(xs, cfg);
    REQUIRE(*res.report.pvalue <= 0.05);
    REQUIRE(res.report.statistic > *res.report.critical_value);
    REQUIRE(res.report.theta_hat == Approx(0.5).margin(0.08));

    const DetectResult again = detect_on(xs, cfg);
    REQUIRE(res.document.dump() == again.document.dump());
  }
}

TEST_CASE("detect validates its configuration") {
  const FSeries xs = testsupport::random_series(20, 5, 77);
  RunConfig cfg;
  cfg.alpha = 1.5;
  REQUIRE_THROWS_AS(detect_on(xs, cfg), std::invalid_argument);
  cfg = RunConfig{};
  cfg.mc_reps = 10;  // p-values need at least 100 draws
  REQUIRE_THROWS_AS(detect_on(xs, cfg), std::invalid_argument);
  cfg = RunConfig{};
  cfg.bandwidth = 0.2;
  REQUIRE_THROWS_AS(detect_on(xs, cfg), std::invalid_argument);
  cfg = RunConfig{};
  cfg.kernel = "gauss";
  REQUIRE_THROWS_AS(detect_on(xs, cfg), std::invalid_argument);
}

TEST_CASE("simulate specs parse and run deterministically") {
  const auto j = nlohmann::json::parse(R"({
    "n": 50, "m": 21, "seed": 4,
    "noise": {"kind": "far1", "decay": "exponential", "rho": 0.5,
              "num_terms": 11, "far1_coeff": 0.4},
    "change": {"kind": "delayed_gradual", "theta": 0.4, "h": "power:1"},
    "delta": {"kind": "constant", "value": 2.0},
    "scale": 1.5, "mu": 0.25
  })");
  const SimSpec spec = parse_sim_spec(j);
  REQUIRE(spec.noise.kind == NoiseSpec::Kind::far1);
  REQUIRE(spec.change.has_value());
  const FSeries a = run_simulate(spec);
  const FSeries b = run_simulate(spec);
  REQUIRE(a.data() == b.data());
  REQUIRE(a.n() == 50);

  // mu shifts every row by a constant.
  auto j2 = j;
  j2["mu"] = 0.0;
  const FSeries c = run_simulate(parse_sim_spec(j2));
  REQUIRE((a.data() - c.data()).cwiseAbs().maxCoeff() == Approx(0.25).margin(1e-12));

  REQUIRE_THROWS_AS(parse_sim_spec(nlohmann::json::parse(R"({"n":1})")),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      parse_sim_spec(nlohmann::json::parse(R"({"noise":{"kind":"white"}})")),
      std::invalid_argument);
}

TEST_CASE("power study sizes, power direction and determinism") {
  const auto j = nlohmann::json::parse(R"({
    "seed": 5, "replicates": 24, "alpha": 0.10, "mc_reps": 200,
    "grid_steps": 100, "threads": 1, "m": 15, "n": [60],
    "noise": {"kind": "iid_kl", "decay": "polynomial", "kappa": 2.0, "num_terms": 9},
    "delta": {"kind": "basis", "index": 1},
    "methods": [{"method": "ff"}, {"method": "wf"},
                {"method": "pc", "num_components": 2},
                {"method": "ff", "h": "power:1"}],
    "alternatives": [{"kind": "amoc", "theta": 0.5}],
    "scales": [0.0, 4.0]
  })");
  const StudySpec spec = parse_study_spec(j);
  const auto rows = power_study(spec);
  REQUIRE(rows.size() == 8);  // 4 methods x 1 alternative x 2 scales

  for (const auto& row : rows) {
    REQUIRE(row.rejection_rate >= 0.0);
    REQUIRE(row.rejection_rate <= 1.0);
    REQUIRE(row.replicates == 24);
    REQUIRE(row.mc_se ==
            Approx(std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / 24.0))
                .margin(1e-12));
  }
  // Strong signal beats the null rate for every method.
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& null_row = rows[m];
    const auto& alt_row = rows[4 + m];
    REQUIRE(null_row.scale == 0.0);
    REQUIRE(alt_row.scale == 4.0);
    REQUIRE(alt_row.rejection_rate >= null_row.rejection_rate);
    REQUIRE(alt_row.rejection_rate >= 0.8);
    REQUIRE(alt_row.mean_theta_err >= 0.0);
  }
  // The AMOC-designed statistics localize the change; the gradual variant
  // peaks near the onset of its weight window instead.
  for (std::size_t m = 0; m < 3; ++m) {
    REQUIRE(rows[4 + m].mean_theta_err <= 0.2);
  }

  const auto rows2 = power_study(spec);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].rejection_rate == rows2[i].rejection_rate);
  }

  const std::string csv = study_rows_to_csv(spec, rows);
  REQUIRE(csv.find("method,alternative,n,scale") != std::string::npos);
  REQUIRE(csv.find("pc[d=2]") != std::string::npos);
  REQUIRE(csv.find("ff[h=power:1]") != std::string::npos);
}

#ifdef FCPD_CLI_PATH
TEST_CASE("cli end to end with exit codes") {
  const std::string cli = FCPD_CLI_PATH;
  const auto data = temp_file("cli_data.csv");
  const auto out = temp_file("cli_report.json");
  const auto spec = temp_file("cli_sim.json");

  write_file(spec, R"({"n": 80, "m": 21, "seed": 12,
    "noise": {"kind": "iid_kl", "kappa": 2.0, "num_terms": 9},
    "change": {"kind": "amoc", "theta": 0.5},
    "delta": {"kind": "basis", "index": 1}, "scale": 3.0})");

  const auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };

  REQUIRE(run("simulate --spec " + spec.string() + " --output " + data.string()) == 0);
  REQUIRE(fs::exists(data));

  REQUIRE(run("detect --input " + data.string() + " --method wf --mc-reps 200 " +
              "--grid-steps 100 --seed 3 --output " + out.string()) == 0);
  std::ifstream in(out);
  const auto doc = nlohmann::json::parse(in);
  REQUIRE(doc.at("method") == "wf");
  REQUIRE(doc.at("pvalue").get<double>() <= 0.05);
  REQUIRE(doc.at("library").at("version") == "0.1.0");

  REQUIRE(run("critvals --eigenvalues 1.0,0.5 --method ff --mc-reps 200 "
              "--grid-steps 100 --alphas 0.05") == 0);

  // Input problems exit 2; degenerate data exits 3.
  REQUIRE(run("detect --input /nonexistent.csv") == 2);
  REQUIRE(run("detect --input " + data.string() + " --method xx") == 2);
  REQUIRE(run("nonsense") == 2);

  const auto flat = temp_file("cli_flat.csv");
  write_file(flat, "1,1,1\n1,1,1\n1,1,1\n");
  REQUIRE(run("detect --input " + flat.string() + " --method wf --mc-reps 200") == 3);

  fs::remove(data);
  fs::remove(out);
  fs::remove(spec);
  fs::remove(flat);
}
#endif
