#include "fcpd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fcpd/csv.hpp"
#include "fcpd/rng.hpp"
#include "fcpd/version.hpp"

namespace fcpd {

namespace {

using nlohmann::json;

void validate_config(const RunConfig& cfg, Eigen::Index n) {
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    throw std::invalid_argument("config: alpha must be in (0,1)");
  }
  if (cfg.mc_reps < 100) {
    throw std::invalid_argument("config: need at least 100 Monte Carlo draws");
  }
  if (cfg.grid_steps < 2) {
    throw std::invalid_argument("config: need at least 2 limit grid steps");
  }
  if (cfg.bandwidth &&
      (!(*cfg.bandwidth >= 1.0) || *cfg.bandwidth > static_cast<double>(n))) {
    throw std::invalid_argument("config: bandwidth must lie in [1, n]");
  }
  if (cfg.energy && (!(*cfg.energy > 0.0) || *cfg.energy > 1.0)) {
    throw std::invalid_argument("config: energy share must be in (0,1]");
  }
}

Eigen::Index resolve_components(const Spectrum& spec,
                                const std::optional<Eigen::Index>& count,
                                const std::optional<double>& energy) {
  if (count) {
    if (*count < 1 || *count > spec.count()) {
      throw std::invalid_argument("config: component count out of range");
    }
    return *count;
  }
  return truncate(spec, Truncation::energy(energy.value_or(0.85))).count();
}

TestReport run_statistic(const FSeries& xs, Method method,
                         const std::optional<WeightFn>& h, const Spectrum& spec,
                         Eigen::Index d) {
  if (h) {
    switch (method) {
      case Method::FF: return t_ff_grad(xs, *h);
      case Method::WF: return t_wf_grad(xs, *h, spec);
      case Method::PC: return t_pc_grad(xs, *h, spec, d);
    }
  }
  switch (method) {
    case Method::FF: return t_ff(xs);
    case Method::WF: return t_wf(xs, spec);
    case Method::PC: return t_pc(xs, spec, d);
  }
  throw std::invalid_argument("config: unknown method");
}

double squared_scale(const TestReport& rep) {
  return rep.method == Method::PC ? rep.statistic : rep.statistic * rep.statistic;
}

json eigen_summary(const std::vector<double>& values) {
  json leading = json::array();
  for (std::size_t p = 0; p < values.size() && p < 10; ++p) leading.push_back(values[p]);
  double total = 0.0;
  for (double v : values) total += v;
  return json{{"count", values.size()},
              {"lambda1", values.empty() ? 0.0 : values.front()},
              {"leading", leading},
              {"total", total}};
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  return json{{"input", cfg.input},
              {"output", cfg.output},
              {"method", method_name(cfg.method)},
              {"weight", cfg.h ? json(cfg.h->describe()) : json()},
              {"kernel", cfg.kernel},
              {"bandwidth", cfg.bandwidth ? json(*cfg.bandwidth) : json("auto")},
              {"num_components",
               cfg.num_components ? json(*cfg.num_components) : json()},
              {"energy", cfg.energy ? json(*cfg.energy) : json()},
              {"alpha", cfg.alpha},
              {"mc_reps", cfg.mc_reps},
              {"grid_steps", cfg.grid_steps},
              {"seed", cfg.seed},
              {"threads", cfg.threads},
              {"grid_row", cfg.grid_row}};
}

DetectResult detect_on(const FSeries& xs, const RunConfig& cfg) {
  validate_config(cfg, xs.n());
  const KernelFn kern = KernelFn::by_name(cfg.kernel);
  const Bandwidth bw =
      cfg.bandwidth ? Bandwidth{*cfg.bandwidth} : default_bandwidth(xs.n(), kern);
  const Spectrum spec = eig(lrcov(xs, kern, bw));

  Eigen::Index d = 0;
  if (cfg.method == Method::PC) {
    d = resolve_components(spec, cfg.num_components, cfg.energy);
  }
  TestReport report = run_statistic(xs, cfg.method, cfg.h, spec, d);

  std::vector<double> eigenvalues(spec.values.data(),
                                  spec.values.data() + spec.count());
  const auto samples =
      limit_bundle({LimitSpec{cfg.method, cfg.h.has_value(), d}}, eigenvalues,
                   cfg.h, cfg.mc_reps, cfg.grid_steps, cfg.seed, cfg.threads);
  const LimitSamples& lim = samples.front();

  const double observed_sq = squared_scale(report);
  const double crit_sq = crit_value(lim, cfg.alpha);
  report.pvalue = p_value(lim, observed_sq);
  report.alpha = cfg.alpha;
  report.critical_value =
      report.method == Method::PC ? crit_sq : std::sqrt(crit_sq);

  DetectResult out;
  out.report = report;
  out.eigenvalues = eigenvalues;
  out.bandwidth = bw.value;
  out.n = xs.n();
  out.m = xs.m();
  out.document = json{
      {"schema_version", kReportSchemaVersion},
      {"library", json{{"name", kLibraryName}, {"version", kLibraryVersion}}},
      {"config", run_config_to_json(cfg)},
      {"n", out.n},
      {"m", out.m},
      {"method", method_name(report.method)},
      {"variant", cfg.h ? "gradual" : "amoc"},
      {"weight", cfg.h ? json(cfg.h->describe()) : json()},
      {"kernel", cfg.kernel},
      {"bandwidth", bw.value},
      {"bandwidth_rule", cfg.bandwidth ? "user" : "auto"},
      {"statistic", report.statistic},
      {"statistic_scale", report.method == Method::PC ? "T2" : "T"},
      {"khat", report.khat},
      {"theta_hat", report.theta_hat},
      {"d_used", report.d_used ? json(*report.d_used) : json()},
      {"eigen_tie_warning", report.eigen_tie_warning},
      {"alpha", cfg.alpha},
      {"critical_value", *report.critical_value},
      {"critical_value_squared", crit_sq},
      {"pvalue", *report.pvalue},
      {"mc_reps", cfg.mc_reps},
      {"grid_steps", cfg.grid_steps},
      {"seed", cfg.seed},
      {"eigenvalues", eigen_summary(eigenvalues)},
  };
  return out;
}

DetectResult detect_pipeline(const RunConfig& cfg) {
  const FSeries xs = read_csv(cfg.input, cfg.grid_row);
  return detect_on(xs, cfg);
}

Curve build_delta(const DeltaSpec& spec, const Grid& grid) {
  switch (spec.kind) {
    case DeltaSpec::Kind::basis: {
      if (spec.basis_index < 1) {
        throw std::invalid_argument("delta: basis index must be >= 1");
      }
      return fourier_basis(grid, spec.basis_index).back();
    }
    case DeltaSpec::Kind::constant:
      return Curve::Constant(grid.size(), spec.constant);
    case DeltaSpec::Kind::values: {
      if (static_cast<Eigen::Index>(spec.values.size()) != grid.size()) {
        throw std::invalid_argument("delta: explicit values must match grid size");
      }
      Curve c(grid.size());
      for (Eigen::Index j = 0; j < c.size(); ++j) {
        c[j] = spec.values[static_cast<std::size_t>(j)];
      }
      return c;
    }
  }
  throw std::invalid_argument("delta: unknown kind");
}

NoiseSpec parse_noise_spec(const json& j) {
  NoiseSpec spec;
  const std::string kind = j.value("kind", "iid_kl");
  if (kind == "iid_kl") {
    spec.kind = NoiseSpec::Kind::iid_kl;
  } else if (kind == "far1") {
    spec.kind = NoiseSpec::Kind::far1;
  } else {
    throw std::invalid_argument("noise: unknown kind '" + kind + "'");
  }
  const std::string decay = j.value("decay", "polynomial");
  if (decay == "polynomial") {
    spec.decay = NoiseSpec::Decay::polynomial;
  } else if (decay == "exponential") {
    spec.decay = NoiseSpec::Decay::exponential;
  } else {
    throw std::invalid_argument("noise: unknown decay '" + decay + "'");
  }
  spec.kappa = j.value("kappa", 2.0);
  spec.rho = j.value("rho", 0.5);
  spec.num_terms = j.value("num_terms", 21);
  spec.far1_coeff = j.value("far1_coeff", 0.0);
  if (spec.num_terms < 1) throw std::invalid_argument("noise: num_terms must be >= 1");
  return spec;
}

nlohmann::json noise_spec_to_json(const NoiseSpec& spec) {
  return json{
      {"kind", spec.kind == NoiseSpec::Kind::iid_kl ? "iid_kl" : "far1"},
      {"decay",
       spec.decay == NoiseSpec::Decay::polynomial ? "polynomial" : "exponential"},
      {"kappa", spec.kappa},
      {"rho", spec.rho},
      {"num_terms", spec.num_terms},
      {"far1_coeff", spec.far1_coeff}};
}

std::optional<ChangeFn> parse_change_spec(const json& j) {
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return std::nullopt;
  if (kind == "amoc") return ChangeFn::amoc(j.at("theta").get<double>());
  if (kind == "epidemic") {
    return ChangeFn::epidemic(j.at("theta1").get<double>(),
                              j.at("theta2").get<double>());
  }
  if (kind == "multiple") {
    return ChangeFn::multiple(j.at("thetas").get<std::vector<double>>(),
                              j.at("levels").get<std::vector<double>>());
  }
  if (kind == "delayed_gradual") {
    return ChangeFn::delayed_gradual(
        j.at("theta").get<double>(),
        WeightFn::parse(j.value("h", std::string("power:1"))));
  }
  if (kind == "clc") {
    return ChangeFn::clc(j.at("theta1").get<double>(), j.at("theta2").get<double>());
  }
  throw std::invalid_argument("change: unknown kind '" + kind + "'");
}

namespace {

DeltaSpec parse_delta_spec(const json& j) {
  DeltaSpec spec;
  const std::string kind = j.value("kind", "basis");
  if (kind == "basis") {
    spec.kind = DeltaSpec::Kind::basis;
    spec.basis_index = j.value("index", 1);
  } else if (kind == "constant") {
    spec.kind = DeltaSpec::Kind::constant;
    spec.constant = j.value("value", 1.0);
  } else if (kind == "values") {
    spec.kind = DeltaSpec::Kind::values;
    spec.values = j.at("values").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("delta: unknown kind '" + kind + "'");
  }
  return spec;
}

std::string change_label(const std::optional<ChangeFn>& g) {
  if (!g) return "none";
  std::ostringstream os;
  switch (g->kind) {
    case ChangeFn::Kind::amoc:
      os << "amoc(" << g->theta1 << ")";
      break;
    case ChangeFn::Kind::epidemic:
      os << "epidemic(" << g->theta1 << "," << g->theta2 << ")";
      break;
    case ChangeFn::Kind::multiple:
      os << "multiple(q=" << g->thetas.size() << ")";
      break;
    case ChangeFn::Kind::delayed_gradual:
      os << "gradual(" << g->theta1 << "," << g->h.describe() << ")";
      break;
    case ChangeFn::Kind::clc:
      os << "clc(" << g->theta1 << "," << g->theta2 << ")";
      break;
  }
  return os.str();
}

}  // namespace

SimSpec parse_sim_spec(const json& j) {
  SimSpec spec;
  spec.n = j.value("n", 200);
  spec.m = j.value("m", 51);
  spec.seed = j.value("seed", 1ULL);
  if (j.contains("noise")) spec.noise = parse_noise_spec(j.at("noise"));
  if (j.contains("change")) spec.change = parse_change_spec(j.at("change"));
  if (j.contains("delta")) spec.delta = parse_delta_spec(j.at("delta"));
  spec.scale = j.value("scale", 1.0);
  spec.mu = j.value("mu", 0.0);
  if (spec.n < 2) throw std::invalid_argument("simulate: need n >= 2");
  if (spec.m < 2) throw std::invalid_argument("simulate: need m >= 2");
  return spec;
}

FSeries run_simulate(const SimSpec& spec) {
  const Grid grid = Grid::equispaced01(spec.m);
  FSeries data = gen_noise(spec.noise, spec.n, grid, spec.seed);
  if (spec.change && spec.scale != 0.0) {
    data = inject(data, build_delta(spec.delta, grid), *spec.change, spec.scale);
  }
  if (spec.mu != 0.0) {
    Eigen::MatrixXd shifted = data.data().array() + spec.mu;
    data = FSeries(std::move(shifted), grid);
  }
  return data;
}

std::string MethodSpec::label() const {
  std::ostringstream os;
  os << method_name(method);
  if (h) os << "[h=" << h->describe() << "]";
  if (method == Method::PC) {
    if (num_components) {
      os << "[d=" << *num_components << "]";
    } else {
      os << "[energy=" << energy.value_or(0.85) << "]";
    }
  }
  return os.str();
}

StudySpec parse_study_spec(const json& j) {
  StudySpec spec;
  spec.seed = j.value("seed", 1ULL);
  spec.replicates = j.value("replicates", 500);
  spec.alpha = j.value("alpha", 0.05);
  spec.mc_reps = j.value("mc_reps", 2000);
  spec.grid_steps = j.value("grid_steps", 1000);
  spec.threads = j.value("threads", 1);
  spec.m = j.value("m", 51);
  for (const auto& n : j.at("n")) spec.sample_sizes.push_back(n.get<Eigen::Index>());
  if (j.contains("noise")) spec.noise = parse_noise_spec(j.at("noise"));
  if (j.contains("delta")) spec.delta = parse_delta_spec(j.at("delta"));
  spec.kernel = j.value("kernel", "bartlett");
  if (j.contains("bandwidth") && !j.at("bandwidth").is_string()) {
    spec.bandwidth = j.at("bandwidth").get<double>();
  }
  for (const auto& mj : j.at("methods")) {
    MethodSpec ms;
    ms.method = method_by_name(mj.at("method").get<std::string>());
    if (mj.contains("h")) ms.h = WeightFn::parse(mj.at("h").get<std::string>());
    if (mj.contains("num_components")) {
      ms.num_components = mj.at("num_components").get<Eigen::Index>();
    }
    if (mj.contains("energy")) ms.energy = mj.at("energy").get<double>();
    spec.methods.push_back(std::move(ms));
  }
  for (const auto& aj : j.at("alternatives")) {
    auto alt = parse_change_spec(aj);
    spec.alternative_labels.push_back(change_label(alt));
    spec.alternatives.push_back(std::move(alt));
  }
  spec.scales = j.at("scales").get<std::vector<double>>();
  if (spec.replicates < 1) throw std::invalid_argument("study: need replicates >= 1");
  if (spec.methods.empty()) throw std::invalid_argument("study: no methods");
  if (spec.alternatives.empty()) throw std::invalid_argument("study: no alternatives");
  if (spec.scales.empty()) throw std::invalid_argument("study: no scales");
  return spec;
}

namespace {

struct RepOutcome {
  std::vector<char> rejected;      // [scale][method] flattened
  std::vector<double> theta_err;   // negative when undefined
};

// Reference change point for the localisation column.
std::optional<double> reference_theta(const std::optional<ChangeFn>& alt) {
  if (!alt) return std::nullopt;
  if (alt->kind == ChangeFn::Kind::amoc ||
      alt->kind == ChangeFn::Kind::delayed_gradual) {
    return alt->theta1;
  }
  return std::nullopt;
}

}  // namespace

std::vector<StudyRow> power_study(const StudySpec& spec) {
  const Grid grid = Grid::equispaced01(spec.m);
  const KernelFn kern = KernelFn::by_name(spec.kernel);
  const Curve delta = build_delta(spec.delta, grid);
  const std::size_t n_methods = spec.methods.size();
  const std::size_t n_scales = spec.scales.size();

  // Bundle groups: methods sharing a weight function share bridge paths.
  // AMOC methods ride along with the first group.
  std::vector<std::optional<WeightFn>> group_h;
  std::vector<std::vector<std::size_t>> group_members;
  std::vector<std::size_t> amoc_members;
  std::map<std::string, std::size_t> h_index;
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    if (!spec.methods[mi].h) {
      amoc_members.push_back(mi);
      continue;
    }
    const std::string key = spec.methods[mi].h->describe();
    auto it = h_index.find(key);
    if (it == h_index.end()) {
      it = h_index.emplace(key, group_h.size()).first;
      group_h.push_back(spec.methods[mi].h);
      group_members.emplace_back();
    }
    group_members[it->second].push_back(mi);
  }
  if (!amoc_members.empty()) {
    if (group_h.empty()) {
      group_h.push_back(std::nullopt);
      group_members.emplace_back();
    }
    auto& first = group_members.front();
    first.insert(first.end(), amoc_members.begin(), amoc_members.end());
  }

  std::vector<StudyRow> rows;
  for (std::size_t ni = 0; ni < spec.sample_sizes.size(); ++ni) {
    const Eigen::Index n = spec.sample_sizes[ni];
    const Bandwidth bw =
        spec.bandwidth ? Bandwidth{*spec.bandwidth} : default_bandwidth(n, kern);
    for (std::size_t ai = 0; ai < spec.alternatives.size(); ++ai) {
      const auto& alt = spec.alternatives[ai];
      const auto theta_ref = reference_theta(alt);
      const std::uint64_t cell_seed =
          rng::stream_key(spec.seed, ni * 1000003ULL + ai);

      std::vector<RepOutcome> outcomes(
          static_cast<std::size_t>(spec.replicates));

      const auto run_replicate = [&](int rep) {
        const std::uint64_t rep_seed =
            rng::stream_key(cell_seed, static_cast<std::uint64_t>(rep));
        const std::uint64_t lim_seed = rng::stream_key(rep_seed, 1);
        const FSeries noise = gen_noise(spec.noise, n, grid, rep_seed);
        RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
        out.rejected.assign(n_scales * n_methods, 0);
        out.theta_err.assign(n_scales * n_methods, -1.0);
        for (std::size_t si = 0; si < n_scales; ++si) {
          const double scale = spec.scales[si];
          const FSeries data = (alt && scale != 0.0)
                                   ? inject(noise, delta, *alt, scale)
                                   : noise;
          const Spectrum sp = eig(lrcov(data, kern, bw));
          const std::vector<double> eigenvalues(
              sp.values.data(), sp.values.data() + sp.count());
          std::vector<Eigen::Index> d_used(n_methods, 0);
          for (std::size_t mi = 0; mi < n_methods; ++mi) {
            if (spec.methods[mi].method == Method::PC) {
              d_used[mi] = resolve_components(sp, spec.methods[mi].num_components,
                                              spec.methods[mi].energy);
            }
          }
          for (std::size_t gi = 0; gi < group_h.size(); ++gi) {
            std::vector<LimitSpec> lspecs;
            for (std::size_t mi : group_members[gi]) {
              lspecs.push_back(LimitSpec{spec.methods[mi].method,
                                         spec.methods[mi].h.has_value(),
                                         d_used[mi]});
            }
            const auto samples =
                limit_bundle(lspecs, eigenvalues, group_h[gi], spec.mc_reps,
                             spec.grid_steps, lim_seed, 1);
            for (std::size_t k = 0; k < group_members[gi].size(); ++k) {
              const std::size_t mi = group_members[gi][k];
              const TestReport rep_stat =
                  run_statistic(data, spec.methods[mi].method,
                                spec.methods[mi].h, sp, d_used[mi]);
              const double observed_sq = rep_stat.method == Method::PC
                                             ? rep_stat.statistic
                                             : rep_stat.statistic * rep_stat.statistic;
              const double crit = crit_value(samples[k], spec.alpha);
              out.rejected[si * n_methods + mi] = observed_sq > crit ? 1 : 0;
              if (theta_ref && scale != 0.0) {
                out.theta_err[si * n_methods + mi] =
                    std::abs(rep_stat.theta_hat - *theta_ref);
              }
            }
          }
        }
      };

      const int workers =
          std::max(1, std::min(spec.threads <= 0
                                   ? static_cast<int>(std::thread::hardware_concurrency())
                                   : spec.threads,
                               spec.replicates));
      if (workers <= 1) {
        for (int rep = 0; rep < spec.replicates; ++rep) run_replicate(rep);
      } else {
        std::vector<std::thread> pool;
        const int chunk = (spec.replicates + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
          const int first = w * chunk;
          const int last = std::min(spec.replicates, first + chunk);
          if (first >= last) break;
          pool.emplace_back([&, first, last] {
            for (int rep = first; rep < last; ++rep) run_replicate(rep);
          });
        }
        for (auto& th : pool) th.join();
      }

      for (std::size_t si = 0; si < n_scales; ++si) {
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          int rejections = 0;
          double err_sum = 0.0;
          int err_count = 0;
          for (const auto& out : outcomes) {
            rejections += out.rejected[si * n_methods + mi];
            const double err = out.theta_err[si * n_methods + mi];
            if (err >= 0.0) {
              err_sum += err;
              ++err_count;
            }
          }
          StudyRow row;
          row.method = spec.methods[mi].label();
          row.alternative = spec.alternative_labels[ai];
          row.n = n;
          row.scale = spec.scales[si];
          row.replicates = spec.replicates;
          row.rejection_rate =
              static_cast<double>(rejections) / static_cast<double>(spec.replicates);
          row.mc_se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) /
                                static_cast<double>(spec.replicates));
          row.mean_theta_err = err_count > 0 ? err_sum / err_count : -1.0;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::string study_rows_to_csv(const StudySpec& spec,
                              const std::vector<StudyRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  json echo{{"seed", spec.seed},
            {"replicates", spec.replicates},
            {"alpha", spec.alpha},
            {"mc_reps", spec.mc_reps},
            {"grid_steps", spec.grid_steps},
            {"m", spec.m},
            {"kernel", spec.kernel},
            {"noise", noise_spec_to_json(spec.noise)},
            {"library", json{{"name", kLibraryName}, {"version", kLibraryVersion}}}};
  os << "# " << echo.dump() << "\n";
  os << "method,alternative,n,scale,replicates,rejection_rate,mc_se,mean_theta_err\n";
  for (const auto& row : rows) {
    os << row.method << ',' << row.alternative << ',' << row.n << ',' << row.scale
       << ',' << row.replicates << ',' << row.rejection_rate << ',' << row.mc_se
       << ',';
    if (row.mean_theta_err >= 0.0) os << row.mean_theta_err;
    os << "\n";
  }
  return os.str();
}

}  // namespace fcpd
