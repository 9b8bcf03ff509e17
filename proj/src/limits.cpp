#include "fcpd/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fcpd/errors.hpp"
#include "fcpd/rng.hpp"

namespace fcpd {

const char* limit_family_name(LimitFamily f) {
  switch (f) {
    case LimitFamily::PC: return "pc";
    case LimitFamily::FF: return "ff";
    case LimitFamily::WF: return "wf";
    case LimitFamily::PCGrad: return "pc-grad";
    case LimitFamily::FFGrad: return "ff-grad";
    case LimitFamily::WFGrad: return "wf-grad";
  }
  return "?";
}

LimitFamily limit_family_of(Method method, bool gradual) {
  switch (method) {
    case Method::PC: return gradual ? LimitFamily::PCGrad : LimitFamily::PC;
    case Method::FF: return gradual ? LimitFamily::FFGrad : LimitFamily::FF;
    case Method::WF: return gradual ? LimitFamily::WFGrad : LimitFamily::WF;
  }
  return LimitFamily::FF;
}

std::vector<double> LimitSamples::sqrt_draws() const {
  std::vector<double> out(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) out[i] = std::sqrt(draws[i]);
  return out;
}

namespace {

// Fill column p of `buf` with a bridge path from `ns`:
// W(j/N) = N^(-1/2) sum_{l<=j} xi_l, B(j/N) = W(j/N) - (j/N) W(1).
// tfrac[j] = j/N precomputed; tfrac[N] = 1 makes the endpoint exactly 0.
void fill_bridge_column(Eigen::MatrixXd& buf, Eigen::Index p,
                        const Eigen::VectorXd& tfrac,
                        rng::NormalBlockSampler& ns) {
  const Eigen::Index n = buf.rows() - 1;
  double* col = buf.col(p).data();
  col[0] = 0.0;
  ns.fill(col + 1, n);
  double cum = 0.0;
  for (Eigen::Index l = 1; l <= n; ++l) {
    cum += col[l];
    col[l] = cum;
  }
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(n));
  const double w_end = col[n] * inv_root;
  buf.col(p).tail(n) = inv_root * buf.col(p).tail(n) - w_end * tfrac.tail(n);
}

// G(t_i) for one path via the left-endpoint Stieltjes sum; u = N - i.
// Integer-power and step weights reduce to cumulative sums of B, l*B, l^2*B.
void gradual_transform_column(const Eigen::VectorXd& b, Eigen::VectorXd& g,
                              const WeightFn& h, const Eigen::VectorXd& dh,
                              Eigen::VectorXd& scratch) {
  const Eigen::Index n = b.size() - 1;
  const double dn = static_cast<double>(n);
  if (h.kind == WeightFn::Kind::step) {
    for (Eigen::Index i = 0; i <= n; ++i) g[i] = b[n - i];
    return;
  }
  if (h.kind == WeightFn::Kind::power_plus && h.alpha == 1.0) {
    double cum = 0.0;
    scratch[0] = 0.0;
    for (Eigen::Index l = 1; l <= n; ++l) {
      cum += b[l];
      scratch[l] = cum;
    }
    const double inv = 1.0 / dn;
    for (Eigen::Index i = 0; i <= n; ++i) g[i] = scratch[n - i] * inv;
    return;
  }
  if (h.kind == WeightFn::Kind::power_plus && (h.alpha == 2.0 || h.alpha == 3.0)) {
    // dh_j = ((j+1)^a - j^a)/N^a expands into polynomials of (u-l), so the
    // convolution collapses onto moment sums S_k(u) = sum_{l<=u} l^k B(l).
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    const bool cubic = h.alpha == 3.0;
    const double scale = cubic ? 1.0 / (dn * dn * dn) : 1.0 / (dn * dn);
    g[n] = 0.0;
    for (Eigen::Index u = 1; u <= n; ++u) {
      const double lu = static_cast<double>(u);
      s0 += b[u];
      s1 += lu * b[u];
      if (cubic) s2 += lu * lu * b[u];
      const double val = cubic
          ? (3.0 * lu * lu + 3.0 * lu + 1.0) * s0 - (6.0 * lu + 3.0) * s1 + 3.0 * s2
          : (2.0 * lu + 1.0) * s0 - 2.0 * s1;
      g[n - u] = val * scale;
    }
    return;
  }
  // General bounded-variation weight: direct O(N^2) convolution.
  g[n] = 0.0;
  for (Eigen::Index u = 1; u <= n; ++u) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < u; ++j) acc += b[u - j] * dh[j];
    g[n - u] = acc;
  }
}

Eigen::VectorXd stieltjes_increments(const WeightFn& h, Eigen::Index n) {
  Eigen::VectorXd dh(n);
  double prev = 0.0;
  for (Eigen::Index j = 1; j <= n; ++j) {
    const double cur = weight_eval(h, static_cast<double>(j) / static_cast<double>(n));
    dh[j - 1] = cur - prev;
    prev = cur;
  }
  return dh;
}

struct FamilyWeights {
  Eigen::VectorXd w;  // length P, zero-padded
  bool gradual = false;
};

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

BridgePaths simulate_bridges(Eigen::Index paths, int steps, std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("simulate_bridges: need at least one path");
  if (steps < 2) throw std::invalid_argument("simulate_bridges: need at least 2 steps");
  BridgePaths out;
  out.steps = steps;
  out.values.resize(steps + 1, paths);
  Eigen::VectorXd tfrac(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    tfrac[j] = static_cast<double>(j) / static_cast<double>(steps);
  }
  rng::NormalBlockSampler ns(seed, 0);
  for (Eigen::Index p = 0; p < paths; ++p) {
    fill_bridge_column(out.values, p, tfrac, ns);
  }
  return out;
}

Eigen::MatrixXd gp_paths(const WeightFn& h, const BridgePaths& bridges) {
  const Eigen::Index cols = bridges.values.cols();
  const Eigen::Index n = bridges.values.rows() - 1;
  Eigen::MatrixXd g(n + 1, cols);
  const Eigen::VectorXd dh = stieltjes_increments(h, n);
  Eigen::VectorXd scratch(n + 1), gcol(n + 1);
  for (Eigen::Index p = 0; p < cols; ++p) {
    const Eigen::VectorXd b = bridges.values.col(p);
    gradual_transform_column(b, gcol, h, dh, scratch);
    g.col(p) = gcol;
  }
  return g;
}

double gp_cov(const WeightFn& h, double s, double t) {
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) {
    throw std::invalid_argument("gp_cov: arguments outside [0,1]");
  }
  constexpr int kPoints = 20001;
  const auto trap = [&](double lo, double offset) {
    if (!(lo < 1.0)) return 0.0;
    const double step = (1.0 - lo) / (kPoints - 1);
    double acc = 0.5 * (weight_eval(h, lo - offset) + weight_eval(h, 1.0 - offset));
    for (int j = 1; j + 1 < kPoints; ++j) {
      acc += weight_eval(h, lo + j * step - offset);
    }
    return acc * step;
  };
  const auto trap_pair = [&](double lo) {
    if (!(lo < 1.0)) return 0.0;
    const double step = (1.0 - lo) / (kPoints - 1);
    const auto f = [&](double x) {
      return weight_eval(h, x - s) * weight_eval(h, x - t);
    };
    double acc = 0.5 * (f(lo) + f(1.0));
    for (int j = 1; j + 1 < kPoints; ++j) acc += f(lo + j * step);
    return acc * step;
  };
  return trap_pair(std::max(s, t)) - trap(s, s) * trap(t, t);
}

std::vector<LimitSamples> limit_bundle(const std::vector<LimitSpec>& specs,
                                       const std::vector<double>& eigenvalues,
                                       const std::optional<WeightFn>& h,
                                       int replications, int steps,
                                       std::uint64_t seed, int threads) {
  if (specs.empty()) throw std::invalid_argument("limit_bundle: no families requested");
  if (eigenvalues.empty()) {
    throw std::invalid_argument("limit_bundle: eigenvalue list is empty");
  }
  if (replications < 1) throw std::invalid_argument("limit_bundle: need R >= 1");
  if (steps < 2) throw std::invalid_argument("limit_bundle: need at least 2 steps");
  for (std::size_t p = 0; p < eigenvalues.size(); ++p) {
    if (!(eigenvalues[p] >= 0.0)) {
      throw std::invalid_argument("limit_bundle: eigenvalues must be nonnegative");
    }
    if (p > 0 && eigenvalues[p] > eigenvalues[p - 1] + 1e-12 * eigenvalues[0]) {
      throw std::invalid_argument("limit_bundle: eigenvalues must be descending");
    }
  }
  const double lam1 = eigenvalues[0];
  Eigen::Index positive = 0;
  while (positive < static_cast<Eigen::Index>(eigenvalues.size()) &&
         eigenvalues[static_cast<std::size_t>(positive)] > 0.0) {
    ++positive;
  }

  bool any_gradual = false;
  Eigen::Index max_paths = 1;
  for (const auto& spec : specs) {
    if (spec.gradual) any_gradual = true;
    if (spec.family == Method::PC) {
      if (spec.d < 1) throw std::invalid_argument("limit_bundle: PC needs d >= 1");
      max_paths = std::max(max_paths, spec.d);
    } else {
      if (spec.family == Method::WF && !(lam1 > 0.0)) {
        throw degeneracy_error("limit_bundle: WF limit needs a positive top eigenvalue");
      }
      max_paths = std::max<Eigen::Index>(max_paths, std::max<Eigen::Index>(positive, 1));
    }
  }
  if (any_gradual && !h.has_value()) {
    throw std::invalid_argument("limit_bundle: gradual family without a weight function");
  }

  std::vector<FamilyWeights> fams(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(max_paths);
    if (specs[s].family == Method::PC) {
      w.head(specs[s].d).setOnes();
    } else {
      for (Eigen::Index p = 0; p < positive; ++p) {
        const double lam = eigenvalues[static_cast<std::size_t>(p)];
        w[p] = specs[s].family == Method::FF ? lam : lam / (lam + lam1);
      }
    }
    fams[s] = FamilyWeights{std::move(w), specs[s].gradual};
  }

  Eigen::VectorXd tfrac(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    tfrac[j] = static_cast<double>(j) / static_cast<double>(steps);
  }
  const Eigen::VectorXd dh =
      any_gradual ? stieltjes_increments(*h, steps) : Eigen::VectorXd();

  std::vector<std::vector<double>> draws(specs.size(),
                                         std::vector<double>(replications));

  const auto run_block = [&](int first, int last) {
    Eigen::MatrixXd bridges(steps + 1, max_paths);
    Eigen::MatrixXd grads;
    if (any_gradual) grads.resize(steps + 1, max_paths);
    Eigen::VectorXd acc(steps + 1), scratch(steps + 1), gcol(steps + 1);
    for (int r = first; r < last; ++r) {
      rng::NormalBlockSampler ns(seed, static_cast<std::uint64_t>(r));
      for (Eigen::Index p = 0; p < max_paths; ++p) {
        fill_bridge_column(bridges, p, tfrac, ns);
      }
      if (any_gradual) {
        for (Eigen::Index p = 0; p < max_paths; ++p) {
          const Eigen::VectorXd b = bridges.col(p);
          gradual_transform_column(b, gcol, *h, dh, scratch);
          grads.col(p) = gcol;
        }
      }
      for (std::size_t s = 0; s < specs.size(); ++s) {
        const Eigen::MatrixXd& paths = fams[s].gradual ? grads : bridges;
        acc.setZero();
        for (Eigen::Index p = 0; p < max_paths; ++p) {
          const double w = fams[s].w[p];
          if (w == 0.0) continue;
          acc.array() += w * paths.col(p).array().square();
        }
        draws[s][static_cast<std::size_t>(r)] = acc.maxCoeff();
      }
    }
  };

  const int workers = std::min(resolve_threads(threads), replications);
  if (workers <= 1) {
    run_block(0, replications);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (replications + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int first = w * chunk;
      const int last = std::min(replications, first + chunk);
      if (first >= last) break;
      pool.emplace_back(run_block, first, last);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<LimitSamples> out(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    out[s].draws = std::move(draws[s]);
    out[s].family = limit_family_of(specs[s].family, specs[s].gradual);
    out[s].eigenvalues = eigenvalues;
    out[s].d = specs[s].family == Method::PC ? specs[s].d : 0;
    if (specs[s].gradual) out[s].h = *h;
    out[s].seed = seed;
    out[s].steps = steps;
  }
  return out;
}

LimitSamples limit_amoc(Method family, const std::vector<double>& eigenvalues,
                        Eigen::Index d, int replications, int steps,
                        std::uint64_t seed, int threads) {
  auto res = limit_bundle({LimitSpec{family, false, d}}, eigenvalues, std::nullopt,
                          replications, steps, seed, threads);
  return std::move(res.front());
}

LimitSamples limit_gradual(Method family, const std::vector<double>& eigenvalues,
                           Eigen::Index d, const WeightFn& h, int replications,
                           int steps, std::uint64_t seed, int threads) {
  auto res = limit_bundle({LimitSpec{family, true, d}}, eigenvalues, h,
                          replications, steps, seed, threads);
  return std::move(res.front());
}

double crit_value(const LimitSamples& samples, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("crit_value: alpha must be in (0,1)");
  }
  if (samples.draws.empty()) throw std::invalid_argument("crit_value: no draws");
  std::vector<double> sorted = samples.draws;
  std::sort(sorted.begin(), sorted.end());
  const double pos = (1.0 - alpha) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double p_value(const LimitSamples& samples, double observed) {
  if (samples.draws.empty()) throw std::invalid_argument("p_value: no draws");
  std::size_t count = 0;
  for (double d : samples.draws) {
    if (d >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(samples.draws.size() + 1);
}

}  // namespace fcpd
