#include "spinsq/split_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinsq {

namespace {

constexpr int kX = 0;
constexpr int kY = 1;
constexpr int kZ = 2;

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

void validate_config(const SplitConfig& cfg) {
  if (cfg.modes < 2) throw DomainError("SplitConfig: need at least two modes");
  if (static_cast<int>(cfg.pi.size()) != cfg.modes) {
    throw DimensionError("SplitConfig: one probability per mode required");
  }
  double sum = 0.0;
  for (double p : cfg.pi) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("SplitConfig: probabilities must lie in (0,1)");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("SplitConfig: probabilities must sum to 1");
}

}  // namespace

SplitConfig SplitConfig::symmetric(int modes) {
  if (modes < 2) throw DomainError("SplitConfig: need at least two modes");
  return SplitConfig{modes, std::vector<double>(modes, 1.0 / modes)};
}

PairCorrelations extract_pair_correlations(const SpinState& parent) {
  const int n = parent.spin.two_s;  // N spin-1/2 particles in the S = N/2 sector
  if (n < 2) throw DomainError("extract_pair_correlations: need N >= 2 particles");

  PairCorrelations pc;
  pc.n_particles = n;
  pc.single[kX] = expect_sx(parent) / n;
  pc.single[kY] = 0.0;  // real amplitudes
  pc.single[kZ] = expect_sz(parent) / n;

  const double denom = static_cast<double>(n) * (n - 1);
  // Diagonal: <S_u^2> = N/4 + N(N-1) <s_u s_u>.
  pc.pair[kX][kX] = (expect_sx2(parent) - 0.25 * n) / denom;
  pc.pair[kY][kY] = (expect_sy2(parent) - 0.25 * n) / denom;
  pc.pair[kZ][kZ] = (expect_sz2(parent) - 0.25 * n) / denom;
  // Symmetrized cross terms; the same-particle part of <{S_u,S_v}>/2 vanishes
  // for u != v. xy and yz vanish identically on real states.
  const double xz = expect_sym_xz(parent) / denom;
  pc.pair[kX][kZ] = pc.pair[kZ][kX] = xz;
  pc.pair[kX][kY] = pc.pair[kY][kX] = 0.0;
  pc.pair[kY][kZ] = pc.pair[kZ][kY] = 0.0;
  return pc;
}

ModeMomentSet propagate_mode_moments(const PairCorrelations& pc, const SplitConfig& cfg) {
  if (pc.n_particles < 2) throw DomainError("propagate_mode_moments: need N >= 2");
  validate_config(cfg);

  const int m = cfg.modes;
  const double n = pc.n_particles;
  const double nn1 = n * (n - 1.0);

  ModeMomentSet mm;
  mm.modes = m;
  mm.pi = cfg.pi;
  mm.mean_sx.resize(m);
  mm.var_sz.resize(m);
  mm.var_sy.resize(m);
  mm.cov_sz.assign(m, std::vector<double>(m, 0.0));
  mm.cov_sy.assign(m, std::vector<double>(m, 0.0));

  auto mode_var = [&](double pi, int u) {
    const double mean = pi * n * pc.single[u];
    return pi * n * 0.25 + pi * pi * nn1 * pc.pair[u][u] - mean * mean;
  };
  auto mode_cov = [&](double pi, double pj, int u) {
    return pi * pj * (nn1 * pc.pair[u][u] - n * n * pc.single[u] * pc.single[u]);
  };

  for (int i = 0; i < m; ++i) {
    mm.mean_sx[i] = cfg.pi[i] * n * pc.single[kX];
    mm.var_sz[i] = mode_var(cfg.pi[i], kZ);
    mm.var_sy[i] = mode_var(cfg.pi[i], kY);
    mm.cov_sz[i][i] = mm.var_sz[i];
    mm.cov_sy[i][i] = mm.var_sy[i];
    for (int j = 0; j < i; ++j) {
      mm.cov_sz[i][j] = mm.cov_sz[j][i] = mode_cov(cfg.pi[i], cfg.pi[j], kZ);
      mm.cov_sy[i][j] = mm.cov_sy[j][i] = mode_cov(cfg.pi[i], cfg.pi[j], kY);
    }
  }

  mm.n_particles.clear();
  bool integral = true;
  std::vector<int> counts(m);
  for (int i = 0; i < m; ++i) {
    const double ni = cfg.pi[i] * n;
    counts[i] = static_cast<int>(std::lround(ni));
    if (std::abs(ni - counts[i]) > 1e-9) {
      integral = false;
      break;
    }
  }
  if (integral) mm.n_particles = std::move(counts);
  return mm;
}

EquivalenceReport equivalence_check(const SpinState& parent, int modes) {
  if (modes < 2) throw DomainError("equivalence_check: need at least two modes");
  const StateMoments mom = moments(parent);
  if (mom.mean_sx == 0.0) {
    throw DegenerateInput("equivalence_check: unpolarized parent (<S_x> = 0)");
  }

  const int n = parent.spin.two_s;
  const double xi2v = n * mom.var_sz / (mom.mean_sx * mom.mean_sx);
  const PairCorrelations pc = extract_pair_correlations(parent);

  EquivalenceReport rep;
  rep.modes = modes;
  rep.xi2 = xi2v;
  rep.max_rel_error = 0.0;

  auto track = [&rep](double a, double b) {
    const double rel = std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
    rep.max_rel_error = std::max(rep.max_rel_error, rel);
  };

  const ModeMomentSet two = propagate_mode_moments(pc, SplitConfig::symmetric(2));
  rep.g2 = g2_two_mode(two);
  rep.r2 = steering_r2(two);
  track(rep.g2, xi2v);
  track(rep.r2, 4.0 * xi2v);

  // M-mode criterion with the distinguished coefficient choice: variances
  // assembled from the propagated covariances, bound from the closed-form
  // partition minimum.
  const ModeMomentSet mset = propagate_mode_moments(pc, SplitConfig::symmetric(modes));
  const std::vector<double> h = h_star(modes);
  double var_z = 0.0;
  double var_yh = 0.0;
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) {
      var_z += mset.cov_sz[i][j];
      var_yh += h[i] * h[j] * mset.cov_sy[i][j];
    }
  }
  const double mean_sx_mode = std::abs(mset.mean_sx[0]);
  for (int k = 2; k <= modes; ++k) {
    const double bound = 0.5 * beta_min_closed(modes, k) * mean_sx_mode;
    const double value = var_z * var_yh / (bound * bound);
    const double expected = gk2_symmetric(xi2v, modes, k);
    track(value, expected);
    rep.gk2.push_back(GkEntry{k, value, expected});
  }

  rep.pass = rep.max_rel_error <= 1e-12;
  return rep;
}

OccupationStats sample_mode_occupation(int n_particles, const SplitConfig& cfg, long long trials,
                                       std::uint64_t seed) {
  if (n_particles < 1) throw DomainError("sample_mode_occupation: need N >= 1");
  if (trials < 1) throw DomainError("sample_mode_occupation: need at least one trial");
  validate_config(cfg);

  const int m = cfg.modes;
  std::vector<double> cumulative(m);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    acc += cfg.pi[i];
    cumulative[i] = acc;
  }
  cumulative[m - 1] = 1.0;

  std::vector<long long> first_count(m, 0);
  std::vector<std::vector<long long>> pair_count(m, std::vector<long long>(m, 0));

  std::vector<int> mode_of(n_particles);
  for (long long t = 0; t < trials; ++t) {
    std::uint64_t stream = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t + 1);
    for (int p = 0; p < n_particles; ++p) {
      const double u = uniform01(stream);
      int mode = 0;
      while (mode + 1 < m && u >= cumulative[mode]) ++mode;
      mode_of[p] = mode;
    }
    ++first_count[mode_of[0]];
    if (n_particles >= 2) ++pair_count[mode_of[0]][mode_of[1]];
  }

  OccupationStats out;
  out.modes = m;
  out.trials = trials;
  out.mode_mean.resize(m);
  out.mode_se.resize(m);
  out.pair_mean.assign(m, std::vector<double>(m, 0.0));
  out.pair_se.assign(m, std::vector<double>(m, 0.0));
  const double tn = static_cast<double>(trials);
  for (int i = 0; i < m; ++i) {
    const double p = first_count[i] / tn;
    out.mode_mean[i] = p;
    out.mode_se[i] = std::sqrt(std::max(0.0, p * (1.0 - p) / tn));
    for (int j = 0; j < m; ++j) {
      const double q = pair_count[i][j] / tn;
      out.pair_mean[i][j] = q;
      out.pair_se[i][j] = std::sqrt(std::max(0.0, q * (1.0 - q) / tn));
    }
  }
  return out;
}

}  // namespace spinsq
