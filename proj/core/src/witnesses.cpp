#include "spinsq/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinsq/sm_curves.hpp"

namespace spinsq {

namespace {

double var_z_sum(const ModeMomentSet& mm) {
  return mm.var_sz[0] + mm.var_sz[1] + 2.0 * mm.cov_sz[0][1];
}

double var_y_diff(const ModeMomentSet& mm) {
  return mm.var_sy[0] + mm.var_sy[1] - 2.0 * mm.cov_sy[0][1];
}

ModeMomentSet swap_two_modes(const ModeMomentSet& mm) {
  ModeMomentSet out = mm;
  std::swap(out.pi[0], out.pi[1]);
  std::swap(out.mean_sx[0], out.mean_sx[1]);
  std::swap(out.var_sz[0], out.var_sz[1]);
  std::swap(out.var_sy[0], out.var_sy[1]);
  std::swap(out.cov_sz[0][0], out.cov_sz[1][1]);
  std::swap(out.cov_sy[0][0], out.cov_sy[1][1]);
  if (out.n_particles.size() == 2) std::swap(out.n_particles[0], out.n_particles[1]);
  return out;
}

}  // namespace

void validate(const CollectiveMoments& m) {
  if (m.n_particles < 1) throw DomainError("CollectiveMoments: n must be a positive integer");
  if (!(std::isfinite(m.var_sz) && std::isfinite(m.mean_sx))) {
    throw DomainError("CollectiveMoments: moments must be finite");
  }
  const double half_n = 0.5 * m.n_particles;
  if (m.var_sz < 0.0) throw DomainError("CollectiveMoments: Var[S_z] must be >= 0");
  if (m.var_sz > half_n * half_n * (1.0 + 1e-12)) {
    throw DomainError("CollectiveMoments: Var[S_z] must be <= N^2/4");
  }
  if (std::abs(m.mean_sx) > half_n * (1.0 + 1e-12)) {
    throw DomainError("CollectiveMoments: |<S_x>| must be <= N/2");
  }
}

void validate(const ModeMomentSet& mm) {
  const std::size_t m = static_cast<std::size_t>(mm.modes);
  if (mm.modes < 2) throw DimensionError("ModeMomentSet: need at least two modes");
  if (mm.pi.size() != m || mm.mean_sx.size() != m || mm.var_sz.size() != m ||
      mm.var_sy.size() != m || mm.cov_sz.size() != m || mm.cov_sy.size() != m) {
    throw DimensionError("ModeMomentSet: per-mode vectors must have length M");
  }
  if (!mm.n_particles.empty() && mm.n_particles.size() != m) {
    throw DimensionError("ModeMomentSet: n_particles must be empty or length M");
  }
  double pi_sum = 0.0;
  for (double p : mm.pi) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ModeMomentSet: mode probabilities must lie in (0,1)");
    pi_sum += p;
  }
  if (std::abs(pi_sum - 1.0) > 1e-9) {
    throw DomainError("ModeMomentSet: mode probabilities must sum to 1");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::isfinite(mm.mean_sx[i]) && std::isfinite(mm.var_sz[i]))) {
      throw DomainError("ModeMomentSet: per-mode S_x and S_z moments must be finite");
    }
    if (std::isinf(mm.var_sy[i])) {
      throw DomainError("ModeMomentSet: var_sy must be finite or NaN (not measured)");
    }
    if (mm.cov_sz[i].size() != m || mm.cov_sy[i].size() != m) {
      throw DimensionError("ModeMomentSet: covariance matrices must be M x M");
    }
  }
  auto check_cov = [&](const std::vector<std::vector<double>>& cov, const std::vector<double>& var,
                       const char* name) {
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (std::isfinite(var[i])) scale = std::max(scale, std::abs(var[i]));
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (std::isfinite(var[i]) && std::isfinite(cov[i][i]) && std::abs(cov[i][i] - var[i]) > 1e-9 * scale) {
        throw DomainError(std::string("ModeMomentSet: diagonal of ") + name + " must equal the variances");
      }
      for (std::size_t j = i + 1; j < m; ++j) {
        if (std::isinf(cov[i][j]) || std::isinf(cov[j][i])) {
          throw DomainError(std::string("ModeMomentSet: ") + name + " entries must not be infinite");
        }
        if (std::isfinite(cov[i][j]) && std::isfinite(cov[j][i]) &&
            std::abs(cov[i][j] - cov[j][i]) > 1e-9 * scale) {
          throw DomainError(std::string("ModeMomentSet: ") + name + " must be symmetric");
        }
      }
    }
  };
  check_cov(mm.cov_sz, mm.var_sz, "cov_sz");
  check_cov(mm.cov_sy, mm.var_sy, "cov_sy");
}

double xi2(const CollectiveMoments& m) {
  validate(m);
  if (m.mean_sx == 0.0) {
    throw DegenerateInput("xi2: <S_x> = 0, squeezing coefficient undefined (diverges)");
  }
  return m.n_particles * m.var_sz / (m.mean_sx * m.mean_sx);
}

double g2_two_mode(const ModeMomentSet& mm) {
  if (mm.modes != 2) throw DimensionError("g2_two_mode: exactly two modes required");
  validate(mm);
  const double vy = var_y_diff(mm);
  if (!std::isfinite(vy)) throw DegenerateInput("g2_two_mode: per-mode S_y moments not available");
  const double den = std::abs(mm.mean_sx[0]) + std::abs(mm.mean_sx[1]);
  if (den == 0.0) throw DegenerateInput("g2_two_mode: |<S_x^A>| + |<S_x^B>| = 0");
  return 4.0 * var_z_sum(mm) * vy / (den * den);
}

std::vector<double> g_star(int modes) {
  if (modes < 2) throw DomainError("g_star: need M >= 2");
  return std::vector<double>(modes, 1.0);
}

std::vector<double> h_star(int modes) {
  if (modes < 2) throw DomainError("h_star: need M >= 2");
  std::vector<double> h(modes, -1.0 / (modes - 1));
  h[0] = 1.0;
  return h;
}

double beta_min_closed(int modes, int k) {
  if (modes < 2 || k < 2 || k > modes) {
    throw DomainError("beta_min_closed: require 2 <= k <= M");
  }
  return 2.0 * (k - 1) / (modes - 1);
}

BetaMinResult beta_min_enumerate(int modes, int k, std::span<const double> g,
                                 std::span<const double> h) {
  if (modes > 12) throw SizeError("beta_min_enumerate: M <= 12 (partition count grows too fast)");
  if (modes < 2 || k < 1 || k > modes) throw DomainError("beta_min_enumerate: require 1 <= k <= M >= 2");
  if (static_cast<int>(g.size()) != modes || static_cast<int>(h.size()) != modes) {
    throw DimensionError("beta_min_enumerate: coefficient vectors must have length M");
  }

  std::vector<double> gh(modes);
  for (int i = 0; i < modes; ++i) gh[i] = g[i] * h[i];

  // Restricted-growth-string enumeration of set partitions.
  std::vector<int> code(modes, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_code;
  std::vector<double> block_sum(modes);

  auto visit = [&]() {
    int blocks = 0;
    for (int c : code) blocks = std::max(blocks, c + 1);
    if (blocks < k) return;
    std::fill(block_sum.begin(), block_sum.begin() + blocks, 0.0);
    for (int i = 0; i < modes; ++i) block_sum[code[i]] += gh[i];
    double value = 0.0;
    for (int q = 0; q < blocks; ++q) value += std::abs(block_sum[q]);
    if (value < best) {
      best = value;
      best_code = code;
    }
  };

  // Iterative generation: code[i] <= 1 + max(code[0..i-1]).
  std::vector<int> maxc(modes, 0);
  std::vector<int> state(modes, -1);
  int i = 1;
  while (i >= 1) {
    if (i == modes) {
      visit();
      --i;
      continue;
    }
    ++state[i];
    if (state[i] > maxc[i - 1] + 1) {
      state[i] = -1;
      --i;
      continue;
    }
    code[i] = state[i];
    maxc[i] = std::max(maxc[i - 1], code[i]);
    ++i;
  }

  if (!std::isfinite(best)) {
    throw DomainError("beta_min_enumerate: no partition with at least k blocks");
  }
  Partition arg;
  int blocks = 0;
  for (int c : best_code) blocks = std::max(blocks, c + 1);
  arg.blocks.assign(blocks, {});
  for (int j = 0; j < modes; ++j) arg.blocks[best_code[j]].push_back(j + 1);
  return BetaMinResult{best, std::move(arg)};
}

double gk2_symmetric(double xi2_value, int modes, int k) {
  if (modes < 2 || k < 2 || k > modes) throw DomainError("gk2_symmetric: require 2 <= k <= M");
  if (!(xi2_value > 0.0)) throw DomainError("gk2_symmetric: xi2 must be positive");
  return xi2_value * static_cast<double>(modes) * modes * (modes - 1) / (4.0 * (k - 1) * (k - 1));
}

std::optional<int> mode_insep_k(double xi2_value, int modes) {
  if (modes < 2) throw DomainError("mode_insep_k: need M >= 2");
  if (!(xi2_value > 0.0)) throw DomainError("mode_insep_k: xi2 must be positive");
  for (int k = 2; k <= modes; ++k) {
    const double threshold =
        4.0 * (k - 1) * (k - 1) / (static_cast<double>(modes) * modes * (modes - 1));
    if (xi2_value < threshold) return k;
  }
  return std::nullopt;
}

int max_entangled_modes(double xi2_value) {
  if (!(xi2_value > 0.0)) throw DomainError("max_entangled_modes: xi2 must be positive");
  if (xi2_value > 1.0) return 1;
  const double bound = 2.0 * (1.0 + std::sqrt(std::max(0.0, 1.0 - xi2_value))) / xi2_value;
  double mf = std::floor(bound);
  if (mf == bound) mf -= 1.0;  // strict inequality
  return std::max(1, static_cast<int>(mf));
}

double depth_bound_state_independent(int n_particles, int p) {
  if (n_particles < 1 || p < 1 || p > n_particles) {
    throw DomainError("depth_bound_state_independent: require 1 <= p <= N");
  }
  const int np = n_particles / p;
  const int r = n_particles - p * np;
  return n_particles / (np * p * p / 2.0 + r * r / 2.0 + n_particles);
}

double sm_variance_bound(int n_particles, int p, double x) {
  if (n_particles < 1 || p < 1 || p > n_particles) {
    throw DomainError("sm_variance_bound: require 1 <= p <= N");
  }
  if (!(std::isfinite(x) && std::abs(x) <= 1.0)) {
    throw DomainError("sm_variance_bound: require |x| <= 1");
  }
  const int np = n_particles / p;
  const int r = n_particles - p * np;
  double bound = 0.5 * p * np * fs_eval(SpinLength(p), x);
  if (r > 0) bound += 0.5 * r * fs_eval(SpinLength(r), x);
  return bound;
}

double sm_xi2_bound(int p, double x) {
  if (p < 1) throw DomainError("sm_xi2_bound: p must be >= 1");
  if (!(std::isfinite(x) && 0.0 < std::abs(x) && std::abs(x) <= 1.0)) {
    throw DomainError("sm_xi2_bound: require 0 < |x| <= 1 (the x -> 0 limit is 1/(1+p/2))");
  }
  return 2.0 * fs_eval(SpinLength(p), x) / (x * x);
}

int depth_detect(const CollectiveMoments& m, DepthMethod method) {
  validate(m);
  if (m.mean_sx == 0.0) {
    throw DegenerateInput("depth_detect: <S_x> = 0, no polarization-referenced bound applies");
  }
  const int n = m.n_particles;
  const double xi2v = m.n_particles * m.var_sz / (m.mean_sx * m.mean_sx);
  const double x = m.mean_sx / (0.5 * n);

  int largest_violated = 0;
  for (int p = 1; p <= n; ++p) {
    bool violated = false;
    switch (method) {
      case DepthMethod::fisher:
        violated = xi2v < 1.0 / p;
        break;
      case DepthMethod::tight:
        violated = xi2v < depth_bound_state_independent(n, p);
        break;
      case DepthMethod::sm:
        violated = m.var_sz < sm_variance_bound(n, p, x);
        break;
    }
    if (violated) largest_violated = p;
  }
  return std::min(largest_violated + 1, n);
}

double steering_r2(const ModeMomentSet& mm) {
  if (mm.modes != 2) throw DimensionError("steering_r2: exactly two modes required");
  validate(mm);
  const double vy = var_y_diff(mm);
  if (!std::isfinite(vy)) throw DegenerateInput("steering_r2: per-mode S_y moments not available");
  if (mm.mean_sx[1] == 0.0) throw DegenerateInput("steering_r2: <S_x^B> = 0");
  const double r2 = 4.0 * var_z_sum(mm) * vy / (mm.mean_sx[1] * mm.mean_sx[1]);
  // Symmetric splits satisfy r2 = 4 g2 identically; check when applicable.
  if (std::abs(mm.pi[0] - mm.pi[1]) <= 1e-12 && mm.mean_sx[0] == mm.mean_sx[1]) {
    const double g2 = g2_two_mode(mm);
    if (std::abs(r2 - 4.0 * g2) > 1e-12 * std::max(1.0, std::abs(r2))) {
      throw DomainError("steering_r2: symmetric split but r2 != 4 g2; inconsistent moments");
    }
  }
  return r2;
}

SteeringSm steering_sm(double var_sz, double mean_sx_b, int n_b, std::optional<int> n_total) {
  if (n_b < 1) throw DomainError("steering_sm: n_b must be >= 1");
  if (!(std::isfinite(var_sz) && var_sz >= 0.0)) {
    throw DomainError("steering_sm: Var[S_z] must be finite and >= 0");
  }
  const double s_b = 0.5 * n_b;
  if (std::abs(mean_sx_b) > s_b * (1.0 + 1e-12)) {
    throw DomainError("steering_sm: |<S_x^B>| exceeds S_B = n_b/2");
  }
  const double xb = std::clamp(mean_sx_b / s_b, -1.0, 1.0);
  SteeringSm out;
  out.bound = s_b * fs_eval(SpinLength(n_b), xb);
  out.violated = var_sz < out.bound;
  if (n_total) {
    if (*n_total < n_b) throw DomainError("steering_sm: total N smaller than n_b");
    const double s = 0.5 * *n_total;
    out.weaker_bound = s * fs_eval(SpinLength(n_b), mean_sx_b / s);
    if (*out.weaker_bound > out.bound + 1e-9 * std::max(1.0, out.bound)) {
      throw Error("steering_sm: superlinearity of F_S violated (bound < weaker bound)");
    }
  }
  return out;
}

double local_xi2_from_global(double xi2_value, double pi, int n_particles, double mean_sx) {
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("local_xi2_from_global: pi must lie in (0,1)");
  if (n_particles < 1) throw DomainError("local_xi2_from_global: N must be positive");
  if (!(xi2_value >= 0.0)) throw DomainError("local_xi2_from_global: xi2 must be >= 0");
  if (mean_sx == 0.0) throw DegenerateInput("local_xi2_from_global: <S_x> = 0");
  // <S_x^I> = pi <S_x>, so (N pi / 2) / <S_x^I> = (N/2) / <S_x>.
  const double ratio = 0.5 * n_particles / mean_sx;
  return xi2_value * pi + (1.0 - pi) * ratio * ratio;
}

double global_local_identity(std::span<const double> local_xi2, int n_particles, int modes,
                             double mean_sx) {
  if (modes < 1) throw DomainError("global_local_identity: need M >= 1");
  if (static_cast<int>(local_xi2.size()) != modes) {
    throw DimensionError("global_local_identity: expected one local coefficient per mode");
  }
  if (mean_sx == 0.0) throw DegenerateInput("global_local_identity: <S_x> = 0");
  double sum = 0.0;
  for (double v : local_xi2) sum += v;
  const double n = n_particles;
  return sum - n * n * (modes - 1) / (4.0 * mean_sx * mean_sx);
}

WitnessReport build_report(const CollectiveMoments& m, const std::optional<ModeMomentSet>& mm,
                           std::optional<int> modes_hint) {
  validate(m);
  if (mm) {
    validate(*mm);
    if (modes_hint && *modes_hint != mm->modes) {
      throw DimensionError("build_report: modes hint disagrees with the mode moment set");
    }
  }

  WitnessReport rep;
  auto note = [&rep](const char* field, const std::exception& e) {
    const std::string what = e.what();
    const std::string prefix = std::string(field) + ":";
    rep.errors.push_back(what.rfind(prefix, 0) == 0 ? what : prefix + " " + what);
  };

  try {
    rep.xi2 = xi2(m);
    rep.thresholds.emplace_back("xi2_separability", 1.0);
  } catch (const Error& e) {
    note("xi2", e);
  }

  if (rep.xi2) {
    const double v = *rep.xi2;
    try {
      rep.depth_fisher = depth_detect(m, DepthMethod::fisher);
      if (rep.depth_fisher > 1) {
        rep.thresholds.emplace_back("fisher_bound_p=" + std::to_string(rep.depth_fisher - 1),
                                    1.0 / (rep.depth_fisher - 1));
      }
    } catch (const Error& e) {
      note("depth_fisher", e);
    }
    try {
      rep.depth_state_independent = depth_detect(m, DepthMethod::tight);
      if (rep.depth_state_independent > 1) {
        const int p = rep.depth_state_independent - 1;
        rep.thresholds.emplace_back("tight_bound_p=" + std::to_string(p),
                                    depth_bound_state_independent(m.n_particles, p));
      }
    } catch (const Error& e) {
      note("depth_state_independent", e);
    }
    try {
      rep.depth_sm = depth_detect(m, DepthMethod::sm);
    } catch (const Error& e) {
      note("depth_sm", e);
    }
    try {
      rep.max_entangled_modes = max_entangled_modes(v);
    } catch (const Error& e) {
      note("max_entangled_modes", e);
    }
    const int modes = modes_hint ? *modes_hint : (mm ? mm->modes : 0);
    if (modes >= 2) {
      try {
        rep.mode_insep_k = mode_insep_k(v, modes);
        if (rep.mode_insep_k) {
          const int k = *rep.mode_insep_k;
          rep.thresholds.emplace_back(
              "mode_insep_threshold_k=" + std::to_string(k),
              4.0 * (k - 1) * (k - 1) / (static_cast<double>(modes) * modes * (modes - 1)));
        }
      } catch (const Error& e) {
        note("mode_insep_k", e);
      }
    }
  }

  if (mm && mm->modes == 2) {
    try {
      rep.g2 = g2_two_mode(*mm);
    } catch (const Error& e) {
      note("g2", e);
    }
    try {
      rep.r2 = steering_r2(*mm);
      rep.steering.r2_b_by_a = *rep.r2 < 1.0;
      rep.thresholds.emplace_back("steering_r2", 1.0);
    } catch (const Error& e) {
      note("r2", e);
    }
    try {
      const double r2_swapped = steering_r2(swap_two_modes(*mm));
      rep.steering.r2_a_by_b = r2_swapped < 1.0;
    } catch (const Error& e) {
      note("r2_a_by_b", e);
    }
    if (mm->n_particles.size() == 2) {
      try {
        const SteeringSm sb = steering_sm(m.var_sz, mm->mean_sx[1], mm->n_particles[1], m.n_particles);
        rep.steering.sm_b_by_a = sb.violated;
        rep.thresholds.emplace_back("steering_sm_bound_B", sb.bound);
      } catch (const Error& e) {
        note("steering_sm_b_by_a", e);
      }
      try {
        const SteeringSm sa = steering_sm(m.var_sz, mm->mean_sx[0], mm->n_particles[0], m.n_particles);
        rep.steering.sm_a_by_b = sa.violated;
        rep.thresholds.emplace_back("steering_sm_bound_A", sa.bound);
      } catch (const Error& e) {
        note("steering_sm_a_by_b", e);
      }
    }
  }

  return rep;
}

}  // namespace spinsq
