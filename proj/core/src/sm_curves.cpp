#include "spinsq/sm_curves.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace spinsq {

namespace {

struct XfPoint {
  double x;
  double f;
};

XfPoint ground_xf(SpinLength spin, double lambda) {
  const GroundState gs = ground_state(build_hamiltonian(lambda, spin));
  const StateMoments mom = moments(gs.state);
  const double s = spin.s();
  return XfPoint{std::abs(mom.mean_sx) / s, mom.var_sz / s};
}

// Smallest polarization reachable by the ground-state family as lambda -> 0.
// Integer S: the twin-Fock limit x = 0. Half-integer S: the m = +-1/2
// doublet, x = (2S+1)/(4S) with Var[S_z] = 1/4.
double family_x_floor(SpinLength spin) {
  if (spin.is_integer()) return 0.0;
  return (spin.two_s + 1) / (2.0 * spin.two_s);
}

double family_f_floor(SpinLength spin) {
  if (spin.is_integer()) return 0.0;
  return 0.25 / spin.s();
}

void check_x_in_range(double x) {
  if (!(std::isfinite(x) && std::abs(x) <= 1.0)) {
    throw DomainError("F_S[x]: require |x| <= 1");
  }
}

}  // namespace

FsTable build_fs_table(SpinLength spin, int n_points) {
  if (n_points < 16) throw DomainError("build_fs_table: need at least 16 points");
  if (spin.two_s == 1) {
    throw NonConvergence(
        "build_fs_table: the S=1/2 ground-state family is fully polarized for every "
        "lambda (x == 1); use the closed form F_{1/2}[x] = x^2/2 via fs_eval");
  }

  FsTable table{spin, {}};
  table.samples.reserve(n_points);
  const double log_lo = std::log(kFsLambdaMin);
  const double log_hi = std::log(kFsLambdaMax);
  for (int j = 0; j < n_points; ++j) {
    const double t = static_cast<double>(j) / (n_points - 1);
    const double lambda = std::exp(log_lo + t * (log_hi - log_lo));
    const XfPoint p = ground_xf(spin, lambda);
    table.samples.push_back(FsSample{lambda, p.x, p.f});
  }

  for (int j = 0; j + 1 < n_points; ++j) {
    const FsSample& a = table.samples[j];
    const FsSample& b = table.samples[j + 1];
    if (!(b.x > a.x)) {
      throw NonConvergence("build_fs_table: x(lambda) not strictly increasing near lambda = " +
                           std::to_string(a.lambda));
    }
    if (b.f < a.f - 1e-12 * std::max(1.0, a.f)) {
      throw NonConvergence("build_fs_table: f(lambda) decreased near lambda = " +
                           std::to_string(a.lambda));
    }
  }
  for (const FsSample& s : table.samples) {
    if (s.f > 0.5 + 1e-9) {
      throw NonConvergence("build_fs_table: f exceeded the coherent-state value 1/2");
    }
  }
  return table;
}

const FsTable& shared_fs_table(SpinLength spin) {
  static std::mutex mu;
  static std::map<int, FsTable> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(spin.two_s);
  if (it == cache.end()) {
    it = cache.emplace(spin.two_s, build_fs_table(spin)).first;
  }
  return it->second;
}

double fs_eval(const FsTable& table, double x) {
  check_x_in_range(x);
  const double ax = std::abs(x);
  if (ax == 1.0) return 0.5;  // coherent-state endpoint, exact

  const double x_floor = family_x_floor(table.spin);
  if (table.spin.is_integer()) {
    if (ax == 0.0) return 0.0;
  } else {
    if (ax < x_floor) return 0.0;  // below the family's reach; 0 is still a valid bound
    if (ax == x_floor) return family_f_floor(table.spin);
  }

  if (table.samples.empty()) throw DomainError("fs_eval: empty table");
  if (ax >= table.samples.back().x) return table.samples.back().f;

  // Bracket in lambda using the table, then 32 bisection steps.
  double lam_lo = 0.0;
  double lam_hi = table.samples.back().lambda;
  auto it = std::lower_bound(table.samples.begin(), table.samples.end(), ax,
                             [](const FsSample& s, double v) { return s.x < v; });
  if (it != table.samples.begin()) lam_lo = std::prev(it)->lambda;
  lam_hi = it->lambda;

  for (int i = 0; i < 32; ++i) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    const XfPoint p = ground_xf(table.spin, mid);
    if (p.x < ax) {
      lam_lo = mid;
    } else {
      lam_hi = mid;
    }
  }
  return ground_xf(table.spin, 0.5 * (lam_lo + lam_hi)).f;
}

double fs_eval(SpinLength spin, double x) {
  check_x_in_range(x);
  if (spin.two_s == 1) return 0.5 * x * x;
  return fs_eval(shared_fs_table(spin), x);
}

double fs_analytic_large_s(SpinLength spin, double x) {
  check_x_in_range(x);
  const double s = spin.s();
  const double one_minus_x2 = std::max(0.0, (1.0 - x) * (1.0 + x));
  const double rad = one_minus_x2 * ((1.0 + s) * (1.0 + s) - s * s * x * x);
  return 0.5 * (1.0 + s * one_minus_x2 - std::sqrt(std::max(0.0, rad)));
}

double fs_small_x_coefficient(SpinLength spin) {
  if (!spin.is_integer()) {
    throw DomainError("fs_small_x_coefficient: limit established for integer S only");
  }
  return 1.0 / (2.0 + 2.0 * spin.s());
}

PerturbativeMoments perturbative_moments(SpinLength spin, double lambda) {
  const double s = spin.s();
  const double den = 2.0 + s * (s + 1.0) * lambda * lambda;
  PerturbativeMoments out;
  out.mean_sx = -2.0 * s * (s + 1.0) * lambda / den;
  out.mean_sz2 = 1.0 - 2.0 / den;
  out.xi2 = 1.0 / (s + 1.0) + 0.5 * s * lambda * lambda;
  return out;
}

double xi2_min(SpinLength spin) { return 1.0 / (1.0 + spin.s()); }

}  // namespace spinsq
