// sm_curves.hpp — minimal-variance curves F_S[x] for a spin-S system:
// construction from variational ground states of lambda S_x + S_z^2,
// evaluation by root-finding in lambda, and analytic limits.
//
// F_S[x] is the smallest Var[S_z]/S compatible with a polarization
// |<S_x>|/S = x. For integer S the ground-state family of
// H = lambda S_x + S_z^2 sweeps x over (0,1) as lambda runs over
// (0,inf). Half-integer curves use the same construction; their family
// only reaches x in [(2S+1)/(4S), 1] and is kept for remainder groups.

#pragma once

#include <vector>

#include "spinsq/spin_core.hpp"

namespace spinsq {

struct FsSample {
  double lambda;
  double x;  // |<S_x>|/S of the ground state
  double f;  // Var[S_z]/S of the ground state
};

// Samples ordered by lambda (equivalently by x, which is checked to be
// strictly increasing at build time).
struct FsTable {
  SpinLength spin;
  std::vector<FsSample> samples;
};

inline constexpr int kFsDefaultPoints = 512;
inline constexpr double kFsLambdaMin = 1e-6;
inline constexpr double kFsLambdaMax = 1e6;

// Tabulate the curve on a log-spaced lambda grid. Requires n_points >= 16.
// Monotonicity of x(lambda) is asserted rather than assumed; violations
// (and the flat S=1/2 family, where x == 1 for every lambda) raise
// NonConvergence.
FsTable build_fs_table(SpinLength spin, int n_points = kFsDefaultPoints);

// Process-wide cache of default-size tables, safe for concurrent use.
const FsTable& shared_fs_table(SpinLength spin);

// F_S[|x|] by bisection on lambda, bracketed by the table (32 iterations).
// |x| = 1 returns the coherent-state value 1/2 exactly. For half-integer S,
// queries below the family's smallest reachable polarization return 0, a
// valid (if weak) lower bound on the variance.
double fs_eval(const FsTable& table, double x);

// Cached-table convenience overload. S = 1/2 is served by the exact
// single-spin curve F_{1/2}[x] = x^2/2 (its Lagrange family is degenerate).
double fs_eval(SpinLength spin, double x);

// (1 + S(1-x^2) - sqrt((1-x^2)((1+S)^2 - S^2 x^2)))/2, valid for S >> 1.
// Underestimates the true curve by a factor of two as x -> 0.
double fs_analytic_large_s(SpinLength spin, double x);

// lim_{x->0} F_S[x]/x^2 = 1/(2+2S). Integer S only.
double fs_small_x_coefficient(SpinLength spin);

// First-order perturbation theory around |S,0> for small lambda.
struct PerturbativeMoments {
  double mean_sx;
  double mean_sz2;
  double xi2;
};
PerturbativeMoments perturbative_moments(SpinLength spin, double lambda);

// Ultimate lower bound 1/(1+S) on the squeezing coefficient of a spin-S
// system, approached by the ground-state family as lambda -> 0.
double xi2_min(SpinLength spin);

}  // namespace spinsq
