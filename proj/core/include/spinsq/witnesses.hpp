// witnesses.hpp — entanglement, mode-inseparability, entanglement-depth,
// EPR-steering, and local-squeezing criteria evaluated from first and
// second moments of collective spin observables.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinsq/errors.hpp"

namespace spinsq {

// Collective moments of N spin-1/2 particles: Var[S_z] and <S_x>.
struct CollectiveMoments {
  int n_particles = 0;
  double var_sz = 0.0;
  double mean_sx = 0.0;
};

// Per-mode means, variances, and cross-mode covariances after splitting into
// M addressable modes. Covariance matrices are symmetric with the per-mode
// variances on the diagonal. var_sy/cov_sy entries may be NaN when the S_y
// moments were not measured; criteria that need them reject such sets.
// n_particles carries per-mode particle counts when they are known (empty
// otherwise); they are needed only by the steering bound on a single mode.
struct ModeMomentSet {
  int modes = 0;
  std::vector<double> pi;
  std::vector<double> mean_sx;
  std::vector<double> var_sz;
  std::vector<double> var_sy;
  std::vector<std::vector<double>> cov_sz;
  std::vector<std::vector<double>> cov_sy;
  std::vector<int> n_particles;
};

// A partition of modes {1..M} into disjoint non-empty blocks.
struct Partition {
  std::vector<std::vector<int>> blocks;
};

enum class DepthMethod { fisher, tight, sm };

struct SteeringFlags {
  std::optional<bool> r2_b_by_a;  // product criterion, denominator <S_x^B>
  std::optional<bool> r2_a_by_b;
  std::optional<bool> sm_b_by_a;  // single-mode variance bound on mode B
  std::optional<bool> sm_a_by_b;
};

struct WitnessReport {
  std::optional<double> xi2;
  std::optional<double> g2;
  std::optional<double> r2;
  int depth_state_independent = 1;  // polarization-free bound
  int depth_fisher = 1;
  int depth_sm = 1;
  std::optional<int> mode_insep_k;
  int max_entangled_modes = 1;
  SteeringFlags steering;
  std::vector<std::pair<std::string, double>> thresholds;
  std::vector<std::string> errors;
};

void validate(const CollectiveMoments& m);
void validate(const ModeMomentSet& mm);

// Squeezing coefficient N Var[S_z] / <S_x>^2; >= 1 for separable states.
double xi2(const CollectiveMoments& m);

// Two-mode product criterion 4 Var[S_z^A+S_z^B] Var[S_y^A-S_y^B] /
// (|<S_x^A>| + |<S_x^B>|)^2; >= 1 for mode-separable states.
double g2_two_mode(const ModeMomentSet& mm);

// Coefficient vectors g* = (1,..,1), h* = (1, -1/(M-1),..) used by the
// multimode criterion.
std::vector<double> g_star(int modes);
std::vector<double> h_star(int modes);

// Minimal partition bound 2(k-1)/(M-1) for g*, h* in closed form.
double beta_min_closed(int modes, int k);

struct BetaMinResult {
  double value;
  Partition argmin;
};

// Exhaustive minimum of sum_q |sum_{I in block q} g_I h_I| over all set
// partitions of {1..M} with at least k blocks. M <= 12.
BetaMinResult beta_min_enumerate(int modes, int k, std::span<const double> g,
                                 std::span<const double> h);

// Multimode criterion value xi2 M^2(M-1)/(4(k-1)^2) for symmetric splits.
double gk2_symmetric(double xi2_value, int modes, int k);

// Smallest k in [2,M] whose k-separability bound is violated, i.e. every
// separable partition must have fewer than k blocks; absent if none is.
std::optional<int> mode_insep_k(double xi2_value, int modes);

// Largest M for which full mode entanglement (k = M) is certified:
// M < 2(1+sqrt(1-xi2))/xi2. Returns 1 when nothing is certified (xi2 >= 1
// boundary included). Throws DomainError for xi2 <= 0.
int max_entangled_modes(double xi2_value);

// Polarization-free depth bound N/(N_p p^2/2 + r^2/2 + N) with
// N_p = floor(N/p), r = N - p N_p; equals 1/(1+p/2) when p divides N.
double depth_bound_state_independent(int n_particles, int p);

// Variance bound of the polarization-dependent depth criterion:
// S_p N_p F_{S_p}[x] + S_r F_{S_r}[x], with S_p = p/2, S_r = r/2.
double sm_variance_bound(int n_particles, int p, double x);

// Squeezing-coefficient form 2 F_{p/2}[x] / x^2 of the polarization-
// dependent depth bound (N divisible by p). DomainError at x = 0; the
// limit there is 1/(1+p/2).
double sm_xi2_bound(int p, double x);

// Detected entanglement depth: (largest p whose bound is strictly violated)
// + 1, scanning p = 1..N; 1 when nothing is violated. Ties (equality) do
// not count as violations.
int depth_detect(const CollectiveMoments& m, DepthMethod method);

// Two-mode steering product criterion with denominator <S_x^B>^2; >= 1 in
// the absence of steering of B by A. Equals 4 g2 for symmetric splits.
double steering_r2(const ModeMomentSet& mm);

struct SteeringSm {
  bool violated = false;
  double bound = 0.0;
  std::optional<double> weaker_bound;
};

// Single-mode variance steering bound: Var[S_z] >= S_B F_{S_B}[<S_x^B>/S_B]
// holds without steering of B by A. When the total particle number is given,
// the weaker comparison bound S F_{S_B}[<S_x^B>/S] is also reported.
SteeringSm steering_sm(double var_sz, double mean_sx_b, int n_b,
                       std::optional<int> n_total = std::nullopt);

// Local squeezing coefficient of one mode after splitting:
// xi2 pi + (1-pi) (N/(2<S_x>))^2; always >= 1 - pi.
double local_xi2_from_global(double xi2_value, double pi, int n_particles, double mean_sx);

// Exact global-local relation: sum_I xi2_I - N^2 (M-1)/(4 <S_x>^2).
double global_local_identity(std::span<const double> local_xi2, int n_particles, int modes,
                             double mean_sx);

// Evaluate every applicable criterion; per-field failures are recorded in
// WitnessReport::errors instead of aborting.
WitnessReport build_report(const CollectiveMoments& m,
                           const std::optional<ModeMomentSet>& mm = std::nullopt,
                           std::optional<int> modes_hint = std::nullopt);

}  // namespace spinsq
