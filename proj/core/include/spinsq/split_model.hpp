// split_model.hpp — moment propagation for a symmetric state distributed
// into M addressable modes with independent, spin-uncorrelated mode
// occupation, plus a sampling oracle for the occupation statistics.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinsq/spin_core.hpp"
#include "spinsq/witnesses.hpp"

namespace spinsq {

// Single-particle means <s_u> and distinct-pair correlators <s_u^(1) s_v^(2)>
// of a permutation-symmetric N-particle state, u,v in {x,y,z} = {0,1,2}.
// The pair matrix stored here is the symmetrized (real) part; same-particle
// cross terms never enter the propagated variances.
struct PairCorrelations {
  int n_particles = 0;
  std::array<double, 3> single{};
  std::array<std::array<double, 3>, 3> pair{};
};

struct SplitConfig {
  int modes = 0;
  std::vector<double> pi;

  static SplitConfig symmetric(int modes);
};

// Invert the collective first and second moments of a spin-(N/2) state into
// single-particle and pair correlators. Requires N >= 2.
PairCorrelations extract_pair_correlations(const SpinState& parent);

// Per-mode means, variances, and cross-mode covariances of S_z and S_y after
// splitting:
//   <S_u^I>        = pi_I N <s_u>
//   Var[S_u^I]     = pi_I N/4 + pi_I^2 N(N-1) <s_u s_u> - <S_u^I>^2
//   Cov[S_u^I,S_u^J] = pi_I pi_J (N(N-1) <s_u s_u> - N^2 <s_u>^2),  I != J
ModeMomentSet propagate_mode_moments(const PairCorrelations& pc, const SplitConfig& cfg);

struct GkEntry {
  int k;
  double value;     // criterion value assembled from propagated moments
  double expected;  // xi2 M^2(M-1)/(4(k-1)^2)
};

struct EquivalenceReport {
  int modes;
  double xi2;
  double g2;
  double r2;
  std::vector<GkEntry> gk2;  // k = 2..M
  double max_rel_error;
  bool pass;
};

// Split a polarized parent state symmetrically and verify the identities
// g2 = xi2, r2 = 4 xi2, and the k-separability criterion values against the
// closed form, each to 1e-12 relative.
EquivalenceReport equivalence_check(const SpinState& parent, int modes);

struct OccupationStats {
  int modes = 0;
  long long trials = 0;
  std::vector<double> mode_mean;  // occupation frequency of particle 1
  std::vector<double> mode_se;
  std::vector<std::vector<double>> pair_mean;  // particle 1 in I and particle 2 in J
  std::vector<std::vector<double>> pair_se;
};

// Assign N particles independently to modes with probabilities pi, `trials`
// times, and return empirical occupation statistics with standard errors.
// Deterministic for a fixed seed; trial t uses a counter-derived substream,
// so the result is independent of any parallel schedule.
OccupationStats sample_mode_occupation(int n_particles, const SplitConfig& cfg, long long trials,
                                       std::uint64_t seed);

}  // namespace spinsq
