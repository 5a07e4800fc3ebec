// spin_core.hpp — collective spin operators in the Dicke basis |S,m>, a
// symmetric-tridiagonal ground-state solver, and moment/QFI evaluation for
// pure spin-S states with real amplitudes.

#pragma once

#include <vector>

#include "spinsq/errors.hpp"

namespace spinsq {

// Spin length S, stored as 2S so half-integer spins stay exact.
struct SpinLength {
  int two_s;

  explicit SpinLength(int two_s_);

  int dimension() const noexcept { return two_s + 1; }
  double s() const noexcept { return 0.5 * two_s; }
  bool is_integer() const noexcept { return two_s % 2 == 0; }
};

// m quantum number of amplitude index i = 0..2S (ascending, m = i - S).
inline double m_of_index(SpinLength spin, int index) noexcept {
  return index - 0.5 * spin.two_s;
}

// Real symmetric tridiagonal operator on the Dicke basis of one spin-S.
struct TridiagonalOperator {
  std::vector<double> diagonal;      // length 2S+1
  std::vector<double> off_diagonal;  // length 2S
};

// Pure spin-S state, real amplitudes over |S,m>, m = -S..S, unit norm.
// All Hamiltonians handled here are real symmetric, so real amplitudes
// suffice; in particular <S_y> = 0 for every such state.
struct SpinState {
  SpinLength spin;
  std::vector<double> amplitudes;

  SpinState(SpinLength spin_, std::vector<double> amplitudes_);
};

struct StateMoments {
  double mean_sx = 0.0;
  double mean_sz = 0.0;
  double var_sz = 0.0;
  double mean_sy2 = 0.0;
};

struct GroundState {
  double energy;
  SpinState state;
};

// S_x ladder matrix: zero diagonal, off-diagonal sqrt(S(S+1) - m(m+1))/2
// between |S,m> and |S,m+1>.
TridiagonalOperator build_sx(SpinLength spin);

// H = lambda S_x + S_z^2.
TridiagonalOperator build_hamiltonian(double lambda, SpinLength spin);

// Smallest eigenpair of a real symmetric tridiagonal operator: Sturm-sequence
// bisection brackets the lowest eigenvalue, inverse iteration recovers the
// vector (iteration cap 100). The global sign is fixed by making the largest-
// magnitude amplitude positive. A diagonal operator with a two-fold degenerate
// minimum (lambda = 0, half-integer S) returns the symmetric combination.
// Throws NonConvergence if the tolerances cannot be met.
GroundState ground_state(const TridiagonalOperator& op);

// <S_x>, <S_z>, Var[S_z], <S_y^2> via ladder-operator algebra.
StateMoments moments(const SpinState& state);

// Quantum Fisher information of a pure state under S_y: 4 Var[S_y].
// Real amplitudes give <S_y> = 0, so this is 4 <S_y^2>.
double qfi_pure(const SpinState& state);

// Low-level expectation values on real-amplitude states.
double expect_sx(const SpinState& state);
double expect_sz(const SpinState& state);
double expect_sz2(const SpinState& state);
double expect_sx2(const SpinState& state);
double expect_sy2(const SpinState& state);
double expect_sym_xz(const SpinState& state);  // <{S_x,S_z}>/2

}  // namespace spinsq
