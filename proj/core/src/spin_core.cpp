#include "spinsq/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace spinsq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 100;  // inverse-iteration cap

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int dimension_of(const TridiagonalOperator& op) {
  const auto d = static_cast<int>(op.diagonal.size());
  if (d < 1 || op.off_diagonal.size() + 1 != op.diagonal.size()) {
    throw DimensionError("tridiagonal operator: off-diagonal length must be diagonal length - 1");
  }
  return d;
}

double inf_norm(const TridiagonalOperator& op) {
  const int d = static_cast<int>(op.diagonal.size());
  double nrm = 0.0;
  for (int i = 0; i < d; ++i) {
    double row = std::abs(op.diagonal[i]);
    if (i > 0) row += std::abs(op.off_diagonal[i - 1]);
    if (i + 1 < d) row += std::abs(op.off_diagonal[i]);
    nrm = std::max(nrm, row);
  }
  return nrm;
}

// Number of eigenvalues strictly below x (Sturm/LDL^T sign count).
int count_below(const TridiagonalOperator& op, double x) {
  const int d = static_cast<int>(op.diagonal.size());
  constexpr double kTiny = std::numeric_limits<double>::min();
  double q = op.diagonal[0] - x;
  int count = q < 0.0 ? 1 : 0;
  for (int i = 1; i < d; ++i) {
    double den = q;
    if (std::abs(den) < kTiny) den = den < 0.0 ? -kTiny : kTiny;
    const double e = op.off_diagonal[i - 1];
    q = (op.diagonal[i] - x) - e * e / den;
    if (q < 0.0) ++count;
  }
  return count;
}

// Partial-pivot LU of (T - sigma I), LAPACK dgttrf style (one fill-in band).
struct ShiftedFactor {
  int n = 0;
  std::vector<double> dl, dd, du, du2;
  std::vector<unsigned char> swapped;

  ShiftedFactor(const TridiagonalOperator& op, double sigma) {
    n = static_cast<int>(op.diagonal.size());
    dl = op.off_diagonal;
    du = op.off_diagonal;
    dd.resize(n);
    for (int i = 0; i < n; ++i) dd[i] = op.diagonal[i] - sigma;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 1 ? n - 1 : 0, 0);

    const double tiny = kEps * kEps * std::max(1.0, inf_norm(op));
    for (int i = 0; i + 1 < n; ++i) {
      if (std::abs(dd[i]) >= std::abs(dl[i])) {
        if (dd[i] == 0.0) dd[i] = tiny;
        const double fact = dl[i] / dd[i];
        dl[i] = fact;
        dd[i + 1] -= fact * du[i];
      } else {
        const double fact = dd[i] / dl[i];
        dd[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = dd[i + 1];
        dd[i + 1] = temp - fact * dd[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (dd[n - 1] == 0.0) dd[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    for (int i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i + 1];
      }
    }
    b[n - 1] /= dd[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
    for (int i = n - 3; i >= 0; --i) {
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    }
  }
};

double norm2(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(s));
}

// Rayleigh quotient of a unit vector, accumulated in extended precision.
double rayleigh(const TridiagonalOperator& op, const std::vector<double>& v) {
  const int d = static_cast<int>(op.diagonal.size());
  long double s = 0.0L;
  for (int i = 0; i < d; ++i) s += static_cast<long double>(op.diagonal[i]) * v[i] * v[i];
  for (int i = 0; i + 1 < d; ++i) s += 2.0L * static_cast<long double>(op.off_diagonal[i]) * v[i] * v[i + 1];
  return static_cast<double>(s);
}

double residual(const TridiagonalOperator& op, const std::vector<double>& v, double theta) {
  const int d = static_cast<int>(op.diagonal.size());
  long double s = 0.0L;
  for (int i = 0; i < d; ++i) {
    long double r = (static_cast<long double>(op.diagonal[i]) - theta) * v[i];
    if (i > 0) r += static_cast<long double>(op.off_diagonal[i - 1]) * v[i - 1];
    if (i + 1 < d) r += static_cast<long double>(op.off_diagonal[i]) * v[i + 1];
    s += r * r;
  }
  return static_cast<double>(std::sqrt(s));
}

void fix_sign(std::vector<double>& v) {
  int imax = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  }
  if (v[imax] < 0.0) {
    for (double& x : v) x = -x;
  }
}

// Ground pair of a diagonal operator. A degenerate minimum (lambda = 0 with
// half-integer S) returns the symmetric combination of the degenerate levels.
GroundState diagonal_ground_state(const TridiagonalOperator& op) {
  const int d = static_cast<int>(op.diagonal.size());
  const double emin = *std::min_element(op.diagonal.begin(), op.diagonal.end());
  std::vector<double> amps(d, 0.0);
  int hits = 0;
  for (int i = 0; i < d; ++i) {
    if (op.diagonal[i] == emin) ++hits;
  }
  const double a = 1.0 / std::sqrt(static_cast<double>(hits));
  for (int i = 0; i < d; ++i) {
    if (op.diagonal[i] == emin) amps[i] = a;
  }
  return GroundState{emin, SpinState(SpinLength(d - 1), std::move(amps))};
}

}  // namespace

SpinLength::SpinLength(int two_s_) : two_s(two_s_) {
  if (two_s < 1) throw DomainError("SpinLength: 2S must be a positive integer");
}

SpinState::SpinState(SpinLength spin_, std::vector<double> amplitudes_)
    : spin(spin_), amplitudes(std::move(amplitudes_)) {
  if (static_cast<int>(amplitudes.size()) != spin.dimension()) {
    throw DimensionError("SpinState: amplitude count must be 2S+1");
  }
  const double n = norm2(amplitudes);
  if (!(std::abs(n - 1.0) <= 1e-12)) {
    throw DomainError("SpinState: amplitudes must have unit norm (|norm-1| = " +
                      std::to_string(std::abs(n - 1.0)) + ")");
  }
}

TridiagonalOperator build_sx(SpinLength spin) {
  const double s = spin.s();
  TridiagonalOperator op;
  op.diagonal.assign(spin.dimension(), 0.0);
  op.off_diagonal.resize(spin.dimension() - 1);
  for (int i = 0; i + 1 < spin.dimension(); ++i) {
    const double m = m_of_index(spin, i);
    op.off_diagonal[i] = 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  return op;
}

TridiagonalOperator build_hamiltonian(double lambda, SpinLength spin) {
  if (!std::isfinite(lambda)) throw DomainError("build_hamiltonian: lambda must be finite");
  TridiagonalOperator op = build_sx(spin);
  for (double& e : op.off_diagonal) e *= lambda;
  for (int i = 0; i < spin.dimension(); ++i) {
    const double m = m_of_index(spin, i);
    op.diagonal[i] = m * m;
  }
  return op;
}

GroundState ground_state(const TridiagonalOperator& op) {
  const int d = dimension_of(op);
  if (d < 2) {
    throw DimensionError("ground_state: operator must act on a spin space of dimension >= 2");
  }

  double max_off = 0.0;
  for (double e : op.off_diagonal) max_off = std::max(max_off, std::abs(e));
  if (max_off == 0.0) return diagonal_ground_state(op);

  // Gershgorin bracket for the spectrum.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < d; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(op.off_diagonal[i - 1]);
    if (i + 1 < d) r += std::abs(op.off_diagonal[i]);
    lo = std::min(lo, op.diagonal[i] - r);
    hi = std::max(hi, op.diagonal[i] + r);
  }

  const double tnorm = inf_norm(op);
  const double width_tol = 8.0 * kEps * std::max(1.0, tnorm);
  int guard = 0;
  while (hi - lo > width_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    if (count_below(op, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (++guard > 4096) throw NonConvergence("ground_state: bisection failed to narrow the bracket");
  }

  // Inverse iteration at the bracket's upper edge (count_below(hi) >= 1).
  double sigma = hi;
  ShiftedFactor factor(op, sigma);

  std::vector<double> v(d);
  std::uint64_t rng = 0x5EED5EED5EED5EEDULL;
  for (int i = 0; i < d; ++i) {
    v[i] = 0.5 + static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53;
  }
  {
    const double n = norm2(v);
    for (double& x : v) x /= n;
  }

  double diag_norm = 0.0;
  for (double x : op.diagonal) diag_norm = std::max(diag_norm, std::abs(x));
  const double resid_tol =
      std::max(1e-10 * std::max(1.0, diag_norm), 256.0 * kEps * std::max(1.0, tnorm));

  double theta = 0.0;
  double theta_prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<double> w(d);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    w = v;
    factor.solve(w);
    const double n = norm2(w);
    if (!std::isfinite(n) || n == 0.0) {
      // Shift landed on an exact eigenvalue; nudge and refactor.
      sigma = std::nextafter(sigma, std::numeric_limits<double>::infinity());
      factor = ShiftedFactor(op, sigma);
      continue;
    }
    for (int i = 0; i < d; ++i) v[i] = w[i] / n;
    theta = rayleigh(op, v);
    const double res = residual(op, v, theta);
    if (res <= resid_tol && std::abs(theta - theta_prev) <= 1e-12 * std::max(1.0, std::abs(theta))) {
      converged = true;
      break;
    }
    theta_prev = theta;
  }
  if (!converged) {
    throw NonConvergence("ground_state: inverse iteration did not converge within 100 iterations");
  }
  if (theta > hi + std::max(16.0 * width_tol, 1e-12 * std::max(1.0, std::abs(hi)))) {
    throw NonConvergence("ground_state: inverse iteration locked onto a higher eigenvalue");
  }

  fix_sign(v);
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return GroundState{theta, SpinState(SpinLength(d - 1), std::move(v))};
}

double expect_sz(const SpinState& st) {
  long double s = 0.0L;
  for (int i = 0; i < st.spin.dimension(); ++i) {
    const double m = m_of_index(st.spin, i);
    s += static_cast<long double>(m) * st.amplitudes[i] * st.amplitudes[i];
  }
  return static_cast<double>(s);
}

double expect_sz2(const SpinState& st) {
  long double s = 0.0L;
  for (int i = 0; i < st.spin.dimension(); ++i) {
    const double m = m_of_index(st.spin, i);
    s += static_cast<long double>(m) * m * st.amplitudes[i] * st.amplitudes[i];
  }
  return static_cast<double>(s);
}

double expect_sx(const SpinState& st) {
  const double s = st.spin.s();
  long double acc = 0.0L;
  for (int i = 0; i + 1 < st.spin.dimension(); ++i) {
    const double m = m_of_index(st.spin, i);
    const double t = 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    acc += 2.0L * static_cast<long double>(t) * st.amplitudes[i] * st.amplitudes[i + 1];
  }
  return static_cast<double>(acc);
}

namespace {

// <S_+^2> on a real state: sum_m a_{m+2} c(m+1) c(m) a_m with the full
// ladder coefficient c(m) = sqrt(S(S+1) - m(m+1)).
double expect_splus2(const SpinState& st) {
  const double s = st.spin.s();
  long double acc = 0.0L;
  for (int i = 0; i + 2 < st.spin.dimension(); ++i) {
    const double m = m_of_index(st.spin, i);
    const double c0 = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    const double c1 = std::sqrt(s * (s + 1.0) - (m + 1.0) * (m + 2.0));
    acc += static_cast<long double>(st.amplitudes[i + 2]) * c1 * c0 * st.amplitudes[i];
  }
  return static_cast<double>(acc);
}

}  // namespace

double expect_sx2(const SpinState& st) {
  const double s = st.spin.s();
  return 0.5 * (s * (s + 1.0) - expect_sz2(st) + expect_splus2(st));
}

double expect_sy2(const SpinState& st) {
  const double s = st.spin.s();
  return 0.5 * (s * (s + 1.0) - expect_sz2(st) - expect_splus2(st));
}

double expect_sym_xz(const SpinState& st) {
  const double s = st.spin.s();
  long double acc = 0.0L;
  for (int i = 0; i + 1 < st.spin.dimension(); ++i) {
    const double m = m_of_index(st.spin, i);
    const double t = 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    acc += static_cast<long double>(t) * (2.0 * m + 1.0) * st.amplitudes[i] * st.amplitudes[i + 1];
  }
  return static_cast<double>(acc);
}

StateMoments moments(const SpinState& st) {
  StateMoments out;
  out.mean_sx = expect_sx(st);
  out.mean_sz = expect_sz(st);
  out.var_sz = std::max(0.0, expect_sz2(st) - out.mean_sz * out.mean_sz);
  out.mean_sy2 = std::max(0.0, expect_sy2(st));
  return out;
}

double qfi_pure(const SpinState& st) { return 4.0 * std::max(0.0, expect_sy2(st)); }

}  // namespace spinsq
