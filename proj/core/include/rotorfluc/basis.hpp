#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rotorfluc {

// One |J, M> level of a linear rigid rotor.
struct RotorLevel {
  int J = 0;
  int M = 0;
};

// The fixed-M subspace spanned by |J, M> for J = |M| .. J_max.
// Row/column index i maps to J = |M| + i.
struct BasisBlock {
  int M = 0;
  int J_max = 0;

  int dim() const { return J_max - std::abs(M) + 1; }
  int j_of(int i) const { return std::abs(M) + i; }
  int index_of(int J) const { return J - std::abs(M); }
  bool contains(int J) const { return J >= std::abs(M) && J <= J_max; }
};

// Real symmetric operator on a BasisBlock, banded in J.  cos^2(theta)
// couples J with J, J+-2 (half bandwidth 2); cos^4(theta) additionally
// couples J+-4 (half bandwidth 4).  Odd off-diagonals vanish by parity,
// so only even bands are stored: bands[d/2][i] holds the (i, i+d) entry.
struct BandedOperator {
  BasisBlock block;
  int half_bandwidth = 2;                 // 2 or 4, even
  std::vector<std::vector<double>> bands; // bands[k] has dim()-2k entries

  int dim() const { return block.dim(); }

  double entry(int i, int j) const;

  // y = A x
  void apply(std::span<const std::complex<double>> x,
             std::span<std::complex<double>> y) const;

  // <c|A|c> (c need not be normalized; caller divides by norm if needed)
  double expectation(std::span<const std::complex<double>> c) const;

  Eigen::MatrixXd dense() const;
};

// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) for integer arguments.
// Racah's single-sum form evaluated with log-factorials; returns 0 for
// arguments violating the selection rules.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// <J', M| P_l(cos theta) |J, M> for even l in {0, 2, 4}.
// Zero unless |J - J'| <= l and J - J' is even.  Throws
// std::invalid_argument for unsupported l, negative J, or |M| > min(J, J').
double legendre_matrix_element(int l, int Jp, int J, int M);

// Matrix of cos^2(theta) (resp. cos^4(theta)) on a block, from the
// Legendre expansions cos^2 = 1/3 + (2/3) P2 and
// cos^4 = 1/5 + (4/7) P2 + (8/35) P4.
BandedOperator cos2_operator(const BasisBlock& block);
BandedOperator cos4_operator(const BasisBlock& block);

// Normalized theta part of the spherical harmonic: Theta_{JM}(x) with
// integral over x in [-1, 1] of Theta^2 equal to 1 (Condon-Shortley
// phase included).  Returns the column for all J = |M| .. J_max at
// fixed x = cos(theta), computed by upward recurrence.
std::vector<double> theta_column(int M, int J_max, double x);

}  // namespace rotorfluc
