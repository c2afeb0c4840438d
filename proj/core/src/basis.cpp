#include "rotorfluc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorfluc {

double BandedOperator::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = j - i;
  if (d > half_bandwidth || (d % 2) != 0) return 0.0;
  return bands[d / 2][i];
}

void BandedOperator::apply(std::span<const std::complex<double>> x,
                           std::span<std::complex<double>> y) const {
  const int n = dim();
  for (int i = 0; i < n; ++i) y[i] = bands[0][i] * x[i];
  for (int k = 1; 2 * k <= half_bandwidth; ++k) {
    const int d = 2 * k;
    const auto& b = bands[k];
    for (int i = 0; i + d < n; ++i) {
      y[i] += b[i] * x[i + d];
      y[i + d] += b[i] * x[i];
    }
  }
}

double BandedOperator::expectation(std::span<const std::complex<double>> c) const {
  const int n = dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += bands[0][i] * std::norm(c[i]);
  for (int k = 1; 2 * k <= half_bandwidth; ++k) {
    const int d = 2 * k;
    const auto& b = bands[k];
    for (int i = 0; i + d < n; ++i)
      acc += 2.0 * b[i] * (c[i] * std::conj(c[i + d])).real();
  }
  return acc;
}

Eigen::MatrixXd BandedOperator::dense() const {
  const int n = dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j <= std::min(n - 1, i + half_bandwidth); ++j) {
      m(i, j) = entry(i, j);
      m(j, i) = m(i, j);
    }
  return m;
}

namespace {

double lnfact(int n) { return std::lgamma(double(n) + 1.0); }

}  // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;

  // Racah form: prefactor sqrt(Delta * prod (j_i +- m_i)!) times an
  // alternating sum over t.
  const double ln_delta = lnfact(j1 + j2 - j3) + lnfact(j1 - j2 + j3) +
                          lnfact(-j1 + j2 + j3) - lnfact(j1 + j2 + j3 + 1);
  const double ln_num = lnfact(j1 + m1) + lnfact(j1 - m1) + lnfact(j2 + m2) +
                        lnfact(j2 - m2) + lnfact(j3 + m3) + lnfact(j3 - m3);

  const int t_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int t_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  if (t_min > t_max) return 0.0;

  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    const double ln_den = lnfact(t) + lnfact(j3 - j2 + t + m1) +
                          lnfact(j3 - j1 + t - m2) + lnfact(j1 + j2 - j3 - t) +
                          lnfact(j1 - t - m1) + lnfact(j2 - t + m2);
    const double term = std::exp(0.5 * (ln_delta + ln_num) - ln_den);
    sum += (t % 2 == 0) ? term : -term;
  }
  const int phase = j1 - j2 - m3;
  return (phase % 2 == 0) ? sum : -sum;
}

double legendre_matrix_element(int l, int Jp, int J, int M) {
  if (l != 0 && l != 2 && l != 4)
    throw std::invalid_argument("legendre_matrix_element: l must be 0, 2 or 4");
  if (J < 0 || Jp < 0)
    throw std::invalid_argument("legendre_matrix_element: negative J");
  if (std::abs(M) > std::min(J, Jp))
    throw std::invalid_argument("legendre_matrix_element: |M| exceeds min(J, J')");

  if (std::abs(J - Jp) > l || ((J - Jp) % 2) != 0) return 0.0;

  const double w0 = wigner3j(Jp, l, J, 0, 0, 0);
  const double wm = wigner3j(Jp, l, J, -M, 0, M);
  const double root = std::sqrt(double(2 * J + 1) * double(2 * Jp + 1));
  const double sign = (M % 2 == 0) ? 1.0 : -1.0;
  return sign * root * w0 * wm;
}

namespace {

BandedOperator legendre_combination(const BasisBlock& block, double c0,
                                    double c2, double c4, int half_bw) {
  BandedOperator op;
  op.block = block;
  op.half_bandwidth = half_bw;
  const int n = block.dim();
  op.bands.resize(half_bw / 2 + 1);
  for (int k = 0; 2 * k <= half_bw; ++k) {
    const int d = 2 * k;
    op.bands[k].resize(std::max(0, n - d));
    for (int i = 0; i + d < n; ++i) {
      const int J = block.j_of(i);
      const int Jp = J + d;
      double v = (d == 0) ? c0 : 0.0;
      if (c2 != 0.0) v += c2 * legendre_matrix_element(2, Jp, J, block.M);
      if (c4 != 0.0) v += c4 * legendre_matrix_element(4, Jp, J, block.M);
      op.bands[k][i] = v;
    }
  }
  return op;
}

}  // namespace

BandedOperator cos2_operator(const BasisBlock& block) {
  return legendre_combination(block, 1.0 / 3.0, 2.0 / 3.0, 0.0, 2);
}

BandedOperator cos4_operator(const BasisBlock& block) {
  return legendre_combination(block, 1.0 / 5.0, 4.0 / 7.0, 8.0 / 35.0, 4);
}

std::vector<double> theta_column(int M, int J_max, double x) {
  const int m = std::abs(M);
  if (J_max < m) return {};
  std::vector<double> out(J_max - m + 1);

  // Seed: normalized Theta_{m,m}, built from the product form to stay
  // finite at large m.
  double seed = std::sqrt((2.0 * m + 1.0) / 2.0);
  const double s2 = std::max(0.0, 1.0 - x * x);
  for (int k = 1; k <= m; ++k)
    seed *= std::sqrt((2.0 * k - 1.0) / (2.0 * k)) * std::sqrt(s2);
  if (m % 2 != 0) seed = -seed;  // Condon-Shortley
  out[0] = seed;
  if (J_max == m) return out;

  out[1] = x * std::sqrt(2.0 * m + 3.0) * seed;
  for (int l = m + 2; l <= J_max; ++l) {
    const double a = std::sqrt((2.0 * l - 1.0) * (2.0 * l + 1.0) /
                               (double(l - m) * double(l + m)));
    const double b = std::sqrt((2.0 * l + 1.0) * double(l - 1 - m) *
                               double(l - 1 + m) /
                               ((2.0 * l - 3.0) * double(l - m) * double(l + m)));
    out[l - m] = x * a * out[l - m - 1] - b * out[l - m - 2];
  }
  return out;
}

}  // namespace rotorfluc
