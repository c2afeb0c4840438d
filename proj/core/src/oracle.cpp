#include "rotorfluc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "rotorfluc/basis.hpp"
#include "rotorfluc/constants.hpp"

namespace rotorfluc::oracle {

Quadrature gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on P_n from the usual asymptotic starting guess;
  // nodes come out in decreasing order, symmetry fills the other half.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(units::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

namespace {

double legendre_poly(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

template <typename F>
double bracket_integral(F&& f, int Jp, int J, int M, int quad_points) {
  const Quadrature q = gauss_legendre(quad_points);
  const int m = std::abs(M);
  const int top = std::max(J, Jp);
  double acc = 0.0;
  for (int i = 0; i < quad_points; ++i) {
    const double x = q.nodes[i];
    const std::vector<double> th = theta_column(m, top, x);
    acc += q.weights[i] * th[Jp - m] * th[J - m] * f(x);
  }
  return acc;
}

}  // namespace

double moment_matrix_element(int p, int Jp, int J, int M, int quad_points) {
  return bracket_integral([p](double x) { return std::pow(x, p); }, Jp, J, M,
                          quad_points);
}

double legendre_matrix_element_quadrature(int l, int Jp, int J, int M,
                                          int quad_points) {
  return bracket_integral([l](double x) { return legendre_poly(l, x); }, Jp, J,
                          M, quad_points);
}

CheckReport check_matrix_elements(int j_limit, double tol) {
  CheckReport rep;
  rep.name = "matrix-elements";
  for (int M = -j_limit; M <= j_limit; ++M) {
    const int m = std::abs(M);
    for (int J = m; J <= j_limit; ++J) {
      for (int Jp = J; Jp <= std::min(j_limit, J + 4); ++Jp) {
        const double q2 = moment_matrix_element(2, Jp, J, M);
        const double q4 = moment_matrix_element(4, Jp, J, M);
        const double p2 = legendre_matrix_element(2, Jp, J, M);
        const double p4 = legendre_matrix_element(4, Jp, J, M);
        const double a2 = (Jp == J ? 1.0 / 3.0 : 0.0) + 2.0 / 3.0 * p2;
        const double a4 =
            (Jp == J ? 1.0 / 5.0 : 0.0) + 4.0 / 7.0 * p2 + 8.0 / 35.0 * p4;
        rep.compared += 2;
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(q2 - a2));
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(q4 - a4));
      }
    }
  }
  rep.passed = rep.max_abs_diff <= tol;
  return rep;
}

}  // namespace rotorfluc::oracle
