#pragma once

#include <string>
#include <vector>

namespace rotorfluc::oracle {

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree
// 2n - 1, which covers every matrix element this library needs.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// <J', M| x^p |J, M> with x = cos(theta), evaluated by quadrature over
// the product of normalized theta functions.  Independent of the
// Wigner-3j route in basis.cpp; used to check it.
double moment_matrix_element(int p, int Jp, int J, int M, int quad_points = 96);

// <J', M| P_l(x) |J, M> by quadrature.
double legendre_matrix_element_quadrature(int l, int Jp, int J, int M,
                                          int quad_points = 96);

struct CheckReport {
  std::string name;
  int compared = 0;
  double max_abs_diff = 0.0;
  bool passed = false;
};

// Compare the Wigner-3j matrix elements of cos^2 and cos^4 against the
// quadrature route for all J, J' <= j_limit and all valid M.
CheckReport check_matrix_elements(int j_limit = 12, double tol = 1e-10);

}  // namespace rotorfluc::oracle
