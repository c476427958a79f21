#pragma once

#include <span>
#include <string>

namespace weylwalk {

// Open Weyl chambers in R^k:
//   A: x1 < x2 < ... < xk
//   C: 0 < x1 < x2 < ... < xk
//   D: |x1| < x2 < ... < xk   (k >= 2)
enum class Chamber { A, C, D };

Chamber parse_chamber(const std::string& s);
const char* chamber_name(Chamber z);

// Exponent gamma in the monomial powers of the determinant form: 1 for C, 0 for D.
int chamber_gamma(Chamber z);

// Strict membership; boundary points are outside.
bool contains(Chamber z, std::span<const double> x);

// Harmonic polynomial attached to the chamber (product form):
//   A: prod_{i<j} (xj - xi)
//   D: prod_{i<j} (xj^2 - xi^2)
//   C: prod_i xi * prod_{i<j} (xj^2 - xi^2)
// Signed; positive exactly on the chamber interior.
double h(Chamber z, std::span<const double> x);

// Sign/log-magnitude evaluation of the same polynomial, usable when the
// plain product would overflow. sign is -1, 0 or +1; log_abs is -inf at zeros.
struct SignLog {
    int sign;
    double log_abs;
};
SignLog h_log(Chamber z, std::span<const double> x);

// Determinant form det[(x_j^{2i-2+gamma})_{i,j}], evaluated by partial-pivot
// LU in extended precision. Cross-validates the product form for C and D.
// Chamber A is not supported here.
double h_det(Chamber z, std::span<const double> x);

// Smoothed majorant, t > 0:
//   D: prod_{i<j} (t + |xj - xi|)(t + |xj + xi|)
//   C: same times prod_i (t + |xi|)
//   A: prod_{i<j} (t + |xj - xi|)
double h_smoothed(Chamber z, double t, std::span<const double> x);

// Membership in the auxiliary chamber W_{n,eps}: all pairwise |xj - xi|
// exceed n^{1/2-eps}; for D also |xj + xi|; for C additionally every |xi|.
// Requires n >= 1 and eps in (0, 1/2). Not restricted to the chamber itself.
bool in_auxiliary(Chamber z, double n, double eps, std::span<const double> x);

// Euclidean distance from an interior point to the chamber boundary
// (minimum over facet half-spaces). Returns 0 for points outside.
double boundary_distance(Chamber z, std::span<const double> x);

}  // namespace weylwalk
