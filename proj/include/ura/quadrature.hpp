#pragma once

#include <functional>
#include <vector>

namespace ura {

// Adaptive Simpson integration of f over [a, b] to the given absolute
// tolerance. Recursion depth is capped; smooth integrands converge long
// before the cap.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 60);

// Gauss-Hermite rule (physicists' weight e^{-x^2}) computed once via the
// symmetric tridiagonal Jacobi matrix.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussHermite& gauss_hermite_127();

// E[f(Z)] for Z ~ N(0,1) using the 127-point rule above.
double gh_expect_std_normal(const std::function<double(double)>& f);

}  // namespace ura
