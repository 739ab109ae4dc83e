#pragma once

#include "qgm/problem.hpp"
#include "qgm/psi.hpp"

#include <Eigen/Dense>

#include <array>
#include <limits>
#include <optional>
#include <utility>

namespace qgm {

// Weighted Krylov moments of a gradient: c[j] = g' A^j psi^2(A) g, j = 0..4,
// plus the vectors needed to roll them forward one iteration at the cost of a
// single matvec.
struct MomentCache {
    std::array<double, 5> c{};
    Eigen::VectorXd w;  // A * g_prev
    Eigen::VectorXd z;  // A * g_cur, staged as next iteration's w
    double alpha_prev = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
};

// Quadratic coefficients built from the moments:
//   phi1 = c1 c4 - c2 c3   phi2 = c0 c4 - c2^2   phi3 = c0 c3 - c1 c2
//   phi4 = c1 c3 - c2^2    phi5 = c0 c2 - c1^2   phi6 = c2 c4 - c3^2
// All six are positive whenever g is not an eigenvector of A.
struct PhiCoefficients {
    double phi1 = 0, phi2 = 0, phi3 = 0, phi4 = 0, phi5 = 0, phi6 = 0;
};

// Exact moments by repeated matvec: psi(A)g, then two more products with A.
MomentCache compute_moments_direct(const QuadraticProblem& problem,
                                   const Eigen::VectorXd& g,
                                   const PsiSpec& psi = PsiSpec::identity());

// Completes c3, c4 of the previous gradient from this iteration's inner
// products, given g_cur = (I - alpha_prev A) g_prev:
//   c3 = (g_cur'z_cur - c1 + 2 alpha_prev c2) / alpha_prev^2
//   c4 = (z_cur'z_cur - c2 + 2 alpha_prev c3) / alpha_prev^2
std::array<double, 5> complete_moments(double c0, double c1, double c2,
                                       double gz_cur, double zz_cur, double alpha_prev);

// One-matvec moment update (identity psi): computes z = A g_cur, rebuilds the
// c[] of g_prev, and stages z as the next w. The top moments come from the
// difference d = w - z, which equals alpha_prev A^2 g_prev when
// g_cur = (I - alpha_prev A) g_prev, so no nearly equal scalars are
// subtracted:
//   c3 = w'd / alpha_prev    c4 = d'd / alpha_prev^2
MomentCache update_moments_recurrent(const QuadraticProblem& problem,
                                     const MomentCache& cache,
                                     const Eigen::VectorXd& g_prev,
                                     const Eigen::VectorXd& g_cur,
                                     double alpha_prev);

PhiCoefficients phi_from_moments(const std::array<double, 5>& c);

// Cancellation-free phi for diagonal problems: each coefficient is a sum of
// nonnegative pairwise terms w_i w_j (lambda_j - lambda_i)^2 * (...), with
// w_i = (psi(lambda_i) g_i)^2. Algebraically identical to phi_from_moments but
// stable for extreme condition numbers; O(n^2).
PhiCoefficients phi_from_spectrum(const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& g,
                                  const PsiSpec& psi = PsiSpec::identity());

// Roots of phi1 a^2 - phi2 a + phi3 = 0. stepsize_tilde is the smaller root
// (maximizes the next weighted norm-ratio stepsize), evaluated as
// 2 phi3 / (phi2 + sqrt(disc)) to avoid cancellation; stepsize_hat is the
// larger. nullopt when the coefficients are degenerate (g near an eigenvector).
std::optional<double> stepsize_tilde(const PhiCoefficients& phi);
std::optional<double> stepsize_hat(const PhiCoefficients& phi);

// Roots of phi4 b^2 - phi3 b + phi5 = 0 (smaller, larger).
std::optional<std::pair<double, double>> stepsize_beta_roots(const PhiCoefficients& phi);

// Roots of phi6 c^2 - phi1 c + phi4 = 0 (smaller, larger).
std::optional<std::pair<double, double>> stepsize_gamma_roots(const PhiCoefficients& phi);

// Classic stepsizes. The BB pair throws on nonpositive curvature s'y <= 0.
double stepsize_sd(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag);
double stepsize_mg(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag);
double stepsize_bb1(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
double stepsize_bb2(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
double stepsize_dai_yang(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag);  // |g|/|Ag|

// Weighted norm-ratio stepsize |psi(A)g| / |psi(A)Ag|.
double stepsize_family_psi(const QuadraticProblem& problem,
                           const Eigen::VectorXd& g,
                           const PsiSpec& psi);

// Dai-Yuan stepsize from two consecutive SD stepsizes and gradient norms:
//   2 / (sqrt((1/sd_prev - 1/sd_cur)^2 + 4 |g_cur|^2 / (sd_prev |g_prev|)^2)
//        + 1/sd_prev + 1/sd_cur)
double stepsize_dy(double sd_prev, double sd_cur, double gnorm_prev, double gnorm_cur);

}  // namespace qgm
