#pragma once

#include "qgm/problem.hpp"
#include "qgm/psi.hpp"
#include "qgm/solver.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace qgm {

// Normalized squared weighted eigencomponents of a gradient on the spectrum
// of a diagonal problem. Valid weights lie on the simplex.
struct SpectralWeights {
    Eigen::VectorXd lambdas;
    Eigen::VectorXd p;
};

// One step of the weight dynamics induced by a norm-ratio stepsize:
//   (Tp)_i = (lambda_i - gamma(p))^2 p_i / sum_j (lambda_j - gamma(p))^2 p_j
// with gamma(p) = sqrt(sum_j lambda_j^2 p_j). Throws when the mass sits on a
// single eigenvalue (zero denominator).
SpectralWeights weight_transform_step(const SpectralWeights& weights);

// Fixed point of the two-point dynamics:
//   h1 = (lambda1 + 3 lambdan) / (4 (lambda1 + lambdan))
//   h2 = (3 lambda1 + lambdan) / (4 (lambda1 + lambdan))
std::pair<double, double> extreme_weights(double lambda1, double lambdan);

// psi-weighted eigencomponents of g, normalized to unit 2-norm.
Eigen::VectorXd eigencomponent_snapshot(const QuadraticProblem& problem,
                                        const Eigen::VectorXd& g,
                                        const PsiSpec& psi);

// |alpha_k - 2/(lambda1 + lambdan)| per iteration.
std::vector<double> family_stepsize_deviation(const IterationTrace& trace,
                                              double lambda1, double lambdan);

// |alpha_tilde_k - 1/lambdan| per iteration with a recorded observer value;
// NaN entries where the trace has none.
std::vector<double> tilde_deviation(const IterationTrace& trace, double lambdan);

// R-linear envelope on a diagonal problem: theta = 1 - 1/kappa and
//   sigma_i = max{lambda_i/lambda1 - 1, 1 - lambda_i/lambdan}
//   C_1 = |g_0^(1)|
//   C_i = max{|g_0^(i)|, |g_1^(i)|/theta, ..., |g_{r-1}^(i)|/theta^(r-1),
//             max{sigma_i, sigma_i^r}/(theta^r psi(lambda_i))
//                 * sqrt(sum_{j<i} psi(lambda_j)^2 C_j^2)}
// verified as |g_k^(i)| <= C_i theta^k + slack for every recorded iterate.
struct EnvelopeReport {
    double theta = 0;
    Eigen::VectorXd constants;
    double max_excess = 0;  // worst |g_k^(i)| - (C_i theta^k + slack)
    bool ok = false;
};
EnvelopeReport rlinear_envelope(const IterationTrace& trace,
                                const QuadraticProblem& problem,
                                int r,
                                const PsiSpec& psi,
                                double slack = 1e-6);

// Conformance with the two-part stepsize property behind the R-linear result:
// (i)  1/lambdan <= alpha_k <= 1/lambda1 (relative tolerance), and
// (ii) some v(k) in the last m iterations has
//      alpha_k <= g_v' psi^2(A) g_v / g_v' A psi^2(A) g_v.
// (ii) is checked for iterations whose branch is listed in `branches`
// (empty = all); the trace must carry recorded gradients.
struct PropertyBReport {
    bool bounds_ok = false;
    double worst_bound_excess = 0;
    bool window_ok = false;
    long window_checked = 0;
    long first_window_failure = -1;
};
PropertyBReport check_property_b(const IterationTrace& trace,
                                 const QuadraticProblem& problem,
                                 int m,
                                 const PsiSpec& psi,
                                 const std::vector<Branch>& branches = {},
                                 double rel_tol = 1e-8);

}  // namespace qgm
