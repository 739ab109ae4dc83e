#include "qgm/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

const Eigen::VectorXd& diagonal_spectrum(const QuadraticProblem& problem) {
    require(problem.is_diagonal(), "theory: diagonal storage required");
    return problem.eigenvalues();
}

}  // namespace

SpectralWeights weight_transform_step(const SpectralWeights& weights) {
    const Eigen::VectorXd& lambdas = weights.lambdas;
    const Eigen::VectorXd& p = weights.p;
    require(lambdas.size() == p.size() && p.size() > 0, "weights: dimension mismatch");
    double sum = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        require(p[i] >= 0.0, "weights: entries must be nonnegative");
        sum += p[i];
    }
    require(std::abs(sum - 1.0) <= 1e-6, "weights: entries must sum to one");

    const double gamma = std::sqrt(lambdas.array().square().matrix().dot(p));
    Eigen::VectorXd q(p.size());
    double denom = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        const double d = lambdas[i] - gamma;
        q[i] = d * d * p[i];
        denom += q[i];
    }
    if (!(denom > 0.0))
        throw std::invalid_argument("weights: mass concentrated on a single eigenvalue");
    q /= denom;
    q /= q.sum();
    return {lambdas, std::move(q)};
}

std::pair<double, double> extreme_weights(double lambda1, double lambdan) {
    require(lambda1 > 0.0 && lambdan > lambda1, "weights: need 0 < lambda1 < lambdan");
    const double denom = 4.0 * (lambda1 + lambdan);
    return {(lambda1 + 3.0 * lambdan) / denom, (3.0 * lambda1 + lambdan) / denom};
}

Eigen::VectorXd eigencomponent_snapshot(const QuadraticProblem& problem,
                                        const Eigen::VectorXd& g,
                                        const PsiSpec& psi) {
    const Eigen::VectorXd& lambdas = diagonal_spectrum(problem);
    require(g.size() == lambdas.size(), "snapshot: dimension mismatch");
    Eigen::VectorXd eta(g.size());
    for (int i = 0; i < g.size(); ++i) eta[i] = psi.evaluate(lambdas[i]) * g[i];
    const double norm = eta.norm();
    require(norm > 0.0, "snapshot: zero weighted gradient");
    return eta / norm;
}

std::vector<double> family_stepsize_deviation(const IterationTrace& trace,
                                              double lambda1, double lambdan) {
    const double limit = 2.0 / (lambda1 + lambdan);
    std::vector<double> dev;
    dev.reserve(trace.alpha.size());
    for (double a : trace.alpha) dev.push_back(std::abs(a - limit));
    return dev;
}

std::vector<double> tilde_deviation(const IterationTrace& trace, double lambdan) {
    const double limit = 1.0 / lambdan;
    std::vector<double> dev;
    dev.reserve(trace.alpha_tilde.size());
    for (double a : trace.alpha_tilde)
        dev.push_back(std::isnan(a) ? kNaN : std::abs(a - limit));
    return dev;
}

EnvelopeReport rlinear_envelope(const IterationTrace& trace, const QuadraticProblem& problem,
                                int r, const PsiSpec& psi, double slack) {
    const Eigen::VectorXd& lambdas = diagonal_spectrum(problem);
    require(r >= 1, "envelope: r must be >= 1");
    require(static_cast<long>(trace.gradients.size()) >= r,
            "envelope: trace must record at least r gradients");
    const int n = static_cast<int>(lambdas.size());
    const double lambda1 = lambdas[0], lambdan = lambdas[n - 1];
    require(lambdan > lambda1, "envelope: spectrum must not be a single point");

    EnvelopeReport report;
    report.theta = 1.0 - lambda1 / lambdan;
    const double theta_r = std::pow(report.theta, r);

    Eigen::VectorXd C(n);
    double weighted_prefix = 0.0;  // sum_{j<i} psi(lambda_j)^2 C_j^2
    for (int i = 0; i < n; ++i) {
        const double psi_i = psi.evaluate(lambdas[i]);
        double ci = std::abs(trace.gradients[0][i]);
        if (i > 0) {
            double theta_k = 1.0;
            for (int k = 1; k < r; ++k) {
                theta_k *= report.theta;
                ci = std::max(ci, std::abs(trace.gradients[k][i]) / theta_k);
            }
            const double sigma = std::max(lambdas[i] / lambda1 - 1.0, 1.0 - lambdas[i] / lambdan);
            const double factor = std::max(sigma, std::pow(sigma, r)) / (theta_r * psi_i);
            ci = std::max(ci, factor * std::sqrt(weighted_prefix));
        }
        C[i] = ci;
        weighted_prefix += psi_i * psi_i * ci * ci;
    }

    double max_excess = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < trace.gradients.size(); ++k) {
        const double bound_scale = std::pow(report.theta, static_cast<double>(k));
        for (int i = 0; i < n; ++i) {
            const double excess = std::abs(trace.gradients[k][i]) - (C[i] * bound_scale + slack);
            if (excess > max_excess) max_excess = excess;
        }
    }
    report.constants = std::move(C);
    report.max_excess = max_excess;
    report.ok = max_excess <= 0.0;
    return report;
}

PropertyBReport check_property_b(const IterationTrace& trace, const QuadraticProblem& problem,
                                 int m, const PsiSpec& psi,
                                 const std::vector<Branch>& branches, double rel_tol) {
    const Eigen::VectorXd& lambdas = diagonal_spectrum(problem);
    require(m >= 1, "property: window must be >= 1");
    require(trace.gradients.size() > trace.alpha.size(),
            "property: trace must record gradients");
    const int n = static_cast<int>(lambdas.size());
    const double lambda1 = lambdas[0], lambdan = lambdas[n - 1];

    Eigen::VectorXd weight(n);
    for (int i = 0; i < n; ++i) {
        const double w = psi.evaluate(lambdas[i]);
        weight[i] = w * w;
    }
    auto quotient = [&](const Eigen::VectorXd& g) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            const double wg = weight[i] * g[i] * g[i];
            num += wg;
            den += wg * lambdas[i];
        }
        return num / den;
    };

    PropertyBReport report;
    report.bounds_ok = true;
    report.window_ok = true;
    const double lower = 1.0 / lambdan, upper = 1.0 / lambda1;
    for (size_t k = 0; k < trace.alpha.size(); ++k) {
        const double a = trace.alpha[k];
        const double excess = std::max((lower - a) / lower, (a - upper) / upper);
        if (excess > report.worst_bound_excess) report.worst_bound_excess = excess;
        if (excess > rel_tol) report.bounds_ok = false;

        if (!branches.empty()) {
            bool selected = false;
            for (Branch b : branches) selected = selected || b == trace.branch[k];
            if (!selected) continue;
        }
        bool found = false;
        for (long v = static_cast<long>(k); v >= 0 && v > static_cast<long>(k) - m; --v) {
            if (a <= quotient(trace.gradients[static_cast<size_t>(v)]) * (1.0 + rel_tol)) {
                found = true;
                break;
            }
        }
        ++report.window_checked;
        if (!found) {
            report.window_ok = false;
            if (report.first_window_failure < 0)
                report.first_window_failure = static_cast<long>(k);
        }
    }
    return report;
}

}  // namespace qgm
