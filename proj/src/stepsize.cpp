#include "qgm/stepsize.hpp"

#include <cmath>
#include <stdexcept>

namespace qgm {

namespace {

constexpr double kDegenerateDisc = 1e-14;

bool usable(double x) { return std::isfinite(x) && x > 0.0; }

// Roots of a x^2 - b x + c = 0 with a, b, c > 0 expected. The smaller root is
// evaluated as 2c / (b + sqrt(disc)) so that nearly equal quantities are never
// subtracted; disc below kDegenerateDisc * b^2 counts as degenerate.
std::optional<std::pair<double, double>> quadratic_roots(double a, double b, double c) {
    if (!usable(a) || !usable(b) || !usable(c)) return std::nullopt;
    const double disc = b * b - 4.0 * a * c;
    if (!std::isfinite(disc) || disc < kDegenerateDisc * b * b) return std::nullopt;
    const double root = std::sqrt(disc);
    const double smaller = 2.0 * c / (b + root);
    const double larger = (b + root) / (2.0 * a);
    if (!usable(smaller) || !usable(larger)) return std::nullopt;
    return {{smaller, larger}};
}

}  // namespace

MomentCache compute_moments_direct(const QuadraticProblem& problem,
                                   const Eigen::VectorXd& g,
                                   const PsiSpec& psi) {
    if (g.size() != problem.dim()) throw std::invalid_argument("moments: dimension mismatch");
    const Eigen::VectorXd h = psi.is_identity() ? g : psi.apply(problem, g);
    const Eigen::VectorXd h1 = problem.matvec(h);
    const Eigen::VectorXd h2 = problem.matvec(h1);
    MomentCache cache;
    cache.c = {h.dot(h), h.dot(h1), h1.dot(h1), h1.dot(h2), h2.dot(h2)};
    if (psi.is_identity()) {
        cache.w = h1;  // A g, reusable as the recurrent w
        cache.z = h1;
    }
    cache.valid = true;
    return cache;
}

std::array<double, 5> complete_moments(double c0, double c1, double c2,
                                       double gz_cur, double zz_cur, double alpha_prev) {
    if (!(alpha_prev != 0.0) || !std::isfinite(alpha_prev))
        throw std::invalid_argument("moments: alpha_prev must be finite and nonzero");
    const double a2 = alpha_prev * alpha_prev;
    const double c3 = (gz_cur - c1 + 2.0 * alpha_prev * c2) / a2;
    const double c4 = (zz_cur - c2 + 2.0 * alpha_prev * c3) / a2;
    return {c0, c1, c2, c3, c4};
}

MomentCache update_moments_recurrent(const QuadraticProblem& problem,
                                     const MomentCache& cache,
                                     const Eigen::VectorXd& g_prev,
                                     const Eigen::VectorXd& g_cur,
                                     double alpha_prev) {
    if (cache.z.size() != problem.dim())
        throw std::invalid_argument("moments: cache has no staged A g_prev");
    if (!(alpha_prev != 0.0) || !std::isfinite(alpha_prev))
        throw std::invalid_argument("moments: alpha_prev must be finite and nonzero");
    MomentCache next;
    next.w = cache.z;                // A g_prev, staged by the previous update
    next.z = problem.matvec(g_cur);  // the single new matvec
    // d = A g_prev - A g_cur = alpha_prev A^2 g_prev: the high moments fall
    // out of small per-component differences instead of differences of large
    // scalar products, which keeps them accurate even when alpha_prev is far
    // below 1 / (Rayleigh quotient of g_prev).
    const Eigen::VectorXd d = next.w - next.z;
    next.c = {g_prev.dot(g_prev), g_prev.dot(next.w), next.w.dot(next.w),
              next.w.dot(d) / alpha_prev, d.dot(d) / (alpha_prev * alpha_prev)};
    next.alpha_prev = alpha_prev;
    next.valid = true;
    return next;
}

PhiCoefficients phi_from_moments(const std::array<double, 5>& c) {
    PhiCoefficients phi;
    phi.phi1 = c[1] * c[4] - c[2] * c[3];
    phi.phi2 = c[0] * c[4] - c[2] * c[2];
    phi.phi3 = c[0] * c[3] - c[1] * c[2];
    phi.phi4 = c[1] * c[3] - c[2] * c[2];
    phi.phi5 = c[0] * c[2] - c[1] * c[1];
    phi.phi6 = c[2] * c[4] - c[3] * c[3];
    return phi;
}

PhiCoefficients phi_from_spectrum(const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& g,
                                  const PsiSpec& psi) {
    if (eigenvalues.size() != g.size())
        throw std::invalid_argument("phi: dimension mismatch");
    const int n = static_cast<int>(g.size());
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        const double h = psi.evaluate(eigenvalues[i]) * g[i];
        w[i] = h * h;
    }
    PhiCoefficients phi;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double li = eigenvalues[i], lj = eigenvalues[j];
            const double d2 = (lj - li) * (lj - li);
            const double base = w[i] * w[j] * d2;
            const double sum = li + lj, prod = li * lj;
            phi.phi1 += base * prod * sum;
            phi.phi2 += base * sum * sum;
            phi.phi3 += base * sum;
            phi.phi4 += base * prod;
            phi.phi5 += base;
            phi.phi6 += base * prod * prod;
        }
    }
    return phi;
}

std::optional<double> stepsize_tilde(const PhiCoefficients& phi) {
    auto roots = quadratic_roots(phi.phi1, phi.phi2, phi.phi3);
    if (!roots) return std::nullopt;
    return roots->first;
}

std::optional<double> stepsize_hat(const PhiCoefficients& phi) {
    auto roots = quadratic_roots(phi.phi1, phi.phi2, phi.phi3);
    if (!roots) return std::nullopt;
    return roots->second;
}

std::optional<std::pair<double, double>> stepsize_beta_roots(const PhiCoefficients& phi) {
    return quadratic_roots(phi.phi4, phi.phi3, phi.phi5);
}

std::optional<std::pair<double, double>> stepsize_gamma_roots(const PhiCoefficients& phi) {
    return quadratic_roots(phi.phi6, phi.phi1, phi.phi4);
}

double stepsize_sd(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag) {
    const double den = g.dot(Ag);
    if (!usable(den)) throw std::invalid_argument("sd: g'Ag must be positive");
    return g.dot(g) / den;
}

double stepsize_mg(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag) {
    const double den = Ag.dot(Ag);
    if (!usable(den)) throw std::invalid_argument("mg: |Ag|^2 must be positive");
    return g.dot(Ag) / den;
}

double stepsize_bb1(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
    const double sy = s.dot(y);
    if (!usable(sy)) throw std::invalid_argument("bb1: s'y must be positive");
    return s.dot(s) / sy;
}

double stepsize_bb2(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
    const double sy = s.dot(y);
    if (!usable(sy)) throw std::invalid_argument("bb2: s'y must be positive");
    return sy / y.dot(y);
}

double stepsize_dai_yang(const Eigen::VectorXd& g, const Eigen::VectorXd& Ag) {
    const double den = Ag.norm();
    if (!usable(den)) throw std::invalid_argument("dai_yang: |Ag| must be positive");
    return g.norm() / den;
}

double stepsize_family_psi(const QuadraticProblem& problem,
                           const Eigen::VectorXd& g,
                           const PsiSpec& psi) {
    const Eigen::VectorXd h = psi.is_identity() ? g : psi.apply(problem, g);
    return stepsize_dai_yang(h, problem.matvec(h));
}

double stepsize_dy(double sd_prev, double sd_cur, double gnorm_prev, double gnorm_cur) {
    if (!usable(sd_prev) || !usable(sd_cur) || !usable(gnorm_prev))
        throw std::invalid_argument("dy: needs positive SD stepsizes and gradient norms");
    const double inv_prev = 1.0 / sd_prev, inv_cur = 1.0 / sd_cur;
    const double diff = inv_prev - inv_cur;
    const double ratio = gnorm_cur / (sd_prev * gnorm_prev);
    return 2.0 / (std::sqrt(diff * diff + 4.0 * ratio * ratio) + inv_prev + inv_cur);
}

}  // namespace qgm
