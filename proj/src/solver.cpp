#include "qgm/solver.hpp"

#include "qgm/stepsize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class WallTimer {
public:
    WallTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void validate_common(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                     const SolverConfig& config) {
    if (x0.size() != problem.dim()) throw std::invalid_argument("solver: x0 dimension mismatch");
    if (!(config.epsilon >= 0.0)) throw std::invalid_argument("solver: epsilon must be >= 0");
    if (config.max_iter < 0) throw std::invalid_argument("solver: max_iter must be >= 0");
}

// Iteration state handed to stepsize choosers; `matvecs` lets a chooser
// account for products beyond the loop's own A g.
struct LoopState {
    long k;
    const Eigen::VectorXd& g;
    const Eigen::VectorXd& z;
    double gg, gz, zz;
    double prev_gg, prev_gz, prev_zz;
    double alpha_prev;
};

struct Choice {
    double alpha = kNaN;
    Branch branch = Branch::Fixed;
    double alpha_tilde = kNaN;
};

// Shared descent loop: one A g per iteration, gradient updated as
// g - alpha A g, relative stopping rule, divergence guards.
template <typename Chooser>
IterationTrace run_loop(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                        const SolverConfig& config, Chooser&& choose) {
    validate_common(problem, x0, config);
    WallTimer timer;
    IterationTrace trace;

    Eigen::VectorXd x = x0;
    Eigen::VectorXd g = problem.gradient(x);
    trace.matvecs = 1;
    const double gnorm0 = g.norm();
    const double tol = config.epsilon * gnorm0;
    trace.gnorm.push_back(gnorm0);
    if (config.record_gradients) trace.gradients.push_back(g);

    double prev_gg = kNaN, prev_gz = kNaN, prev_zz = kNaN, alpha_prev = kNaN;
    long k = 0;

    while (true) {
        if (trace.gnorm.back() <= tol) {
            trace.status = RunStatus::Converged;
            break;
        }
        if (k >= config.max_iter) {
            trace.status = RunStatus::MaxIter;
            break;
        }

        const Eigen::VectorXd z = problem.matvec(g);
        ++trace.matvecs;
        const double gg = g.dot(g), gz = g.dot(z), zz = z.dot(z);
        if (!std::isfinite(gz) || gz <= 0.0 || !std::isfinite(zz)) {
            trace.status = RunStatus::Degenerate;
            break;
        }

        const LoopState state{k, g, z, gg, gz, zz, prev_gg, prev_gz, prev_zz, alpha_prev};
        const Choice choice = choose(state, trace.matvecs);
        if (!std::isfinite(choice.alpha) || choice.alpha <= 0.0) {
            trace.status = RunStatus::Degenerate;
            break;
        }

        trace.alpha.push_back(choice.alpha);
        trace.branch.push_back(choice.branch);
        trace.alpha_tilde.push_back(choice.alpha_tilde);

        x -= choice.alpha * g;
        g -= choice.alpha * z;
        const double gnorm = g.norm();
        trace.gnorm.push_back(gnorm);
        if (config.record_gradients) trace.gradients.push_back(g);
        ++k;
        if (!std::isfinite(gnorm)) {
            trace.status = RunStatus::Degenerate;
            break;
        }

        prev_gg = gg;
        prev_gz = gz;
        prev_zz = zz;
        alpha_prev = choice.alpha;
    }

    trace.iterations = k;
    trace.x_final = std::move(x);
    trace.seconds = timer.seconds();
    return trace;
}

// Direct short-step observer at the current iterate; its matvecs are
// diagnostic and excluded from the trace's matvec count.
double observe_tilde(const QuadraticProblem& problem, const Eigen::VectorXd& g,
                     const PsiSpec& psi) {
    const MomentCache cache = compute_moments_direct(problem, g, psi);
    const auto tilde = stepsize_tilde(phi_from_moments(cache.c));
    return tilde ? *tilde : kNaN;
}

}  // namespace

IterationTrace run_fixed_rule(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                              Method method, const SolverConfig& config) {
    if (method == Method::PsiFamily && problem.is_diagonal())
        config.psi.validate_positive_on(problem);

    const bool sd_at_start =
        method == Method::Bb1 || method == Method::Bb2 || method == Method::DaiYuan;

    auto choose = [&](const LoopState& s, long& matvecs) -> Choice {
        Choice out;
        out.branch = (s.k == 0 && sd_at_start) ? Branch::SdInit : Branch::Fixed;
        if (config.record_alpha_tilde) out.alpha_tilde = observe_tilde(problem, s.g, config.psi);
        switch (method) {
            case Method::Sd:
                out.alpha = s.gg / s.gz;
                return out;
            case Method::Mg:
                out.alpha = s.gz / s.zz;
                return out;
            case Method::Bb1:
                out.alpha = s.k == 0 ? s.gg / s.gz : s.prev_gg / s.prev_gz;
                return out;
            case Method::Bb2:
                out.alpha = s.k == 0 ? s.gg / s.gz : s.prev_gz / s.prev_zz;
                return out;
            case Method::DaiYang:
                out.alpha = std::sqrt(s.gg / s.zz);
                return out;
            case Method::DaiYuan:
                out.alpha = s.k % 4 < 2
                                ? s.gg / s.gz
                                : stepsize_dy(s.prev_gg / s.prev_gz, s.gg / s.gz,
                                              std::sqrt(s.prev_gg), std::sqrt(s.gg));
                return out;
            case Method::PsiFamily: {
                if (config.psi.is_identity()) {
                    out.alpha = std::sqrt(s.gg / s.zz);
                    return out;
                }
                // Powers A^p g reuse z = A g; degree() extra products total.
                const auto& d = config.psi.coefficients();
                const int deg = config.psi.degree();
                Eigen::VectorXd power = s.z;
                Eigen::VectorXd num = d[0] * s.g;
                Eigen::VectorXd den = d[0] * s.z;
                for (int p = 1; p <= deg; ++p) {
                    if (d[p] != 0.0) num += d[p] * power;
                    power = problem.matvec(power);
                    ++matvecs;
                    if (d[p] != 0.0) den += d[p] * power;
                }
                out.alpha = num.norm() / den.norm();
                return out;
            }
        }
        throw std::logic_error("solver: unknown method");
    };
    return run_loop(problem, x0, config, choose);
}

IterationTrace run_custom_rule(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                               const SolverConfig& config, const StepsizeCallback& stepsize) {
    if (!stepsize) throw std::invalid_argument("solver: null stepsize callback");
    auto choose = [&](const LoopState& s, long&) -> Choice {
        Choice out;
        StepContext ctx{s.k, s.g, s.z, s.gg, s.gz, s.zz, s.prev_gg, s.prev_gz, s.prev_zz,
                        s.alpha_prev};
        out.alpha = stepsize(ctx);
        return out;
    };
    return run_loop(problem, x0, config, choose);
}

IterationTrace run_adaptive_cyclic(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                                   const SolverConfig& config) {
    if (!config.psi.is_identity())
        throw std::invalid_argument("adaptive cyclic: identity psi required");
    if (!(config.tau > 0.0 && config.tau < 1.0))
        throw std::invalid_argument("adaptive cyclic: tau must lie in (0,1)");
    if (config.r < 1) throw std::invalid_argument("adaptive cyclic: r must be >= 1");

    auto short_root = [&](const PhiCoefficients& phi) -> std::optional<double> {
        switch (config.short_step) {
            case ShortStep::AlphaTilde:
                return stepsize_tilde(phi);
            case ShortStep::BetaTilde:
                if (auto roots = stepsize_beta_roots(phi)) return roots->first;
                return std::nullopt;
            case ShortStep::GammaTilde:
                if (auto roots = stepsize_gamma_roots(phi)) return roots->first;
                return std::nullopt;
        }
        return std::nullopt;
    };

    long t = 0;
    auto choose = [&](const LoopState& s, long&) -> Choice {
        Choice out;
        if (s.k == 0) {
            out.alpha = s.gg / s.gz;
            out.branch = Branch::SdInit;
            return out;
        }
        const double bb1 = s.prev_gg / s.prev_gz;
        const double bb2 = s.prev_gz / s.prev_zz;
        const bool at_test = t % config.r == 0;
        // Retarded moments of g_{k-1}, completed from this iterate's inner
        // products at no extra matvec cost.
        std::optional<double> short_step;
        if (at_test || config.record_alpha_tilde) {
            const auto c = complete_moments(s.prev_gg, s.prev_gz, s.prev_zz, s.gz, s.zz,
                                            s.alpha_prev);
            short_step = short_root(phi_from_moments(c));
            if (short_step) out.alpha_tilde = *short_step;
        }
        if (at_test) {
            if (bb2 / bb1 < config.tau) {
                if (short_step) {
                    out.alpha = *short_step;
                    out.branch = Branch::ShortNew;
                    ++t;
                    return out;
                }
                out.alpha = bb1;
                out.branch = Branch::Fallback;
                return out;
            }
            out.alpha = bb1;
            out.branch = Branch::Bb1;
            return out;
        }
        out.alpha = s.alpha_prev;
        out.branch = Branch::ShortReuse;
        ++t;
        return out;
    };
    return run_loop(problem, x0, config, choose);
}

ProbeResult run_two_dim_termination_probe(const QuadraticProblem& problem,
                                          const Eigen::VectorXd& x0, long k0,
                                          const PsiSpec& psi, double threshold) {
    if (!problem.is_diagonal() || problem.dim() != 2)
        throw std::invalid_argument("probe: needs a 2-dim diagonal problem");
    const Eigen::VectorXd& lambdas = problem.eigenvalues();
    if (!(lambdas[1] > lambdas[0]))
        throw std::invalid_argument("probe: eigenvalues must be distinct");
    if (k0 < 1) throw std::invalid_argument("probe: k0 must be >= 1");
    if (x0.size() != 2) throw std::invalid_argument("probe: x0 dimension mismatch");
    psi.validate_positive_on(problem);

    WallTimer timer;
    IterationTrace trace;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g = problem.gradient(x);
    trace.matvecs = 1;
    const double gnorm0 = g.norm();
    trace.gnorm.push_back(gnorm0);
    if (gnorm0 == 0.0 || std::abs(g[0]) <= 1e-13 * gnorm0 || std::abs(g[1]) <= 1e-13 * gnorm0)
        throw std::invalid_argument("probe: start must excite both eigencomponents");

    const double w0 = psi.evaluate(lambdas[0]) * psi.evaluate(lambdas[0]);
    const double w1 = psi.evaluate(lambdas[1]) * psi.evaluate(lambdas[1]);

    ProbeResult result;
    const long last = k0 + 8;
    for (long k = 0; k <= last; ++k) {
        double alpha;
        if (k == k0) {
            // Stable short step straight from the spectrum; in exact
            // arithmetic the next-but-one gradient vanishes.
            const auto tilde = stepsize_tilde(phi_from_spectrum(lambdas, g, psi));
            if (!tilde) throw std::runtime_error("probe: short step degenerate at injection");
            alpha = *tilde;
        } else {
            const double a = w0 * g[0] * g[0], b = w1 * g[1] * g[1];
            alpha = std::sqrt((a + b) / (a * lambdas[0] * lambdas[0] + b * lambdas[1] * lambdas[1]));
        }
        const Eigen::VectorXd z = problem.matvec(g);
        ++trace.matvecs;
        trace.alpha.push_back(alpha);
        trace.branch.push_back(k == k0 ? Branch::ShortNew : Branch::Fixed);
        trace.alpha_tilde.push_back(k == k0 ? alpha : kNaN);
        x -= alpha * g;
        g -= alpha * z;
        trace.gnorm.push_back(g.norm());
        trace.iterations = k + 1;
        if (k >= k0 && g.norm() <= threshold * gnorm0) {
            result.termination_index = k + 1 - k0;
            break;
        }
    }
    trace.status = result.termination_index >= 0 ? RunStatus::Converged : RunStatus::MaxIter;
    trace.x_final = std::move(x);
    trace.seconds = timer.seconds();
    result.trace = std::move(trace);
    return result;
}

}  // namespace qgm
