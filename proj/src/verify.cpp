#include "qgm/verify.hpp"

#include "qgm/bench.hpp"
#include "qgm/problem.hpp"
#include "qgm/psi.hpp"
#include "qgm/rng.hpp"
#include "qgm/solver.hpp"
#include "qgm/stepsize.hpp"
#include "qgm/theory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <vector>

namespace qgm::verify {

namespace {

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return buffer;
}

CheckResult finish(const std::string& name, bool pass, const std::string& detail,
                   const Timer& timer) {
    CheckResult result;
    result.name = name;
    result.pass = pass;
    result.detail = detail;
    result.seconds = timer.seconds();
    return result;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Ascending eigenvalues with a minimum spacing, so every draw has simple,
// well-separated spectrum.
Eigen::VectorXd draw_sorted_spectrum(Rng& rng, int n, double lo, double hi, double gap) {
    while (true) {
        Eigen::VectorXd v = rng.uniform_vector(n, lo, hi);
        std::sort(v.data(), v.data() + n);
        bool ok = true;
        for (int i = 0; i + 1 < n; ++i) ok = ok && v[i + 1] - v[i] >= gap;
        if (ok) return v;
    }
}

Eigen::VectorXd draw_signed(Rng& rng, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * rng.uniform(lo, hi);
    return v;
}

}  // namespace

CheckResult check_two_dim_termination(int trials, std::uint64_t seed) {
    Timer timer;
    Rng rng(derive_seed(seed, {1}));
    int within[4] = {0, 0, 0, 0};
    int beyond = 0;
    for (int t = 0; t < trials; ++t) {
        const double kappa = std::exp(rng.uniform(std::log(1.1), std::log(1e6)));
        const QuadraticProblem problem = QuadraticProblem::diagonal(Eigen::Vector2d(1.0, kappa));
        const PsiSpec psi = t % 2 == 0 ? PsiSpec::identity() : PsiSpec::monomial(1);
        const long k0 = 1 + t % 3;
        // Start with balanced psi-weighted eigencomponents: g0 = A x0.
        Eigen::VectorXd x0(2);
        x0[0] = sign_of(rng.uniform(-1.0, 1.0)) * rng.uniform(0.5, 1.5) / psi.evaluate(1.0);
        x0[1] = sign_of(rng.uniform(-1.0, 1.0)) * rng.uniform(0.5, 1.5) /
                (psi.evaluate(kappa) * kappa);
        const ProbeResult probe = run_two_dim_termination_probe(problem, x0, k0, psi, 1e-10);
        if (probe.termination_index >= 1 && probe.termination_index <= 3)
            ++within[probe.termination_index];
        else
            ++beyond;
    }
    const bool pass = beyond == 0 && timer.seconds() < 5.0;
    std::ostringstream detail;
    detail << trials - beyond << "/" << trials << " terminated within 3 steps (i=1:" << within[1]
           << " i=2:" << within[2] << " i=3:" << within[3] << ")";
    return finish("two-dim-termination", pass, detail.str(), timer);
}

CheckResult check_tilde_exact_2d(std::uint64_t seed) {
    Timer timer;
    double max_rel = 0.0;
    const double kappas[] = {3.0, 10.0, 100.0, 1e4};
    for (double kappa : kappas) {
        const QuadraticProblem problem = QuadraticProblem::diagonal(Eigen::Vector2d(1.0, kappa));
        const struct {
            Method method;
            PsiSpec psi;
        } drivers[] = {{Method::DaiYang, PsiSpec::identity()},
                       {Method::PsiFamily, PsiSpec::monomial(1)}};
        for (const auto& driver : drivers) {
            Eigen::VectorXd x0(2);
            x0[0] = 1.0 / driver.psi.evaluate(1.0);
            x0[1] = 1.0 / (driver.psi.evaluate(kappa) * kappa);
            SolverConfig config;
            config.epsilon = 0.0;
            config.max_iter = 25;
            config.psi = driver.psi;
            config.record_alpha_tilde = true;
            const IterationTrace trace = run_fixed_rule(problem, x0, driver.method, config);
            for (double tilde : trace.alpha_tilde)
                max_rel = std::max(max_rel, std::abs(tilde * kappa - 1.0));
        }
    }
    // High condition numbers through the pairwise coefficient route.
    Rng rng(derive_seed(seed, {2}));
    for (double kappa : {1e5, 1e6}) {
        const Eigen::VectorXd lambdas = Eigen::Vector2d(1.0, kappa);
        for (int t = 0; t < 50; ++t) {
            const Eigen::VectorXd g = draw_signed(rng, 2, 0.3, 2.0);
            for (const PsiSpec& psi : {PsiSpec::identity(), PsiSpec::monomial(1)}) {
                const auto tilde = stepsize_tilde(phi_from_spectrum(lambdas, g, psi));
                max_rel = tilde ? std::max(max_rel, std::abs(*tilde * kappa - 1.0)) : 1.0;
            }
        }
    }
    return finish("short-step-2d-exact", max_rel <= 1e-10,
                  "max relative deviation from 1/lambda_n: " + num(max_rel), timer);
}

CheckResult check_root_oracle(int problems, std::uint64_t seed) {
    Timer timer;
    Rng rng(derive_seed(seed, {3}));
    double max_rel = 0.0;
    int solved = 0;

    for (int p = 0; p < problems; ++p) {
        const int n = 3 + p % 8;
        const Eigen::VectorXd lambdas = draw_sorted_spectrum(rng, n, 1.0, 30.0, 0.3);
        const Eigen::VectorXd g = draw_signed(rng, n, 0.05, 1.0);
        const PsiSpec psi = p % 2 == 0 ? PsiSpec::identity() : PsiSpec::monomial(1);
        const QuadraticProblem problem = QuadraticProblem::diagonal(lambdas);

        const PhiCoefficients phi = phi_from_moments(compute_moments_direct(problem, g, psi).c);
        const auto tilde = stepsize_tilde(phi);
        const auto hat = stepsize_hat(phi);
        if (!tilde || !hat) continue;

        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) {
            const double h = psi.evaluate(lambdas[i]) * g[i];
            w[i] = h * h;
        }
        // Derivative of the squared next-stepsize map, evaluated from raw
        // sums: the roots of n'(a)d(a) - n(a)d'(a) are the argmax / argmin.
        auto slope = [&](double a) {
            double nv = 0, dv = 0, np = 0, dp = 0;
            for (int i = 0; i < n; ++i) {
                const double li = lambdas[i], f = 1.0 - a * li;
                nv += w[i] * f * f;
                dv += w[i] * li * li * f * f;
                np += -2.0 * w[i] * li * f;
                dp += -2.0 * w[i] * li * li * li * f;
            }
            return np * dv - nv * dp;
        };
        auto bisect = [&](double lo, double hi, bool descending) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((slope(mid) > 0.0) == descending)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };

        const int grid = 200000;
        const double hi_end = 1.001 / lambdas[0];
        double oracle_max = -1.0, oracle_min = -1.0;
        double prev = slope(0.0);
        double prev_a = 0.0;
        for (int j = 1; j <= grid; ++j) {
            const double a = hi_end * j / grid;
            const double cur = slope(a);
            if (oracle_max < 0.0 && prev > 0.0 && cur <= 0.0) {
                oracle_max = bisect(prev_a, a, true);
            } else if (oracle_max >= 0.0 && prev <= 0.0 && cur > 0.0) {
                oracle_min = bisect(prev_a, a, false);
                break;
            }
            prev = cur;
            prev_a = a;
        }
        if (oracle_max < 0.0 || oracle_min < 0.0) {
            max_rel = 1.0;
            break;
        }
        ++solved;
        max_rel = std::max(max_rel, std::abs(*tilde - oracle_max) / oracle_max);
        max_rel = std::max(max_rel, std::abs(*hat - oracle_min) / oracle_min);
    }
    const bool pass = solved == problems && max_rel <= 1e-6 && timer.seconds() < 30.0;
    return finish("root-oracle", pass,
                  std::to_string(solved) + "/" + std::to_string(problems) +
                      " bracketed, max relative gap " + num(max_rel),
                  timer);
}

CheckResult check_root_properties(int trials, std::uint64_t seed) {
    Timer timer;
    Rng rng(derive_seed(seed, {4}));
    int violations = 0;
    std::string first;
    auto violate = [&](const std::string& what) {
        ++violations;
        if (first.empty()) first = what;
    };

    for (int t = 0; t < trials; ++t) {
        const int n = 3 + t % 38;
        const Eigen::VectorXd lambdas = draw_sorted_spectrum(rng, n, 1.0, 1000.0, 1e-3);
        const Eigen::VectorXd g = draw_signed(rng, n, 1e-3, 1.0);
        const PsiSpec psi = t % 2 == 0 ? PsiSpec::identity() : PsiSpec::monomial(1);
        const QuadraticProblem problem = QuadraticProblem::diagonal(lambdas);
        const auto c = compute_moments_direct(problem, g, psi).c;
        const PhiCoefficients phi = phi_from_moments(c);

        if (!(phi.phi1 > 0 && phi.phi2 > 0 && phi.phi3 > 0 && phi.phi4 > 0 && phi.phi5 > 0 &&
              phi.phi6 > 0))
            violate("nonpositive coefficient");
        if (!(phi.phi2 * phi.phi2 - 4 * phi.phi1 * phi.phi3 > 0))
            violate("alpha discriminant");
        if (!(phi.phi3 * phi.phi3 - 4 * phi.phi4 * phi.phi5 > 0))
            violate("beta discriminant");
        if (!(phi.phi1 * phi.phi1 - 4 * phi.phi6 * phi.phi4 > 0))
            violate("gamma discriminant");

        const double id1 = c[1] * phi.phi2, id1_rhs = c[0] * phi.phi1 + c[2] * phi.phi3;
        const double id2 = c[3] * phi.phi2, id2_rhs = c[2] * phi.phi1 + c[4] * phi.phi3;
        if (std::abs(id1 - id1_rhs) > 1e-8 * std::abs(id1)) violate("first moment identity");
        if (std::abs(id2 - id2_rhs) > 1e-8 * std::abs(id2)) violate("second moment identity");

        const auto tilde = stepsize_tilde(phi);
        const auto hat = stepsize_hat(phi);
        const auto beta = stepsize_beta_roots(phi);
        const auto gamma = stepsize_gamma_roots(phi);
        if (!tilde || !hat || !beta || !gamma) {
            violate("degenerate roots");
            continue;
        }
        if (!(*tilde <= c[2] / c[3] * (1.0 + 1e-10))) violate("short-step bound");
        const double lo = (1.0 / lambdas[n - 1]) * (1.0 - 1e-8);
        const double hi = (1.0 / lambdas[0]) * (1.0 + 1e-8);
        for (double root : {*tilde, *hat, beta->first, beta->second, gamma->first, gamma->second})
            if (!(root >= lo && root <= hi)) violate("root outside spectral bounds");
    }
    const bool pass = violations == 0;
    std::string detail = std::to_string(violations) + " violations in " + std::to_string(trials) +
                         " trials";
    if (!first.empty()) detail += " (first: " + first + ")";
    return finish("root-properties", pass, detail, timer);
}

CheckResult check_recurrence_fidelity(int trajectories, std::uint64_t seed) {
    Timer timer;
    Rng rng(derive_seed(seed, {5}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double max_rel = 0.0;
    long compared = 0;

    for (int t = 0; t < trajectories; ++t) {
        const int n = 50;
        const Eigen::VectorXd lambdas = draw_sorted_spectrum(rng, n, 1.0, 100.0, 1e-4);
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = gauss(rng.engine());
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
        Eigen::MatrixXd a = q * lambdas.asDiagonal() * q.transpose();
        a = 0.5 * (a + a.transpose()).eval();
        const QuadraticProblem problem =
            QuadraticProblem::dense(a, rng.uniform_vector(n, -10.0, 10.0));

        SolverConfig config;
        config.epsilon = 1e-8;
        config.record_gradients = true;
        const IterationTrace trace =
            run_adaptive_cyclic(problem, rng.uniform_vector(n, -10.0, 10.0), config);
        const long limit = std::min<long>(trace.iterations, 60);

        MomentCache cache = compute_moments_direct(problem, trace.gradients[0]);
        for (long k = 1; k <= limit; ++k) {
            cache = update_moments_recurrent(problem, cache, trace.gradients[k - 1],
                                             trace.gradients[k], trace.alpha[k - 1]);
            const auto direct = compute_moments_direct(problem, trace.gradients[k - 1]).c;
            max_rel = std::max(max_rel, std::abs(cache.c[3] - direct[3]) / std::abs(direct[3]));
            max_rel = std::max(max_rel, std::abs(cache.c[4] - direct[4]) / std::abs(direct[4]));
            ++compared;
        }
    }
    return finish("recurrence-fidelity", max_rel <= 1e-10,
                  "max relative gap " + num(max_rel) + " over " + std::to_string(compared) +
                      " completions",
                  timer);
}

CheckResult check_weight_transform_limit(int starts, std::uint64_t seed) {
    Timer timer;
    Rng rng(derive_seed(seed, {6}));
    double max_err = 0.0, max_sum_err = 0.0;
    for (int s = 0; s < starts; ++s) {
        const int n = 3 + s % 18;
        const double lambda1 = rng.uniform(0.5, 2.0);
        const double lambdan = lambda1 * rng.uniform(8.0, 30.0);
        const double span = lambdan - lambda1;
        Eigen::VectorXd lambdas(n);
        lambdas[0] = lambda1;
        lambdas[n - 1] = lambdan;
        for (int i = 1; i + 1 < n; ++i)
            lambdas[i] = rng.uniform(lambda1 + 0.08 * span, lambdan - 0.08 * span);
        std::sort(lambdas.data(), lambdas.data() + n);

        Eigen::VectorXd p = rng.uniform_vector(n, 0.05, 1.0);
        p /= p.sum();
        SpectralWeights weights{lambdas, p};
        Eigen::VectorXd prev = weights.p;
        for (int it = 0; it < 200000; ++it) {
            weights = weight_transform_step(weights);
            if ((weights.p - prev).lpNorm<Eigen::Infinity>() < 1e-15) break;
            prev = weights.p;
        }
        const auto [h1, h2] = extreme_weights(lambdas[0], lambdas[n - 1]);
        max_sum_err = std::max(max_sum_err, std::abs(h1 + h2 - 1.0));
        max_err = std::max(max_err, std::abs(weights.p[0] - h1));
        max_err = std::max(max_err, std::abs(weights.p[n - 1] - h2));
        for (int i = 1; i + 1 < n; ++i) max_err = std::max(max_err, std::abs(weights.p[i]));
    }
    const bool pass = max_err <= 1e-8 && max_sum_err <= 1e-14;
    return finish("weight-transform-limit", pass,
                  "max limit error " + num(max_err) + ", max weight-sum error " +
                      num(max_sum_err),
                  timer);
}

CheckResult check_tilde_limit(std::uint64_t seed) {
    Timer timer;
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 1000.0;
    spec.dim = 1000;
    spec.seed = derive_seed(seed, {7});
    const QuadraticProblem problem = generate_spectrum(spec);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(problem.dim());

    double worst = 0.0;
    for (Method method : {Method::Mg, Method::DaiYang}) {
        SolverConfig config;
        config.epsilon = 0.0;
        config.max_iter = 101;
        config.record_alpha_tilde = true;
        const IterationTrace trace = run_fixed_rule(problem, x0, method, config);
        const std::vector<double> dev = tilde_deviation(trace, 1000.0);
        worst = std::max(worst, dev.at(100));
    }
    const bool pass = worst < 1e-3 && timer.seconds() < 2.0;
    return finish("short-step-limit", pass,
                  "deviation from 1/lambda_n at iteration 100: " + num(worst), timer);
}

CheckResult check_family_limit(std::uint64_t seed) {
    Timer timer;
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 100.0;
    spec.dim = 100;
    spec.seed = derive_seed(seed, {8});
    const QuadraticProblem problem = generate_spectrum(spec);

    SolverConfig config;
    config.epsilon = 0.0;
    config.max_iter = 520;
    const IterationTrace trace =
        run_fixed_rule(problem, Eigen::VectorXd::Ones(problem.dim()), Method::DaiYang, config);
    const std::vector<double> dev = family_stepsize_deviation(trace, 1.0, 100.0);
    double worst = 0.0;
    for (size_t k = 500; k < dev.size(); ++k) worst = std::max(worst, dev[k]);
    return finish("family-step-limit", worst < 1e-3,
                  "deviation from 2/(lambda_1+lambda_n) beyond iteration 500: " + num(worst),
                  timer);
}

CheckResult check_rlinear_envelope(int problems, std::uint64_t seed) {
    Timer timer;
    bool all_ok = true;
    double worst_excess = -1e300;
    for (int i = 0; i < problems; ++i) {
        SpectrumSpec spec;
        spec.family = 1;
        spec.kappa = 100.0;
        spec.dim = 50;
        spec.seed = derive_seed(seed, {11, static_cast<std::uint64_t>(i)});
        const QuadraticProblem problem = attach_random_minimizer(
            generate_spectrum(spec), derive_seed(seed, {12, static_cast<std::uint64_t>(i)}));
        Rng rng(derive_seed(seed, {13, static_cast<std::uint64_t>(i)}));

        SolverConfig config;
        config.epsilon = 1e-10;
        config.record_gradients = true;
        const IterationTrace trace =
            run_adaptive_cyclic(problem, rng.uniform_vector(50, -10.0, 10.0), config);
        const EnvelopeReport report = rlinear_envelope(trace, problem, config.r,
                                                       PsiSpec::identity(), 1e-6);
        all_ok = all_ok && trace.converged() && report.ok;
        worst_excess = std::max(worst_excess, report.max_excess);
    }
    return finish("rlinear-envelope", all_ok,
                  "worst envelope excess " + num(worst_excess) + " over " +
                      std::to_string(problems) + " runs",
                  timer);
}

CheckResult check_stepsize_property(std::uint64_t seed) {
    Timer timer;
    bool all_ok = true;
    double worst_excess = 0.0;
    for (int i = 0; i < 10; ++i) {
        SpectrumSpec spec;
        spec.family = 1;
        spec.kappa = 50.0;
        spec.dim = 30;
        spec.seed = derive_seed(seed, {14, static_cast<std::uint64_t>(i)});
        const QuadraticProblem problem = attach_random_minimizer(
            generate_spectrum(spec), derive_seed(seed, {15, static_cast<std::uint64_t>(i)}));
        Rng rng(derive_seed(seed, {16, static_cast<std::uint64_t>(i)}));
        const Eigen::VectorXd x0 = rng.uniform_vector(30, -10.0, 10.0);

        SolverConfig config;
        config.epsilon = 1e-8;
        config.record_gradients = true;
        const IterationTrace adaptive = run_adaptive_cyclic(problem, x0, config);
        const PropertyBReport a =
            check_property_b(adaptive, problem, config.r + 1, PsiSpec::identity());
        const IterationTrace bb1 = run_fixed_rule(problem, x0, Method::Bb1, config);
        const PropertyBReport b = check_property_b(bb1, problem, 2, PsiSpec::identity());

        all_ok = all_ok && a.bounds_ok && a.window_ok && b.bounds_ok && b.window_ok;
        worst_excess = std::max({worst_excess, a.worst_bound_excess, b.worst_bound_excess});
    }
    return finish("stepsize-property", all_ok,
                  "bounds and retarded-quotient window hold; worst bound excess " +
                      num(worst_excess),
                  timer);
}

CheckResult check_snapshot_attractor(std::uint64_t seed) {
    Timer timer;
    // Pick a spectrum whose interior keeps clear of both extremes so the
    // interior components are visibly gone within the run length.
    QuadraticProblem problem = QuadraticProblem::diagonal(Eigen::VectorXd::Ones(1) * 1.0);
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 100 && !found; ++attempt) {
        SpectrumSpec spec;
        spec.family = 1;
        spec.kappa = 10.0;
        spec.dim = 10;
        spec.seed = derive_seed(seed, {17, attempt});
        QuadraticProblem candidate = generate_spectrum(spec);
        const Eigen::VectorXd& lambdas = candidate.eigenvalues();
        bool interior_ok = true;
        for (int i = 1; i + 1 < candidate.dim(); ++i)
            interior_ok = interior_ok && lambdas[i] > 2.35 && lambdas[i] < 8.65;
        if (interior_ok) {
            problem = std::move(candidate);
            found = true;
        }
    }
    if (!found) return finish("snapshot-attractor", false, "no well-separated spectrum found", timer);

    const auto [h1, h2] = extreme_weights(1.0, 10.0);
    const double s1 = std::sqrt(h1), s2 = std::sqrt(h2);
    double max_err = 0.0;
    bool signs_ok = true;

    const struct {
        Method method;
        PsiSpec psi;
    } drivers[] = {{Method::DaiYang, PsiSpec::identity()},
                   {Method::PsiFamily, PsiSpec::monomial(1)}};
    for (const auto& driver : drivers) {
        SolverConfig config;
        config.epsilon = 0.0;
        config.max_iter = 800;
        config.psi = driver.psi;
        config.record_gradients = true;
        const IterationTrace trace =
            run_fixed_rule(problem, Eigen::VectorXd::Ones(10), driver.method, config);

        Eigen::VectorXd prev;
        for (long k = 780; k <= 798; ++k) {
            const Eigen::VectorXd snap =
                eigencomponent_snapshot(problem, trace.gradients[k], driver.psi);
            max_err = std::max(max_err, std::abs(std::abs(snap[0]) - s1));
            max_err = std::max(max_err, std::abs(std::abs(snap[9]) - s2));
            for (int i = 1; i < 9; ++i) max_err = std::max(max_err, std::abs(snap[i]));
            if (prev.size() > 0) {
                signs_ok = signs_ok && sign_of(snap[0]) == sign_of(prev[0]);
                signs_ok = signs_ok && sign_of(snap[9]) == -sign_of(prev[9]);
            }
            prev = snap;
        }
    }
    const bool pass = max_err <= 1e-3 && signs_ok;
    return finish("snapshot-attractor", pass,
                  "max weight error " + num(max_err) +
                      (signs_ok ? ", sign pattern holds" : ", sign pattern broken"),
                  timer);
}

CheckResult check_desk_scale_benchmark(std::uint64_t seed) {
    Timer timer;
    ExperimentPlan plan;
    plan.families = {1};
    plan.kappas = {1e4};
    plan.epsilons = {1e-6};
    plan.methods = {"ac", "bb1"};
    plan.n = 1000;
    plan.runs = 10;

    auto mean_of = [](const ResultTable& t, const std::string& problem, const std::string& method) {
        for (const auto& row : t.rows)
            if (row.problem == problem && row.method == method) return row.mean_iters;
        return -1.0;
    };

    // The reference means are a statistic of one random spectrum draw; a
    // single draw can land far outside its typical range (an unusually large
    // gap above lambda_1 shortens every run). Use the median cell mean over
    // three independent spectra so one outlier draw cannot decide the check.
    std::array<double, 3> ac_means{}, bb1_means{};
    bool failures = false;
    for (int t = 0; t < 3; ++t) {
        plan.seed = derive_seed(seed, {23, static_cast<std::uint64_t>(t)});
        const ResultTable table = run_plan(plan, 2);
        ac_means[t] = mean_of(table, "family1", "ac");
        bb1_means[t] = mean_of(table, "family1", "bb1");
        failures = failures || table.any_failure();
    }
    std::sort(ac_means.begin(), ac_means.end());
    std::sort(bb1_means.begin(), bb1_means.end());
    const double ac = ac_means[1];
    const double bb1 = bb1_means[1];
    const bool band_ok = ac >= 0.7 * 234.9 && ac <= 1.3 * 234.9 && bb1 >= 0.7 * 323.9 &&
                         bb1 <= 1.3 * 323.9;

    ExperimentPlan harder = plan;
    harder.seed = seed;
    harder.families = {2, 3, 4};
    harder.kappas = {1e5};
    harder.epsilons = {1e-9};
    const ResultTable table2 = run_plan(harder, 2);
    int ordered = 0;
    for (int family : harder.families) {
        const std::string name = "family" + std::to_string(family);
        if (mean_of(table2, name, "ac") < mean_of(table2, name, "bb1")) ++ordered;
    }

    const bool pass = band_ok && ordered == 3 && !failures && !table2.any_failure() &&
                      timer.seconds() < 300.0;
    std::ostringstream detail;
    detail << "adaptive median " << num(ac) << " (expect 234.9 +/- 30%), bb1 median " << num(bb1)
           << " (expect 323.9 +/- 30%), harder-set ordering " << ordered << "/3";
    return finish("desk-scale-benchmark", pass, detail.str(), timer);
}

CheckResult check_matvec_accounting(std::uint64_t seed) {
    Timer timer;
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 100.0;
    spec.dim = 200;
    spec.seed = derive_seed(seed, {18});
    const QuadraticProblem problem =
        attach_random_minimizer(generate_spectrum(spec), derive_seed(seed, {19}));
    Rng rng(derive_seed(seed, {20}));
    const Eigen::VectorXd x0 = rng.uniform_vector(200, -10.0, 10.0);

    bool ok = true;
    std::ostringstream detail;
    SolverConfig config;
    config.epsilon = 1e-6;

    for (Method method : {Method::Sd, Method::Mg, Method::Bb1, Method::Bb2, Method::DaiYang,
                          Method::DaiYuan}) {
        const IterationTrace trace = run_fixed_rule(problem, x0, method, config);
        ok = ok && trace.converged() && trace.matvecs == trace.iterations + 1;
    }
    for (ShortStep short_step : {ShortStep::AlphaTilde, ShortStep::BetaTilde,
                                 ShortStep::GammaTilde}) {
        SolverConfig adaptive = config;
        adaptive.short_step = short_step;
        const IterationTrace trace = run_adaptive_cyclic(problem, x0, adaptive);
        ok = ok && trace.converged() && trace.matvecs == trace.iterations + 1;
        if (short_step == ShortStep::AlphaTilde)
            detail << "adaptive: " << trace.matvecs << " matvecs / " << trace.iterations
                   << " iterations";
    }
    {
        // Diagnostic recording must not change the counted work.
        SolverConfig observed = config;
        observed.record_alpha_tilde = true;
        const IterationTrace plain = run_adaptive_cyclic(problem, x0, config);
        const IterationTrace traced = run_adaptive_cyclic(problem, x0, observed);
        ok = ok && traced.iterations == plain.iterations && traced.matvecs == plain.matvecs;
        const IterationTrace sd = run_fixed_rule(problem, x0, Method::Sd, observed);
        ok = ok && sd.matvecs == sd.iterations + 1;
    }
    {
        // A degree-d weight costs d extra products per iteration.
        SolverConfig weighted = config;
        weighted.psi = PsiSpec::monomial(1);
        const IterationTrace trace = run_fixed_rule(problem, x0, Method::PsiFamily, weighted);
        ok = ok && trace.converged() && trace.matvecs == 2 * trace.iterations + 1;
    }
    return finish("matvec-accounting", ok, detail.str(), timer);
}

CheckResult check_matrix_market_smoke(const std::string& fixture_dir) {
    Timer timer;
    const std::string path = fixture_dir + "/laplace2d.mtx";
    QuadraticProblem loaded = load_matrix_market(path);
    const QuadraticProblem problem = attach_random_minimizer(loaded, 99);
    Rng rng(derive_seed(99, {21}));
    const Eigen::VectorXd x0 = rng.uniform_vector(problem.dim(), -10.0, 10.0);

    SolverConfig config;
    config.epsilon = 1e-6;
    const IterationTrace bb1 = run_fixed_rule(problem, x0, Method::Bb1, config);
    const IterationTrace ac = run_adaptive_cyclic(problem, x0, config);
    const bool pass = bb1.converged() && ac.converged() &&
                      bb1.matvecs == bb1.iterations + 1 && ac.matvecs == ac.iterations + 1;
    std::ostringstream detail;
    detail << "n=" << problem.dim() << ": bb1 " << bb1.iterations << " iterations, adaptive "
           << ac.iterations;
    return finish("matrix-market-smoke", pass, detail.str(), timer);
}

std::vector<CheckResult> run_theory_suite(std::uint64_t seed) {
    std::vector<CheckResult> results;
    results.push_back(check_two_dim_termination(500, seed));
    results.push_back(check_tilde_exact_2d(seed));
    results.push_back(check_root_oracle(100, seed));
    results.push_back(check_root_properties(1000, seed));
    results.push_back(check_recurrence_fidelity(100, seed));
    results.push_back(check_weight_transform_limit(50, seed));
    results.push_back(check_tilde_limit(seed));
    results.push_back(check_family_limit(seed));
    results.push_back(check_rlinear_envelope(20, seed));
    results.push_back(check_stepsize_property(seed));
    results.push_back(check_snapshot_attractor(seed));
    results.push_back(check_matvec_accounting(seed));
    return results;
}

}  // namespace qgm::verify
