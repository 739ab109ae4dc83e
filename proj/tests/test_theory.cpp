#include "qgm/problem.hpp"
#include "qgm/solver.hpp"
#include "qgm/theory.hpp"

#include <doctest.h>

#include <cmath>

using namespace qgm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double value : values) v(i++) = value;
    return v;
}

}  // namespace

TEST_CASE("one weight-transform step on the two-point example") {
    // lambdas (1,3), p = (1/2,1/2): gamma = sqrt(5), hand-evaluated image.
    SpectralWeights w{vec({1.0, 3.0}), vec({0.5, 0.5})};
    const SpectralWeights next = weight_transform_step(w);
    CHECK(next.p(0) == doctest::Approx(0.723606797749979).epsilon(1e-12));
    CHECK(next.p(1) == doctest::Approx(0.276393202250021).epsilon(1e-12));
    CHECK(next.p.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two-point weight dynamics settle on the closed-form split") {
    SpectralWeights w{vec({1.0, 3.0}), vec({0.5, 0.5})};
    for (int i = 0; i < 200; ++i) w = weight_transform_step(w);
    const auto [h1, h2] = extreme_weights(1.0, 3.0);
    CHECK(h1 == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(h2 == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(w.p(0) == doctest::Approx(h1).epsilon(1e-8));
    CHECK(w.p(1) == doctest::Approx(h2).epsilon(1e-8));
}

TEST_CASE("interior weights die out under the transform") {
    SpectralWeights w{vec({1.0, 2.0, 3.0}),
                      vec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0})};
    for (int i = 0; i < 600; ++i) w = weight_transform_step(w);
    const auto [h1, h2] = extreme_weights(1.0, 3.0);
    CHECK(w.p(1) <= 1e-8);
    CHECK(w.p(0) == doctest::Approx(h1).epsilon(1e-6));
    CHECK(w.p(2) == doctest::Approx(h2).epsilon(1e-6));
}

TEST_CASE("weight transform validates the simplex and concentration") {
    CHECK_THROWS(weight_transform_step({vec({1.0, 3.0}), vec({0.7, 0.7})}));
    CHECK_THROWS(weight_transform_step({vec({1.0, 3.0}), vec({1.2, -0.2})}));
    // All mass on one eigenvalue: gamma equals it and the denominator dies.
    CHECK_THROWS(weight_transform_step({vec({1.0, 3.0}), vec({1.0, 0.0})}));
}

TEST_CASE("extreme weights are a convex split favoring the low mode") {
    const auto [h1, h2] = extreme_weights(1.0, 10.0);
    CHECK(h1 == doctest::Approx(31.0 / 44.0).epsilon(1e-15));
    CHECK(h2 == doctest::Approx(13.0 / 44.0).epsilon(1e-15));
    CHECK(h1 + h2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS(extreme_weights(0.0, 1.0));
    CHECK_THROWS(extreme_weights(2.0, 2.0));
}

TEST_CASE("eigencomponent snapshot normalizes and keeps signs") {
    auto problem = QuadraticProblem::diagonal(vec({1.0, 2.0, 3.0}));
    const Eigen::VectorXd snap =
        eigencomponent_snapshot(problem, vec({-5.0, 0.0, 0.0}), PsiSpec::identity());
    CHECK(snap(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(snap(1) == 0.0);
    CHECK(snap.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS(
        eigencomponent_snapshot(problem, vec({0.0, 0.0, 0.0}), PsiSpec::identity()));
}

TEST_CASE("stepsize deviation helpers are plain distances") {
    IterationTrace trace;
    trace.alpha = {0.5, 0.6};
    trace.alpha_tilde = {std::nan(""), 0.4};
    const auto family = family_stepsize_deviation(trace, 1.0, 3.0);
    REQUIRE(family.size() == 2);
    CHECK(family[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(family[1] == doctest::Approx(0.1).epsilon(1e-15));
    const auto tilde = tilde_deviation(trace, 4.0);
    REQUIRE(tilde.size() == 2);
    CHECK(std::isnan(tilde[0]));
    CHECK(tilde[1] == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("adaptive run stays inside its geometric envelope") {
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 100.0;
    spec.dim = 40;
    spec.seed = 77;
    auto problem = attach_random_minimizer(generate_spectrum(spec), 78);
    SolverConfig config;
    config.epsilon = 1e-10;
    config.record_gradients = true;
    const IterationTrace trace =
        run_adaptive_cyclic(problem, Eigen::VectorXd::Ones(40), config);
    REQUIRE(trace.converged());
    const EnvelopeReport report =
        rlinear_envelope(trace, problem, 5, PsiSpec::identity());
    CHECK(report.theta == doctest::Approx(1.0 - 1.0 / 100.0).epsilon(1e-12));
    CHECK(report.ok);
    CHECK(report.max_excess <= 0.0);
    CHECK(report.constants.size() == 40);
    CHECK(report.constants.minCoeff() >= 0.0);

    SolverConfig no_grads;
    no_grads.epsilon = 1e-6;
    const IterationTrace bare =
        run_adaptive_cyclic(problem, Eigen::VectorXd::Ones(40), no_grads);
    CHECK_THROWS(rlinear_envelope(bare, problem, 5, PsiSpec::identity()));
}

TEST_CASE("stepsize property holds for the adaptive and BB1 rules") {
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 60.0;
    spec.dim = 25;
    spec.seed = 91;
    auto problem = attach_random_minimizer(generate_spectrum(spec), 92);
    SolverConfig config;
    config.epsilon = 1e-9;
    config.record_gradients = true;

    const IterationTrace adaptive =
        run_adaptive_cyclic(problem, Eigen::VectorXd::Ones(25), config);
    REQUIRE(adaptive.converged());
    const PropertyBReport a = check_property_b(adaptive, problem, 6, PsiSpec::identity());
    CHECK(a.bounds_ok);
    CHECK(a.window_ok);
    CHECK(a.window_checked > 0);

    const IterationTrace bb1 =
        run_fixed_rule(problem, Eigen::VectorXd::Ones(25), Method::Bb1, config);
    REQUIRE(bb1.converged());
    const PropertyBReport b = check_property_b(bb1, problem, 2, PsiSpec::identity());
    CHECK(b.bounds_ok);
    CHECK(b.window_ok);
}

TEST_CASE("stepsize property checker flags violations") {
    auto problem = QuadraticProblem::diagonal(vec({1.0, 2.0, 4.0}));
    SolverConfig config;
    config.epsilon = 0.0;
    config.max_iter = 20;
    config.record_gradients = true;
    // Constant step just above 1/lambda_1: outside the admissible interval and
    // above every window quotient.
    const IterationTrace trace = run_custom_rule(
        problem, vec({1.0, 1.0, 1.0}), config, [](const StepContext&) { return 1.0001; });
    const PropertyBReport report = check_property_b(trace, problem, 3, PsiSpec::identity());
    CHECK_FALSE(report.bounds_ok);
    CHECK(report.worst_bound_excess > 0.0);
    CHECK_FALSE(report.window_ok);
    CHECK(report.first_window_failure == 0);
}
