#include "qgm/problem.hpp"
#include "qgm/rng.hpp"

#include <doctest.h>

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

using namespace qgm;

namespace {
const std::string kDataDir = QGM_TEST_DATA_DIR;

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double value : values) v(i++) = value;
    return v;
}
}  // namespace

TEST_CASE("diagonal problem evaluates f, gradient, matvec") {
    auto problem =
        QuadraticProblem::diagonal(vec({1.0, 2.0})).with_rhs(vec({1.0, 1.0}), std::nullopt);
    CHECK(problem.dim() == 2);
    CHECK(problem.is_diagonal());
    const Eigen::VectorXd x = vec({1.0, 1.0});
    CHECK(problem.value(x) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(problem.gradient(x)(0) == doctest::Approx(0.0));
    CHECK(problem.gradient(x)(1) == doctest::Approx(1.0));
    CHECK(problem.matvec(x)(1) == doctest::Approx(2.0));
    auto extremes = problem.known_extremes();
    REQUIRE(extremes.has_value());
    CHECK(extremes->first == 1.0);
    CHECK(extremes->second == 2.0);
}

TEST_CASE("diagonal factory validates the spectrum") {
    CHECK_THROWS(QuadraticProblem::diagonal(vec({-1.0, 2.0})));
    CHECK_THROWS(QuadraticProblem::diagonal(vec({0.0, 2.0})));
    CHECK_THROWS(QuadraticProblem::diagonal(vec({2.0, 1.0})));  // must ascend
    CHECK_THROWS(QuadraticProblem::diagonal(Eigen::VectorXd(0)));
}

TEST_CASE("dense factory requires a square symmetric matrix") {
    Eigen::MatrixXd good(2, 2);
    good << 2.0, 1.0, 1.0, 2.0;
    auto problem = QuadraticProblem::dense(good, vec({1.0, 1.0}));
    CHECK_FALSE(problem.is_diagonal());
    CHECK(problem.matvec(vec({1.0, 0.0}))(0) == doctest::Approx(2.0));
    CHECK_FALSE(problem.known_extremes().has_value());

    Eigen::MatrixXd asym(2, 2);
    asym << 2.0, 1.0, 0.0, 2.0;
    CHECK_THROWS(QuadraticProblem::dense(asym, vec({1.0, 1.0})));
    Eigen::MatrixXd rect(2, 3);
    rect.setZero();
    CHECK_THROWS(QuadraticProblem::dense(rect, vec({1.0, 1.0})));
}

TEST_CASE("sparse storage matches the dense operator") {
    Eigen::SparseMatrix<double> a(3, 3);
    std::vector<Eigen::Triplet<double>> trips = {
        {0, 0, 4.0}, {1, 1, 5.0}, {2, 2, 6.0}, {0, 1, 1.0}, {1, 0, 1.0}};
    a.setFromTriplets(trips.begin(), trips.end());
    auto problem = QuadraticProblem::sparse(a, vec({1.0, 0.0, 0.0}));
    const Eigen::VectorXd x = vec({1.0, 2.0, 3.0});
    const Eigen::VectorXd expect = problem.to_dense() * x;
    CHECK((problem.matvec(x) - expect).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("spectrum family 1 spans [1, kappa] with uniform interior") {
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 1e4;
    spec.dim = 500;
    spec.seed = 42;
    auto problem = generate_spectrum(spec);
    const Eigen::VectorXd lam = problem.eigenvalues();
    REQUIRE(lam.size() == 500);
    CHECK(lam(0) == 1.0);
    CHECK(lam(499) == 1e4);
    CHECK(std::is_sorted(lam.data(), lam.data() + lam.size()));
    for (int i = 1; i < 499; ++i) {
        CHECK(lam(i) >= 1.0);
        CHECK(lam(i) <= 1e4);
    }
    // Determinism: the same spec reproduces the same spectrum.
    auto again = generate_spectrum(spec);
    CHECK((again.eigenvalues() - lam).norm() == 0.0);
    spec.seed = 43;
    CHECK((generate_spectrum(spec).eigenvalues() - lam).norm() > 0.0);
}

TEST_CASE("spectrum family 2 clusters 4/5 of the eigenvalues high") {
    SpectrumSpec spec;
    spec.family = 2;
    spec.kappa = 1e4;
    spec.dim = 500;
    spec.seed = 7;
    const Eigen::VectorXd lam = generate_spectrum(spec).eigenvalues();
    CHECK(lam(0) == 1.0);
    CHECK(lam(499) == 1e4);
    long low = 0, high = 0;
    for (double v : lam) {
        if (v <= 100.0) ++low;
        if (v >= 5e3) ++high;
    }
    CHECK(low == 100);   // n/5 including lambda_1
    CHECK(high == 400);  // 4n/5 including lambda_n
}

TEST_CASE("spectrum family 3 uses a low/middle/high band split") {
    SpectrumSpec spec;
    spec.family = 3;
    spec.kappa = 1e4;
    spec.dim = 500;
    spec.seed = 7;
    const Eigen::VectorXd lam = generate_spectrum(spec).eigenvalues();
    CHECK(lam(0) == 1.0);
    CHECK(lam(499) == 1e4);
    long low = 0, mid = 0, high = 0;
    for (double v : lam) {
        if (v <= 100.0) ++low;
        else if (v < 5e3) ++mid;
        else ++high;
    }
    CHECK(low == 100);
    CHECK(mid == 300);
    CHECK(high == 100);
}

TEST_CASE("clustered families need room for their bands") {
    SpectrumSpec spec;
    spec.family = 2;
    spec.kappa = 50.0;  // bands would overlap
    spec.dim = 100;
    CHECK_THROWS(generate_spectrum(spec));
    spec.kappa = 1e4;
    spec.dim = 4;
    CHECK_THROWS(generate_spectrum(spec));
}

TEST_CASE("spectrum family 4 is the geometric ladder") {
    SpectrumSpec spec;
    spec.family = 4;
    spec.kappa = 16.0;
    spec.dim = 5;
    const Eigen::VectorXd lam = generate_spectrum(spec).eigenvalues();
    const Eigen::VectorXd expect = vec({1.0, 2.0, 4.0, 8.0, 16.0});
    CHECK((lam - expect).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectrum family 5 is the clamped cosine profile") {
    SpectrumSpec spec;
    spec.family = 5;
    spec.kappa = 2.0;
    spec.dim = 3;
    const Eigen::VectorXd lam = generate_spectrum(spec).eigenvalues();
    CHECK(lam(0) == doctest::Approx(0.01).epsilon(1e-15));  // cosine hits zero, floored
    CHECK(lam(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lam(2) == doctest::Approx(2.0).epsilon(1e-15));
    spec.dim = 50;
    spec.kappa = 100.0;
    const Eigen::VectorXd big = generate_spectrum(spec).eigenvalues();
    CHECK(big.minCoeff() >= 0.01);
    CHECK(big.maxCoeff() == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("unknown family and bad sizes are rejected") {
    SpectrumSpec spec;
    spec.family = 6;
    CHECK_THROWS(generate_spectrum(spec));
    spec.family = 1;
    spec.dim = 1;
    CHECK_THROWS(generate_spectrum(spec));
    spec.dim = 100;
    spec.kappa = 0.5;
    CHECK_THROWS(generate_spectrum(spec));
}

TEST_CASE("matrix market loader reads a symmetric coordinate file") {
    auto problem = load_matrix_market(kDataDir + "/small_sym.mtx");
    REQUIRE(problem.dim() == 2);
    Eigen::MatrixXd expect(2, 2);
    expect << 2.0, 1.0, 1.0, 2.0;
    CHECK((problem.to_dense() - expect).norm() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(problem.known_extremes().has_value());
}

TEST_CASE("matrix market general header needs the symmetrize opt-in") {
    CHECK_THROWS(load_matrix_market(kDataDir + "/small_general.mtx"));
    auto problem = load_matrix_market(kDataDir + "/small_general.mtx", true);
    Eigen::MatrixXd expect(2, 2);
    expect << 2.0, 1.0, 1.0, 2.0;  // (A + A')/2 of [[2,1.8],[0.2,2]]
    CHECK((problem.to_dense() - expect).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("matrix market loader rejects malformed input") {
    CHECK_THROWS(load_matrix_market(kDataDir + "/bad_banner.mtx"));
    CHECK_THROWS(load_matrix_market(kDataDir + "/truncated.mtx"));
    CHECK_THROWS(load_matrix_market(kDataDir + "/out_of_range.mtx"));
    CHECK_THROWS(load_matrix_market(kDataDir + "/does_not_exist.mtx"));
}

TEST_CASE("attach_random_minimizer plants a known solution") {
    SpectrumSpec spec;
    spec.family = 1;
    spec.kappa = 100.0;
    spec.dim = 40;
    spec.seed = 3;
    auto base = generate_spectrum(spec);
    auto problem = attach_random_minimizer(base, 9);
    REQUIRE(problem.minimizer().has_value());
    const Eigen::VectorXd x_star = *problem.minimizer();
    CHECK(x_star.size() == 40);
    CHECK(x_star.lpNorm<Eigen::Infinity>() <= 10.0);
    CHECK((problem.gradient(x_star)).norm() == doctest::Approx(0.0).epsilon(1e-10));
    auto again = attach_random_minimizer(base, 9);
    CHECK((*again.minimizer() - x_star).norm() == 0.0);
}

TEST_CASE("rng seed derivation separates streams") {
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    Rng a(derive_seed(5, {1}));
    Rng b(derive_seed(5, {1}));
    CHECK(a.uniform(0.0, 1.0) == b.uniform(0.0, 1.0));
    const Eigen::VectorXd v = a.uniform_vector(8, -1.0, 1.0);
    CHECK(v.minCoeff() >= -1.0);
    CHECK(v.maxCoeff() <= 1.0);
}
