#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace qgm {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Strictly convex quadratic f(x) = 1/2 x'Ax - b'x with A symmetric positive
// definite. Immutable after construction; safe to share across threads.
class QuadraticProblem {
public:
    static QuadraticProblem diagonal(Eigen::VectorXd eigenvalues);
    static QuadraticProblem diagonal(Eigen::VectorXd eigenvalues, Eigen::VectorXd rhs);
    static QuadraticProblem dense(Eigen::MatrixXd matrix, Eigen::VectorXd rhs);
    static QuadraticProblem sparse(SparseMatrix matrix, Eigen::VectorXd rhs);

    int dim() const { return dim_; }

    Eigen::VectorXd matvec(const Eigen::VectorXd& v) const;

    // g(x) = Ax - b
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

    double value(const Eigen::VectorXd& x) const;

    bool is_diagonal() const { return std::holds_alternative<Eigen::VectorXd>(matrix_); }

    // Diagonal storage only: entries ascending.
    const Eigen::VectorXd& eigenvalues() const;

    // (lambda_min, lambda_max) when the storage makes them known.
    const std::optional<std::pair<double, double>>& known_extremes() const { return extremes_; }

    const Eigen::VectorXd& rhs() const { return rhs_; }

    const std::optional<Eigen::VectorXd>& minimizer() const { return minimizer_; }

    // Small-problem convenience for tests and oracles.
    Eigen::MatrixXd to_dense() const;

    QuadraticProblem with_rhs(Eigen::VectorXd rhs, std::optional<Eigen::VectorXd> minimizer) const;

private:
    QuadraticProblem() = default;

    std::variant<Eigen::VectorXd, Eigen::MatrixXd, SparseMatrix> matrix_;
    Eigen::VectorXd rhs_;
    std::optional<std::pair<double, double>> extremes_;
    std::optional<Eigen::VectorXd> minimizer_;
    int dim_ = 0;
};

// Diagonal spectrum layouts: five families sharing (kappa, dim, seed).
//   1: {1, U(1,kappa)..., kappa}
//   2: {1, U(1,100) x (n/5-1), U(kappa/2,kappa)..., kappa}
//   3: {1, U(1,100) x (n/5-1), U(100,kappa/2)..., U(kappa/2,kappa)..., kappa}
//   4: kappa^((n-j)/(n-1)), j = 1..n
//   5: (kappa/2)(cos((n-j)pi/(n-1)) + 1), floored at 0.01
struct SpectrumSpec {
    int family = 1;
    double kappa = 1e4;
    int dim = 1000;
    std::uint64_t seed = 0;
};

// Builds the diagonal problem for the requested family, entries sorted
// ascending, rhs zero. Families 1-3 keep min = 1 and max = kappa exactly.
QuadraticProblem generate_spectrum(const SpectrumSpec& spec);

// Reads a coordinate-format real Matrix Market file. Symmetric headers get the
// stored triangle mirrored; "general" headers are rejected unless
// symmetrize_general is set, in which case (A + A')/2 is used.
QuadraticProblem load_matrix_market(const std::string& path, bool symmetrize_general = false);

// Draws x* uniform in [-10,10]^n, sets b = A x*, and records x* so runs can
// report distance to the true minimizer.
QuadraticProblem attach_random_minimizer(const QuadraticProblem& problem, std::uint64_t seed);

}  // namespace qgm
