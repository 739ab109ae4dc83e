#include "qgm/problem.hpp"

#include "qgm/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qgm {

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

void check_rhs(const Eigen::VectorXd& rhs, int dim) {
    require(rhs.size() == dim, "problem: rhs dimension mismatch");
}

}  // namespace

QuadraticProblem QuadraticProblem::diagonal(Eigen::VectorXd eigenvalues) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(eigenvalues.size());
    return diagonal(std::move(eigenvalues), std::move(rhs));
}

QuadraticProblem QuadraticProblem::diagonal(Eigen::VectorXd eigenvalues, Eigen::VectorXd rhs) {
    require(eigenvalues.size() > 0, "problem: empty spectrum");
    for (int i = 0; i < eigenvalues.size(); ++i) {
        require(eigenvalues[i] > 0.0, "problem: eigenvalues must be positive");
        if (i > 0) require(eigenvalues[i] >= eigenvalues[i - 1],
                           "problem: eigenvalues must be ascending");
    }
    check_rhs(rhs, static_cast<int>(eigenvalues.size()));
    QuadraticProblem p;
    p.dim_ = static_cast<int>(eigenvalues.size());
    p.extremes_ = {{eigenvalues[0], eigenvalues[eigenvalues.size() - 1]}};
    p.matrix_ = std::move(eigenvalues);
    p.rhs_ = std::move(rhs);
    return p;
}

QuadraticProblem QuadraticProblem::dense(Eigen::MatrixXd matrix, Eigen::VectorXd rhs) {
    require(matrix.rows() == matrix.cols() && matrix.rows() > 0, "problem: matrix must be square");
    require(matrix.isApprox(matrix.transpose(), 1e-12), "problem: matrix must be symmetric");
    check_rhs(rhs, static_cast<int>(matrix.rows()));
    QuadraticProblem p;
    p.dim_ = static_cast<int>(matrix.rows());
    p.matrix_ = std::move(matrix);
    p.rhs_ = std::move(rhs);
    return p;
}

QuadraticProblem QuadraticProblem::sparse(SparseMatrix matrix, Eigen::VectorXd rhs) {
    require(matrix.rows() == matrix.cols() && matrix.rows() > 0, "problem: matrix must be square");
    SparseMatrix diff = SparseMatrix(matrix.transpose()) - matrix;
    require(diff.coeffs().size() == 0 || diff.coeffs().cwiseAbs().maxCoeff() <= 1e-12,
            "problem: matrix must be symmetric");
    check_rhs(rhs, static_cast<int>(matrix.rows()));
    QuadraticProblem p;
    p.dim_ = static_cast<int>(matrix.rows());
    matrix.makeCompressed();
    p.matrix_ = std::move(matrix);
    p.rhs_ = std::move(rhs);
    return p;
}

Eigen::VectorXd QuadraticProblem::matvec(const Eigen::VectorXd& v) const {
    require(v.size() == dim_, "problem: matvec dimension mismatch");
    if (const auto* diag = std::get_if<Eigen::VectorXd>(&matrix_))
        return diag->cwiseProduct(v);
    if (const auto* dense = std::get_if<Eigen::MatrixXd>(&matrix_))
        return *dense * v;
    return std::get<SparseMatrix>(matrix_) * v;
}

Eigen::VectorXd QuadraticProblem::gradient(const Eigen::VectorXd& x) const {
    return matvec(x) - rhs_;
}

double QuadraticProblem::value(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(matvec(x)) - rhs_.dot(x);
}

const Eigen::VectorXd& QuadraticProblem::eigenvalues() const {
    const auto* diag = std::get_if<Eigen::VectorXd>(&matrix_);
    if (!diag) throw std::logic_error("problem: eigenvalues only known for diagonal storage");
    return *diag;
}

Eigen::MatrixXd QuadraticProblem::to_dense() const {
    if (const auto* diag = std::get_if<Eigen::VectorXd>(&matrix_))
        return diag->asDiagonal();
    if (const auto* dense = std::get_if<Eigen::MatrixXd>(&matrix_))
        return *dense;
    return Eigen::MatrixXd(std::get<SparseMatrix>(matrix_));
}

QuadraticProblem QuadraticProblem::with_rhs(Eigen::VectorXd rhs,
                                            std::optional<Eigen::VectorXd> minimizer) const {
    check_rhs(rhs, dim_);
    QuadraticProblem p = *this;
    p.rhs_ = std::move(rhs);
    p.minimizer_ = std::move(minimizer);
    return p;
}

QuadraticProblem generate_spectrum(const SpectrumSpec& spec) {
    require(spec.dim >= 2, "spectrum: need dim >= 2");
    require(spec.kappa > 1.0, "spectrum: need kappa > 1");
    require(spec.family >= 1 && spec.family <= 5, "spectrum: family must be 1..5");

    const int n = spec.dim;
    const double kappa = spec.kappa;
    Eigen::VectorXd v(n);
    Rng rng(derive_seed(spec.seed, {0x5bec7257u, static_cast<std::uint64_t>(spec.family)}));

    switch (spec.family) {
        case 1: {
            v[0] = 1.0;
            v[n - 1] = kappa;
            for (int j = 1; j < n - 1; ++j) v[j] = rng.uniform(1.0, kappa);
            break;
        }
        case 2:
        case 3: {
            require(n >= 5, "spectrum: families 2-3 need dim >= 5");
            require(kappa >= 200.0, "spectrum: families 2-3 need kappa >= 200");
            const int m = n / 5;
            v[0] = 1.0;
            v[n - 1] = kappa;
            for (int j = 1; j < m; ++j) v[j] = rng.uniform(1.0, 100.0);
            if (spec.family == 2) {
                for (int j = m; j < n - 1; ++j) v[j] = rng.uniform(kappa / 2.0, kappa);
            } else {
                const int upper = 4 * n / 5;
                for (int j = m; j < upper; ++j) v[j] = rng.uniform(100.0, kappa / 2.0);
                for (int j = upper; j < n - 1; ++j) v[j] = rng.uniform(kappa / 2.0, kappa);
            }
            break;
        }
        case 4: {
            for (int j = 1; j <= n; ++j)
                v[j - 1] = std::pow(kappa, static_cast<double>(n - j) / (n - 1));
            break;
        }
        case 5: {
            for (int j = 1; j <= n; ++j)
                v[j - 1] = kappa / 2.0 *
                           (std::cos(static_cast<double>(n - j) * std::numbers::pi / (n - 1)) + 1.0);
            for (int j = 0; j < n; ++j) v[j] = std::max(v[j], 0.01);
            break;
        }
    }

    std::sort(v.begin(), v.end());
    return QuadraticProblem::diagonal(std::move(v));
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

QuadraticProblem load_matrix_market(const std::string& path, bool symmetrize_general) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("matrix market: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty file: " + path);
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix")
        throw std::runtime_error("matrix market: bad banner: " + line);
    if (lower(format) != "coordinate")
        throw std::runtime_error("matrix market: only coordinate format supported");
    field = lower(field);
    if (field != "real" && field != "integer")
        throw std::runtime_error("matrix market: only real-valued matrices supported");
    symmetry = lower(symmetry);
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw std::runtime_error("matrix market: unsupported symmetry: " + symmetry);
    if (!symmetric && !symmetrize_general)
        throw std::runtime_error(
            "matrix market: header says general; pass symmetrize_general to use (A + A')/2");

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    long rows = 0, cols = 0, entries = 0;
    if (!(sizes >> rows >> cols >> entries))
        throw std::runtime_error("matrix market: bad size line");
    if (rows != cols) throw std::runtime_error("matrix market: matrix is not square");
    if (rows <= 0) throw std::runtime_error("matrix market: empty matrix");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(entries) * 2);
    for (long e = 0; e < entries; ++e) {
        long i = 0, j = 0;
        double value = 0;
        if (!(in >> i >> j >> value))
            throw std::runtime_error("matrix market: truncated entry list");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw std::runtime_error("matrix market: index out of range");
        const int a = static_cast<int>(i - 1), b = static_cast<int>(j - 1);
        if (symmetric) {
            triplets.emplace_back(a, b, value);
            if (a != b) triplets.emplace_back(b, a, value);
        } else {
            triplets.emplace_back(a, b, value / 2.0);
            triplets.emplace_back(b, a, value / 2.0);
        }
    }

    SparseMatrix matrix(rows, cols);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    return QuadraticProblem::sparse(std::move(matrix),
                                    Eigen::VectorXd::Zero(static_cast<int>(rows)));
}

QuadraticProblem attach_random_minimizer(const QuadraticProblem& problem, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x3c6ef372u}));
    Eigen::VectorXd x_star = rng.uniform_vector(problem.dim(), -10.0, 10.0);
    Eigen::VectorXd rhs = problem.matvec(x_star);  // before x_star is moved out
    return problem.with_rhs(std::move(rhs), std::move(x_star));
}

}  // namespace qgm
