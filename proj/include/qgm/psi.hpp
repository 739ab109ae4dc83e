#pragma once

#include <Eigen/Dense>

#include <vector>

namespace qgm {

class QuadraticProblem;

// Polynomial spectral weight psi with nonnegative powers. Weighted stepsizes
// use norms of psi(A)g; psi must be positive on the spectrum of A.
class PsiSpec {
public:
    static PsiSpec identity();
    static PsiSpec monomial(int power);
    static PsiSpec polynomial(std::vector<double> coefficients);  // ascending powers

    bool is_identity() const;
    int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

    double evaluate(double lambda) const;

    // psi(A) v via repeated matvec; degree() products with A.
    Eigen::VectorXd apply(const QuadraticProblem& problem, const Eigen::VectorXd& v) const;

    // Diagonal problems: throws unless psi(lambda_i) > 0 for every eigenvalue.
    void validate_positive_on(const QuadraticProblem& problem) const;

    const std::vector<double>& coefficients() const { return coefficients_; }

private:
    explicit PsiSpec(std::vector<double> coefficients);

    std::vector<double> coefficients_;
};

}  // namespace qgm
