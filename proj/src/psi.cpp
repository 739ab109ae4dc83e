#include "qgm/psi.hpp"

#include "qgm/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qgm {

PsiSpec::PsiSpec(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) throw std::invalid_argument("psi: empty coefficient list");
    while (coefficients_.size() > 1 && coefficients_.back() == 0.0) coefficients_.pop_back();
}

PsiSpec PsiSpec::identity() { return PsiSpec({1.0}); }

PsiSpec PsiSpec::monomial(int power) {
    if (power < 0) throw std::invalid_argument("psi: negative power");
    std::vector<double> coeffs(static_cast<size_t>(power) + 1, 0.0);
    coeffs.back() = 1.0;
    return PsiSpec(std::move(coeffs));
}

PsiSpec PsiSpec::polynomial(std::vector<double> coefficients) {
    return PsiSpec(std::move(coefficients));
}

bool PsiSpec::is_identity() const {
    return coefficients_.size() == 1 && coefficients_[0] == 1.0;
}

double PsiSpec::evaluate(double lambda) const {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * lambda + *it;
    return acc;
}

Eigen::VectorXd PsiSpec::apply(const QuadraticProblem& problem, const Eigen::VectorXd& v) const {
    if (v.size() != problem.dim()) throw std::invalid_argument("psi: dimension mismatch");
    Eigen::VectorXd power = v;
    Eigen::VectorXd acc = coefficients_[0] * v;
    for (size_t k = 1; k < coefficients_.size(); ++k) {
        power = problem.matvec(power);
        if (coefficients_[k] != 0.0) acc += coefficients_[k] * power;
    }
    return acc;
}

void PsiSpec::validate_positive_on(const QuadraticProblem& problem) const {
    if (!problem.is_diagonal())
        throw std::invalid_argument("psi: positivity check needs diagonal storage");
    const Eigen::VectorXd& lambdas = problem.eigenvalues();
    for (int i = 0; i < lambdas.size(); ++i) {
        double value = evaluate(lambdas[i]);
        if (!(value > 0.0) || !std::isfinite(value))
            throw std::invalid_argument("psi: nonpositive weight at lambda = " +
                                        std::to_string(lambdas[i]));
    }
}

}  // namespace qgm
