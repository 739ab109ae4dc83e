#include "qgm/bench.hpp"
#include "qgm/problem.hpp"
#include "qgm/psi.hpp"
#include "qgm/solver.hpp"
#include "qgm/stepsize.hpp"
#include "qgm/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

namespace py = pybind11;
using namespace qgm;

namespace {

const char* status_name(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "converged";
        case RunStatus::MaxIter: return "max_iter";
        case RunStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

const char* branch_name(Branch branch) {
    switch (branch) {
        case Branch::SdInit: return "sd_init";
        case Branch::Bb1: return "bb1";
        case Branch::ShortNew: return "short_new";
        case Branch::ShortReuse: return "short_reuse";
        case Branch::Fallback: return "fallback";
        case Branch::Fixed: return "fixed";
    }
    return "unknown";
}

IterationTrace solve(const QuadraticProblem& problem, const Eigen::VectorXd& x0,
                     const std::string& method, double epsilon, double tau, int r,
                     long max_iter, const PsiSpec& psi, bool record_alpha_tilde,
                     bool record_gradients) {
    const MethodSpec spec = parse_method(method);
    SolverConfig config;
    config.epsilon = epsilon;
    config.tau = tau;
    config.r = r;
    config.max_iter = max_iter;
    config.psi = psi;
    config.record_alpha_tilde = record_alpha_tilde;
    config.record_gradients = record_gradients;
    if (spec.fixed) return run_fixed_rule(problem, x0, *spec.fixed, config);
    config.short_step = *spec.short_step;
    return run_adaptive_cyclic(problem, x0, config);
}

}  // namespace

PYBIND11_MODULE(_qgm, m) {
    m.doc() = "Gradient methods for strictly convex quadratics";

    py::class_<PsiSpec>(m, "PsiSpec")
        .def_static("identity", &PsiSpec::identity)
        .def_static("monomial", &PsiSpec::monomial, py::arg("power"))
        .def_static("polynomial", &PsiSpec::polynomial, py::arg("coefficients"))
        .def("is_identity", &PsiSpec::is_identity)
        .def("degree", &PsiSpec::degree)
        .def("evaluate", &PsiSpec::evaluate, py::arg("lam"))
        .def_property_readonly("coefficients", &PsiSpec::coefficients);

    py::class_<QuadraticProblem>(m, "QuadraticProblem")
        .def_static("diagonal",
                    py::overload_cast<Eigen::VectorXd>(&QuadraticProblem::diagonal),
                    py::arg("eigenvalues"))
        .def_static("diagonal_with_rhs",
                    py::overload_cast<Eigen::VectorXd, Eigen::VectorXd>(
                        &QuadraticProblem::diagonal),
                    py::arg("eigenvalues"), py::arg("rhs"))
        .def_static("dense", &QuadraticProblem::dense, py::arg("matrix"), py::arg("rhs"))
        .def("dim", &QuadraticProblem::dim)
        .def("is_diagonal", &QuadraticProblem::is_diagonal)
        .def("eigenvalues", &QuadraticProblem::eigenvalues)
        .def("matvec", &QuadraticProblem::matvec, py::arg("v"))
        .def("gradient", &QuadraticProblem::gradient, py::arg("x"))
        .def("value", &QuadraticProblem::value, py::arg("x"))
        .def("to_dense", &QuadraticProblem::to_dense)
        .def("rhs", &QuadraticProblem::rhs)
        .def("minimizer",
             [](const QuadraticProblem& p) -> std::optional<Eigen::VectorXd> {
                 return p.minimizer();
             })
        .def("with_rhs",
             [](const QuadraticProblem& p, Eigen::VectorXd rhs,
                std::optional<Eigen::VectorXd> minimizer) {
                 return p.with_rhs(std::move(rhs), std::move(minimizer));
             },
             py::arg("rhs"), py::arg("minimizer") = std::nullopt);

    m.def(
        "generate_spectrum",
        [](int family, double kappa, int dim, std::uint64_t seed) {
            SpectrumSpec spec;
            spec.family = family;
            spec.kappa = kappa;
            spec.dim = dim;
            spec.seed = seed;
            return generate_spectrum(spec);
        },
        py::arg("family"), py::arg("kappa"), py::arg("dim"), py::arg("seed") = 0);
    m.def("load_matrix_market", &load_matrix_market, py::arg("path"),
          py::arg("symmetrize_general") = false);
    m.def("attach_random_minimizer", &attach_random_minimizer, py::arg("problem"),
          py::arg("seed"));

    py::class_<PhiCoefficients>(m, "PhiCoefficients")
        .def_readonly("phi1", &PhiCoefficients::phi1)
        .def_readonly("phi2", &PhiCoefficients::phi2)
        .def_readonly("phi3", &PhiCoefficients::phi3)
        .def_readonly("phi4", &PhiCoefficients::phi4)
        .def_readonly("phi5", &PhiCoefficients::phi5)
        .def_readonly("phi6", &PhiCoefficients::phi6);

    m.def(
        "moments",
        [](const QuadraticProblem& problem, const Eigen::VectorXd& g, const PsiSpec& psi) {
            return compute_moments_direct(problem, g, psi).c;
        },
        py::arg("problem"), py::arg("g"), py::arg("psi") = PsiSpec::identity(),
        "Weighted moments c_j = g' A^j psi^2(A) g for j = 0..4");
    m.def("phi_from_moments", &phi_from_moments, py::arg("c"));
    m.def("phi_from_spectrum", &phi_from_spectrum, py::arg("eigenvalues"), py::arg("g"),
          py::arg("psi") = PsiSpec::identity());
    m.def("stepsize_tilde", &stepsize_tilde, py::arg("phi"));
    m.def("stepsize_hat", &stepsize_hat, py::arg("phi"));
    m.def("stepsize_beta_roots", &stepsize_beta_roots, py::arg("phi"));
    m.def("stepsize_gamma_roots", &stepsize_gamma_roots, py::arg("phi"));

    py::class_<IterationTrace>(m, "IterationTrace")
        .def_readonly("gnorm", &IterationTrace::gnorm)
        .def_readonly("alpha", &IterationTrace::alpha)
        .def_readonly("alpha_tilde", &IterationTrace::alpha_tilde)
        .def_readonly("gradients", &IterationTrace::gradients)
        .def_readonly("iterations", &IterationTrace::iterations)
        .def_readonly("matvecs", &IterationTrace::matvecs)
        .def_readonly("seconds", &IterationTrace::seconds)
        .def_readonly("x_final", &IterationTrace::x_final)
        .def_property_readonly(
            "status", [](const IterationTrace& t) { return std::string(status_name(t.status)); })
        .def_property_readonly("branches",
                               [](const IterationTrace& t) {
                                   std::vector<std::string> names;
                                   names.reserve(t.branch.size());
                                   for (Branch b : t.branch) names.emplace_back(branch_name(b));
                                   return names;
                               })
        .def("converged", &IterationTrace::converged);

    m.def("solve", &solve, py::arg("problem"), py::arg("x0"), py::arg("method") = "ac",
          py::arg("epsilon") = 1e-6, py::arg("tau") = 0.3, py::arg("r") = 5,
          py::arg("max_iter") = 1000000L, py::arg("psi") = PsiSpec::identity(),
          py::arg("record_alpha_tilde") = false, py::arg("record_gradients") = false,
          "Run one method; adaptive-cyclic names (ac, ac_beta, ac_gamma) take the "
          "tau/r knobs, fixed rules ignore them");

    m.def("extreme_weights", &extreme_weights, py::arg("lambda1"), py::arg("lambdan"));
    m.def(
        "weight_transform_step",
        [](const Eigen::VectorXd& lambdas, const Eigen::VectorXd& p) {
            return weight_transform_step({lambdas, p}).p;
        },
        py::arg("lambdas"), py::arg("p"));

    m.def(
        "run_plan_json",
        [](const std::string& json_text, int jobs) {
            const ResultTable table = run_plan(parse_plan(json_text), jobs);
            std::ostringstream csv;
            emit_csv(table, csv);
            return py::make_tuple(csv.str(), !table.any_failure());
        },
        py::arg("json_text"), py::arg("jobs") = 1,
        "Run a benchmark plan; returns (csv_text, all_runs_ok)");
}
