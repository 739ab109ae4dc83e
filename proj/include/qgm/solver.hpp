#pragma once

#include "qgm/problem.hpp"
#include "qgm/psi.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace qgm {

enum class Method { Sd, Mg, Bb1, Bb2, DaiYang, DaiYuan, PsiFamily };

// Which root family supplies the adaptive solver's short step.
enum class ShortStep { AlphaTilde, BetaTilde, GammaTilde };

enum class Branch : std::uint8_t {
    SdInit,      // forced SD at k = 0
    Bb1,         // ratio test passed, long step
    ShortNew,    // ratio test failed, freshly computed short step
    ShortReuse,  // cyclic reuse of the previous stepsize
    Fallback,    // degenerate short step, BB1 substituted
    Fixed,       // single-rule runs
};

enum class RunStatus { Converged, MaxIter, Degenerate };

struct SolverConfig {
    double epsilon = 1e-6;  // stop when |g_k| <= epsilon |g_0|
    double tau = 0.3;       // adaptive ratio threshold, in (0,1)
    int r = 5;              // short-step reuse cycle length
    long max_iter = 1000000;
    PsiSpec psi = PsiSpec::identity();
    ShortStep short_step = ShortStep::AlphaTilde;
    bool record_alpha_tilde = false;  // per-iterate observer (adds matvecs)
    bool record_gradients = false;    // per-iterate gradient copies, small n only
};

struct IterationTrace {
    // gnorm[k] = |g_k| for k = 0..iterations; alpha/branch/alpha_tilde have
    // one entry per executed iteration.
    std::vector<double> gnorm;
    std::vector<double> alpha;
    std::vector<Branch> branch;
    std::vector<double> alpha_tilde;  // NaN where not computed
    std::vector<Eigen::VectorXd> gradients;

    RunStatus status = RunStatus::MaxIter;
    long iterations = 0;
    long matvecs = 0;
    double seconds = 0;
    Eigen::VectorXd x_final;

    bool converged() const { return status == RunStatus::Converged; }
};

// Gradient descent x_{k+1} = x_k - alpha_k g_k with a single fixed rule.
// BB rules and Dai-Yuan take an SD step at k = 0. Non-finite iterates or
// nonpositive curvature mark the run Degenerate.
IterationTrace run_fixed_rule(const QuadraticProblem& problem,
                              const Eigen::VectorXd& x0,
                              Method method,
                              const SolverConfig& config);

// Adaptive cyclic method: BB1 long steps, switching to a retarded short step
// when bb2/bb1 < tau, with the short step reused for r iterations. One matvec
// per iteration; moments roll through the one-matvec recurrences. Requires
// identity psi.
IterationTrace run_adaptive_cyclic(const QuadraticProblem& problem,
                                   const Eigen::VectorXd& x0,
                                   const SolverConfig& config);

// Extension point for externally defined stepsize rules.
struct StepContext {
    long k = 0;
    const Eigen::VectorXd& g;  // current gradient
    const Eigen::VectorXd& z;  // A g
    double gg = 0, gz = 0, zz = 0;
    // Previous iteration's inner products and stepsize; NaN at k = 0.
    double prev_gg = 0, prev_gz = 0, prev_zz = 0;
    double alpha_prev = 0;
};
using StepsizeCallback = std::function<double(const StepContext&)>;

IterationTrace run_custom_rule(const QuadraticProblem& problem,
                               const Eigen::VectorXd& x0,
                               const SolverConfig& config,
                               const StepsizeCallback& stepsize);

struct ProbeResult {
    IterationTrace trace;
    long termination_index = -1;  // first i with |g_{k0+i}| <= threshold |g_0|
};

// Two-dimensional termination probe: runs the weighted norm-ratio rule,
// injects the short step at iteration k0 >= 1, and reports how many further
// iterations the gradient needs to fall below threshold * |g_0|. Requires a
// 2-dim diagonal problem with distinct eigenvalues and a start that is not an
// eigenvector direction.
ProbeResult run_two_dim_termination_probe(const QuadraticProblem& problem,
                                          const Eigen::VectorXd& x0,
                                          long k0,
                                          const PsiSpec& psi,
                                          double threshold = 1e-12);

}  // namespace qgm
