#pragma once

#include "qgm/problem.hpp"
#include "qgm/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qgm {

// A parsed method selector: either a fixed rule or the adaptive cyclic solver
// with one of its short-step variants.
struct MethodSpec {
    std::string name;
    std::optional<Method> fixed;          // set for single-rule methods
    std::optional<ShortStep> short_step;  // set for adaptive-cyclic methods
};

// Known names: sd, mg, bb1, bb2, dai_yang, dy, psi, ac, ac_beta, ac_gamma.
// Throws on anything else.
MethodSpec parse_method(const std::string& name);

struct ExperimentPlan {
    std::vector<int> families;
    std::vector<double> kappas;
    std::vector<double> epsilons;
    std::vector<std::string> methods;
    std::vector<std::string> matrices;  // optional Matrix Market paths
    bool symmetrize_general = false;    // accept a general header as (A + A')/2
    int n = 1000;
    int runs = 10;
    std::uint64_t seed = 0;
    double tau = 0.3;
    int r = 5;
    long max_iter = 1000000;
};

// Reads a JSON plan; unknown keys rejected so typos cannot silently change an
// experiment.
ExperimentPlan load_plan(const std::string& path);
ExperimentPlan parse_plan(const std::string& json_text);

struct CellResult {
    std::string problem;  // "family<f>" or matrix stem
    double kappa = 0;     // NaN for matrix rows
    double epsilon = 0;
    std::string method;
    double mean_iters = 0;
    double mean_matvecs = 0;
    double mean_seconds = 0;
    int n_runs = 0;
    // Not emitted to CSV: per-run outcomes for reporting and exit codes.
    std::vector<long> iters;
    std::vector<RunStatus> statuses;
};

struct ResultTable {
    std::vector<CellResult> rows;
    bool any_failure() const;
};

// Runs every (problem, kappa, epsilon) cell against every method with paired
// starts: the spectrum seed derives from (seed, family, kappa), the per-run
// x* and x0 from (cell, run), and all methods of a cell share them. jobs > 1
// distributes cells across threads; aggregation order is deterministic.
ResultTable run_plan(const ExperimentPlan& plan, int jobs = 1);

// Stable column order:
// problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs
void emit_csv(const ResultTable& table, std::ostream& out);
ResultTable parse_csv(std::istream& in);

// One table per (problem, kappa): epsilon rows, method columns, mean
// iteration counts.
void emit_markdown(const ResultTable& table, std::ostream& out);

enum class TraceQuantity { AlphaTildeDev, AlphaDev, Gnorm };
TraceQuantity parse_trace_quantity(const std::string& name);

// Two-column CSV (k, value) of a per-iteration series.
void emit_trace_series(const IterationTrace& trace, TraceQuantity quantity,
                       double lambda1, double lambdan, std::ostream& out);

}  // namespace qgm
