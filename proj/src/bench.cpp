#include "qgm/bench.hpp"

#include "qgm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qgm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::string format(const char* fmt, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), fmt, value);
    return buffer;
}

std::string stem_of(const std::string& path) {
    const size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

MethodSpec parse_method(const std::string& name) {
    MethodSpec spec;
    spec.name = name;
    if (name == "sd") spec.fixed = Method::Sd;
    else if (name == "mg") spec.fixed = Method::Mg;
    else if (name == "bb1") spec.fixed = Method::Bb1;
    else if (name == "bb2") spec.fixed = Method::Bb2;
    else if (name == "dai_yang") spec.fixed = Method::DaiYang;
    else if (name == "dy") spec.fixed = Method::DaiYuan;
    else if (name == "psi") spec.fixed = Method::PsiFamily;
    else if (name == "ac") spec.short_step = ShortStep::AlphaTilde;
    else if (name == "ac_beta") spec.short_step = ShortStep::BetaTilde;
    else if (name == "ac_gamma") spec.short_step = ShortStep::GammaTilde;
    else throw std::invalid_argument("bench: unknown method: " + name);
    return spec;
}

ExperimentPlan parse_plan(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    if (!doc.is_object()) throw std::invalid_argument("plan: top level must be an object");
    static const std::set<std::string> known = {
        "families", "kappas", "epsilons", "methods", "matrices",
        "symmetrize", "n",     "runs",     "seed",    "tau",
        "r",        "max_iter",
    };
    for (const auto& item : doc.items()) {
        if (!known.count(item.key()))
            throw std::invalid_argument("plan: unknown key: " + item.key());
    }

    ExperimentPlan plan;
    if (doc.contains("families")) plan.families = doc["families"].get<std::vector<int>>();
    if (doc.contains("kappas")) plan.kappas = doc["kappas"].get<std::vector<double>>();
    if (doc.contains("epsilons")) plan.epsilons = doc["epsilons"].get<std::vector<double>>();
    if (doc.contains("methods")) plan.methods = doc["methods"].get<std::vector<std::string>>();
    if (doc.contains("matrices")) plan.matrices = doc["matrices"].get<std::vector<std::string>>();
    if (doc.contains("symmetrize")) plan.symmetrize_general = doc["symmetrize"].get<bool>();
    if (doc.contains("n")) plan.n = doc["n"].get<int>();
    if (doc.contains("runs")) plan.runs = doc["runs"].get<int>();
    if (doc.contains("seed")) plan.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("tau")) plan.tau = doc["tau"].get<double>();
    if (doc.contains("r")) plan.r = doc["r"].get<int>();
    if (doc.contains("max_iter")) plan.max_iter = doc["max_iter"].get<long>();

    if (plan.methods.empty()) throw std::invalid_argument("plan: methods required");
    if (plan.epsilons.empty()) throw std::invalid_argument("plan: epsilons required");
    const bool has_synthetic = !plan.families.empty() && !plan.kappas.empty();
    if (!has_synthetic && plan.matrices.empty())
        throw std::invalid_argument("plan: need families+kappas or matrices");
    if (plan.runs < 1) throw std::invalid_argument("plan: runs must be >= 1");
    for (const auto& m : plan.methods) parse_method(m);
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("plan: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_plan(buffer.str());
}

bool ResultTable::any_failure() const {
    for (const auto& row : rows)
        for (RunStatus s : row.statuses)
            if (s == RunStatus::Degenerate) return true;
    return false;
}

namespace {

IterationTrace solve_with(const MethodSpec& method, const QuadraticProblem& problem,
                          const Eigen::VectorXd& x0, const ExperimentPlan& plan,
                          double epsilon) {
    SolverConfig config;
    config.epsilon = epsilon;
    config.max_iter = plan.max_iter;
    config.tau = plan.tau;
    config.r = plan.r;
    if (method.fixed) return run_fixed_rule(problem, x0, *method.fixed, config);
    config.short_step = *method.short_step;
    return run_adaptive_cyclic(problem, x0, config);
}

// One cell: a (problem, epsilon) pair solved by every method with shared
// per-run starts. Returns one row per method, in plan order.
std::vector<CellResult> run_cell(const QuadraticProblem& base, const std::string& problem_name,
                                 double kappa, double epsilon, const ExperimentPlan& plan,
                                 const std::vector<std::uint64_t>& run_seeds) {
    std::vector<MethodSpec> methods;
    methods.reserve(plan.methods.size());
    for (const auto& m : plan.methods) methods.push_back(parse_method(m));

    std::vector<CellResult> rows(methods.size());
    for (size_t mi = 0; mi < methods.size(); ++mi) {
        rows[mi].problem = problem_name;
        rows[mi].kappa = kappa;
        rows[mi].epsilon = epsilon;
        rows[mi].method = methods[mi].name;
        rows[mi].n_runs = plan.runs;
    }

    for (int run = 0; run < plan.runs; ++run) {
        Rng rng(run_seeds[static_cast<size_t>(run)]);
        const Eigen::VectorXd x_star = rng.uniform_vector(base.dim(), -10.0, 10.0);
        const Eigen::VectorXd x0 = rng.uniform_vector(base.dim(), -10.0, 10.0);
        const QuadraticProblem problem = base.with_rhs(base.matvec(x_star), x_star);
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            const IterationTrace trace = solve_with(methods[mi], problem, x0, plan, epsilon);
            rows[mi].iters.push_back(trace.iterations);
            rows[mi].statuses.push_back(trace.status);
            rows[mi].mean_iters += static_cast<double>(trace.iterations);
            rows[mi].mean_matvecs += static_cast<double>(trace.matvecs);
            rows[mi].mean_seconds += trace.seconds;
        }
    }
    for (auto& row : rows) {
        row.mean_iters /= plan.runs;
        row.mean_matvecs /= plan.runs;
        row.mean_seconds /= plan.runs;
    }
    return rows;
}

}  // namespace

ResultTable run_plan(const ExperimentPlan& plan, int jobs) {
    std::vector<std::function<std::vector<CellResult>()>> tasks;

    for (int family : plan.families) {
        for (double kappa : plan.kappas) {
            SpectrumSpec spec;
            spec.family = family;
            spec.kappa = kappa;
            spec.dim = plan.n;
            spec.seed = derive_seed(plan.seed, {1, static_cast<std::uint64_t>(family), bits(kappa)});
            const QuadraticProblem base = generate_spectrum(spec);
            const std::string name = "family" + std::to_string(family);
            for (double epsilon : plan.epsilons) {
                std::vector<std::uint64_t> run_seeds;
                for (int run = 0; run < plan.runs; ++run)
                    run_seeds.push_back(derive_seed(
                        plan.seed, {2, static_cast<std::uint64_t>(family), bits(kappa),
                                    bits(epsilon), static_cast<std::uint64_t>(run)}));
                tasks.push_back([=]() { return run_cell(base, name, kappa, epsilon, plan, run_seeds); });
            }
        }
    }
    for (size_t pi = 0; pi < plan.matrices.size(); ++pi) {
        const QuadraticProblem base = load_matrix_market(plan.matrices[pi], plan.symmetrize_general);
        const std::string name = stem_of(plan.matrices[pi]);
        for (double epsilon : plan.epsilons) {
            std::vector<std::uint64_t> run_seeds;
            for (int run = 0; run < plan.runs; ++run)
                run_seeds.push_back(derive_seed(plan.seed, {3, pi, bits(epsilon),
                                                            static_cast<std::uint64_t>(run)}));
            tasks.push_back([=]() { return run_cell(base, name, kNaN, epsilon, plan, run_seeds); });
        }
    }

    std::vector<std::vector<CellResult>> results(tasks.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
    } else {
        for (size_t start = 0; start < tasks.size(); start += static_cast<size_t>(jobs)) {
            const size_t end = std::min(tasks.size(), start + static_cast<size_t>(jobs));
            std::vector<std::future<std::vector<CellResult>>> futures;
            for (size_t i = start; i < end; ++i)
                futures.push_back(std::async(std::launch::async, tasks[i]));
            for (size_t i = start; i < end; ++i) results[i] = futures[i - start].get();
        }
    }

    ResultTable table;
    for (auto& rows : results)
        for (auto& row : rows) table.rows.push_back(std::move(row));
    return table;
}

void emit_csv(const ResultTable& table, std::ostream& out) {
    out << "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs\n";
    for (const auto& row : table.rows) {
        out << row.problem << ',';
        if (!std::isnan(row.kappa)) out << format("%.12g", row.kappa);
        out << ',' << format("%.12g", row.epsilon) << ',' << row.method << ','
            << format("%.6f", row.mean_iters) << ',' << format("%.6f", row.mean_matvecs) << ','
            << format("%.6f", row.mean_seconds) << ',' << row.n_runs << '\n';
    }
}

ResultTable parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs")
        throw std::invalid_argument("csv: missing or unexpected header");
    ResultTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (ss.eof() && !line.empty() && line.back() == ',') fields.push_back("");
        if (fields.size() != 8) throw std::invalid_argument("csv: bad row: " + line);
        CellResult row;
        row.problem = fields[0];
        row.kappa = fields[1].empty() ? kNaN : std::stod(fields[1]);
        row.epsilon = std::stod(fields[2]);
        row.method = fields[3];
        row.mean_iters = std::stod(fields[4]);
        row.mean_matvecs = std::stod(fields[5]);
        row.mean_seconds = std::stod(fields[6]);
        row.n_runs = std::stoi(fields[7]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void emit_markdown(const ResultTable& table, std::ostream& out) {
    std::vector<std::pair<std::string, double>> groups;
    for (const auto& row : table.rows) {
        std::pair<std::string, double> key{row.problem, row.kappa};
        bool seen = false;
        for (const auto& g : groups)
            seen = seen || (g.first == key.first &&
                            (g.second == key.second ||
                             (std::isnan(g.second) && std::isnan(key.second))));
        if (!seen) groups.push_back(key);
    }
    bool first_group = true;
    for (const auto& group : groups) {
        auto in_group = [&](const CellResult& row) {
            return row.problem == group.first &&
                   (row.kappa == group.second ||
                    (std::isnan(row.kappa) && std::isnan(group.second)));
        };
        std::vector<std::string> methods;
        std::vector<double> epsilons;
        for (const auto& row : table.rows) {
            if (!in_group(row)) continue;
            if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
                methods.push_back(row.method);
            if (std::find(epsilons.begin(), epsilons.end(), row.epsilon) == epsilons.end())
                epsilons.push_back(row.epsilon);
        }
        if (!first_group) out << '\n';
        first_group = false;
        out << "## " << group.first;
        if (!std::isnan(group.second)) out << ", kappa = " << format("%.12g", group.second);
        out << "\n\n| epsilon |";
        for (const auto& m : methods) out << ' ' << m << " |";
        out << "\n|---|";
        for (size_t i = 0; i < methods.size(); ++i) out << "---|";
        out << '\n';
        for (double eps : epsilons) {
            out << "| " << format("%.12g", eps) << " |";
            for (const auto& m : methods) {
                for (const auto& row : table.rows) {
                    if (in_group(row) && row.epsilon == eps && row.method == m) {
                        out << ' ' << format("%.1f", row.mean_iters) << " |";
                        break;
                    }
                }
            }
            out << '\n';
        }
    }
}

TraceQuantity parse_trace_quantity(const std::string& name) {
    if (name == "alpha_tilde_dev") return TraceQuantity::AlphaTildeDev;
    if (name == "alpha_dev") return TraceQuantity::AlphaDev;
    if (name == "gnorm") return TraceQuantity::Gnorm;
    throw std::invalid_argument("bench: unknown trace quantity: " + name);
}

void emit_trace_series(const IterationTrace& trace, TraceQuantity quantity,
                       double lambda1, double lambdan, std::ostream& out) {
    out << "k,value\n";
    auto emit = [&](size_t k, double value) {
        out << k << ',' << format("%.17g", value) << '\n';
    };
    switch (quantity) {
        case TraceQuantity::AlphaTildeDev:
            for (size_t k = 0; k < trace.alpha_tilde.size(); ++k)
                if (!std::isnan(trace.alpha_tilde[k]))
                    emit(k, std::abs(trace.alpha_tilde[k] - 1.0 / lambdan));
            break;
        case TraceQuantity::AlphaDev:
            for (size_t k = 0; k < trace.alpha.size(); ++k)
                emit(k, std::abs(trace.alpha[k] - 2.0 / (lambda1 + lambdan)));
            break;
        case TraceQuantity::Gnorm:
            for (size_t k = 0; k < trace.gnorm.size(); ++k) emit(k, trace.gnorm[k]);
            break;
    }
}

}  // namespace qgm
