#include "qgm/bench.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace qgm;

namespace {
const std::string kDataDir = QGM_TEST_DATA_DIR;

bool tables_equal_ignoring_seconds(const ResultTable& a, const ResultTable& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        const bool kappa_same =
            (std::isnan(x.kappa) && std::isnan(y.kappa)) || x.kappa == y.kappa;
        if (x.problem != y.problem || !kappa_same || x.epsilon != y.epsilon ||
            x.method != y.method || x.mean_iters != y.mean_iters ||
            x.mean_matvecs != y.mean_matvecs || x.n_runs != y.n_runs)
            return false;
    }
    return true;
}
}  // namespace

TEST_CASE("method names parse to the right drivers") {
    CHECK(parse_method("sd").fixed == Method::Sd);
    CHECK(parse_method("mg").fixed == Method::Mg);
    CHECK(parse_method("bb1").fixed == Method::Bb1);
    CHECK(parse_method("bb2").fixed == Method::Bb2);
    CHECK(parse_method("dai_yang").fixed == Method::DaiYang);
    CHECK(parse_method("dy").fixed == Method::DaiYuan);
    CHECK(parse_method("psi").fixed == Method::PsiFamily);
    CHECK(parse_method("ac").short_step == ShortStep::AlphaTilde);
    CHECK(parse_method("ac_beta").short_step == ShortStep::BetaTilde);
    CHECK(parse_method("ac_gamma").short_step == ShortStep::GammaTilde);
    CHECK_FALSE(parse_method("ac").fixed.has_value());
    CHECK_THROWS(parse_method("newton"));
}

TEST_CASE("plan JSON parses with defaults and strict keys") {
    const auto plan = parse_plan(R"({
        "families": [1, 4],
        "kappas": [1e4, 1e5],
        "epsilons": [1e-6],
        "methods": ["ac", "bb1"],
        "n": 100,
        "runs": 3,
        "seed": 9,
        "tau": 0.25,
        "r": 4,
        "max_iter": 5000
    })");
    CHECK(plan.families == std::vector<int>{1, 4});
    CHECK(plan.kappas == std::vector<double>{1e4, 1e5});
    CHECK(plan.methods == std::vector<std::string>{"ac", "bb1"});
    CHECK(plan.n == 100);
    CHECK(plan.runs == 3);
    CHECK(plan.seed == 9);
    CHECK(plan.tau == 0.25);
    CHECK(plan.r == 4);
    CHECK(plan.max_iter == 5000);

    const auto defaults = parse_plan(
        R"({"families":[1],"kappas":[100],"epsilons":[1e-6],"methods":["sd"]})");
    CHECK(defaults.n == 1000);
    CHECK(defaults.runs == 10);
    CHECK(defaults.tau == 0.3);
    CHECK(defaults.r == 5);

    CHECK_THROWS(parse_plan(R"({"families":[1],"kappas":[100],"epsilons":[1e-6],
                                "methods":["sd"],"kapas":[1]})"));  // typo rejected
    CHECK_THROWS(parse_plan(R"({"families":[1],"kappas":[100],"methods":["sd"]})"));
    CHECK_THROWS(parse_plan(R"({"families":[1],"kappas":[100],"epsilons":[1e-6]})"));
    CHECK_THROWS(parse_plan(R"({"epsilons":[1e-6],"methods":["sd"]})"));
    CHECK_THROWS(parse_plan(
        R"({"families":[1],"kappas":[100],"epsilons":[1e-6],"methods":["sd"],"runs":0})"));
    CHECK_THROWS(parse_plan(
        R"({"families":[1],"kappas":[100],"epsilons":[1e-6],"methods":["warp"]})"));
    CHECK_THROWS(parse_plan("[1,2,3]"));
}

TEST_CASE("plan files load and missing paths fail") {
    const std::string path = "tmp_plan.json";
    {
        std::ofstream out(path);
        out << R"({"families":[1],"kappas":[50],"epsilons":[1e-6],"methods":["bb1"],"n":10,"runs":1})";
    }
    const auto plan = load_plan(path);
    CHECK(plan.methods == std::vector<std::string>{"bb1"});
    std::remove(path.c_str());
    CHECK_THROWS(load_plan("no_such_plan.json"));
}

TEST_CASE("a small synthetic plan runs all cells with paired stats") {
    ExperimentPlan plan;
    plan.families = {1};
    plan.kappas = {16.0};
    plan.epsilons = {1e-6};
    plan.methods = {"sd", "bb1"};
    plan.n = 8;
    plan.runs = 2;
    plan.seed = 7;
    const ResultTable table = run_plan(plan);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].method == "sd");
    CHECK(table.rows[1].method == "bb1");
    for (const auto& row : table.rows) {
        CHECK(row.problem == "family1");
        CHECK(row.kappa == 16.0);
        CHECK(row.epsilon == 1e-6);
        CHECK(row.n_runs == 2);
        REQUIRE(row.iters.size() == 2);
        REQUIRE(row.statuses.size() == 2);
        for (RunStatus s : row.statuses) CHECK(s == RunStatus::Converged);
        const double mean = 0.5 * (static_cast<double>(row.iters[0]) +
                                   static_cast<double>(row.iters[1]));
        CHECK(row.mean_iters == doctest::Approx(mean).epsilon(1e-15));
        CHECK(row.mean_matvecs == doctest::Approx(row.mean_iters + 1.0).epsilon(1e-12));
    }
    CHECK_FALSE(table.any_failure());
}

TEST_CASE("plans are deterministic and job count does not change results") {
    ExperimentPlan plan;
    plan.families = {1, 4};
    plan.kappas = {64.0};
    plan.epsilons = {1e-6, 1e-8};
    plan.methods = {"ac", "bb1"};
    plan.n = 12;
    plan.runs = 2;
    plan.seed = 123;
    const ResultTable a = run_plan(plan, 1);
    const ResultTable b = run_plan(plan, 1);
    const ResultTable c = run_plan(plan, 3);
    CHECK(tables_equal_ignoring_seconds(a, b));
    CHECK(tables_equal_ignoring_seconds(a, c));
    REQUIRE(a.rows.size() == 8);  // 2 families x 1 kappa x 2 epsilons x 2 methods
}

TEST_CASE("matrix cells carry the file stem and no condition number") {
    ExperimentPlan plan;
    plan.matrices = {kDataDir + "/small_sym.mtx"};
    plan.methods = {"bb1"};
    plan.epsilons = {1e-8};
    plan.runs = 2;
    plan.seed = 5;
    const ResultTable table = run_plan(plan);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].problem == "small_sym");
    CHECK(std::isnan(table.rows[0].kappa));
    CHECK_FALSE(table.any_failure());
}

TEST_CASE("max_iter runs are reported, not hidden") {
    ExperimentPlan plan;
    plan.families = {1};
    plan.kappas = {1e4};
    plan.epsilons = {1e-10};
    plan.methods = {"sd"};  // SD cannot meet 1e-10 on kappa 1e4 in 5 iterations
    plan.n = 20;
    plan.runs = 1;
    plan.max_iter = 5;
    const ResultTable table = run_plan(plan);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].statuses[0] == RunStatus::MaxIter);
    CHECK(table.rows[0].mean_iters == doctest::Approx(5.0));
    CHECK_FALSE(table.any_failure());  // MaxIter is reported but is not degeneracy
}

TEST_CASE("csv emission matches the frozen golden format") {
    ResultTable table;
    CellResult synthetic;
    synthetic.problem = "family1";
    synthetic.kappa = 100.0;
    synthetic.epsilon = 1e-6;
    synthetic.method = "ac";
    synthetic.mean_iters = 12.5;
    synthetic.mean_matvecs = 13.5;
    synthetic.mean_seconds = 0.001234;
    synthetic.n_runs = 10;
    CellResult matrix;
    matrix.problem = "laplace2d";
    matrix.kappa = std::nan("");
    matrix.epsilon = 1e-9;
    matrix.method = "bb1";
    matrix.mean_iters = 80.0;
    matrix.mean_matvecs = 81.0;
    matrix.mean_seconds = 0.25;
    matrix.n_runs = 3;
    table.rows = {synthetic, matrix};

    std::ostringstream out;
    emit_csv(table, out);
    CHECK(out.str() ==
          "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs\n"
          "family1,100,1e-06,ac,12.500000,13.500000,0.001234,10\n"
          "laplace2d,,1e-09,bb1,80.000000,81.000000,0.250000,3\n");

    std::istringstream in(out.str());
    const ResultTable parsed = parse_csv(in);
    REQUIRE(parsed.rows.size() == 2);
    CHECK(tables_equal_ignoring_seconds(parsed, table));
    CHECK(parsed.rows[0].mean_seconds == doctest::Approx(0.001234));
    CHECK(std::isnan(parsed.rows[1].kappa));
}

TEST_CASE("empty tables emit a header-only csv") {
    std::ostringstream out;
    emit_csv(ResultTable{}, out);
    CHECK(out.str() ==
          "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs\n");
    std::istringstream in(out.str());
    CHECK(parse_csv(in).rows.empty());
}

TEST_CASE("csv parser rejects malformed input") {
    std::istringstream bad_header("wrong,header\n");
    CHECK_THROWS(parse_csv(bad_header));
    std::istringstream bad_row(
        "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs\n"
        "family1,100,1e-06,ac,12.5\n");
    CHECK_THROWS(parse_csv(bad_row));
}

TEST_CASE("markdown emission groups by problem and condition number") {
    ResultTable table;
    for (const char* method : {"ac", "bb1"}) {
        for (double eps : {1e-6, 1e-9}) {
            CellResult row;
            row.problem = "family1";
            row.kappa = 1e4;
            row.epsilon = eps;
            row.method = method;
            row.mean_iters = eps == 1e-6 ? 100.0 : 200.0;
            row.n_runs = 1;
            table.rows.push_back(row);
        }
    }
    std::ostringstream out;
    emit_markdown(table, out);
    const std::string md = out.str();
    CHECK(md.find("## family1, kappa = 10000") != std::string::npos);
    CHECK(md.find("| epsilon | ac | bb1 |") != std::string::npos);
    CHECK(md.find("| 1e-06 | 100.0 | 100.0 |") != std::string::npos);
    CHECK(md.find("| 1e-09 | 200.0 | 200.0 |") != std::string::npos);
}

TEST_CASE("trace series emit the requested quantity") {
    IterationTrace trace;
    trace.alpha = {0.5, 0.25};
    trace.alpha_tilde = {std::nan(""), 0.2};
    trace.gnorm = {4.0, 2.0, 1.0};

    std::ostringstream gnorm;
    emit_trace_series(trace, TraceQuantity::Gnorm, 1.0, 3.0, gnorm);
    CHECK(gnorm.str() == "k,value\n0,4\n1,2\n2,1\n");

    std::ostringstream alpha_dev;
    emit_trace_series(trace, TraceQuantity::AlphaDev, 1.0, 3.0, alpha_dev);
    CHECK(alpha_dev.str() == "k,value\n0,0\n1,0.25\n");

    std::ostringstream tilde_dev;
    emit_trace_series(trace, TraceQuantity::AlphaTildeDev, 1.0, 3.0, tilde_dev);
    // NaN rows are skipped; |0.2 - 1/3| printed at full precision.
    CHECK(tilde_dev.str().rfind("k,value\n1,0.13333333333333", 0) == 0);

    CHECK(parse_trace_quantity("gnorm") == TraceQuantity::Gnorm);
    CHECK_THROWS(parse_trace_quantity("energy"));
}
