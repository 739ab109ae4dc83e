// Acceptance gate: every criterion below must print PASS. Each check is a
// self-contained scenario with its own tolerance; details carry the worst
// observed quantity so a failure is diagnosable from the log alone.
#include "qgm/verify.hpp"

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

int main() {
    using qgm::verify::CheckResult;
    const std::string data_dir = QGM_TEST_DATA_DIR;

    const std::vector<std::function<CheckResult()>> checks = {
        [] { return qgm::verify::check_two_dim_termination(); },
        [] { return qgm::verify::check_tilde_exact_2d(); },
        [] { return qgm::verify::check_root_oracle(); },
        [] { return qgm::verify::check_root_properties(); },
        [] { return qgm::verify::check_recurrence_fidelity(); },
        [] { return qgm::verify::check_weight_transform_limit(); },
        [] { return qgm::verify::check_tilde_limit(); },
        [] { return qgm::verify::check_family_limit(); },
        [] { return qgm::verify::check_rlinear_envelope(); },
        [] { return qgm::verify::check_stepsize_property(); },
        [] { return qgm::verify::check_snapshot_attractor(); },
        [] { return qgm::verify::check_matvec_accounting(); },
        [] { return qgm::verify::check_desk_scale_benchmark(); },
        [&] { return qgm::verify::check_matrix_market_smoke(data_dir); },
    };

    int failures = 0;
    for (const auto& run : checks) {
        const CheckResult result = run();
        std::printf("[%s] %-24s %s (%.2fs)\n", result.pass ? "PASS" : "FAIL",
                    result.name.c_str(), result.detail.c_str(), result.seconds);
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
