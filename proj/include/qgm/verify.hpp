#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qgm::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Asymptotic / structural checks on canned scenarios. Each returns a single
// pass/fail with a short numeric summary.
CheckResult check_two_dim_termination(int trials = 500, std::uint64_t seed = 2026);
CheckResult check_tilde_exact_2d(std::uint64_t seed = 2026);
CheckResult check_root_oracle(int problems = 100, std::uint64_t seed = 2026);
CheckResult check_root_properties(int trials = 1000, std::uint64_t seed = 2026);
CheckResult check_recurrence_fidelity(int trajectories = 100, std::uint64_t seed = 2026);
CheckResult check_weight_transform_limit(int starts = 50, std::uint64_t seed = 2026);
CheckResult check_tilde_limit(std::uint64_t seed = 2026);
CheckResult check_family_limit(std::uint64_t seed = 2026);
CheckResult check_rlinear_envelope(int problems = 20, std::uint64_t seed = 2026);
CheckResult check_stepsize_property(std::uint64_t seed = 2026);
CheckResult check_snapshot_attractor(std::uint64_t seed = 2026);
CheckResult check_desk_scale_benchmark(std::uint64_t seed = 2026);
CheckResult check_matvec_accounting(std::uint64_t seed = 2026);
CheckResult check_matrix_market_smoke(const std::string& fixture_dir);

// The theory-facing subset, used by `bench verify`.
std::vector<CheckResult> run_theory_suite(std::uint64_t seed = 2026);

}  // namespace qgm::verify
