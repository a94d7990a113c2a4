#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slimconv {

// Verification suites behind `check --suite ...`. Each property compares a
// measured statistic against its pinned bound; bounds come from the module
// contracts and are fixed here, not tuned at run time.

struct CheckResult {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string detail; // optional extras (per-config values etc.)
};

struct CheckOptions {
    std::uint64_t seed = 0;
    // Overrides the relative tolerance of the finite-difference agreement
    // checks only; every other bound is pinned.
    std::optional<double> fd_rel_tol;
};

std::vector<std::string> check_suite_names(); // conv shuffle sppf blocks losses activations cost

// Runs one suite, or all of them for "all". Throws on unknown suite names.
std::vector<CheckResult> run_check_suite(const std::string& suite, const CheckOptions& opts);

// Wall-clock statistics for one operator configuration; 3 warm-up runs are
// discarded, then `repeat` samples are measured.
struct BenchStats {
    double median_ms = 0.0;
    double p10_ms = 0.0;
    double p90_ms = 0.0;
    int samples = 0;
};

// op: conv_naive | conv_im2col | gsconv | sc
BenchStats bench_op(const std::string& op, int n, int c, int h, int w, int out_c, int k,
                    int repeat, std::uint64_t seed);

} // namespace slimconv
