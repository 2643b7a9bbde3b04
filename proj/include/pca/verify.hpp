#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pca {

enum class Suite : std::uint8_t { conservation, equivalence, ising, all };

Suite parse_suite(std::string_view s);

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Self-checks run by `pcasim verify`. Random layers come from the counter generator with
// the given seed.
std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed = 1);

struct ThroughputResult {
    int n_x = 0;
    long long n_half_steps = 0;
    double seconds = 0.0;
    double site_updates_per_second = 0.0;
    std::uint64_t checksum = 0; // keeps the work observable
};

// Single-threaded packed half_step throughput, best of `repeats` timed runs.
ThroughputResult measure_half_step_rate(int n_x, long long n_half_steps, int repeats = 3, std::uint64_t seed = 1);

} // namespace pca
