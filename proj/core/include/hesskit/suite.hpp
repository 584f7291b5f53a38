#pragma once

// Verification suites: named families of cases that generate inputs from a
// seed, run the verifiers and collect the reports in case order.

#include "hesskit/error.hpp"
#include "hesskit/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hesskit {

/// Raised for parameter combinations a suite cannot run with.
class UsageError : public Error {
public:
    using Error::Error;
};

struct SuiteConfig {
    std::string suite = "all";
    std::optional<int> n, k, l;
    std::optional<double> q;
    std::optional<double> radius;
    std::optional<int> samples;   ///< radial samples for witnesses and closed-form checks
    std::optional<int> grid;      ///< grid cells across the ball diameter (coarse level)
    std::optional<int> family;    ///< members in random families
    std::uint64_t seed = 1;
    std::optional<double> tol;    ///< pass tolerance of sharp-constant reports
    std::optional<std::filesystem::path> measure;
    std::optional<std::filesystem::path> field;
    std::optional<std::filesystem::path> out;
    bool csv = false;

    /// Throws UsageError naming the violated invariant.
    void validate() const;
};

/// Suite names accepted by run_suite, "all" last.
[[nodiscard]] const std::vector<std::string>& suite_names();

/// Reason a suite cannot run under `config`, or nothing when it can.
[[nodiscard]] std::optional<std::string> suite_precondition(const std::string& suite, const SuiteConfig& config);

/// Runs one suite, or every runnable suite for "all" (the others are listed
/// as skipped). Throws UsageError when a named suite's precondition fails.
[[nodiscard]] ReportDocument run_suite(const SuiteConfig& config);

[[nodiscard]] std::string toolkit_version();

/// Worker threads: HESSKIT_THREADS when set to a positive integer, else the
/// hardware concurrency.
[[nodiscard]] unsigned worker_count();

} // namespace hesskit
