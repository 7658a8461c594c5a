#pragma once

#include <cstdint>
#include <iosfwd>

namespace codegraph::cli {

// Entry point for the `codegraph` binary. Dispatches to one subcommand and
// returns the process exit code: 0 on success, 1 on a domain error (reported
// as a JSON diagnostic on stderr), 2 on a usage error.
int run(int argc, const char* const* argv);

struct SelfcheckReport {
    double permutation_deviation = 0.0;
    double gradient_error = 0.0;
    bool passed = false;
};

// Runs the built-in numeric checks (GGNN permutation invariance and the
// finite-difference gradient comparison) on self-contained fixtures and
// writes one [PASS]/[FAIL] line per check.
SelfcheckReport run_selfcheck(std::size_t dims, std::uint64_t seed, std::ostream& out);

} // namespace codegraph::cli
