#pragma once

#include <cstdint>
#include <iosfwd>

namespace magguide {

// Runs the randomized and analytic invariant suites of all modules, printing
// one line per check to `out`. Deterministic: same seed, same report.
// eps_stab is the stability band used wherever classification is involved.
// Returns true iff every check passed.
[[nodiscard]] bool run_verification(std::uint64_t seed, double eps_stab, std::ostream& out);

}  // namespace magguide
