#pragma once

#include <iosfwd>

namespace ncl {

// Ten-point release checklist covering counting statistics, both solvers,
// the oracle simulators, and the analytic bounds.  Prints one [PASS] or
// [FAIL] line per criterion to `os` plus a closing tally, and returns the
// number of failed criteria.  Every tolerance is pinned here, not
// configurable.
int run_acceptance(std::ostream& os);

}  // namespace ncl
