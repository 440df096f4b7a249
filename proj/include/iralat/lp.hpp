#pragma once

#include <vector>

namespace iralat {

/// Dense two-phase simplex for  max c'x  s.t.  A x <= b,  x >= 0.
/// Small problems only (the degree-distribution fits have a few dozen
/// variables and ~100 constraints).
struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

LpResult lp_solve(const std::vector<std::vector<double>>& a,
                  const std::vector<double>& b, const std::vector<double>& c);

}  // namespace iralat
