#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace iralat {

using ProbVec = std::vector<double>;
using LlrVec = std::vector<double>;

constexpr double kProbClip = 1e-300;

inline ProbVec uniform_prob(int m) {
    return ProbVec(m, 1.0 / static_cast<double>(m));
}

inline ProbVec point_mass(int m, int k) {
    ProbVec p(m, 0.0);
    p[k] = 1.0;
    return p;
}

inline void normalize(ProbVec& p) {
    double sum = 0.0;
    for (double& v : p) {
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (sum <= 0.0) {
        const double u = 1.0 / static_cast<double>(p.size());
        for (double& v : p) v = u;
        return;
    }
    for (double& v : p) v /= sum;
}

inline bool is_valid_prob(const ProbVec& p, double tol = 1e-9) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

/// w_k = log(p_0 / p_k); w_0 == 0 by construction.
inline LlrVec prob_to_llr(const ProbVec& p) {
    LlrVec w(p.size());
    const double p0 = std::max(p[0], kProbClip);
    for (std::size_t k = 0; k < p.size(); ++k)
        w[k] = std::log(p0 / std::max(p[k], kProbClip));
    return w;
}

inline ProbVec llr_to_prob(const LlrVec& w) {
    ProbVec p(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) p[k] = std::exp(-w[k]);
    normalize(p);
    return p;
}

inline int hard_decision(const ProbVec& p) {
    int best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best]) best = static_cast<int>(k);
    return best;
}

}  // namespace iralat
