#include "iralat/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iralat {

namespace {

constexpr double kEps = 1e-9;

// Tableau simplex on  max c'x, A x + s = b, x,s >= 0, with artificial
// variables for rows whose b is negative (phase 1), Bland's rule.
class Tableau {
  public:
    Tableau(const std::vector<std::vector<double>>& a,
            const std::vector<double>& b, const std::vector<double>& c)
        : m_(a.size()), n_(c.size()) {
        // flip rows with negative b so all right-hand sides are nonnegative
        std::vector<std::vector<double>> rows = a;
        std::vector<double> rhs = b;
        std::vector<int> flipped(m_, 0);
        for (std::size_t i = 0; i < m_; ++i)
            if (rhs[i] < 0.0) {
                for (auto& v : rows[i]) v = -v;
                rhs[i] = -rhs[i];
                flipped[i] = 1;
            }
        // columns: n structural, m slack (sign depends on flip), m artificial
        cols_ = n_ + m_ + m_;
        t_.assign(m_ + 1, std::vector<double>(cols_ + 1, 0.0));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) t_[i][j] = rows[i][j];
            t_[i][n_ + i] = flipped[i] ? -1.0 : 1.0;
            t_[i][n_ + m_ + i] = 1.0;
            t_[i][cols_] = rhs[i];
            basis_[i] = static_cast<int>(n_ + m_ + i);
        }
        obj_ = c;
    }

    bool solve(LpResult& out) {
        // phase 1: minimize the sum of artificials
        std::vector<double> phase1(cols_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) phase1[n_ + m_ + i] = -1.0;
        set_objective(phase1);
        run();
        if (t_[m_][cols_] < -1e-7) return false;  // infeasible
        // drive leftover artificial basics out where possible
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < static_cast<int>(n_ + m_)) continue;
            bool pivoted = false;
            for (std::size_t j = 0; j < n_ + m_ && !pivoted; ++j)
                if (std::abs(t_[i][j]) > kEps) {
                    pivot(i, j);
                    pivoted = true;
                }
        }
        // phase 2
        std::vector<double> phase2(cols_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) phase2[j] = obj_[j];
        set_objective(phase2);
        block_artificials();
        if (!run()) return false;  // unbounded
        out.feasible = true;
        out.objective = t_[m_][cols_];
        out.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < static_cast<int>(n_)) out.x[basis_[i]] = t_[i][cols_];
        return true;
    }

  private:
    void set_objective(const std::vector<double>& c) {
        for (std::size_t j = 0; j <= cols_; ++j) t_[m_][j] = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) t_[m_][j] = -c[j];
        // restore reduced costs for the current basis
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) t_[m_][j] += cb * t_[i][j];
        }
    }

    void block_artificials() { artificial_blocked_ = true; }

    bool run() {
        for (std::size_t iter = 0; iter < 20000; ++iter) {
            // Bland: smallest-index entering column with negative reduced cost
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (artificial_blocked_ && j >= n_ + m_) break;
                if (t_[m_][j] < -kEps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) return true;  // optimal
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (t_[i][enter] <= kEps) continue;
                const double ratio = t_[i][cols_] / t_[i][enter];
                if (ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 &&
                     (leave == m_ || basis_[i] < basis_[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return false;  // unbounded
            pivot(leave, enter);
        }
        throw std::runtime_error("lp_solve: iteration limit reached");
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = t_[row][col];
        for (std::size_t j = 0; j <= cols_; ++j) t_[row][j] /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            const double f = t_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[row][j];
        }
        basis_[row] = static_cast<int>(col);
    }

    std::size_t m_, n_, cols_ = 0;
    std::vector<std::vector<double>> t_;
    std::vector<int> basis_;
    std::vector<double> obj_;
    bool artificial_blocked_ = false;
};

}  // namespace

LpResult lp_solve(const std::vector<std::vector<double>>& a,
                  const std::vector<double>& b, const std::vector<double>& c) {
    if (a.size() != b.size())
        throw std::invalid_argument("lp_solve: row count mismatch");
    for (const auto& row : a)
        if (row.size() != c.size())
            throw std::invalid_argument("lp_solve: column count mismatch");
    LpResult out;
    Tableau t(a, b, c);
    if (!t.solve(out)) out.feasible = false;
    return out;
}

}  // namespace iralat
