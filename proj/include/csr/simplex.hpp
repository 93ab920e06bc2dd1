#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csr/error.hpp"

namespace csr {

// Dense two-phase simplex for: minimize c'x subject to Gx >= h, x >= 0.
// Bland's rule throughout, so it cannot cycle. Sized for the small dense
// instances this project produces (hundreds of rows), not for sparse LPs.

struct LpOptions {
  double feas_tol = 1e-9;   // phase-1 objective above this means infeasible
  double pivot_tol = 1e-12; // pivots smaller than this are treated as zero
};

enum class LpStatus { optimal, infeasible };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> dual;  // one multiplier per >= row, from the final basis
  long iterations = 0;
};

namespace detail {

class SimplexTableau {
 public:
  SimplexTableau(const std::vector<std::vector<double>>& G, const std::vector<double>& h,
                 const std::vector<double>& c, LpOptions opts)
      : m_(static_cast<int>(G.size())),
        nv_(static_cast<int>(c.size())),
        opts_(opts),
        G_(G),
        h_(h),
        c_(c) {
    // Standard form [G | -I] [x; s] = h. Rows with negative rhs are negated,
    // which makes their surplus column usable as the initial basic variable;
    // the rest get artificials.
    ncols_ = nv_ + m_;
    n_artificial_ = 0;
    for (int i = 0; i < m_; ++i) {
      if (h[i] >= 0) ++n_artificial_;
    }
    total_cols_ = ncols_ + n_artificial_;
    rows_.assign(m_, std::vector<double>(total_cols_ + 1, 0.0));
    basis_.assign(m_, -1);
    int next_artificial = ncols_;
    for (int i = 0; i < m_; ++i) {
      double sign = h[i] < 0 ? -1.0 : 1.0;
      for (int j = 0; j < nv_; ++j) rows_[i][j] = sign * G[i][j];
      rows_[i][nv_ + i] = sign * -1.0;
      rows_[i][total_cols_] = sign * h[i];
      if (h[i] < 0) {
        basis_[i] = nv_ + i;  // negated row: surplus enters with +1
      } else {
        basis_[i] = next_artificial;
        rows_[i][next_artificial] = 1.0;
        ++next_artificial;
      }
    }
  }

  LpResult solve() {
    LpResult result;

    if (n_artificial_ > 0) {
      std::vector<double> phase1_cost(total_cols_, 0.0);
      for (int j = ncols_; j < total_cols_; ++j) phase1_cost[j] = 1.0;
      run_phase(phase1_cost, /*allow_artificial=*/true, result.iterations);
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] >= ncols_) infeas += rhs(i);
      }
      if (infeas > opts_.feas_tol) {
        result.status = LpStatus::infeasible;
        return result;
      }
      expel_artificials();
    }

    std::vector<double> cost(total_cols_, 0.0);
    for (int j = 0; j < nv_; ++j) cost[j] = c_[j];
    run_phase(cost, /*allow_artificial=*/false, result.iterations);

    result.status = LpStatus::optimal;
    result.x.assign(nv_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < nv_) result.x[basis_[i]] = rhs(i);
    }
    result.objective = 0.0;
    for (int j = 0; j < nv_; ++j) result.objective += c_[j] * result.x[j];
    result.dual = extract_dual();
    return result;
  }

 private:
  double rhs(int i) const { return rows_[i][total_cols_]; }

  // Price out the basis, then Bland: entering = lowest-index column with a
  // negative reduced cost, leaving = lowest-index basic among the tightest
  // ratios.
  void run_phase(const std::vector<double>& cost, bool allow_artificial, long& iterations) {
    const long iteration_cap = 2000 + 50L * (m_ + total_cols_) * (m_ + 1);
    for (long iter = 0;; ++iter) {
      if (iter > iteration_cap) {
        throw NumericalFailureError("simplex exceeded iteration cap " +
                                    std::to_string(iteration_cap));
      }
      std::vector<double> y(m_);
      for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
      // reduced cost of column j: cost_j - y' B^{-1} col_j, with rows_ already
      // expressed in the current basis
      int entering = -1;
      for (int j = 0; j < total_cols_; ++j) {
        if (!allow_artificial && j >= ncols_) break;
        bool basic = false;
        for (int i = 0; i < m_; ++i) {
          if (basis_[i] == j) {
            basic = true;
            break;
          }
        }
        if (basic) continue;
        double red = cost[j];
        for (int i = 0; i < m_; ++i) red -= y[i] * rows_[i][j];
        if (red < -opts_.feas_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;  // optimal for this phase

      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        double a = rows_[i][entering];
        if (a > opts_.pivot_tol) {
          double ratio = rhs(i) / a;
          if (leaving < 0 || ratio < best_ratio - opts_.pivot_tol ||
              (std::abs(ratio - best_ratio) <= opts_.pivot_tol &&
               basis_[i] < basis_[leaving])) {
            leaving = i;
            best_ratio = ratio;
          }
        }
      }
      if (leaving < 0) {
        throw NumericalFailureError("simplex detected an unbounded direction");
      }
      pivot(leaving, entering);
      ++iterations;
    }
  }

  void pivot(int row, int col) {
    double p = rows_[row][col];
    if (std::abs(p) < opts_.pivot_tol) {
      throw NumericalFailureError("pivot magnitude " + std::to_string(p) + " below tolerance");
    }
    for (double& v : rows_[row]) v /= p;
    rows_[row][col] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = rows_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= total_cols_; ++j) rows_[i][j] -= f * rows_[row][j];
      rows_[i][col] = 0.0;
    }
    basis_[row] = col;
  }

  // After phase 1 an artificial can sit in the basis at level zero; [G | -I]
  // has full row rank, so every such row has a real column to pivot on.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < ncols_) continue;
      int col = -1;
      for (int j = 0; j < ncols_; ++j) {
        if (std::abs(rows_[i][j]) > opts_.pivot_tol) {
          bool basic = false;
          for (int r = 0; r < m_; ++r) {
            if (basis_[r] == j) {
              basic = true;
              break;
            }
          }
          if (!basic) {
            col = j;
            break;
          }
        }
      }
      if (col < 0) {
        throw NumericalFailureError("cannot drive artificial out of basis row " +
                                    std::to_string(i));
      }
      pivot(i, col);
    }
  }

  // Solve B'pi = c_B against the original (un-negated) standard-form columns.
  std::vector<double> extract_dual() const {
    std::vector<std::vector<double>> bt(m_, std::vector<double>(m_ + 1, 0.0));
    for (int col = 0; col < m_; ++col) {
      int j = basis_[col];
      for (int i = 0; i < m_; ++i) {
        double mij;  // original column j entry in row i
        if (j < nv_) {
          mij = G_[i][j];
        } else {
          mij = (j - nv_ == i) ? -1.0 : 0.0;
        }
        bt[col][i] = mij;  // transpose
      }
      bt[col][m_] = j < nv_ ? c_[j] : 0.0;
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      for (int r = col + 1; r < m_; ++r) {
        if (std::abs(bt[r][col]) > std::abs(bt[piv][col])) piv = r;
      }
      std::swap(bt[col], bt[piv]);
      if (std::abs(bt[col][col]) < opts_.pivot_tol) {
        throw NumericalFailureError("singular basis while extracting dual");
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        double f = bt[r][col] / bt[col][col];
        if (f == 0.0) continue;
        for (int j2 = col; j2 <= m_; ++j2) bt[r][j2] -= f * bt[col][j2];
      }
    }
    std::vector<double> pi(m_);
    for (int i = 0; i < m_; ++i) pi[i] = bt[i][m_] / bt[i][i];
    return pi;
  }

  int m_, nv_, ncols_ = 0, total_cols_ = 0, n_artificial_ = 0;
  LpOptions opts_;
  std::vector<std::vector<double>> G_;
  std::vector<double> h_, c_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> basis_;
};

}  // namespace detail

inline LpResult simplex_min_geq(const std::vector<std::vector<double>>& G,
                                const std::vector<double>& h, const std::vector<double>& c,
                                LpOptions opts = {}) {
  if (G.size() != h.size()) throw Error("simplex: row count mismatch");
  for (const auto& row : G) {
    if (row.size() != c.size()) throw Error("simplex: column count mismatch");
  }
  if (G.empty()) throw Error("simplex: empty constraint system");
  return detail::SimplexTableau(G, h, c, opts).solve();
}

}  // namespace csr
