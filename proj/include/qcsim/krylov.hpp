#pragma once

#include <functional>
#include <vector>

namespace qcsim {

using LinearOperator = std::function<void(const std::vector<double>& x, std::vector<double>& y)>;

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;  ///< true residual ||b - Ax|| / ||b|| at exit
  std::vector<double> history;     ///< recurrence residual estimate per iteration
};

/// MINRES for symmetric (possibly indefinite) systems, started from the
/// incoming x. Restarts from the current iterate when the recurrence
/// estimate and the true residual disagree at the tolerance.
///
/// With `deterministic` false, inner products over long vectors are split
/// across hardware threads, so the last bits depend on the thread count.
KrylovResult minres(const LinearOperator& A, const std::vector<double>& b, std::vector<double>& x, double tol,
                    int max_iter, bool deterministic = true);

double dot(const std::vector<double>& a, const std::vector<double>& b, bool deterministic = true);

}  // namespace qcsim
