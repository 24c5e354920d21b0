#include "qcsim/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

namespace qcsim {

double dot(const std::vector<double>& a, const std::vector<double>& b, bool deterministic)
{
  const std::size_t n = a.size();
  constexpr std::size_t kParallelThreshold = 1 << 16;
  if (deterministic || n < kParallelThreshold) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::future<double>> parts;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t hi = std::min(n, lo + chunk);
    parts.push_back(std::async(std::launch::async, [&, lo, hi] {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
      return s;
    }));
  }
  double s = 0.0;
  for (auto& p : parts) s += p.get();
  return s;
}

namespace {

void axpy(double s, const std::vector<double>& x, std::vector<double>& y)
{
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

double true_residual(const LinearOperator& A, const std::vector<double>& b, const std::vector<double>& x,
                     std::vector<double>& r, bool det)
{
  A(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return std::sqrt(dot(r, r, det));
}

}  // namespace

KrylovResult minres(const LinearOperator& A, const std::vector<double>& b, std::vector<double>& x, double tol,
                    int max_iter, bool det)
{
  KrylovResult res;
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b, det));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r1(n), r2(n), y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  constexpr int kMaxRestarts = 5;
  for (int restart = 0; restart <= kMaxRestarts && res.iterations < max_iter; ++restart) {
    const double beta1 = true_residual(A, b, x, r1, det);
    res.relative_residual = beta1 / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    r2 = r1;
    y = r1;
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0;

    for (int k = 0; res.iterations < max_iter; ++k) {
      ++res.iterations;
      const double s = 1.0 / beta;
      for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
      A(v, y);
      if (k >= 1) axpy(-beta / oldb, r1, y);
      const double alfa = dot(v, y, det);
      axpy(-alfa / beta, r2, y);
      std::swap(r1, r2);
      r2 = y;
      oldb = beta;
      beta = std::sqrt(dot(r2, r2, det));

      const double oldeps = epsln;
      const double delta = cs * dbar + sn * alfa;
      const double gbar = sn * dbar - cs * alfa;
      epsln = sn * beta;
      dbar = -cs * beta;
      const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
      cs = gbar / gamma;
      sn = beta / gamma;
      const double phi = cs * phibar;
      phibar = sn * phibar;

      std::swap(w1, w2);  // w1 <- old w2
      std::swap(w2, w);   // w2 <- old w
      const double inv_gamma = 1.0 / gamma;
      for (std::size_t i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * inv_gamma;
      axpy(phi, w, x);

      res.history.push_back(phibar / bnorm);
      if (phibar / bnorm <= tol || beta == 0.0) break;
    }
  }

  res.relative_residual = true_residual(A, b, x, r1, det) / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

}  // namespace qcsim
