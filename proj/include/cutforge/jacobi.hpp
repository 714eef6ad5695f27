#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cutforge {

struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major n x n; column j pairs with values[j]
};

// Cyclic Jacobi eigensolver for dense symmetric matrices (row-major input).
// Sweeps until every off-diagonal magnitude is at or below `tol`.
inline SymmetricEigen jacobi_eigensolver(std::vector<double> a, int n,
                                         bool want_vectors = false,
                                         double tol = 1e-12, int max_sweeps = 100) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw std::invalid_argument("jacobi_eigensolver: bad matrix size");
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  };

  std::vector<double> v;
  if (want_vectors) {
    v.assign(a.size(), 0.0);
    for (int i = 0; i < n; ++i)
      v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = 1.0;
  }
  auto vat = [&](int i, int j) -> double& {
    return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(p, q)));
    if (off <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= tol) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = at(p, p);
        const double aqq = at(q, q);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = akp - s * (akq + tau * akp);
          at(p, k) = at(k, p);
          at(k, q) = akq + s * (akp - tau * akq);
          at(q, k) = at(k, q);
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = vat(k, p);
            const double vkq = vat(k, q);
            vat(k, p) = vkp - s * (vkq + tau * vkp);
            vat(k, q) = vkq + s * (vkp - tau * vkq);
          }
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = at(i, i);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return out.values[static_cast<std::size_t>(i)] < out.values[static_cast<std::size_t>(j)]; });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = out.values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  out.values = std::move(sorted);

  if (want_vectors) {
    out.vectors.assign(v.size(), 0.0);
    for (int j = 0; j < n; ++j) {
      const int src = order[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i)
        out.vectors[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
            v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(src)];
    }
  }
  return out;
}

}  // namespace cutforge
