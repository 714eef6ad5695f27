#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutforge/jacobi.hpp"
#include "cutforge/latent.hpp"
#include "cutforge/rng.hpp"

namespace cutforge {

struct CmaConfig {
  int dimension = 0;
  int population_size = 0;  // lambda
  std::vector<Bounds> bounds;
  std::int64_t max_evals_per_restart = 2000;
  int max_restarts = 10;  // additional runs beyond the first
  std::uint64_t seed = 0;
  double initial_step_size = 0.0;  // <= 0 picks 0.3 * min(hi - lo)
};

struct CmaGenerationStat {
  double best = 0.0;
  double median = 0.0;
  double sigma = 0.0;
  std::int64_t evals = 0;  // cumulative across restarts
};

struct CmaResult {
  std::vector<double> best_x;  // empty when no evaluation ever ran
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<CmaGenerationStat> history;
  std::int64_t evals = 0;
  int restarts_used = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Where a generation sits in the run: eval_base is the global index of its
// first candidate, so candidate i is evaluation eval_base + i.
struct CmaBatchInfo {
  int restart = 0;
  int generation = 0;  // 1-based within the restart
  std::int64_t eval_base = 0;
};

using BatchObjective =
    std::function<std::vector<double>(const std::vector<std::vector<double>>&, const CmaBatchInfo&)>;

namespace detail {

inline void validate_cma_config(const CmaConfig& cfg) {
  if (cfg.dimension < 1) throw std::invalid_argument("cma: dimension must be >= 1");
  if (cfg.population_size < 4) throw std::invalid_argument("cma: population_size must be >= 4");
  if (cfg.bounds.size() != static_cast<std::size_t>(cfg.dimension))
    throw std::invalid_argument("cma: bounds size must equal dimension");
  for (const Bounds& b : cfg.bounds)
    if (!(b.lo < b.hi)) throw std::invalid_argument("cma: bounds need lo < hi");
  if (cfg.max_evals_per_restart < 0) throw std::invalid_argument("cma: negative eval budget");
  if (cfg.max_restarts < 0) throw std::invalid_argument("cma: negative restart budget");
}

inline double default_sigma0(const CmaConfig& cfg) {
  if (cfg.initial_step_size > 0.0) return cfg.initial_step_size;
  double span = std::numeric_limits<double>::infinity();
  for (const Bounds& b : cfg.bounds) span = std::min(span, b.hi - b.lo);
  return 0.3 * span;
}

// Hansen's default strategy constants for positive recombination weights.
struct CmaWeights {
  std::vector<double> w;
  double mu_eff = 0.0;
  double c_sigma = 0.0, d_sigma = 0.0;
  double c_c = 0.0, c_1 = 0.0, c_mu = 0.0;
  double chi_n = 0.0;

  CmaWeights(int n, int lambda) {
    const int mu = lambda / 2;
    w.resize(static_cast<std::size_t>(mu));
    double sum = 0.0;
    for (int i = 0; i < mu; ++i) {
      w[static_cast<std::size_t>(i)] =
          std::log((static_cast<double>(lambda) + 1.0) / 2.0) - std::log(static_cast<double>(i) + 1.0);
      sum += w[static_cast<std::size_t>(i)];
    }
    double sq = 0.0;
    for (double& x : w) {
      x /= sum;
      sq += x * x;
    }
    mu_eff = 1.0 / sq;
    const double nd = n;
    c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
    d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + c_sigma;
    c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
    c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
    c_mu = std::min(1.0 - c_1,
                    2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nd + 2.0) * (nd + 2.0) + mu_eff));
    chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  }
};

// Covariance eigen-frame; refreshed lazily, eigenvalues floored to keep the
// sampler strictly positive-definite.
struct EigenFrame {
  std::vector<double> b;  // row-major, column j = eigenvector j
  std::vector<double> d;  // sqrt of floored eigenvalues

  void refresh(const std::vector<double>& c, int n) {
    SymmetricEigen eig = jacobi_eigensolver(c, n, true);
    b = std::move(eig.vectors);
    d.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      d[static_cast<std::size_t>(j)] = std::sqrt(std::max(eig.values[static_cast<std::size_t>(j)], 1e-20));
  }
};

}  // namespace detail

// Minimizes batch_f over the box. The whole generation is handed to the
// callback at once so the caller decides how to parallelize; the strategy
// update itself is sequential and deterministic per seed.
inline CmaResult cma_minimize_batch(const BatchObjective& batch_f, const CmaConfig& cfg) {
  detail::validate_cma_config(cfg);
  const int n = cfg.dimension;
  const int lambda = cfg.population_size;
  const int mu = lambda / 2;
  const detail::CmaWeights k(n, lambda);
  const double sigma0 = detail::default_sigma0(cfg);
  const std::size_t nn = static_cast<std::size_t>(n);

  CmaResult result;
  const int eigen_gap = std::max(
      1, static_cast<int>(std::floor(1.0 / ((k.c_1 + k.c_mu) * static_cast<double>(n) * 10.0))));

  for (int run = 0; run <= cfg.max_restarts; ++run) {
    result.restarts_used = run;
    Rng rng(derive_seed(cfg.seed, "restart", static_cast<std::uint64_t>(run)));

    std::vector<double> mean(nn);
    for (int i = 0; i < n; ++i) {
      const Bounds& b = cfg.bounds[static_cast<std::size_t>(i)];
      mean[static_cast<std::size_t>(i)] = b.lo + (b.hi - b.lo) * rng.uniform();
    }
    double sigma = sigma0;
    std::vector<double> cov(nn * nn, 0.0);
    for (int i = 0; i < n; ++i) cov[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(i)] = 1.0;
    std::vector<double> p_sigma(nn, 0.0), p_c(nn, 0.0);
    detail::EigenFrame frame;
    frame.refresh(cov, n);
    int gens_since_eigen = 0;

    std::int64_t evals_this_run = 0;
    int generation = 0;

    while (evals_this_run + lambda <= cfg.max_evals_per_restart) {
      if (gens_since_eigen >= eigen_gap) {
        frame.refresh(cov, n);
        gens_since_eigen = 0;
      }

      std::vector<std::vector<double>> xs(static_cast<std::size_t>(lambda));
      std::vector<double> z(nn), y(nn);
      for (int i = 0; i < lambda; ++i) {
        std::vector<double>& x = xs[static_cast<std::size_t>(i)];
        x.assign(nn, 0.0);
        bool in_box = false;
        for (int attempt = 0; attempt < 100 && !in_box; ++attempt) {
          for (std::size_t j = 0; j < nn; ++j) z[j] = rng.gaussian();
          for (std::size_t r = 0; r < nn; ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < nn; ++j) acc += frame.b[r * nn + j] * frame.d[j] * z[j];
            x[r] = mean[r] + sigma * acc;
          }
          in_box = true;
          for (std::size_t r = 0; r < nn && in_box; ++r) {
            const Bounds& b = cfg.bounds[r];
            in_box = x[r] >= b.lo && x[r] <= b.hi;
          }
        }
        if (!in_box)
          for (std::size_t r = 0; r < nn; ++r) {
            const Bounds& b = cfg.bounds[r];
            x[r] = std::clamp(x[r], b.lo, b.hi);
          }
      }

      const std::vector<double> values =
          batch_f(xs, CmaBatchInfo{run, generation + 1, result.evals});
      if (values.size() != static_cast<std::size_t>(lambda))
        throw std::runtime_error("cma: batch objective returned wrong count");
      evals_this_run += lambda;
      result.evals += lambda;
      ++generation;

      std::vector<double> ranked(values.size());
      bool any_finite = false;
      for (std::size_t i = 0; i < values.size(); ++i) {
        ranked[i] = std::isfinite(values[i]) ? values[i] : std::numeric_limits<double>::infinity();
        any_finite = any_finite || std::isfinite(values[i]);
      }
      if (!any_finite) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "cma: entire generation non-finite (restart %d, generation %d, sigma %.3e)",
                      run, generation, sigma);
        throw std::runtime_error(buf);
      }

      std::vector<int> order(static_cast<std::size_t>(lambda));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ranked[static_cast<std::size_t>(a)] < ranked[static_cast<std::size_t>(b)];
      });

      const int best_i = order[0];
      if (ranked[static_cast<std::size_t>(best_i)] < result.best_value) {
        result.best_value = ranked[static_cast<std::size_t>(best_i)];
        result.best_x = xs[static_cast<std::size_t>(best_i)];
      }
      {
        std::vector<double> sorted = ranked;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t h = sorted.size() / 2;
        const double median =
            sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        result.history.push_back(
            {ranked[static_cast<std::size_t>(best_i)], median, sigma, result.evals});
      }

      // Recombination over the top mu with y measured against the old mean.
      std::vector<double> old_mean = mean;
      std::fill(mean.begin(), mean.end(), 0.0);
      for (int i = 0; i < mu; ++i) {
        const std::vector<double>& x = xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        const double wi = k.w[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < nn; ++r) mean[r] += wi * x[r];
      }
      std::vector<double> shift(nn);
      for (std::size_t r = 0; r < nn; ++r) shift[r] = (mean[r] - old_mean[r]) / sigma;

      // p_sigma in the isotropic frame: C^{-1/2} shift = B diag(1/d) B^T shift.
      {
        std::vector<double> tmp(nn, 0.0);
        for (std::size_t j = 0; j < nn; ++j) {
          double acc = 0.0;
          for (std::size_t r = 0; r < nn; ++r) acc += frame.b[r * nn + j] * shift[r];
          tmp[j] = acc / frame.d[j];
        }
        const double cs = std::sqrt(k.c_sigma * (2.0 - k.c_sigma) * k.mu_eff);
        for (std::size_t r = 0; r < nn; ++r) {
          double acc = 0.0;
          for (std::size_t j = 0; j < nn; ++j) acc += frame.b[r * nn + j] * tmp[j];
          p_sigma[r] = (1.0 - k.c_sigma) * p_sigma[r] + cs * acc;
        }
      }

      double ps_norm = 0.0;
      for (double v : p_sigma) ps_norm += v * v;
      ps_norm = std::sqrt(ps_norm);
      const double decay =
          std::sqrt(1.0 - std::pow(1.0 - k.c_sigma, 2.0 * static_cast<double>(generation)));
      const bool hsig =
          ps_norm / decay < (1.4 + 2.0 / (static_cast<double>(n) + 1.0)) * k.chi_n;

      const double cc = std::sqrt(k.c_c * (2.0 - k.c_c) * k.mu_eff);
      for (std::size_t r = 0; r < nn; ++r)
        p_c[r] = (1.0 - k.c_c) * p_c[r] + (hsig ? cc * shift[r] : 0.0);

      const double c1a =
          k.c_1 * (1.0 - (hsig ? 0.0 : 1.0) * k.c_c * (2.0 - k.c_c));  // hsig correction
      for (std::size_t r = 0; r < nn; ++r)
        for (std::size_t s = 0; s <= r; ++s) {
          double rank_mu = 0.0;
          for (int i = 0; i < mu; ++i) {
            const std::vector<double>& x =
                xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            const double yr = (x[r] - old_mean[r]) / sigma;
            const double ys = (x[s] - old_mean[s]) / sigma;
            rank_mu += k.w[static_cast<std::size_t>(i)] * yr * ys;
          }
          const double v = (1.0 - c1a - k.c_mu) * cov[r * nn + s] +
                           k.c_1 * p_c[r] * p_c[s] + k.c_mu * rank_mu;
          cov[r * nn + s] = v;
          cov[s * nn + r] = v;
        }
      ++gens_since_eigen;

      sigma *= std::exp((k.c_sigma / k.d_sigma) * (ps_norm / k.chi_n - 1.0));
      if (sigma < 1e-12) break;  // collapse; next restart takes over
    }
  }
  return result;
}

inline CmaResult cma_minimize(const Objective& f, const CmaConfig& cfg) {
  return cma_minimize_batch(
      [&f](const std::vector<std::vector<double>>& xs, const CmaBatchInfo&) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(f(x));
        return out;
      },
      cfg);
}

}  // namespace cutforge
