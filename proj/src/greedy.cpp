#include <algorithm>
#include <cmath>
#include <map>

#include "hamred/error.hpp"
#include "hamred/parallel.hpp"
#include "hamred/psd.hpp"

namespace hamred {

GreedyIndicator parse_indicator(const std::string& s) {
  if (s == "hamiltonian") return GreedyIndicator::Hamiltonian;
  if (s == "projection") return GreedyIndicator::Projection;
  throw ConfigError("greedy.indicator must be 'hamiltonian' or 'projection', got '" + s + "'");
}

namespace {

// Lazily integrated full-order trajectories, one per training parameter.
class TrajectoryCache {
 public:
  TrajectoryCache(const HamiltonianModel& model, const ParameterSet& params, Scheme scheme)
      : model_(model), params_(params), scheme_(scheme) {}

  const Matrix& get(std::size_t j) {
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(j, run(j)).first->second;
  }

  void fill_all() {
    std::vector<std::size_t> missing;
    for (std::size_t j = 0; j < params_.samples.size(); ++j)
      if (!cache_.count(j)) missing.push_back(j);
    std::vector<Matrix> out(missing.size());
    parallel_for(missing.size(), [&](std::size_t i) { out[i] = run(missing[i]); });
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(out[i]));
  }

  const std::map<std::size_t, Matrix>& entries() const { return cache_; }

 private:
  Matrix run(std::size_t j) const {
    const Vector& mu = params_.samples[j];
    return integrate(model_, model_.initial_condition(mu), mu, params_.grid, scheme_).states;
  }

  const HamiltonianModel& model_;
  const ParameterSet& params_;
  Scheme scheme_;
  std::map<std::size_t, Matrix> cache_;
};

// Column of largest ||y - A A^T y|| (ties to the lowest index).
std::pair<Index, double> worst_column(const Matrix& A, const Matrix& Y) {
  const Matrix R = A.cols() > 0 ? Matrix(Y - A * (A.transpose() * Y)) : Y;
  Index best = 0;
  double err = -1.0;
  for (Index c = 0; c < R.cols(); ++c) {
    const double e = R.col(c).norm();
    if (e > err) {
      err = e;
      best = c;
    }
  }
  return {best, err};
}

double cached_error(const Matrix& A, const TrajectoryCache& cache) {
  double sq = 0.0;
  for (const auto& [j, Y] : cache.entries()) sq += (Y - A * (A.transpose() * Y)).squaredNorm();
  return std::sqrt(sq);
}

Matrix prefix_basis(const Matrix& E, Index k) {
  return orthosymplectic_from_half(E.leftCols(k));
}

}  // namespace

GreedyResult greedy_symplectic_basis(const HamiltonianModel& model, const ParameterSet& params,
                                     const GreedyOptions& opts) {
  const Index n = model.half_dim();
  if (params.samples.empty()) throw ConfigError("greedy: parameter sample set is empty");
  if (opts.k_max < 1 || opts.k_max > n) throw InvalidDimension("greedy: k_max must lie in [1, n]");
  if (!(opts.tol > 0.0)) throw ConfigError("greedy: tol must be positive");

  TrajectoryCache cache(model, params, opts.scheme);
  std::vector<Vector> y0;
  for (const Vector& mu : params.samples) y0.push_back(model.initial_condition(mu));

  GreedyResult res;
  Matrix E(2 * n, 0);
  auto basis = [&]() { return orthosymplectic_from_half(E); };
  auto expand = [&](const Vector& v) {
    const Vector e = sr_insert(E, v, opts.tol);
    E.conservativeResize(Eigen::NoChange, E.cols() + 1);
    E.col(E.cols() - 1) = e;
  };

  // Expands with the worst-approximated cached snapshot. Reports whether a
  // pair was added and the largest projection error seen.
  auto projection_step = [&]() -> std::pair<bool, double> {
    const Matrix A = basis();
    double best_err = -1.0;
    Vector cand;
    for (const auto& [j, Y] : cache.entries()) {
      const auto [c, e] = worst_column(A, Y);
      if (e > best_err) {
        best_err = e;
        cand = Y.col(c);
      }
    }
    if (best_err <= opts.tol) return {false, best_err};
    try {
      expand(cand);
    } catch (const DegenerateCandidate&) {
      return {false, best_err};
    }
    return {true, best_err};
  };

  const bool projection_mode = opts.indicator == GreedyIndicator::Projection;
  if (projection_mode) cache.fill_all();
  expand(y0.front());
  res.indicator_history.push_back(y0.front().norm());
  res.status = "k_max";

  while (true) {
    if (E.cols() >= opts.k_max) break;

    if (projection_mode) {
      const auto [added, err] = projection_step();
      if (!added) {
        res.status = err <= opts.tol ? "converged" : "saturated";
        break;
      }
      res.indicator_history.push_back(err);
      continue;
    }

    // Hamiltonian proxy over the parameter samples, then time selection on
    // the trajectory of the worst parameter.
    const Matrix A = basis();
    std::size_t jstar = 0;
    double gap = -1.0;
    for (std::size_t j = 0; j < y0.size(); ++j) {
      const Vector proj = A * (A.transpose() * y0[j]);
      const Vector& mu = params.samples[j];
      const double g = std::abs(model.hamiltonian(y0[j], mu) - model.hamiltonian(proj, mu));
      if (g > gap) {
        gap = g;
        jstar = j;
      }
    }
    if (gap <= opts.tol) {
      res.status = "converged";
      break;
    }
    const Matrix& Y = cache.get(jstar);
    const auto [c, err] = worst_column(A, Y);
    bool added = false;
    if (err > opts.tol) {
      try {
        expand(Y.col(c));
        added = true;
      } catch (const DegenerateCandidate&) {
      }
    }
    if (!added) {
      // Initial states already captured: fall back to the cached snapshots.
      if (!projection_step().first) {
        res.status = "saturated";
        break;
      }
    }
    res.indicator_history.push_back(gap);
  }

  // The bases are nested, so the history is evaluated once on the full
  // training set.
  cache.fill_all();
  for (Index k = 1; k <= E.cols(); ++k)
    res.error_history.push_back(cached_error(prefix_basis(E, k), cache));
  res.report.basis = basis();
  res.report.method = "greedy";
  res.report.projection_error = res.error_history.back();
  res.report.spectrum = Eigen::Map<const Vector>(res.error_history.data(),
                                                 static_cast<Index>(res.error_history.size()));
  return res;
}

}  // namespace hamred
