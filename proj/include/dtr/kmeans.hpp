#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dtr/cluster_assignment.hpp"
#include "dtr/errors.hpp"
#include "dtr/matrix.hpp"

namespace dtr {

struct KmeansOptions {
  std::size_t max_iter = 300;
  /// Called after every assignment step with (iteration, inertia). Iteration 0
  /// is the assignment to the k-means++ seeds.
  std::function<void(std::size_t, double)> on_iteration;
};

namespace detail {

// Nearest centroid; ties go to the lowest centroid index.
inline double assign_points(const Matrix& x, const Matrix& centroids, std::vector<std::size_t>& labels,
                            std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(x.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    labels[i] = arg;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

// Recomputes centroids of non-empty clusters as member means, accumulating in
// point-index order. Returns member counts.
inline std::vector<std::size_t> update_centroids(const Matrix& x, const std::vector<std::size_t>& labels,
                                                 Matrix& centroids) {
  const std::size_t k = centroids.rows();
  const std::size_t d = x.cols();
  std::vector<std::size_t> counts(k, 0);
  Matrix sums(k, d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    ++counts[labels[i]];
    auto s = sums.row(labels[i]);
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    auto dst = centroids.row(c);
    const auto s = sums.row(c);
    for (std::size_t j = 0; j < d; ++j) dst[j] = s[j] * inv;
  }
  return counts;
}

inline Matrix kmeanspp_seeds(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  Matrix centroids(k, x.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : nearest) total += v;
      if (total > 0.0) {
        const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0.0;
        pick = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (nearest[i] <= 0.0) continue;
          acc += nearest[i];
          pick = i;
          if (acc > target) break;
        }
      } else {
        // Every point coincides with an existing seed.
        pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      }
    }
    const auto src = x.row(pick);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(x.row(i), src));
    }
  }
  return centroids;
}

}  // namespace detail

/// Lloyd's k-means from k-means++ seeds. Stops at a label fixpoint or after
/// `max_iter` update steps. An emptied cluster is reseeded at the point
/// currently farthest from its own centroid.
inline ClusterAssignment kmeans(const Matrix& features, std::size_t k, std::uint64_t seed,
                                const KmeansOptions& options = {}) {
  const std::size_t n = features.rows();
  if (k == 0) throw ConfigError("kmeans: k must be >= 1");
  if (options.max_iter == 0) throw ConfigError("kmeans: max_iter must be >= 1");
  if (k > n) throw InputError("kmeans: k=" + std::to_string(k) + " exceeds the number of points n=" + std::to_string(n));
  if (!features.all_finite()) throw InputError("kmeans: features contain non-finite values");

  std::mt19937_64 rng(seed);
  ClusterAssignment out;
  out.centroids = detail::kmeanspp_seeds(features, k, rng);

  std::vector<std::size_t> labels(n), next(n);
  std::vector<double> dist(n);
  double inertia = detail::assign_points(features, out.centroids, labels, dist);
  if (options.on_iteration) options.on_iteration(0, inertia);

  std::size_t it = 1;
  for (; it <= options.max_iter; ++it) {
    const auto counts = detail::update_centroids(features, labels, out.centroids);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      for (std::size_t i = 0; i < n; ++i) dist[i] = squared_distance(features.row(i), out.centroids.row(labels[i]));
      std::size_t far = n;
      double best = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] > best) {
          best = dist[i];
          far = i;
        }
      }
      if (far == n) break;  // all points sit on their centroids; nothing to split
      const auto src = features.row(far);
      std::copy(src.begin(), src.end(), out.centroids.row(c).begin());
      labels[far] = c;
    }
    inertia = detail::assign_points(features, out.centroids, next, dist);
    if (options.on_iteration) options.on_iteration(it, inertia);
    if (next == labels) break;
    labels.swap(next);
  }

  detail::update_centroids(features, labels, out.centroids);
  inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) inertia += squared_distance(features.row(i), out.centroids.row(labels[i]));
  out.labels = std::move(labels);
  out.inertia = inertia;
  out.iterations = std::min(it, options.max_iter);
  return out;
}

}  // namespace dtr
