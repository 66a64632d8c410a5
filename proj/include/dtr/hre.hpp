#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/matrix.hpp"

namespace dtr {

/// Concatenation [H, A H, A^2 H, ..., A^K H], one block of width d per hop.
struct EnhancedFeatures {
  Matrix values;  // n x (K+1)d
  std::size_t hop_count = 0;
  std::size_t base_dim = 0;

  std::size_t block_begin(std::size_t hop) const noexcept { return hop * base_dim; }
};

inline EnhancedFeatures enhance(const NormalizedAdjacency& adjacency, const Matrix& features, std::size_t hops) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (adjacency.node_count() != n) throw InputError("enhance: adjacency and features disagree on node count");
  if (!features.all_finite()) throw NumericError("enhance: input features contain non-finite values");

  EnhancedFeatures out{Matrix(n, (hops + 1) * d), hops, d};
  Matrix cur = features;
  Matrix next(n, d);
  for (std::size_t hop = 0; hop <= hops; ++hop) {
    if (hop > 0) {
      for (NodeId v = 0; v < n; ++v) {
        auto dst = next.row(v);
        std::fill(dst.begin(), dst.end(), 0.0);
        const auto nb = adjacency.neighbors(v);
        const auto w = adjacency.weights(v);
        for (std::size_t e = 0; e < nb.size(); ++e) {
          const auto src = cur.row(nb[e]);
          for (std::size_t j = 0; j < d; ++j) dst[j] += w[e] * src[j];
        }
        for (double x : dst) {
          if (!std::isfinite(x)) {
            throw NumericError("enhance: hop " + std::to_string(hop) + " overflowed in row " + std::to_string(v));
          }
        }
      }
      std::swap(cur, next);
    }
    for (NodeId v = 0; v < n; ++v) {
      const auto src = cur.row(v);
      std::copy(src.begin(), src.end(), out.values.row(v).begin() + static_cast<std::ptrdiff_t>(hop * d));
    }
  }
  return out;
}

}  // namespace dtr
