#pragma once

#include <cstddef>
#include <vector>

#include "dtr/matrix.hpp"

namespace dtr {

/// Hard clustering of the n nodes into k groups.
struct ClusterAssignment {
  std::vector<std::size_t> labels;  // labels[i] in [0, k)
  Matrix centroids;                 // k x d
  double inertia = 0.0;             // sum of squared distances to assigned centroid
  std::size_t iterations = 0;       // Lloyd iterations performed

  std::size_t k() const noexcept { return centroids.rows(); }
  std::size_t size() const noexcept { return labels.size(); }
};

}  // namespace dtr
