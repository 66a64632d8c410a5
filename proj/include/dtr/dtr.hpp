#pragma once

// Umbrella header: graph attribute imputation by cluster-aware propagation,
// tiered neighborhood imputation and hop-wise enhancement.

#include "dtr/cluster_assignment.hpp"
#include "dtr/dataset.hpp"
#include "dtr/dcfp.hpp"
#include "dtr/errors.hpp"
#include "dtr/graph.hpp"
#include "dtr/hnai.hpp"
#include "dtr/hre.hpp"
#include "dtr/kmeans.hpp"
#include "dtr/matrix.hpp"
#include "dtr/metrics.hpp"
#include "dtr/pipeline.hpp"
