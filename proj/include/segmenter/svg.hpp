#pragma once

#include <string>

#include "segmenter/dbscan.hpp"

namespace segmenter {

// Scatter plot of a 2-d embedding, one circle per point colored by cluster,
// with a legend of the largest cluster sizes.
std::string embedding_scatter_svg(const Embedding& e, const ClusterAssignment& a);

}  // namespace segmenter
