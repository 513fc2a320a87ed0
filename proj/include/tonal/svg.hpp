#pragma once

#include <string>
#include <vector>

#include "tonal/cluster.hpp"

namespace tonal::svg {

// Deterministic SVG charts: element order, colors and coordinate formatting
// are pure functions of the inputs, so reruns produce byte-identical files.

// Latent scatter colored by cluster; unclustered points gray; centers
// drawn as black crosses.
std::string scatter(const std::vector<cluster::Point>& points,
                    const std::vector<int>& assignments,
                    const std::vector<cluster::Point>& centers, const std::string& title);

// One small line panel per prototype contour (y fixed to [0,1]),
// in cluster order (largest first), 4 panels per row.
std::string prototype_panels(const std::vector<std::vector<double>>& prototypes,
                             const std::vector<int>& sizes, const std::string& title);

// Descending cluster-size bars with the spurious-cluster threshold drawn as
// a horizontal line.
std::string size_bars(const std::vector<int>& sizes, int threshold, const std::string& title);

// Simple polyline chart (used for the loss curve).
std::string line_chart(const std::vector<double>& values, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

}  // namespace tonal::svg
