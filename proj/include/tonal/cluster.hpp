#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tonal/autoencoder.hpp"

namespace tonal::cluster {

using Point = std::array<double, 2>;

inline constexpr int kUnclustered = -1;

// Centering + rotation onto the principal axes (descending variance).
// No variance rescaling: the mean-shift bandwidth is calibrated against
// the latent scale as-is.
struct PcaTransform {
    Point mean{0.0, 0.0};
    // rotation[r][c]: columns are the principal directions.
    std::array<std::array<double, 2>, 2> rotation{{{1.0, 0.0}, {0.0, 1.0}}};
};

PcaTransform pca_fit(const std::vector<Point>& points);
Point pca_apply(const PcaTransform& t, const Point& p);
Point pca_invert(const PcaTransform& t, const Point& p);
std::vector<Point> pca_fit_apply(const std::vector<Point>& points, PcaTransform& t);

enum class Kernel { flat, gaussian };

struct MeanShiftConfig {
    double bandwidth = 0.6;
    int max_iters = 500;
    double convergence_tol = 1e-6;
    double mode_merge_radius = 0.0;  // <= 0 means bandwidth / 2
    int min_cluster_size = 0;        // <= 0 means N / 20
    Kernel kernel = Kernel::flat;
};

struct MeanShiftRaw {
    std::vector<Point> modes;      // in order of first appearance
    std::vector<int> assignments;  // per input point, index into modes
};

// Non-blurring mean shift: every point climbs the density of the original
// point set; converged positions within the merge radius share a mode.
MeanShiftRaw mean_shift(const std::vector<Point>& points, const MeanShiftConfig& cfg);

struct ClusterResult {
    std::vector<int> assignments;  // 0..k-1, or kUnclustered
    std::vector<Point> centers;    // descending cluster size
    std::vector<int> sizes;
    std::vector<int> raw_sizes;    // all mode sizes before thresholding, descending
    std::vector<std::vector<double>> prototypes;  // filled by decode_prototypes
    int unclustered = 0;

    int k() const { return static_cast<int>(centers.size()); }
};

// Drop clusters smaller than min_cluster_size (their points become
// UNCLUSTERED) and re-index survivors by descending size.
ClusterResult apply_threshold(const MeanShiftRaw& raw, int min_cluster_size);

struct PlausibilityReport {
    struct Item {
        std::string name;
        bool pass = false;
        std::string detail;
    };
    std::vector<Item> items;

    bool all_pass() const;
};

// The sanity heuristics used when eyeballing a clustering: 3-8 clusters,
// every cluster at least a tenth of the data, at least half the points
// clustered. Advisory only.
PlausibilityReport plausibility_check(const ClusterResult& result, int n_points);

// Map each center back through the PCA transform and the decoder.
void decode_prototypes(ClusterResult& result, const PcaTransform& pca, const ae::Model& model);

struct BaselineFeatures {
    double mean_pitch = 0.0;
    double ols_slope = 0.0;  // per unit of the contour's [0,1] abscissa
};

BaselineFeatures baseline_features(const std::vector<double>& values);

// Lloyd's algorithm with k-means++ seeding on z-scored features; best
// inertia over 10 restarts.
std::vector<int> kmeans(const std::vector<Point>& features, int k, std::uint64_t seed);

// One seeded k-means++ / Lloyd run on the points as given (no z-scoring).
// If inertia_trace is non-null it receives the optimal-assignment cost
// after every Lloyd update, which is nonincreasing.
std::vector<int> kmeans_single(const std::vector<Point>& points, int k, std::mt19937_64& rng,
                               double* inertia_out = nullptr,
                               std::vector<double>* inertia_trace = nullptr);

}  // namespace tonal::cluster
