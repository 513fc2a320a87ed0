#include "tonal/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tonal/errors.hpp"
#include "tonal/rng.hpp"

namespace tonal::cluster {

namespace {

double dist2(const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

}  // namespace

PcaTransform pca_fit(const std::vector<Point>& points) {
    const std::size_t n = points.size();
    if (n < 3) throw DataError("pca_fit needs at least 3 points");
    PcaTransform t;
    for (const Point& p : points) {
        t.mean[0] += p[0];
        t.mean[1] += p[1];
    }
    t.mean[0] /= static_cast<double>(n);
    t.mean[1] /= static_cast<double>(n);

    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (const Point& p : points) {
        const double dx = p[0] - t.mean[0];
        const double dy = p[1] - t.mean[1];
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
    }
    cxx /= static_cast<double>(n);
    cxy /= static_cast<double>(n);
    cyy /= static_cast<double>(n);

    // closed-form eigen-decomposition of the symmetric 2x2 covariance
    const double half_tr = 0.5 * (cxx + cyy);
    const double disc = std::sqrt(0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy);
    const double l1 = half_tr + disc;
    const double l2 = half_tr - disc;
    if (!(l1 > 0.0) || l2 <= l1 * 1e-12) {
        throw DegenerateCovariance("latent points are collinear or identical");
    }

    Point v1;
    if (cxy != 0.0) {
        v1 = {cxy, l1 - cxx};
    } else {
        v1 = cxx >= cyy ? Point{1.0, 0.0} : Point{0.0, 1.0};
    }
    const double norm = std::sqrt(v1[0] * v1[0] + v1[1] * v1[1]);
    v1[0] /= norm;
    v1[1] /= norm;
    // deterministic sign: dominant component positive
    const double key = std::abs(v1[0]) >= std::abs(v1[1]) ? v1[0] : v1[1];
    if (key < 0.0) {
        v1[0] = -v1[0];
        v1[1] = -v1[1];
    }
    const Point v2{-v1[1], v1[0]};  // rotate 90 degrees: orthonormal, det +1
    t.rotation = {{{v1[0], v2[0]}, {v1[1], v2[1]}}};
    return t;
}

Point pca_apply(const PcaTransform& t, const Point& p) {
    const double dx = p[0] - t.mean[0];
    const double dy = p[1] - t.mean[1];
    return {t.rotation[0][0] * dx + t.rotation[1][0] * dy,
            t.rotation[0][1] * dx + t.rotation[1][1] * dy};
}

Point pca_invert(const PcaTransform& t, const Point& p) {
    return {t.mean[0] + t.rotation[0][0] * p[0] + t.rotation[0][1] * p[1],
            t.mean[1] + t.rotation[1][0] * p[0] + t.rotation[1][1] * p[1]};
}

std::vector<Point> pca_fit_apply(const std::vector<Point>& points, PcaTransform& t) {
    t = pca_fit(points);
    std::vector<Point> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(pca_apply(t, p));
    return out;
}

MeanShiftRaw mean_shift(const std::vector<Point>& points, const MeanShiftConfig& cfg) {
    if (points.empty()) throw DataError("mean_shift on empty point set");
    if (!(cfg.bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(cfg.convergence_tol > 0.0)) throw ConfigError("convergence_tol must be positive");
    const double h2 = cfg.bandwidth * cfg.bandwidth;
    const double merge_radius =
        cfg.mode_merge_radius > 0.0 ? cfg.mode_merge_radius : cfg.bandwidth / 2.0;
    const double merge2 = merge_radius * merge_radius;
    const double tol2 = cfg.convergence_tol * cfg.convergence_tol;

    MeanShiftRaw out;
    out.assignments.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        Point y = points[i];
        for (int iter = 0; iter < cfg.max_iters; ++iter) {
            Point next{0.0, 0.0};
            double wsum = 0.0;
            for (const Point& p : points) {
                const double d2 = dist2(p, y);
                double w = 0.0;
                if (cfg.kernel == Kernel::flat) {
                    if (d2 <= h2) w = 1.0;
                } else {
                    w = std::exp(-0.5 * d2 / h2);
                }
                next[0] += w * p[0];
                next[1] += w * p[1];
                wsum += w;
            }
            // the flat window always contains the point itself, so wsum > 0
            next[0] /= wsum;
            next[1] /= wsum;
            const double moved2 = dist2(next, y);
            y = next;
            if (moved2 < tol2) break;
        }
        int mode = -1;
        for (std::size_t m = 0; m < out.modes.size(); ++m) {
            if (dist2(out.modes[m], y) <= merge2) {
                mode = static_cast<int>(m);
                break;
            }
        }
        if (mode < 0) {
            mode = static_cast<int>(out.modes.size());
            out.modes.push_back(y);
        }
        out.assignments[i] = mode;
    }
    return out;
}

ClusterResult apply_threshold(const MeanShiftRaw& raw, int min_cluster_size) {
    std::vector<int> sizes(raw.modes.size(), 0);
    for (int a : raw.assignments) sizes[a] += 1;

    // stable order: descending size, ties by first appearance
    std::vector<int> order(raw.modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&sizes](int a, int b) { return sizes[a] > sizes[b]; });

    ClusterResult result;
    for (int m : order) result.raw_sizes.push_back(sizes[m]);

    std::vector<int> relabel(raw.modes.size(), kUnclustered);
    for (int m : order) {
        if (sizes[m] < min_cluster_size) continue;
        relabel[m] = result.k();
        result.centers.push_back(raw.modes[m]);
        result.sizes.push_back(sizes[m]);
    }
    if (result.centers.empty()) {
        throw AllClustersSpurious("all " + std::to_string(raw.modes.size()) +
                                  " clusters fall below the size threshold " +
                                  std::to_string(min_cluster_size));
    }
    result.assignments.resize(raw.assignments.size());
    for (std::size_t i = 0; i < raw.assignments.size(); ++i) {
        const int label = relabel[raw.assignments[i]];
        result.assignments[i] = label;
        if (label == kUnclustered) result.unclustered += 1;
    }
    return result;
}

bool PlausibilityReport::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const Item& it) { return it.pass; });
}

PlausibilityReport plausibility_check(const ClusterResult& result, int n_points) {
    PlausibilityReport report;
    const int k = result.k();

    PlausibilityReport::Item count;
    count.name = "cluster_count";
    count.pass = k >= 3 && k <= 8;
    count.detail = "K = " + std::to_string(k) + (count.pass ? " within [3, 8]"
                                                            : " outside [3, 8]");
    report.items.push_back(std::move(count));

    PlausibilityReport::Item share;
    share.name = "min_cluster_share";
    const int smallest = result.sizes.empty() ? 0 : result.sizes.back();
    share.pass = smallest * 10 >= n_points;
    share.detail = "smallest cluster " + std::to_string(smallest) + " of " +
                   std::to_string(n_points) + (share.pass ? " (>= 1/10)" : " (< 1/10)");
    report.items.push_back(std::move(share));

    PlausibilityReport::Item coverage;
    coverage.name = "coverage";
    const int clustered = n_points - result.unclustered;
    coverage.pass = 2 * clustered >= n_points;
    coverage.detail = std::to_string(clustered) + "/" + std::to_string(n_points) +
                      " points clustered" + (coverage.pass ? " (>= 1/2)" : " (< 1/2)");
    report.items.push_back(std::move(coverage));
    return report;
}

void decode_prototypes(ClusterResult& result, const PcaTransform& pca, const ae::Model& model) {
    result.prototypes.clear();
    result.prototypes.reserve(result.centers.size());
    for (const Point& c : result.centers) {
        const Point z = pca_invert(pca, c);
        result.prototypes.push_back(ae::decode(model, {z[0], z[1]}));
    }
}

BaselineFeatures baseline_features(const std::vector<double>& values) {
    if (values.size() < 2) throw TooFewPoints("baseline_features needs at least 2 points");
    const auto n = static_cast<double>(values.size());
    BaselineFeatures f;
    for (double v : values) f.mean_pitch += v;
    f.mean_pitch /= n;

    // OLS slope against abscissa i/(n-1)
    const double x_mean = 0.5;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dx = static_cast<double>(i) / (n - 1.0) - x_mean;
        sxy += dx * (values[i] - f.mean_pitch);
        sxx += dx * dx;
    }
    f.ols_slope = sxy / sxx;
    return f;
}

std::vector<int> kmeans_single(const std::vector<Point>& pts, int k, std::mt19937_64& rng,
                               double* inertia_out, std::vector<double>* inertia_trace) {
    const std::size_t n = pts.size();
    std::vector<Point> centers;
    centers.reserve(k);

    // k-means++ seeding
    centers.push_back(pts[uniform_index(rng, n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point& c : centers) best = std::min(best, dist2(pts[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(pts[uniform_index(rng, n)]);
            continue;
        }
        double target = uniform01(rng) * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }

    auto optimal_cost = [&pts, &centers, k, n](std::vector<int>* assign) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = dist2(pts[i], centers[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            if (assign) (*assign)[i] = best_c;
            cost += best;
        }
        return cost;
    };

    std::vector<int> assignments(n, 0);
    for (int iter = 0; iter < 500; ++iter) {
        optimal_cost(&assignments);
        // update step
        std::vector<Point> sums(k, Point{0.0, 0.0});
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assignments[i]][0] += pts[i][0];
            sums[assignments[i]][1] += pts[i][1];
            counts[assignments[i]] += 1;
        }
        double moved2 = 0.0;
        for (int c = 0; c < k; ++c) {
            Point next = centers[c];
            if (counts[c] > 0) {
                next = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
            } else {
                // re-seed an empty cluster from the point farthest from its center
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = dist2(pts[i], centers[assignments[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                next = pts[far];
            }
            moved2 = std::max(moved2, dist2(next, centers[c]));
            centers[c] = next;
        }
        if (inertia_trace) inertia_trace->push_back(optimal_cost(nullptr));
        if (moved2 < 1e-8 * 1e-8) break;
    }

    const double inertia = optimal_cost(&assignments);
    if (inertia_out) *inertia_out = inertia;
    return assignments;
}

std::vector<int> kmeans(const std::vector<Point>& features, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("kmeans needs k >= 1");
    if (features.size() < static_cast<std::size_t>(k)) {
        throw DataError("kmeans needs at least k points");
    }

    // z-score each dimension so mean pitch and slope weigh equally
    const std::size_t n = features.size();
    Point mean{0.0, 0.0};
    for (const Point& p : features) {
        mean[0] += p[0];
        mean[1] += p[1];
    }
    mean[0] /= static_cast<double>(n);
    mean[1] /= static_cast<double>(n);
    Point sd{0.0, 0.0};
    for (const Point& p : features) {
        sd[0] += (p[0] - mean[0]) * (p[0] - mean[0]);
        sd[1] += (p[1] - mean[1]) * (p[1] - mean[1]);
    }
    sd[0] = std::sqrt(sd[0] / static_cast<double>(n));
    sd[1] = std::sqrt(sd[1] / static_cast<double>(n));
    if (sd[0] <= 0.0) sd[0] = 1.0;
    if (sd[1] <= 0.0) sd[1] = 1.0;
    std::vector<Point> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = {(features[i][0] - mean[0]) / sd[0], (features[i][1] - mean[1]) / sd[1]};
    }

    std::mt19937_64 rng(seed);
    std::vector<int> best_assignments;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 10; ++restart) {
        double inertia = 0.0;
        std::vector<int> assignments = kmeans_single(z, k, rng, &inertia);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_assignments = std::move(assignments);
        }
    }
    return best_assignments;
}

}  // namespace tonal::cluster
