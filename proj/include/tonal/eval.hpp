#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tonal/contour_io.hpp"

namespace tonal::eval {

// Indices of the first syllable of each word: for every word that has any
// syllables, the one with the lowest syllable_index. Output follows the
// words' first appearance order in `contours`.
std::vector<std::size_t> split_first(const std::vector<LabeledContour>& contours);

// Cluster-vs-tone count matrix. Cluster rows are letters aligned with the
// cluster indexes (A = cluster 0, ...); an "N/A" row for unclustered
// syllables, when present, is always last.
struct ContingencyTable {
    std::vector<std::string> cluster_names;
    std::vector<std::string> tone_names;  // sorted
    std::vector<std::vector<long long>> counts;  // rows = clusters
    bool has_unclustered_row = false;

    long long total() const;
};

std::string cluster_letter(int index);

// assignments: cluster index per syllable, or -1 for unclustered.
ContingencyTable contingency(const std::vector<int>& assignments,
                             const std::vector<std::string>& tones);

enum class NmiVariant { arithmetic, geometric, min };

// NMI over the clustered rows (the N/A row is excluded). Natural logs;
// entropy/MI terms are accumulated in sorted order so that label
// permutations, transposition, and count doubling leave the result
// bit-identical, and a perfect partition match is exactly 1.0.
// Conventions: both entropies zero -> 1; exactly one zero -> 0.
double nmi(const ContingencyTable& table, NmiVariant variant = NmiVariant::arithmetic);

struct EvalReport {
    std::string language;
    std::string method;  // "autoencoder" or "kmeans"
    std::string split;   // "first" or "all"
    double nmi = 0.0;    // arithmetic-mean normalization
    double nmi_geometric = 0.0;
    double nmi_min = 0.0;
    double coverage = 0.0;  // clustered / evaluated
    ContingencyTable table;
};

// assignments and labels must be aligned and pre-filtered to evaluated
// syllables (labeled, non-neutral).
EvalReport make_report(const std::string& language, const std::string& method,
                       const std::string& split, const std::vector<int>& assignments,
                       const std::vector<std::string>& labels);

// Fixed-width text rendering: clusters as rows, tones as columns, N/A last.
std::string render_table(const ContingencyTable& table);

// Published single-speaker results, kept as reference constants; not
// reproducible here because the original audio is unavailable.
struct ReferenceRow {
    std::string language;
    std::string split;
    double autoencoder;
    double kmeans;
};
const std::vector<ReferenceRow>& reference_results();

}  // namespace tonal::eval
