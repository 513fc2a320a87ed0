#include "tonal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tonal/errors.hpp"

namespace tonal::eval {

std::vector<std::size_t> split_first(const std::vector<LabeledContour>& contours) {
    std::vector<std::size_t> order;                 // first-appearance word order
    std::map<std::string, std::size_t> best;        // word_id -> index of lowest syllable
    for (std::size_t i = 0; i < contours.size(); ++i) {
        const auto& c = contours[i].contour;
        auto [it, inserted] = best.emplace(c.word_id, i);
        if (inserted) {
            order.push_back(i);
        } else if (c.syllable_index < contours[it->second].contour.syllable_index) {
            std::replace(order.begin(), order.end(), it->second, i);
            it->second = i;
        }
    }
    return order;
}

long long ContingencyTable::total() const {
    long long n = 0;
    for (const auto& row : counts) {
        for (long long c : row) n += c;
    }
    return n;
}

std::string cluster_letter(int index) {
    // spreadsheet-style: A..Z, AA.. for the (unlikely) overflow
    std::string s;
    int i = index;
    do {
        s.insert(s.begin(), static_cast<char>('A' + i % 26));
        i = i / 26 - 1;
    } while (i >= 0);
    return s;
}

ContingencyTable contingency(const std::vector<int>& assignments,
                             const std::vector<std::string>& tones) {
    if (assignments.size() != tones.size()) {
        throw LengthMismatch("contingency: " + std::to_string(assignments.size()) +
                             " assignments vs " + std::to_string(tones.size()) + " labels");
    }
    int max_label = -1;
    bool any_unclustered = false;
    for (int a : assignments) {
        if (a < -1) throw DataError("contingency: invalid cluster label " + std::to_string(a));
        if (a == -1) {
            any_unclustered = true;
        } else {
            max_label = std::max(max_label, a);
        }
    }

    ContingencyTable table;
    std::map<std::string, int> tone_index;  // ordered -> sorted columns
    for (const std::string& t : tones) tone_index.emplace(t, 0);
    for (auto& [name, idx] : tone_index) {
        idx = static_cast<int>(table.tone_names.size());
        table.tone_names.push_back(name);
    }

    const int cluster_rows = max_label + 1;
    table.has_unclustered_row = any_unclustered;
    const int rows = cluster_rows + (any_unclustered ? 1 : 0);
    for (int r = 0; r < cluster_rows; ++r) table.cluster_names.push_back(cluster_letter(r));
    if (any_unclustered) table.cluster_names.push_back("N/A");
    table.counts.assign(rows, std::vector<long long>(table.tone_names.size(), 0));

    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int row = assignments[i] == -1 ? cluster_rows : assignments[i];
        table.counts[row][tone_index[tones[i]]] += 1;
    }
    return table;
}

namespace {

// Sum after sorting so that any permutation of the same terms gives the
// bit-identical result.
double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

double nmi(const ContingencyTable& table, NmiVariant variant) {
    const std::size_t cluster_rows =
        table.counts.size() - (table.has_unclustered_row ? 1 : 0);
    const std::size_t cols = table.tone_names.size();
    if (cluster_rows == 0 || cols == 0) throw EmptyTable("nmi: no clustered syllables");

    std::vector<long long> row_sum(cluster_rows, 0);
    std::vector<long long> col_sum(cols, 0);
    long long n = 0;
    for (std::size_t r = 0; r < cluster_rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            row_sum[r] += table.counts[r][c];
            col_sum[c] += table.counts[r][c];
            n += table.counts[r][c];
        }
    }
    if (n < 2) throw EmptyTable("nmi: fewer than 2 evaluated syllables");

    const double dn = static_cast<double>(n);
    std::vector<double> hc_terms, ht_terms, mi_terms;
    for (long long rc : row_sum) {
        if (rc > 0) {
            hc_terms.push_back(static_cast<double>(rc) / dn *
                               std::log(dn / static_cast<double>(rc)));
        }
    }
    for (long long cc : col_sum) {
        if (cc > 0) {
            ht_terms.push_back(static_cast<double>(cc) / dn *
                               std::log(dn / static_cast<double>(cc)));
        }
    }
    for (std::size_t r = 0; r < cluster_rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const long long cell = table.counts[r][c];
            if (cell == 0) continue;
            const double ratio = static_cast<double>(cell * n) /
                                 static_cast<double>(row_sum[r] * col_sum[c]);
            mi_terms.push_back(static_cast<double>(cell) / dn * std::log(ratio));
        }
    }

    const double hc = sorted_sum(hc_terms);
    const double ht = sorted_sum(ht_terms);
    if (hc == 0.0 && ht == 0.0) return 1.0;  // both partitions trivial: identical
    if (hc == 0.0 || ht == 0.0) return 0.0;

    const double mi = sorted_sum(mi_terms);
    double denom = 0.0;
    switch (variant) {
        case NmiVariant::arithmetic: denom = (hc + ht) / 2.0; break;
        case NmiVariant::geometric: denom = std::sqrt(hc * ht); break;
        case NmiVariant::min: denom = std::min(hc, ht); break;
    }
    return std::clamp(mi / denom, 0.0, 1.0);
}

EvalReport make_report(const std::string& language, const std::string& method,
                       const std::string& split, const std::vector<int>& assignments,
                       const std::vector<std::string>& labels) {
    EvalReport report;
    report.language = language;
    report.method = method;
    report.split = split;
    report.table = contingency(assignments, labels);

    long long clustered = 0;
    for (int a : assignments) clustered += a != -1 ? 1 : 0;
    report.coverage = assignments.empty()
                          ? 0.0
                          : static_cast<double>(clustered) / static_cast<double>(assignments.size());
    try {
        report.nmi = nmi(report.table, NmiVariant::arithmetic);
        report.nmi_geometric = nmi(report.table, NmiVariant::geometric);
        report.nmi_min = nmi(report.table, NmiVariant::min);
    } catch (const EmptyTable& e) {
        throw EmptyTable(language + "/" + method + "/" + split + ": " + e.what());
    }
    return report;
}

std::string render_table(const ContingencyTable& table) {
    std::size_t label_w = 0;
    for (const std::string& name : table.cluster_names) label_w = std::max(label_w, name.size());
    std::vector<std::size_t> col_w(table.tone_names.size());
    for (std::size_t c = 0; c < table.tone_names.size(); ++c) {
        col_w[c] = table.tone_names[c].size();
        for (const auto& row : table.counts) {
            col_w[c] = std::max(col_w[c], std::to_string(row[c]).size());
        }
    }

    std::ostringstream out;
    out << std::string(label_w, ' ');
    for (std::size_t c = 0; c < table.tone_names.size(); ++c) {
        out << "  " << std::string(col_w[c] - table.tone_names[c].size(), ' ')
            << table.tone_names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < table.counts.size(); ++r) {
        const std::string& name = table.cluster_names[r];
        out << name << std::string(label_w - name.size(), ' ');
        for (std::size_t c = 0; c < table.tone_names.size(); ++c) {
            const std::string cell = std::to_string(table.counts[r][c]);
            out << "  " << std::string(col_w[c] - cell.size(), ' ') << cell;
        }
        out << '\n';
    }
    return out.str();
}

const std::vector<ReferenceRow>& reference_results() {
    static const std::vector<ReferenceRow> rows = {
        {"Mandarin", "first", 0.846, 0.829},
        {"Mandarin", "all", 0.753, 0.645},
        {"Cantonese", "first", 0.575, 0.493},
        {"Cantonese", "all", 0.463, 0.377},
    };
    return rows;
}

}  // namespace tonal::eval
