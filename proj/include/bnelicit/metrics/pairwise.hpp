#pragma once

#include <vector>

#include "bnelicit/metrics/confusion.hpp"

namespace bnelicit::metrics {

/// Symmetric matrix of normalized SHD between elicited structures, plus the
/// mean over off-diagonal entries.
struct PairwiseShd {
    std::vector<std::vector<double>> matrix;
    double mean_off_diagonal = 0.0;
};

inline PairwiseShd pairwise_shd_matrix(const std::vector<bn::BayesianNetworkStructure>& structures,
                                       size_t truth_edge_count) {
    if (structures.size() < 2)
        throw ValidationError("pairwise_shd_matrix needs at least two structures");
    if (truth_edge_count == 0)
        throw ValidationError("pairwise_shd_matrix: true edge count is zero");
    auto keys = structures.front().node_key_set();
    for (const auto& s : structures)
        if (s.node_key_set() != keys)
            throw AlignmentError("pairwise_shd_matrix: structures span different node sets");

    const size_t m = structures.size();
    PairwiseShd out;
    out.matrix.assign(m, std::vector<double>(m, 0.0));
    double sum = 0.0;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = i + 1; j < m; ++j) {
            size_t diff = 0;
            for (const auto& e : structures[i].edges())
                if (!structures[j].edges().count(e)) ++diff;
            for (const auto& e : structures[j].edges())
                if (!structures[i].edges().count(e)) ++diff;
            double v = static_cast<double>(diff) / static_cast<double>(truth_edge_count);
            out.matrix[i][j] = out.matrix[j][i] = v;
            sum += 2.0 * v;
        }
    }
    out.mean_off_diagonal = sum / static_cast<double>(m * (m - 1));
    return out;
}

} // namespace bnelicit::metrics
