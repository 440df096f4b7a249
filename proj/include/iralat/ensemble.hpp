#pragma once

#include <map>
#include <string>

#include "iralat/partition.hpp"

namespace iralat {

/// Degree distributions in both node and edge perspective.  Keys are node
/// degrees: i >= 2 on the repetition side, j >= 1 combiner inputs on the
/// check side (check nodes additionally carry two parity edges).
struct DegreeDistribution {
    std::map<int, double> node_vn;
    std::map<int, double> node_cn;
    std::map<int, double> edge_vn;
    std::map<int, double> edge_cn;

    static DegreeDistribution from_edge(const std::map<int, double>& edge_vn,
                                        const std::map<int, double>& edge_cn);
    void validate() const;
};

struct CodeEnsemble {
    DegreeDistribution degree;
    const PartitionTable* partition = nullptr;
    int K = 0;  // information symbols
    int N = 0;  // codeword symbols (check nodes / parity symbols)
    long L = 0; // interleaver edges
    double design_rate = 0.0;  // bits per complex dimension

    std::string to_json() const;
};

/// Builds an ensemble for codeword length N.  K/N follows from the edge
/// distributions as (sum_i alpha_i/i) / (sum_j beta_j/j).
CodeEnsemble make_ensemble(const std::map<int, double>& edge_vn,
                           const std::map<int, double>& edge_cn,
                           const PartitionTable& partition, int N);

/// Optimized edge distributions for the three shipped code rates; key is
/// "3/4", "2/3" or "1/2".
struct Preset {
    std::map<int, double> edge_vn;
    std::map<int, double> edge_cn;
    double threshold_db = 0.0;
};
const Preset& preset_by_rate(const std::string& rate);

}  // namespace iralat
