#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iralat/ensemble.hpp"

namespace iralat {

/// One sampled code instance: interleaver wiring, combiner spans and the
/// random leader-index sequences g, g', g'' and r.  When `constrained` is
/// set, the last g element of every combiner span is solved so that
/// g_{a_n} + ... + g' + g'' reduces to the zero leader at every check node.
struct TannerGraph {
    int K = 0;
    int N = 0;
    int M = 0;
    long L = 0;
    std::vector<int> vn_degree;               // realized repeat count per info node
    std::vector<int> cn_span;                 // combiner inputs j_n per check node
    std::vector<long> cn_first;               // first slot index a_n per check node
    std::vector<int> slot_owner;              // interleaver slot -> info node
    std::vector<std::vector<long>> vn_slots;  // info node -> its slot indices
    std::vector<int> g;                       // per slot
    std::vector<int> gp, gpp, r;              // per check node / codeword symbol
    std::uint64_t seed = 0;
    bool constrained = true;

    /// Residue of the linearity constraint at check node n; the zero index
    /// for every n on a constrained instance.
    int constraint_residue(const PartitionTable& t, int n) const;

    std::string to_json() const;
    static TannerGraph from_json(const std::string& text);
};

TannerGraph sample_graph(const CodeEnsemble& ensemble, std::uint64_t seed,
                         bool constrained = true);

/// Repeat, interleave, add g, combine, accumulate (c_0 = 0) and add the
/// random coset r.  Returns the transmitted leader indices x.
std::vector<int> encode(const std::vector<int>& u, const TannerGraph& graph,
                        const PartitionTable& table);

/// Same pipeline without the final coset addition; returns c.
std::vector<int> encode_precoset(const std::vector<int>& u,
                                 const TannerGraph& graph,
                                 const PartitionTable& table);

}  // namespace iralat
