#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "iralat/graph.hpp"
#include "iralat/messages.hpp"

namespace iralat {

/// DFT over the additive coset group (Z_p)^m using the phi coordinates of
/// a partition table; diagonalizes the modulo-lattice convolution.
class GroupDft {
  public:
    explicit GroupDft(const PartitionTable& table);

    std::vector<std::complex<double>> forward(const ProbVec& x) const;
    ProbVec inverse(const std::vector<std::complex<double>>& f) const;

  private:
    int m_ = 0;
    // kernel_[u * M + v] = omega^{<u,v>} with u,v the phi coordinates
    std::vector<std::complex<double>> kernel_;
    const std::vector<std::vector<int>>* coords_ = nullptr;
    int p_ = 0;
};

/// Exact check-node update by enumeration of all satisfying configurations.
/// h has one entry per incoming message plus a final entry for the target
/// edge; signs (defaulting to +1) say whether the variable enters the
/// parity check directly or inverted.
ProbVec cn_update_direct(const std::vector<ProbVec>& incoming,
                         const std::vector<int>& h, const PartitionTable& table,
                         const std::vector<int>* signs = nullptr);

/// Same update through shift / DFT / componentwise product / inverse DFT.
ProbVec cn_update_dft(const std::vector<ProbVec>& incoming,
                      const std::vector<int>& h, const PartitionTable& table,
                      const std::vector<int>* signs = nullptr);

/// Componentwise product of the prior and all incoming messages except none
/// (the caller excludes the target edge), renormalized with underflow clip.
ProbVec vn_update(const std::vector<ProbVec>& incoming, const ProbVec& prior);

struct DecodeResult {
    std::vector<int> u_hat;
    int iterations = 0;
    bool converged = false;
};

struct DecodeTrace {
    std::vector<int> violations;            // unsatisfied checks per iteration
    std::vector<std::vector<int>> u_hats;   // info hard decisions per iteration
};

/// Flooding BP on the coset-removed channel APPs.  app[n] is the message
/// about c_n.  Deterministic: identical inputs give identical outputs.
DecodeResult bp_decode(const std::vector<ProbVec>& app, const TannerGraph& graph,
                       const PartitionTable& table, int max_iter,
                       DecodeTrace* trace = nullptr);

}  // namespace iralat
