#pragma once

#include <cstdint>
#include <vector>

#include "iralat/messages.hpp"
#include "iralat/partition.hpp"
#include "iralat/shaping.hpp"

namespace iralat {

/// Unit-energy constellation per complex use, signal scaled by sqrt(SNR),
/// unit noise variance per complex dimension; snr_db < noiseless_snr_db
/// transmits without noise.
struct ChannelConfig {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    bool noiseless = false;
};

struct ReceivedFrame {
    std::vector<std::array<double, 4>> y;
};

ReceivedFrame awgn_transmit(const std::vector<int>& x,
                            const Constellation& constellation,
                            const ChannelConfig& config);

/// Per-symbol APPs of all coset leaders from the joint observation of the
/// complex uses carrying one lattice symbol; max-shifted before
/// exponentiation so the output is always a valid probability vector.
std::vector<ProbVec> compute_app(const ReceivedFrame& frame,
                                 const Constellation& constellation,
                                 const ChannelConfig& config);

/// Re-index each APP vector so it refers to c_n = x_n (-) r_n.
std::vector<ProbVec> remove_coset(const std::vector<ProbVec>& app,
                                  const std::vector<int>& r,
                                  const PartitionTable& table);

}  // namespace iralat
