#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "iralat/partition.hpp"

namespace iralat {

enum class Lattice { cubic4, hurwitz };

struct NsmResult {
    double nsm = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo estimate of the normalized second moment: uniform points in
/// a box are folded into the fundamental Voronoi region by the quantizer,
/// then the per-dimension energy is averaged and scaled by Vol^{2/n}.
NsmResult nsm_estimate(Lattice lattice, std::uint64_t samples,
                       std::uint64_t seed, int workers = 1);

/// 10*log10((1/12)/nsm) in dB; the cubic lattice is the 0 dB baseline.
double shaping_gain_db(double nsm);

/// Transmit constellation: the coset leaders scaled so that the average
/// energy per complex channel use is 1.
struct Constellation {
    std::vector<std::array<double, 4>> points;
    double scale = 1.0;
    double energy_per_complex_dim = 1.0;
    int complex_dims = 2;  // complex channel uses per lattice symbol
};

Constellation normalize_constellation(const PartitionTable& table);

}  // namespace iralat
