#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iralat/hurwitz.hpp"

namespace iralat {

/// Coset-leader table of the partition Lambda / xi*Lambda together with the
/// modulo-lattice addition/subtraction tables and the homomorphic index map
/// onto (Z_p)^m coordinates.
class PartitionTable {
  public:
    Ring ring = Ring::hurwitz;
    Hurwitz xi;
    std::vector<Hurwitz> leaders;        // leaders[0] == 0
    std::vector<int> add_table;          // M x M, row-major
    std::vector<int> sub_table;          // M x M, row-major
    std::vector<int> neg_table;          // inverse index of each leader
    int p = 0;                           // additive order of nonzero leaders
    int m_exp = 0;                       // M == p^m_exp
    std::vector<int> gen;                // m_exp generator indices
    std::vector<int> phi_fwd;            // (a0,a1,..) coords -> leader index
    std::vector<std::vector<int>> phi_coords;  // leader index -> coords

    int size() const { return static_cast<int>(leaders.size()); }

    int add(int a, int b) const { return add_table[a * size() + b]; }
    int sub(int a, int b) const { return sub_table[a * size() + b]; }
    int neg(int a) const { return neg_table[a]; }

    /// phi(coords): coords has m_exp entries in [0, p)
    int phi(const std::vector<int>& coords) const;

    std::string to_json() const;
    static PartitionTable from_json(const std::string& text);
};

/// Enumerates the cosets of xi*Lambda by reducing a bounded search set,
/// builds the group tables and the phi index map, and verifies the group
/// axioms and the homomorphism property exhaustively.
PartitionTable build_partition(const Hurwitz& xi, Ring ring);

}  // namespace iralat
