#include "iralat/partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace iralat {

namespace {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

int PartitionTable::phi(const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != m_exp)
        throw std::invalid_argument("phi: coordinate count mismatch");
    int idx = 0;
    for (int c : coords) {
        if (c < 0 || c >= p) throw std::invalid_argument("phi: coordinate out of range");
        idx = idx * p + c;
    }
    return phi_fwd[idx];
}

PartitionTable build_partition(const Hurwitz& xi, Ring ring) {
    const std::int64_t n = hw_norm(xi);
    if (n <= 1) throw std::invalid_argument("build_partition: N(xi) must exceed 1");

    PartitionTable t;
    t.ring = ring;
    t.xi = xi;

    // Reduce a bounded search set and collect the distinct residues.
    std::map<std::array<std::int64_t, 4>, Hurwitz> found;
    const std::int64_t b = 2 * n;  // doubled-coordinate bound
    if (ring == Ring::hurwitz) {
        for (int parity = 0; parity < 2; ++parity) {
            for (std::int64_t c1 = -b + parity; c1 <= b; c1 += 2)
                for (std::int64_t ci = -b + parity; ci <= b; ci += 2)
                    for (std::int64_t cj = -b + parity; cj <= b; cj += 2)
                        for (std::int64_t ck = -b + parity; ck <= b; ck += 2) {
                            const Hurwitz r = mod_xi(
                                Hurwitz::from_doubled(c1, ci, cj, ck), xi, ring);
                            found.emplace(r.d, r);
                        }
        }
    } else {
        for (std::int64_t re = -n; re <= n; ++re)
            for (std::int64_t im = -n; im <= n; ++im) {
                const Hurwitz r = mod_xi(Hurwitz::from_ints(re, im, 0, 0), xi, ring);
                found.emplace(r.d, r);
            }
    }

    const std::int64_t expected = (ring == Ring::hurwitz) ? n * n : n;
    if (static_cast<std::int64_t>(found.size()) != expected)
        throw std::runtime_error("build_partition: enumerated " +
                                 std::to_string(found.size()) + " cosets, expected " +
                                 std::to_string(expected));

    for (auto& [key, h] : found) t.leaders.push_back(h);
    std::sort(t.leaders.begin(), t.leaders.end(),
              [](const Hurwitz& a, const Hurwitz& b) {
                  const auto na = hw_norm(a), nb = hw_norm(b);
                  if (na != nb) return na < nb;
                  return a.lex_less(b);
              });
    if (!t.leaders[0].is_zero())
        throw std::runtime_error("build_partition: psi_0 != 0");

    const int M = t.size();
    std::map<std::array<std::int64_t, 4>, int> index;
    for (int i = 0; i < M; ++i) index[t.leaders[i].d] = i;
    auto reduce_index = [&](const Hurwitz& h) {
        const Hurwitz r = mod_xi(h, xi, ring);
        auto it = index.find(r.d);
        if (it == index.end())
            throw std::runtime_error("build_partition: residue outside leader set");
        return it->second;
    };

    t.add_table.resize(M * M);
    t.sub_table.resize(M * M);
    t.neg_table.resize(M);
    for (int a = 0; a < M; ++a) {
        for (int c = 0; c < M; ++c) {
            t.add_table[a * M + c] = reduce_index(hw_add(t.leaders[a], t.leaders[c]));
            t.sub_table[a * M + c] = reduce_index(hw_sub(t.leaders[a], t.leaders[c]));
        }
        t.neg_table[a] = reduce_index(hw_neg(t.leaders[a]));
    }

    // Additive order of the nonzero leaders; all must share one prime order
    // for the (Z_p)^m coordinate system used by the DFT.
    t.p = 1;
    for (int a = 1; a < M; ++a) {
        int acc = a, order = 1;
        while (acc != 0) {
            acc = t.add(acc, a);
            ++order;
        }
        if (a == 1) t.p = order;
        else if (order != t.p)
            throw std::runtime_error("build_partition: mixed element orders");
    }
    if (!is_prime(t.p))
        throw std::runtime_error("build_partition: element order is not prime");
    {
        std::int64_t q = 1;
        t.m_exp = 0;
        while (q < M) { q *= t.p; ++t.m_exp; }
        if (q != M)
            throw std::runtime_error("build_partition: |Psi| is not a prime power");
    }

    // Deterministic generator search: leaders are ordered by (norm, lex), so
    // greedily extending the span picks the smallest-norm independent set.
    std::vector<int> span{0};
    for (int a = 1; a < M && static_cast<int>(t.gen.size()) < t.m_exp; ++a) {
        if (std::find(span.begin(), span.end(), a) != span.end()) continue;
        t.gen.push_back(a);
        std::vector<int> next;
        for (int s : span) {
            int acc = s;
            for (int k = 0; k < t.p; ++k) {
                next.push_back(acc);
                acc = t.add(acc, a);
            }
        }
        span = std::move(next);
    }
    if (static_cast<int>(span.size()) != M)
        throw std::runtime_error("build_partition: generator search failed");

    t.phi_fwd.assign(M, -1);
    t.phi_coords.assign(M, {});
    for (int code = 0; code < M; ++code) {
        int rem = code, idx = 0;
        std::vector<int> coords(t.m_exp);
        for (int g = t.m_exp - 1; g >= 0; --g) {
            coords[g] = rem % t.p;
            rem /= t.p;
        }
        for (int g = 0; g < t.m_exp; ++g)
            for (int k = 0; k < coords[g]; ++k) idx = t.add(idx, t.gen[g]);
        t.phi_fwd[code] = idx;
        t.phi_coords[idx] = coords;
    }
    for (int i = 0; i < M; ++i)
        if (t.phi_coords[i].empty())
            throw std::runtime_error("build_partition: phi is not a bijection");

    // Exhaustive homomorphism check: phi(a+b) == phi(a) (+) phi(b).
    for (int a = 0; a < M; ++a)
        for (int c = 0; c < M; ++c) {
            std::vector<int> sum(t.m_exp);
            for (int g = 0; g < t.m_exp; ++g)
                sum[g] = (t.phi_coords[a][g] + t.phi_coords[c][g]) % t.p;
            if (t.phi(sum) != t.add(a, c))
                throw std::runtime_error("build_partition: phi homomorphism violated");
        }

    return t;
}

std::string PartitionTable::to_json() const {
    nlohmann::json j;
    j["ring"] = (ring == Ring::hurwitz) ? "hurwitz" : "gaussian";
    j["xi"] = xi.d;
    j["p"] = p;
    j["m"] = m_exp;
    j["generators"] = gen;
    nlohmann::json lj = nlohmann::json::array();
    for (const auto& l : leaders) lj.push_back(l.d);
    j["leaders_doubled"] = lj;
    j["add_table"] = add_table;
    j["sub_table"] = sub_table;
    return j.dump(2);
}

PartitionTable PartitionTable::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const Ring ring = (j.at("ring").get<std::string>() == "hurwitz")
                          ? Ring::hurwitz
                          : Ring::gaussian;
    const auto xd = j.at("xi").get<std::array<std::int64_t, 4>>();
    // rebuild from scratch; the stored tables are then cross-checked
    PartitionTable t = build_partition(
        Hurwitz::from_doubled(xd[0], xd[1], xd[2], xd[3]), ring);
    if (j.at("add_table").get<std::vector<int>>() != t.add_table)
        throw std::runtime_error("PartitionTable::from_json: table mismatch");
    return t;
}

}  // namespace iralat
