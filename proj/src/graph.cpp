#include "iralat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <stdexcept>

#include <json.hpp>

#include "iralat/rng.hpp"

namespace iralat {

namespace {

/// Largest-remainder apportionment of `total` among the classes of `dist`.
std::vector<std::pair<int, long>> apportion(const std::map<int, double>& dist,
                                            long total) {
    std::vector<std::pair<int, long>> counts;
    std::vector<std::pair<double, std::size_t>> rema;
    long assigned = 0;
    for (const auto& [deg, frac] : dist) {
        const double exact = frac * static_cast<double>(total);
        const long base = static_cast<long>(exact);
        counts.emplace_back(deg, base);
        rema.emplace_back(exact - static_cast<double>(base), counts.size() - 1);
        assigned += base;
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned)
        counts[rema[k % rema.size()].second].second += 1;
    return counts;
}

}  // namespace

int TannerGraph::constraint_residue(const PartitionTable& t, int n) const {
    int acc = 0;
    for (long l = cn_first[n]; l < cn_first[n] + cn_span[n]; ++l)
        acc = t.add(acc, g[l]);
    acc = t.add(acc, gp[n]);
    acc = t.add(acc, gpp[n]);
    return acc;
}

TannerGraph sample_graph(const CodeEnsemble& ensemble, std::uint64_t seed,
                         bool constrained) {
    const PartitionTable& table = *ensemble.partition;
    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> leader(0, table.size() - 1);

    TannerGraph gr;
    gr.K = ensemble.K;
    gr.N = ensemble.N;
    gr.M = table.size();
    gr.seed = seed;
    gr.constrained = constrained;

    // Check-node degrees: largest-remainder counts, then shuffled so the
    // degree classes are spread along the accumulator chain.
    gr.cn_span.reserve(gr.N);
    for (const auto& [deg, cnt] : apportion(ensemble.degree.node_cn, gr.N))
        gr.cn_span.insert(gr.cn_span.end(), cnt, deg);
    std::shuffle(gr.cn_span.begin(), gr.cn_span.end(), rng);
    gr.L = std::accumulate(gr.cn_span.begin(), gr.cn_span.end(), 0L);
    gr.cn_first.resize(gr.N);
    long acc = 0;
    for (int n = 0; n < gr.N; ++n) {
        gr.cn_first[n] = acc;
        acc += gr.cn_span[n];
    }

    // Variable-node degrees: largest-remainder counts, leftover edges
    // attached to (or removed from) the highest-degree class.
    gr.vn_degree.reserve(gr.K);
    auto vn_counts = apportion(ensemble.degree.node_vn, gr.K);
    for (const auto& [deg, cnt] : vn_counts)
        gr.vn_degree.insert(gr.vn_degree.end(), cnt, deg);
    long edge_sum = std::accumulate(gr.vn_degree.begin(), gr.vn_degree.end(), 0L);
    long delta = gr.L - edge_sum;
    std::sort(gr.vn_degree.begin(), gr.vn_degree.end());
    std::size_t cursor = gr.vn_degree.size();
    while (delta > 0) {
        if (cursor == 0) cursor = gr.vn_degree.size();
        gr.vn_degree[--cursor] += 1;
        --delta;
    }
    cursor = gr.vn_degree.size();
    while (delta < 0) {
        if (cursor == 0) cursor = gr.vn_degree.size();
        --cursor;
        if (gr.vn_degree[cursor] <= 2)
            throw std::runtime_error("sample_graph: cannot realize edge balance");
        gr.vn_degree[cursor] -= 1;
        ++delta;
    }

    // Interleaver: stratified placement.  Each node's occurrences are laid
    // out at equal spacing around the slot axis with a random phase and
    // jitter, then sorted into slots.  Compared to a uniform permutation
    // this equalizes the local degree mixture along the accumulator chain
    // and spreads every node's edges far apart, which measurably lowers the
    // short-length error floor; the degree profile is untouched.
    {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<std::pair<double, int>> targets;
        targets.reserve(gr.L);
        for (int k = 0; k < gr.K; ++k) {
            const int d = gr.vn_degree[k];
            const double phase = unif(rng);
            for (int j = 0; j < d; ++j) {
                double pos = (j + phase + 0.25 * (unif(rng) - 0.5)) / d;
                pos -= std::floor(pos);
                targets.emplace_back(pos, k);
            }
        }
        std::sort(targets.begin(), targets.end());
        gr.slot_owner.resize(gr.L);
        for (long l = 0; l < gr.L; ++l) gr.slot_owner[l] = targets[l].second;
    }

    // Conditioning.  A plain random permutation occasionally produces (a) a
    // node sitting twice in one combiner span, (b) a span with two or more
    // degree-2 nodes, (c) a node pair sharing two spans (a 4-cycle), (d) a
    // degree-2 node whose two spans are close on the accumulator chain, or
    // (e) two nodes of the same low degree whose span tuples nearly coincide.
    // (a)-(d) create small cores the decoder cannot resolve at any SNR, and
    // (d)/(e) additionally admit codewords whose transmitted difference is
    // only a handful of parity symbols; both show up as an error floor at
    // short lengths.  Local slot swaps drive a global badness count to zero.
    {
        std::vector<int> slot_cn(gr.L);
        for (int n = 0; n < gr.N; ++n)
            for (long l = gr.cn_first[n]; l < gr.cn_first[n] + gr.cn_span[n]; ++l)
                slot_cn[l] = n;

        // multiplicity of each cross-span owner pair
        std::unordered_map<long, int> pair_count;
        auto span_pairs = [&](int n, auto&& fn) {
            const long a = gr.cn_first[n];
            for (long l = a; l < a + gr.cn_span[n]; ++l)
                for (long l2 = l + 1; l2 < a + gr.cn_span[n]; ++l2) {
                    const int u = gr.slot_owner[l], v = gr.slot_owner[l2];
                    if (u == v) continue;
                    fn(static_cast<long>(std::min(u, v)) * gr.K + std::max(u, v));
                }
        };
        long badness = 0;  // pair repeats + in-span dups + surplus degree-2
        auto local_badness = [&](int n) {
            const long a = gr.cn_first[n];
            int deg2 = 0, dups = 0;
            for (long l = a; l < a + gr.cn_span[n]; ++l) {
                if (gr.vn_degree[gr.slot_owner[l]] == 2) ++deg2;
                for (long l2 = l + 1; l2 < a + gr.cn_span[n]; ++l2)
                    if (gr.slot_owner[l] == gr.slot_owner[l2]) ++dups;
            }
            return dups + std::max(0, deg2 - 1);
        };
        auto add_span = [&](int n, int dir) {
            span_pairs(n, [&](long key) {
                if (dir > 0) {
                    if (++pair_count[key] > 1) ++badness;
                } else {
                    if (pair_count[key]-- > 1) --badness;
                }
            });
            badness += dir * local_badness(n);
        };
        for (int n = 0; n < gr.N; ++n) add_span(n, +1);

        // Terms (d)/(e): span proximity of degree-2/3 nodes.  Per-node span
        // lists are kept under slot swaps, and attached nodes are bucketed in
        // a spatial hash on their quantized span tuple so each proximity
        // count touches only the neighboring cells.
        const int prox = std::max(2, std::min(10, gr.N / 25));
        std::vector<std::vector<int>> vn_cns(gr.K);
        for (long l = 0; l < gr.L; ++l)
            vn_cns[gr.slot_owner[l]].push_back(slot_cn[l]);
        for (auto& v : vn_cns) std::sort(v.begin(), v.end());
        const long long stride = gr.N / prox + 3;
        auto cell_key = [&](const std::vector<int>& a) {
            long long key = static_cast<long long>(a.size());
            for (int c : a) key = key * stride + c / prox + 1;
            return key;
        };
        std::unordered_multimap<long long, int> cells;
        // badness node k contributes against the currently attached nodes
        auto vn_terms = [&](int k, int dir) {
            const int d = gr.vn_degree[k];
            if (d > 3) return;
            const auto& a = vn_cns[k];
            long t = 0;
            if (d == 2 && a[1] - a[0] < prox) ++t;  // (d)
            std::vector<int> off(d, -1);
            for (;;) {
                long long key = d;
                for (int i = 0; i < d; ++i)
                    key = key * stride + a[i] / prox + 1 + off[i];
                auto [it, last] = cells.equal_range(key);
                for (; it != last; ++it) {
                    const int v = it->second;
                    if (v == k || gr.vn_degree[v] != d) continue;
                    const auto& b = vn_cns[v];
                    int s = 0;
                    for (int i = 0; i < d; ++i) s += std::abs(a[i] - b[i]);
                    if (s <= prox) ++t;  // (e)
                }
                std::size_t pos = 0;
                while (pos < static_cast<std::size_t>(d) && ++off[pos] == 2)
                    off[pos++] = -1;
                if (pos == static_cast<std::size_t>(d)) break;
            }
            badness += dir * t;
        };
        auto attach = [&](int k) {
            vn_terms(k, +1);
            if (gr.vn_degree[k] <= 3) cells.emplace(cell_key(vn_cns[k]), k);
        };
        auto detach = [&](int k) {
            vn_terms(k, -1);
            if (gr.vn_degree[k] > 3) return;
            auto [it, last] = cells.equal_range(cell_key(vn_cns[k]));
            for (; it != last; ++it)
                if (it->second == k) {
                    cells.erase(it);
                    break;
                }
        };
        for (int k = 0; k < gr.K; ++k) attach(k);

        auto replace_cn = [&](int k, int from, int to) {
            auto& v = vn_cns[k];
            v.erase(std::find(v.begin(), v.end(), from));
            v.insert(std::upper_bound(v.begin(), v.end(), to), to);
        };
        auto apply_swap = [&](long l, long l2, int n, int n2) {
            const int u = gr.slot_owner[l], w = gr.slot_owner[l2];
            detach(u);
            detach(w);
            add_span(n, -1);
            add_span(n2, -1);
            std::swap(gr.slot_owner[l], gr.slot_owner[l2]);
            replace_cn(u, n, n2);
            replace_cn(w, n2, n);
            add_span(n, +1);
            add_span(n2, +1);
            attach(w);
            attach(u);
        };

        std::uniform_int_distribution<long> any_slot(0, gr.L - 1);
        long stale = 0;
        for (long step = 0; badness > 0; ++step) {
            if (step > 4000L * gr.N)
                throw std::runtime_error(
                    "sample_graph: interleaver conditioning failed");
            const long l = any_slot(rng), l2 = any_slot(rng);
            const int n = slot_cn[l], n2 = slot_cn[l2];
            if (n == n2 || gr.slot_owner[l] == gr.slot_owner[l2]) continue;
            const long before = badness;
            apply_swap(l, l2, n, n2);
            // strict descent, with sideways moves allowed once progress stalls
            const bool keep = badness < before || (badness == before && stale > gr.N);
            if (!keep) apply_swap(l, l2, n, n2);
            stale = badness < before ? 0 : stale + 1;
        }
    }
    gr.vn_slots.assign(gr.K, {});
    for (long l = 0; l < gr.L; ++l) gr.vn_slots[gr.slot_owner[l]].push_back(l);

    gr.g.resize(gr.L);
    gr.gp.resize(gr.N);
    gr.gpp.resize(gr.N);
    gr.r.resize(gr.N);
    for (int n = 0; n < gr.N; ++n) {
        gr.gp[n] = leader(rng);
        gr.gpp[n] = leader(rng);
        const long a = gr.cn_first[n];
        const int j = gr.cn_span[n];
        for (long l = a; l < a + j - 1; ++l) gr.g[l] = leader(rng);
        if (constrained) {
            int sum = table.add(gr.gp[n], gr.gpp[n]);
            for (long l = a; l < a + j - 1; ++l) sum = table.add(sum, gr.g[l]);
            gr.g[a + j - 1] = table.neg(sum);
        } else {
            gr.g[a + j - 1] = leader(rng);
        }
        gr.r[n] = leader(rng);
    }
    return gr;
}

namespace {

std::vector<int> run_encoder(const std::vector<int>& u, const TannerGraph& gr,
                             const PartitionTable& t, bool add_coset) {
    if (static_cast<int>(u.size()) != gr.K)
        throw std::invalid_argument("encode: message length mismatch");
    for (int v : u)
        if (v < 0 || v >= gr.M)
            throw std::invalid_argument("encode: symbol index out of range");
    std::vector<int> x(gr.N);
    int prev = 0;  // c_0 = 0, dummy parity
    for (int n = 0; n < gr.N; ++n) {
        int s = 0;
        for (long l = gr.cn_first[n]; l < gr.cn_first[n] + gr.cn_span[n]; ++l)
            s = t.add(s, t.add(u[gr.slot_owner[l]], gr.g[l]));
        int c = t.add(t.add(s, t.add(prev, gr.gp[n])), gr.gpp[n]);
        prev = c;
        x[n] = add_coset ? t.add(c, gr.r[n]) : c;
    }
    return x;
}

}  // namespace

std::vector<int> encode(const std::vector<int>& u, const TannerGraph& graph,
                        const PartitionTable& table) {
    return run_encoder(u, graph, table, true);
}

std::vector<int> encode_precoset(const std::vector<int>& u,
                                 const TannerGraph& graph,
                                 const PartitionTable& table) {
    return run_encoder(u, graph, table, false);
}

std::string TannerGraph::to_json() const {
    nlohmann::json j;
    j["K"] = K;
    j["N"] = N;
    j["M"] = M;
    j["L"] = L;
    j["seed"] = seed;
    j["constrained"] = constrained;
    j["vn_degree"] = vn_degree;
    j["cn_span"] = cn_span;
    j["slot_owner"] = slot_owner;
    j["g"] = g;
    j["gp"] = gp;
    j["gpp"] = gpp;
    j["r"] = r;
    return j.dump();
}

TannerGraph TannerGraph::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    TannerGraph gr;
    gr.K = j.at("K");
    gr.N = j.at("N");
    gr.M = j.at("M");
    gr.L = j.at("L");
    gr.seed = j.at("seed");
    gr.constrained = j.at("constrained");
    gr.vn_degree = j.at("vn_degree").get<std::vector<int>>();
    gr.cn_span = j.at("cn_span").get<std::vector<int>>();
    gr.slot_owner = j.at("slot_owner").get<std::vector<int>>();
    gr.g = j.at("g").get<std::vector<int>>();
    gr.gp = j.at("gp").get<std::vector<int>>();
    gr.gpp = j.at("gpp").get<std::vector<int>>();
    gr.r = j.at("r").get<std::vector<int>>();
    gr.cn_first.resize(gr.N);
    long acc = 0;
    for (int n = 0; n < gr.N; ++n) {
        gr.cn_first[n] = acc;
        acc += gr.cn_span[n];
    }
    gr.vn_slots.assign(gr.K, {});
    for (long l = 0; l < gr.L; ++l) gr.vn_slots[gr.slot_owner[l]].push_back(l);
    return gr;
}

}  // namespace iralat
