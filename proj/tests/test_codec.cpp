#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "iralat/graph.hpp"
#include "iralat/rng.hpp"

using namespace iralat;

namespace {

const PartitionTable& table() {
    static const PartitionTable t =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    return t;
}

std::vector<int> random_message(int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 24);
    std::vector<int> u(k);
    for (int& v : u) v = pick(rng);
    return u;
}

}  // namespace

TEST_CASE("presets reproduce the shipped design rates") {
    const struct {
        const char* name;
        double kn;
        double bits;
    } cases[] = {{"3/4", 0.75, 1.741}, {"2/3", 2.0 / 3.0, 1.548},
                 {"1/2", 0.5, 1.161}};
    for (const auto& c : cases) {
        const Preset& p = preset_by_rate(c.name);
        const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 1200);
        CHECK(std::abs(static_cast<double>(e.K) / e.N - c.kn) < 0.01);
        CHECK(std::abs(e.design_rate - c.bits) < 0.01);
    }
    CHECK_THROWS(preset_by_rate("5/6"));
}

TEST_CASE("edge bookkeeping is consistent") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 600);
    const TannerGraph g = sample_graph(e, 99);
    CHECK(g.L == std::accumulate(g.cn_span.begin(), g.cn_span.end(), 0L));
    CHECK(g.L == std::accumulate(g.vn_degree.begin(), g.vn_degree.end(), 0L));
    CHECK(static_cast<long>(g.slot_owner.size()) == g.L);
    long slots = 0;
    for (int k = 0; k < g.K; ++k) {
        CHECK(static_cast<int>(g.vn_slots[k].size()) == g.vn_degree[k]);
        slots += g.vn_slots[k].size();
        CHECK(g.vn_degree[k] >= 2);
    }
    CHECK(slots == g.L);
}

TEST_CASE("sampling is deterministic in the seed") {
    const Preset& p = preset_by_rate("2/3");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    const TannerGraph a = sample_graph(e, 42);
    const TannerGraph b = sample_graph(e, 42);
    CHECK(a.to_json() == b.to_json());
    const TannerGraph c = sample_graph(e, 43);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("graph json round trip") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 200);
    const TannerGraph a = sample_graph(e, 5);
    const TannerGraph b = TannerGraph::from_json(a.to_json());
    CHECK(a.to_json() == b.to_json());
    CHECK(b.cn_first == a.cn_first);
    CHECK(b.vn_slots == a.vn_slots);
}

TEST_CASE("interleaver conditioning invariants") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 500);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const TannerGraph g = sample_graph(e, seed);
        std::set<std::pair<int, int>> pairs;
        for (int n = 0; n < g.N; ++n) {
            const long a = g.cn_first[n];
            std::set<int> owners;
            int deg2 = 0;
            for (long l = a; l < a + g.cn_span[n]; ++l) {
                // no node twice in one span
                CHECK(owners.insert(g.slot_owner[l]).second);
                if (g.vn_degree[g.slot_owner[l]] == 2) ++deg2;
            }
            // at most one degree-2 node per span
            CHECK(deg2 <= 1);
            for (long l = a; l < a + g.cn_span[n]; ++l)
                for (long l2 = l + 1; l2 < a + g.cn_span[n]; ++l2) {
                    auto key = std::minmax(g.slot_owner[l], g.slot_owner[l2]);
                    // no node pair shares two spans
                    CHECK(pairs.insert(key).second);
                }
        }
    }
}

TEST_CASE("constraint residue vanishes exactly on constrained graphs") {
    const Preset& p = preset_by_rate("3/4");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 400);
    const TannerGraph g = sample_graph(e, 17);
    for (int n = 0; n < g.N; ++n) CHECK(g.constraint_residue(table(), n) == 0);

    const TannerGraph u = sample_graph(e, 17, false);
    int nonzero = 0;
    for (int n = 0; n < u.N; ++n)
        if (u.constraint_residue(table(), n) != 0) ++nonzero;
    // a uniform residue misses zero 24 times out of 25
    CHECK(nonzero > u.N / 2);
}

TEST_CASE("encoding is linear over the coset group") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    auto rng = make_rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const TannerGraph g = sample_graph(e, derive_seed(31, trial));
        for (int rep = 0; rep < 5; ++rep) {
            const auto u1 = random_message(e.K, rng);
            const auto u2 = random_message(e.K, rng);
            std::vector<int> u3(e.K);
            for (int k = 0; k < e.K; ++k) u3[k] = table().add(u1[k], u2[k]);
            const auto c1 = encode_precoset(u1, g, table());
            const auto c2 = encode_precoset(u2, g, table());
            const auto c3 = encode_precoset(u3, g, table());
            for (int n = 0; n < e.N; ++n)
                CHECK(c3[n] == table().add(c1[n], c2[n]));
        }
    }
}

TEST_CASE("unconstrained graphs break linearity") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    auto rng = make_rng(32);
    int broken = 0;
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
        const TannerGraph g = sample_graph(e, derive_seed(32, trial), false);
        const auto u1 = random_message(e.K, rng);
        const auto u2 = random_message(e.K, rng);
        std::vector<int> u3(e.K);
        for (int k = 0; k < e.K; ++k) u3[k] = table().add(u1[k], u2[k]);
        const auto c1 = encode_precoset(u1, g, table());
        const auto c2 = encode_precoset(u2, g, table());
        const auto c3 = encode_precoset(u3, g, table());
        for (int n = 0; n < e.N; ++n)
            if (c3[n] != table().add(c1[n], c2[n])) {
                ++broken;
                break;
            }
    }
    CHECK(broken > trials * 95 / 100);
}

TEST_CASE("coset sequence shifts the codeword") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 200);
    const TannerGraph g = sample_graph(e, 77);
    auto rng = make_rng(77);
    const auto u = random_message(e.K, rng);
    const auto c = encode_precoset(u, g, table());
    const auto x = encode(u, g, table());
    for (int n = 0; n < e.N; ++n) CHECK(x[n] == table().add(c[n], g.r[n]));
}

TEST_CASE("make_ensemble rejects bad inputs") {
    CHECK_THROWS(make_ensemble({{2, 0.5}, {3, 0.6}}, {{3, 1.0}}, table(), 100));
    CHECK_THROWS(make_ensemble({{1, 1.0}}, {{3, 1.0}}, table(), 100));
    CHECK_THROWS(make_ensemble({{2, 1.0}}, {{3, 1.0}}, table(), 0));
}
