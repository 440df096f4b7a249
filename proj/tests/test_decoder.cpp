#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "iralat/channel.hpp"
#include "iralat/decoder.hpp"
#include "iralat/rng.hpp"

using namespace iralat;

namespace {

const PartitionTable& table() {
    static const PartitionTable t =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    return t;
}

ProbVec random_prob(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> uni(0.01, 1.0);
    ProbVec p(m);
    for (double& v : p) v = uni(rng);
    normalize(p);
    return p;
}

}  // namespace

TEST_CASE("group DFT inverts itself") {
    const GroupDft dft(table());
    auto rng = make_rng(51);
    for (int t = 0; t < 100; ++t) {
        const ProbVec p = random_prob(rng, 25);
        const ProbVec q = dft.inverse(dft.forward(p));
        for (int k = 0; k < 25; ++k) CHECK(q[k] == doctest::Approx(p[k]).epsilon(1e-12));
    }
}

TEST_CASE("convolution theorem holds for the group DFT") {
    const GroupDft dft(table());
    auto rng = make_rng(52);
    const ProbVec a = random_prob(rng, 25), b = random_prob(rng, 25);
    // direct group convolution
    ProbVec conv(25, 0.0);
    for (int u = 0; u < 25; ++u)
        for (int v = 0; v < 25; ++v) conv[table().add(u, v)] += a[u] * b[v];
    const auto fa = dft.forward(a), fb = dft.forward(b);
    std::vector<std::complex<double>> prod(25);
    for (int u = 0; u < 25; ++u) prod[u] = fa[u] * fb[u];
    const ProbVec back = dft.inverse(prod);
    for (int k = 0; k < 25; ++k)
        CHECK(back[k] == doctest::Approx(conv[k]).epsilon(1e-10));
}

TEST_CASE("DFT check-node update matches exact enumeration") {
    auto rng = make_rng(53);
    std::uniform_int_distribution<int> deg(1, 4);
    std::uniform_int_distribution<int> leader(0, 24);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int t = 0; t < 1000; ++t) {
        const int d = deg(rng);
        std::vector<ProbVec> incoming;
        std::vector<int> h, signs;
        for (int i = 0; i < d; ++i) {
            incoming.push_back(random_prob(rng, 25));
            h.push_back(leader(rng));
            signs.push_back(coin(rng) ? 1 : -1);
        }
        h.push_back(leader(rng));
        signs.push_back(coin(rng) ? 1 : -1);
        const ProbVec a = cn_update_direct(incoming, h, table(), &signs);
        const ProbVec b = cn_update_dft(incoming, h, table(), &signs);
        for (int k = 0; k < 25; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);
    }
}

TEST_CASE("check node with point-mass inputs solves the constraint") {
    auto rng = make_rng(54);
    std::uniform_int_distribution<int> leader(0, 24);
    const PartitionTable& t = table();
    for (int trial = 0; trial < 200; ++trial) {
        const int v1 = leader(rng), v2 = leader(rng);
        const int h1 = leader(rng), h2 = leader(rng), ht = leader(rng);
        const std::vector<ProbVec> incoming{point_mass(25, v1), point_mass(25, v2)};
        const std::vector<int> h{h1, h2, ht};
        const std::vector<int> signs{1, -1, 1};
        // (v1+h1) - v2 + h2 + (k + ht) = 0
        const int sum = t.add(t.add(v1, h1), t.add(t.neg(v2), h2));
        const int expect = t.sub(t.neg(sum), ht);
        const ProbVec out = cn_update_dft(incoming, h, t, &signs);
        CHECK(hard_decision(out) == expect);
        CHECK(out[expect] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("variable node update multiplies and normalizes") {
    auto rng = make_rng(55);
    const ProbVec a = random_prob(rng, 25), b = random_prob(rng, 25),
                  prior = random_prob(rng, 25);
    const ProbVec out = vn_update({a, b}, prior);
    double z = 0.0;
    for (int k = 0; k < 25; ++k) z += prior[k] * a[k] * b[k];
    for (int k = 0; k < 25; ++k)
        CHECK(out[k] == doctest::Approx(prior[k] * a[k] * b[k] / z).epsilon(1e-12));
}

TEST_CASE("vn update survives hard zero conflicts") {
    const ProbVec a = point_mass(25, 3);
    const ProbVec b = point_mass(25, 5);
    const ProbVec out = vn_update({a, b}, uniform_prob(25));
    CHECK(is_valid_prob(out));
}

TEST_CASE("noiseless end-to-end decoding recovers the message") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    const Constellation cons = normalize_constellation(table());
    auto rng = make_rng(56);
    std::uniform_int_distribution<int> pick(0, 24);
    for (int frame = 0; frame < 30; ++frame) {
        const TannerGraph g = sample_graph(e, derive_seed(56, frame));
        std::vector<int> u(e.K);
        for (int& v : u) v = pick(rng);
        const auto x = encode(u, g, table());
        const ChannelConfig ch{5.0, derive_seed(57, frame), true};
        const auto app = remove_coset(
            compute_app(awgn_transmit(x, cons, ch), cons, ch), g.r, table());
        const DecodeResult res = bp_decode(app, g, table(), 60);
        CHECK(res.converged);
        CHECK(res.u_hat == u);
    }
}

TEST_CASE("decode trace records convergence") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    const Constellation cons = normalize_constellation(table());
    const TannerGraph g = sample_graph(e, 58);
    auto rng = make_rng(58);
    std::uniform_int_distribution<int> pick(0, 24);
    std::vector<int> u(e.K);
    for (int& v : u) v = pick(rng);
    const auto x = encode(u, g, table());
    const ChannelConfig ch{5.0, 59, true};
    const auto app = remove_coset(
        compute_app(awgn_transmit(x, cons, ch), cons, ch), g.r, table());
    DecodeTrace trace;
    const DecodeResult res = bp_decode(app, g, table(), 60, &trace);
    REQUIRE(res.converged);
    REQUIRE(static_cast<int>(trace.violations.size()) == res.iterations);
    CHECK(trace.violations.back() == 0);
    CHECK(trace.u_hats.back() == u);
}

TEST_CASE("decoder is deterministic") {
    const Preset& p = preset_by_rate("2/3");
    const CodeEnsemble e = make_ensemble(p.edge_vn, p.edge_cn, table(), 120);
    const Constellation cons = normalize_constellation(table());
    const TannerGraph g = sample_graph(e, 60);
    auto rng = make_rng(60);
    std::uniform_int_distribution<int> pick(0, 24);
    std::vector<int> u(e.K);
    for (int& v : u) v = pick(rng);
    const auto x = encode(u, g, table());
    const ChannelConfig ch{4.0, 61, false};
    const auto app = remove_coset(
        compute_app(awgn_transmit(x, cons, ch), cons, ch), g.r, table());
    const DecodeResult a = bp_decode(app, g, table(), 40);
    const DecodeResult b = bp_decode(app, g, table(), 40);
    CHECK(a.u_hat == b.u_hat);
    CHECK(a.iterations == b.iterations);
    CHECK(a.converged == b.converged);
}
