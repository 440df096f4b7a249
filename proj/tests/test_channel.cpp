#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iralat/channel.hpp"
#include "iralat/rng.hpp"
#include "stats.hpp"

using namespace iralat;

namespace {

const PartitionTable& table() {
    static const PartitionTable t =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    return t;
}

const Constellation& cons() {
    static const Constellation c = normalize_constellation(table());
    return c;
}

}  // namespace

TEST_CASE("noise has variance 1/2 per real dimension") {
    std::vector<int> x(20000, 0);  // leader 0 sits at the origin
    const ChannelConfig ch{0.0, 71, false};
    const ReceivedFrame f = awgn_transmit(x, cons(), ch);
    double mean = 0.0, var = 0.0;
    const double n = 4.0 * x.size();
    for (const auto& y : f.y)
        for (double v : y) {
            mean += v;
            var += v * v;
        }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("noiseless transmission hits the scaled points") {
    std::vector<int> x{0, 1, 7, 24};
    const double snr_db = 6.0;
    const ChannelConfig ch{snr_db, 0, true};
    const ReceivedFrame f = awgn_transmit(x, cons(), ch);
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (int d = 0; d < 4; ++d)
            CHECK(f.y[i][d] == doctest::Approx(amp * cons().points[x[i]][d]));
}

TEST_CASE("app matches a high-precision oracle") {
    auto rng = make_rng(72);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    const double snr_db = 4.0;
    const ChannelConfig ch{snr_db, 0, false};
    const long double amp = std::sqrt(std::pow(10.0L, snr_db / 10.0L));
    for (int t = 0; t < 200; ++t) {
        ReceivedFrame f;
        f.y.push_back({uni(rng), uni(rng), uni(rng), uni(rng)});
        const auto app = compute_app(f, cons(), ch);
        REQUIRE(app.size() == 1);
        // direct normalized likelihoods in extended precision
        std::vector<long double> like(25);
        long double z = 0.0L;
        for (int k = 0; k < 25; ++k) {
            long double d2 = 0.0L;
            for (int i = 0; i < 4; ++i) {
                const long double e = f.y[0][i] - amp * cons().points[k][i];
                d2 += e * e;
            }
            like[k] = std::exp(-d2);
            z += like[k];
        }
        for (int k = 0; k < 25; ++k)
            CHECK(app[0][k] == doctest::Approx(static_cast<double>(like[k] / z))
                                   .epsilon(1e-9));
    }
}

TEST_CASE("coset removal permutes point masses correctly") {
    const PartitionTable& t = table();
    for (int x = 0; x < 25; ++x)
        for (int r = 0; r < 25; ++r) {
            const std::vector<ProbVec> app{point_mass(25, x)};
            const auto out = remove_coset(app, {r}, t);
            // the message must now point at c with x = c (+) r
            CHECK(hard_decision(out[0]) == t.sub(x, r));
        }
}

TEST_CASE("coset removal round trip preserves the vector") {
    auto rng = make_rng(73);
    std::uniform_real_distribution<double> uni(0.01, 1.0);
    std::uniform_int_distribution<int> leader(0, 24);
    const PartitionTable& t = table();
    for (int trial = 0; trial < 100; ++trial) {
        ProbVec p(25);
        for (double& v : p) v = uni(rng);
        normalize(p);
        const int r = leader(rng);
        const auto fwd = remove_coset({p}, {r}, t);
        const auto back = remove_coset(fwd, {t.neg(r)}, t);
        for (int k = 0; k < 25; ++k)
            CHECK(back[0][k] == doctest::Approx(p[k]).epsilon(1e-12));
    }
}

TEST_CASE("dithered channel output statistics do not depend on the symbol") {
    // with a uniform random coset, the probability assigned to the true
    // symbol after coset removal is identically distributed for every c
    const PartitionTable& t = table();
    const double snr_db = 2.0;
    auto collect = [&](int c, std::uint64_t seed) {
        auto rng = make_rng(seed);
        std::uniform_int_distribution<int> leader(0, 24);
        std::vector<double> samples;
        samples.reserve(4000);
        for (int i = 0; i < 4000; ++i) {
            const int r = leader(rng);
            const int x = t.add(c, r);
            const ChannelConfig ch{snr_db, rng(), false};
            const auto app = compute_app(awgn_transmit({x}, cons(), ch), cons(), ch);
            const auto msg = remove_coset(app, {r}, t);
            samples.push_back(msg[0][c]);
        }
        return samples;
    };
    const auto a = collect(0, 74);
    const auto b = collect(13, 75);
    CHECK(teststat::ks_two_sample_pvalue(a, b) > 0.01);
}

TEST_CASE("hard decisions on dithered noise are uniform over wrong symbols") {
    const PartitionTable& t = table();
    auto rng = make_rng(76);
    std::uniform_int_distribution<int> leader(0, 24);
    // at very low SNR the decision is nearly uniform over the 25 cosets
    std::vector<long> hist(25, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const int c = leader(rng), r = leader(rng);
        const int x = t.add(c, r);
        const ChannelConfig ch{-40.0, rng(), false};
        const auto app = compute_app(awgn_transmit({x}, cons(), ch), cons(), ch);
        const auto msg = remove_coset(app, {r}, t);
        hist[t.sub(hard_decision(msg[0]), c)] += 1;
    }
    const std::vector<double> observed(hist.begin(), hist.end());
    const std::vector<double> expected(25, static_cast<double>(n) / 25.0);
    CHECK(teststat::chi2_pvalue(observed, expected) > 0.01);
}
