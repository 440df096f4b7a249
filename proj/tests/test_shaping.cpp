#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iralat/shaping.hpp"

using namespace iralat;

TEST_CASE("cubic lattice second moment is 1/12") {
    const NsmResult r = nsm_estimate(Lattice::cubic4, 400000, 21);
    CHECK(r.nsm == doctest::Approx(1.0 / 12.0).epsilon(0.01));
    CHECK(std::abs(r.nsm - 1.0 / 12.0) < 6.0 * r.stderr_ + 1e-6);
    CHECK(shaping_gain_db(r.nsm) == doctest::Approx(0.0).epsilon(0.05));
}

TEST_CASE("quaternion lattice second moment and shaping gain") {
    const NsmResult r = nsm_estimate(Lattice::hurwitz, 1000000, 22, 4);
    CHECK(r.nsm == doctest::Approx(0.0766).epsilon(0.02));
    const double gain = shaping_gain_db(r.nsm);
    CHECK(gain == doctest::Approx(0.3657).epsilon(0.15));
}

TEST_CASE("estimates are reproducible for a fixed seed and worker count") {
    const NsmResult a = nsm_estimate(Lattice::hurwitz, 200000, 7, 3);
    const NsmResult b = nsm_estimate(Lattice::hurwitz, 200000, 7, 3);
    CHECK(a.nsm == b.nsm);
    CHECK(a.stderr_ == b.stderr_);
    const NsmResult c = nsm_estimate(Lattice::hurwitz, 200000, 8, 3);
    CHECK(a.nsm != c.nsm);
}

TEST_CASE("constellation is unit energy per complex dimension") {
    const PartitionTable hw =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    const Constellation c = normalize_constellation(hw);
    REQUIRE(c.points.size() == 25);
    CHECK(c.complex_dims == 2);
    double energy = 0.0;
    for (const auto& p : c.points)
        for (double v : p) energy += v * v;
    energy /= c.points.size();
    CHECK(energy == doctest::Approx(2.0).epsilon(1e-9));

    const PartitionTable gs =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::gaussian);
    const Constellation cg = normalize_constellation(gs);
    REQUIRE(cg.points.size() == 5);
    CHECK(cg.complex_dims == 1);
    double eg = 0.0;
    for (const auto& p : cg.points)
        for (double v : p) eg += v * v;
    eg /= cg.points.size();
    CHECK(eg == doctest::Approx(1.0).epsilon(1e-9));
}
