#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iralat/exit.hpp"
#include "iralat/ensemble.hpp"
#include "iralat/lp.hpp"

using namespace iralat;

namespace {

const PartitionTable& table() {
    static const PartitionTable t =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    return t;
}

const JTable& jtable() {
    // coarse but fast table for unit tests; the acceptance suite uses the
    // cached high-sample build
    static const JTable jt = JTable::build(25, 10.0, 0.05, 30000, 101, 4);
    return jt;
}

}  // namespace

TEST_CASE("llr samples have the single-parameter gaussian moments") {
    for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
        const LlrModel model{sigma, 25};
        const auto samples = sample_llr(model, 40000, 81);
        double mean = 0.0, var = 0.0, cov = 0.0;
        for (const auto& w : samples) {
            for (double v : w) mean += v;
            var += (w[3] - sigma * sigma / 2) * (w[3] - sigma * sigma / 2);
            cov += (w[3] - sigma * sigma / 2) * (w[11] - sigma * sigma / 2);
        }
        mean /= samples.size() * 25.0;
        var /= samples.size();
        cov /= samples.size();
        CHECK(mean == doctest::Approx(sigma * sigma / 2).epsilon(0.05));
        CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.08));
        CHECK(cov == doctest::Approx(sigma * sigma / 2).epsilon(0.12));
    }
}

TEST_CASE("mutual information endpoints") {
    const auto zero = sample_llr({0.0, 25}, 5000, 82);
    CHECK(mutual_info(zero) == doctest::Approx(0.0).epsilon(1e-9));
    const auto big = sample_llr({8.0, 25}, 5000, 83);
    CHECK(mutual_info(big) > 0.999);
}

TEST_CASE("j table is monotone and inverts within tolerance") {
    const JTable& jt = jtable();
    double prev = -1.0;
    for (double s = 0.0; s <= jt.sigma_max(); s += 0.01) {
        const double v = jt.j(s);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    for (double info : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        CHECK(jt.j(jt.j_inv(info)) == doctest::Approx(info).epsilon(1e-6));
    }
    // round trip against fresh mutual-information estimates
    for (double s : {0.8, 1.6, 2.4}) {
        const double mi = mutual_info(sample_llr({s, 25}, 60000, 84));
        CHECK(std::abs(jt.j(s) - mi) < 0.02);
    }
    CHECK(jt.j(0.0) == 0.0);
    CHECK(jt.j_inv(0.0) == 0.0);
}

TEST_CASE("j table serialization round trip") {
    const JTable& jt = jtable();
    const JTable copy = JTable::from_json(jt.to_json());
    for (double s = 0.0; s < jt.sigma_max(); s += 0.3)
        CHECK(copy.j(s) == doctest::Approx(jt.j(s)).epsilon(1e-12));
}

TEST_CASE("degree-2 repetition transfer is the identity") {
    const std::map<int, double> alpha{{2, 1.0}};
    for (double info : {0.1, 0.4, 0.7, 0.9})
        CHECK(vnd_eval(alpha, info, jtable()) == doctest::Approx(info).epsilon(0.02));
}

TEST_CASE("vnd increases with node degree") {
    for (double info : {0.3, 0.6}) {
        double prev = 0.0;
        for (int d : {2, 4, 8, 16}) {
            const double v = vnd_eval({{d, 1.0}}, info, jtable());
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(prev > info);
    }
}

TEST_CASE("cnd curve is sane and improves with snr") {
    const Constellation cons = normalize_constellation(table());
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    CndConfig cfg;
    cfg.trials = 800;
    cfg.seed = 85;
    cfg.workers = 4;
    const ExitCurve lo = cnd_curve_degree(3, 0.0, grid, table(), cons, jtable(), cfg);
    const ExitCurve hi = cnd_curve_degree(3, 8.0, grid, table(), cons, jtable(), cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(lo.values[i] >= 0.0);
        CHECK(lo.values[i] <= 1.0);
        CHECK(hi.values[i] > lo.values[i] - 0.02);
    }
    // more a-priori information helps the check node
    CHECK(hi.values.back() > hi.values.front());
    CHECK(hi.values.back() > 0.9);
}

TEST_CASE("cnd mixture lies between the per-degree conditionals") {
    const Constellation cons = normalize_constellation(table());
    const std::vector<double> grid{0.0, 0.5, 1.0};
    CndConfig cfg;
    cfg.trials = 600;
    cfg.seed = 86;
    cfg.workers = 2;
    // a pure distribution reduces to the single-degree curve exactly
    const ExitCurve pure =
        cnd_curve({{3, 1.0}}, 3.0, grid, table(), cons, jtable(), cfg);
    const ExitCurve c3 = cnd_curve_degree(3, 3.0, grid, table(), cons, jtable(), cfg);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(pure.values[i] == doctest::Approx(c3.values[i]).epsilon(1e-12));
    // a mixture's conditionals bracket the mixed curve
    const auto cond = cnd_conditional({{1, 0.25}, {3, 0.75}}, 3.0, grid, table(),
                                      cons, jtable(), cfg);
    const ExitCurve mix =
        cnd_curve({{1, 0.25}, {3, 0.75}}, 3.0, grid, table(), cons, jtable(), cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lo = std::min(cond.at(1).values[i], cond.at(3).values[i]);
        const double hi = std::max(cond.at(1).values[i], cond.at(3).values[i]);
        CHECK(mix.values[i] >= lo - 1e-9);
        CHECK(mix.values[i] <= hi + 1e-9);
    }
}

TEST_CASE("tunnel predicate distinguishes open from closed") {
    ExitCurve cnd;
    cnd.grid = uniform_grid(11);
    cnd.values.assign(11, 0.0);
    // a transfer that dominates the diagonal comfortably
    for (int i = 0; i < 11; ++i) cnd.values[i] = 0.5 + 0.5 * cnd.grid[i];
    CHECK(tunnel_open({{4, 1.0}}, cnd, jtable(), 0.0001));
    // and one pinned to zero everywhere
    ExitCurve flat;
    flat.grid = cnd.grid;
    flat.values.assign(11, 0.0);
    CHECK_FALSE(tunnel_open({{4, 1.0}}, flat, jtable(), 0.0001));
}

TEST_CASE("sampled density evolution separates good from bad snr") {
    const Constellation cons = normalize_constellation(table());
    const Preset& p = preset_by_rate("1/2");
    DeConfig cfg;
    cfg.population = 600;
    cfg.max_iterations = 60;
    cfg.chain_len = 30;
    cfg.seed = 99;
    cfg.workers = 4;
    CHECK(ensemble_converges(p.edge_vn, p.edge_cn, 8.0, table(), cons, cfg));
    CHECK_FALSE(ensemble_converges(p.edge_vn, p.edge_cn, -3.0, table(), cons, cfg));
}

TEST_CASE("shannon limits for the shipped rates") {
    CHECK(shannon_limit_db(1.741) == doctest::Approx(3.70).epsilon(0.004));
    CHECK(shannon_limit_db(1.548) == doctest::Approx(2.84).epsilon(0.004));
    CHECK(shannon_limit_db(1.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS(shannon_limit_db(0.0));
}

TEST_CASE("constellation mi saturates at the alphabet entropy") {
    const Constellation cons = normalize_constellation(table());
    const MiResult low = constellation_mi(cons, -20.0, 20000, 87);
    CHECK(low.bits_per_complex_dim < 0.1);
    const MiResult high = constellation_mi(cons, 25.0, 20000, 88);
    CHECK(high.bits_per_complex_dim ==
          doctest::Approx(std::log2(25.0) / 2.0).epsilon(0.01));
}

TEST_CASE("lp solver on known problems") {
    // max x+y s.t. x<=2, y<=3, x+y<=4
    const LpResult r = lp_solve({{1, 0}, {0, 1}, {1, 1}}, {2, 3, 4}, {1, 1});
    REQUIRE(r.feasible);
    CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-9));
    // infeasible: x <= -1 with x >= 0
    const LpResult inf = lp_solve({{1}, {-1}}, {-2, 1}, {1});
    CHECK_FALSE(inf.feasible);
    // equality via paired rows: x = 1.5, maximize -x
    const LpResult eq = lp_solve({{1}, {-1}}, {1.5, -1.5}, {-1});
    REQUIRE(eq.feasible);
    CHECK(eq.x[0] == doctest::Approx(1.5).epsilon(1e-9));
}
