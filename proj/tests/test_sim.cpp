#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iralat/sim.hpp"

using namespace iralat;

namespace {

const PartitionTable& table() {
    static const PartitionTable t =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::hurwitz);
    return t;
}

ExperimentSpec small_spec(const CodeEnsemble& ens) {
    ExperimentSpec spec;
    spec.ensemble = &ens;
    spec.snr_start_db = 4.0;
    spec.snr_stop_db = 4.0;
    spec.snr_step_db = 0.1;
    spec.max_iterations = 50;
    spec.stop = {5, 40};
    spec.seed = 91;
    spec.workers = 2;
    return spec;
}

}  // namespace

TEST_CASE("noise-off sweep has zero errors") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 200);
    ExperimentSpec spec = small_spec(ens);
    spec.noiseless = true;
    const auto rows = run_ser_sweep(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].symbol_errors == 0);
    CHECK(rows[0].ser == 0.0);
    CHECK(rows[0].fer == 0.0);
    CHECK(rows[0].hit_frame_cap);
    CHECK(rows[0].frames == 40);
}

TEST_CASE("sweeps are byte-identical across runs and worker counts") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_start_db = 1.0;
    spec.snr_stop_db = 1.2;
    const auto a = run_ser_sweep(spec);
    const auto b = run_ser_sweep(spec);
    CHECK(rows_to_csv(a) == rows_to_csv(b));
    spec.workers = 5;
    const auto c = run_ser_sweep(spec);
    CHECK(rows_to_csv(a) == rows_to_csv(c));
    REQUIRE(a.size() == 3);
    for (const auto& r : a) CHECK(r.snr_db >= 1.0);
}

TEST_CASE("early stop rule is respected") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_start_db = -2.0;  // far below threshold: every frame fails
    spec.snr_stop_db = -2.0;
    spec.stop = {50, 1000};
    const auto rows = run_ser_sweep(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].symbol_errors >= 50);
    CHECK_FALSE(rows[0].hit_frame_cap);
    CHECK(rows[0].frames < 1000);
}

TEST_CASE("stored frames replay bit-identically") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_start_db = 2.0;
    spec.snr_stop_db = 2.0;
    const Constellation cons = normalize_constellation(table());
    const StoredFrame f = capture_frame(spec, 2.0, 3);
    const StoredFrame g = StoredFrame::from_json(f.to_json());
    const ReplayResult a = replay_frame(f, table(), cons);
    const ReplayResult b = replay_frame(g, table(), cons);
    CHECK(a.result.u_hat == b.result.u_hat);
    CHECK(a.result.iterations == b.result.iterations);
    CHECK(a.trace.violations == b.trace.violations);
}

TEST_CASE("longer replay keeps the trace prefix") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_start_db = 0.5;  // below threshold: unlikely to converge
    spec.snr_stop_db = 0.5;
    spec.max_iterations = 10;
    const Constellation cons = normalize_constellation(table());
    const StoredFrame f = capture_frame(spec, 0.5, 0);
    const ReplayResult shorter = replay_frame(f, table(), cons);
    const ReplayResult longer = replay_frame(f, table(), cons, 20);
    REQUIRE(longer.trace.violations.size() >= shorter.trace.violations.size());
    for (std::size_t i = 0; i < shorter.trace.violations.size(); ++i)
        CHECK(shorter.trace.violations[i] == longer.trace.violations[i]);
}

TEST_CASE("violations decay on a converging frame") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 200);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_start_db = 4.0;
    spec.snr_stop_db = 4.0;
    const Constellation cons = normalize_constellation(table());
    const StoredFrame f = capture_frame(spec, 4.0, 1);
    const ReplayResult r = replay_frame(f, table(), cons);
    REQUIRE(r.result.converged);
    CHECK(r.trace.violations.back() == 0);
    CHECK(r.trace.violations.front() >= r.trace.violations.back());
}

TEST_CASE("capacity sweep dominates and saturates correctly") {
    const PartitionTable gs =
        build_partition(Hurwitz::from_ints(1, 2, 0, 0), Ring::gaussian);
    const auto rows = run_capacity_sweep(
        normalize_constellation(table()), normalize_constellation(gs),
        {0.0, 5.0, 25.0}, 40000, 92, 2);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.unrestricted_bits >=
              r.quaternion_bits - 3.0 * r.quaternion_stderr - 0.01);
        CHECK(r.quaternion_bits >= r.gaussian_bits - 3.0 * r.gaussian_stderr - 0.01);
    }
    // both saturate at log2(25)/2 = log2(5) bits per complex dimension
    CHECK(rows[2].quaternion_bits == doctest::Approx(std::log2(5.0)).epsilon(0.01));
    CHECK(rows[2].gaussian_bits == doctest::Approx(std::log2(5.0)).epsilon(0.01));
}

TEST_CASE("csv and json outputs are well formed") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.noiseless = true;
    spec.stop = {5, 4};
    const auto rows = run_ser_sweep(spec);
    const std::string csv = rows_to_csv(rows);
    CHECK(csv.find("snr_db,frames") == 0);
    CHECK(csv.find("\n4,") != std::string::npos);
    const std::string json = rows_to_json(rows, spec);
    CHECK(json.find("\"rows\"") != std::string::npos);
    CHECK(json.find("\"seed\": 91") != std::string::npos);
}

TEST_CASE("spec validation") {
    const Preset& p = preset_by_rate("1/2");
    const CodeEnsemble ens = make_ensemble(p.edge_vn, p.edge_cn, table(), 300);
    ExperimentSpec spec = small_spec(ens);
    spec.snr_step_db = 0.0;
    CHECK_THROWS(spec.validate());
    spec = small_spec(ens);
    spec.ensemble = nullptr;
    CHECK_THROWS(spec.validate());
    spec = small_spec(ens);
    spec.max_iterations = 0;
    CHECK_THROWS(spec.validate());
}
