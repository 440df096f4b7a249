#include "iralat/sim.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "iralat/channel.hpp"
#include "iralat/exit.hpp"
#include "iralat/graph.hpp"
#include "iralat/rng.hpp"

namespace iralat {

void ExperimentSpec::validate() const {
    if (!ensemble || !ensemble->partition)
        throw std::invalid_argument("ExperimentSpec: missing ensemble");
    if (snr_step_db <= 0.0)
        throw std::invalid_argument("ExperimentSpec: step must be positive");
    if (snr_stop_db < snr_start_db - 1e-12)
        throw std::invalid_argument("ExperimentSpec: empty SNR range");
    if (max_iterations < 1)
        throw std::invalid_argument("ExperimentSpec: need at least one iteration");
    if (stop.min_symbol_errors < 1 || stop.max_frames < 1)
        throw std::invalid_argument("ExperimentSpec: bad stop rule");
}

namespace {

struct FrameOutcome {
    long symbol_errors = 0;
    bool frame_error = false;
    int iterations = 0;
};

std::vector<int> random_info(int k, int m, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::vector<int> u(k);
    for (int& v : u) v = pick(rng);
    return u;
}

FrameOutcome run_frame(const ExperimentSpec& spec, const Constellation& cons,
                       double snr_db, int point, long frame,
                       const TannerGraph* fixed) {
    const CodeEnsemble& ens = *spec.ensemble;
    const PartitionTable& table = *ens.partition;
    const std::uint64_t fs = derive_seed(spec.seed, point, frame);

    TannerGraph local;
    const TannerGraph* graph = fixed;
    if (!graph) {
        local = sample_graph(ens, derive_seed(fs, 1));
        graph = &local;
    }
    const std::vector<int> u = random_info(ens.K, table.size(), derive_seed(fs, 2));
    const std::vector<int> x = encode(u, *graph, table);

    ChannelConfig ch{snr_db, derive_seed(fs, 3), spec.noiseless};
    const ReceivedFrame y = awgn_transmit(x, cons, ch);
    const auto app = remove_coset(compute_app(y, cons, ch), graph->r, table);
    const DecodeResult res = bp_decode(app, *graph, table, spec.max_iterations);

    FrameOutcome out;
    for (int k = 0; k < ens.K; ++k)
        if (res.u_hat[k] != u[k]) ++out.symbol_errors;
    out.frame_error = out.symbol_errors > 0;
    out.iterations = res.iterations;
    return out;
}

}  // namespace

std::vector<ResultRow> run_ser_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const CodeEnsemble& ens = *spec.ensemble;
    const Constellation cons = normalize_constellation(*ens.partition);
    const int points = static_cast<int>(
        std::floor((spec.snr_stop_db - spec.snr_start_db) / spec.snr_step_db +
                   1e-9)) + 1;
    const int workers = std::max(1, spec.workers);
    // fixed batch size keeps the processed frame set independent of workers
    const long batch = 64;

    std::vector<ResultRow> rows;
    rows.reserve(points);
    for (int s = 0; s < points; ++s) {
        const double snr = spec.snr_start_db + s * spec.snr_step_db;
        TannerGraph fixed;
        if (spec.fixed_graph)
            fixed = sample_graph(ens, derive_seed(spec.seed, s));

        ResultRow row;
        row.snr_db = snr;
        const auto t0 = std::chrono::steady_clock::now();
        long next_frame = 0;
        long iter_sum = 0;
        while (row.symbol_errors < spec.stop.min_symbol_errors &&
               next_frame < spec.stop.max_frames) {
            const long first = next_frame;
            const long count = std::min(batch, spec.stop.max_frames - first);
            next_frame += count;

            std::vector<FrameOutcome> outs(count);
            std::atomic<long> cursor{0};
            auto work = [&] {
                for (;;) {
                    const long i = cursor.fetch_add(1);
                    if (i >= count) return;
                    outs[i] = run_frame(spec, cons, snr, s, first + i,
                                        spec.fixed_graph ? &fixed : nullptr);
                }
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();

            for (const auto& o : outs) {
                row.symbol_errors += o.symbol_errors;
                row.frame_errors += o.frame_error ? 1 : 0;
                iter_sum += o.iterations;
            }
            row.frames = next_frame;
        }
        row.hit_frame_cap = row.symbol_errors < spec.stop.min_symbol_errors;
        row.ser = static_cast<double>(row.symbol_errors) /
                  (static_cast<double>(row.frames) * ens.K);
        row.fer = static_cast<double>(row.frame_errors) / row.frames;
        row.avg_iterations = static_cast<double>(iter_sum) / row.frames;
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        rows.push_back(row);
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "snr_db,frames,symbol_errors,frame_errors,ser,fer,avg_iterations,"
          "hit_frame_cap\n";
    os.precision(10);
    for (const auto& r : rows)
        os << r.snr_db << "," << r.frames << "," << r.symbol_errors << ","
           << r.frame_errors << "," << r.ser << "," << r.fer << ","
           << r.avg_iterations << "," << (r.hit_frame_cap ? 1 : 0) << "\n";
    return os.str();
}

std::string rows_to_json(const std::vector<ResultRow>& rows,
                         const ExperimentSpec& spec) {
    nlohmann::json j;
    j["spec"] = {{"snr_start_db", spec.snr_start_db},
                 {"snr_stop_db", spec.snr_stop_db},
                 {"snr_step_db", spec.snr_step_db},
                 {"max_iterations", spec.max_iterations},
                 {"min_symbol_errors", spec.stop.min_symbol_errors},
                 {"max_frames", spec.stop.max_frames},
                 {"seed", spec.seed},
                 {"noiseless", spec.noiseless},
                 {"fixed_graph", spec.fixed_graph},
                 {"K", spec.ensemble->K},
                 {"N", spec.ensemble->N},
                 {"design_rate", spec.ensemble->design_rate}};
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"snr_db", r.snr_db},
                             {"frames", r.frames},
                             {"symbol_errors", r.symbol_errors},
                             {"frame_errors", r.frame_errors},
                             {"ser", r.ser},
                             {"fer", r.fer},
                             {"avg_iterations", r.avg_iterations},
                             {"wall_time_s", r.wall_time_s},
                             {"hit_frame_cap", r.hit_frame_cap}});
    return j.dump(2);
}

std::vector<CapacityRow> run_capacity_sweep(const Constellation& quaternion,
                                            const Constellation& gaussian,
                                            const std::vector<double>& snr_grid_db,
                                            std::uint64_t samples,
                                            std::uint64_t seed, int workers) {
    std::vector<CapacityRow> rows(snr_grid_db.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= snr_grid_db.size()) return;
            const double snr = snr_grid_db[i];
            CapacityRow& r = rows[i];
            r.snr_db = snr;
            r.unrestricted_bits = std::log2(1.0 + std::pow(10.0, snr / 10.0));
            const MiResult q =
                constellation_mi(quaternion, snr, samples, derive_seed(seed, i, 1));
            const MiResult g =
                constellation_mi(gaussian, snr, samples, derive_seed(seed, i, 2));
            r.quaternion_bits = q.bits_per_complex_dim;
            r.quaternion_stderr = q.stderr_;
            r.gaussian_bits = g.bits_per_complex_dim;
            r.gaussian_stderr = g.stderr_;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return rows;
}

std::string capacity_to_csv(const std::vector<CapacityRow>& rows) {
    std::ostringstream os;
    os << "snr_db,unrestricted_bits,quaternion_bits,quaternion_stderr,"
          "gaussian_bits,gaussian_stderr\n";
    os.precision(10);
    for (const auto& r : rows)
        os << r.snr_db << "," << r.unrestricted_bits << "," << r.quaternion_bits
           << "," << r.quaternion_stderr << "," << r.gaussian_bits << ","
           << r.gaussian_stderr << "\n";
    return os.str();
}

std::string StoredFrame::to_json() const {
    nlohmann::json j;
    j["snr_db"] = snr_db;
    j["max_iterations"] = max_iterations;
    j["graph"] = nlohmann::json::parse(graph.to_json());
    j["u"] = u;
    j["y"] = nlohmann::json::array();
    for (const auto& s : y) j["y"].push_back(s);
    return j.dump();
}

StoredFrame StoredFrame::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    StoredFrame f;
    f.snr_db = j.at("snr_db");
    f.max_iterations = j.at("max_iterations");
    f.graph = TannerGraph::from_json(j.at("graph").dump());
    f.u = j.at("u").get<std::vector<int>>();
    for (const auto& s : j.at("y"))
        f.y.push_back(s.get<std::array<double, 4>>());
    return f;
}

ReplayResult replay_frame(const StoredFrame& frame, const PartitionTable& table,
                          const Constellation& constellation,
                          int max_iter_override) {
    ReceivedFrame y{frame.y};
    ChannelConfig ch{frame.snr_db, 0, false};
    const auto app =
        remove_coset(compute_app(y, constellation, ch), frame.graph.r, table);
    const int iters =
        max_iter_override > 0 ? max_iter_override : frame.max_iterations;
    ReplayResult out;
    out.result = bp_decode(app, frame.graph, table, iters, &out.trace);
    for (std::size_t k = 0; k < frame.u.size(); ++k)
        if (out.result.u_hat[k] != frame.u[k]) ++out.symbol_errors;
    return out;
}

StoredFrame capture_frame(const ExperimentSpec& spec, double snr_db,
                          long frame_index) {
    spec.validate();
    const CodeEnsemble& ens = *spec.ensemble;
    const PartitionTable& table = *ens.partition;
    const Constellation cons = normalize_constellation(table);
    const int point = static_cast<int>(
        std::llround((snr_db - spec.snr_start_db) / spec.snr_step_db));
    const std::uint64_t fs = derive_seed(spec.seed, point, frame_index);

    StoredFrame f;
    f.snr_db = snr_db;
    f.max_iterations = spec.max_iterations;
    f.graph = spec.fixed_graph
                  ? sample_graph(ens, derive_seed(spec.seed, point))
                  : sample_graph(ens, derive_seed(fs, 1));
    f.u = random_info(ens.K, table.size(), derive_seed(fs, 2));
    const std::vector<int> x = encode(f.u, f.graph, table);
    ChannelConfig ch{snr_db, derive_seed(fs, 3), spec.noiseless};
    f.y = awgn_transmit(x, cons, ch).y;
    return f;
}

}  // namespace iralat
