#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iralat/decoder.hpp"
#include "iralat/ensemble.hpp"
#include "iralat/shaping.hpp"

namespace iralat {

/// Per-SNR-point early stop: a point finishes once it has seen
/// `min_symbol_errors` symbol-error events, or at `max_frames` frames
/// (flagged on the row).
struct StopRule {
    long min_symbol_errors = 100;
    long max_frames = 100000;
};

struct ExperimentSpec {
    const CodeEnsemble* ensemble = nullptr;
    double snr_start_db = 0.0;
    double snr_stop_db = 0.0;
    double snr_step_db = 0.1;
    int max_iterations = 200;
    StopRule stop;
    std::uint64_t seed = 0;
    bool noiseless = false;
    /// Debug mode: decode every frame on one fixed graph instance instead of
    /// drawing a fresh instance (and fresh g, g', g'', r) per frame.
    bool fixed_graph = false;
    int workers = 1;

    void validate() const;
};

struct ResultRow {
    double snr_db = 0.0;
    long frames = 0;
    long symbol_errors = 0;
    long frame_errors = 0;
    double ser = 0.0;
    double fer = 0.0;
    double avg_iterations = 0.0;
    double wall_time_s = 0.0;  // excluded from the CSV so runs diff clean
    bool hit_frame_cap = false;
};

/// Monte-Carlo SER/FER sweep; one row per SNR point, in SNR order.  Frame
/// f of point s derives its graph/data/noise seeds from (seed, s, f), so
/// results do not depend on the worker count.
std::vector<ResultRow> run_ser_sweep(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string rows_to_json(const std::vector<ResultRow>& rows,
                         const ExperimentSpec& spec);

struct CapacityRow {
    double snr_db = 0.0;
    double unrestricted_bits = 0.0;    // log2(1 + SNR)
    double quaternion_bits = 0.0;      // 25-point constellation, per complex dim
    double gaussian_bits = 0.0;        // 5-point constellation, per complex dim
    double quaternion_stderr = 0.0;
    double gaussian_stderr = 0.0;
};

/// Mutual-information curves of both partitions against the unrestricted
/// AWGN capacity on an SNR grid.
std::vector<CapacityRow> run_capacity_sweep(const Constellation& quaternion,
                                            const Constellation& gaussian,
                                            const std::vector<double>& snr_grid_db,
                                            std::uint64_t samples,
                                            std::uint64_t seed, int workers = 1);

std::string capacity_to_csv(const std::vector<CapacityRow>& rows);

/// Everything needed to re-decode one frame bit-identically.
struct StoredFrame {
    double snr_db = 0.0;
    int max_iterations = 200;
    TannerGraph graph;
    std::vector<int> u;
    std::vector<std::array<double, 4>> y;

    std::string to_json() const;
    static StoredFrame from_json(const std::string& text);
};

struct ReplayResult {
    DecodeResult result;
    DecodeTrace trace;
    long symbol_errors = 0;
};

/// Re-runs the decoder on a stored frame; max_iter_override <= 0 keeps the
/// stored iteration budget.
ReplayResult replay_frame(const StoredFrame& frame, const PartitionTable& table,
                          const Constellation& constellation,
                          int max_iter_override = 0);

/// Runs one frame exactly as the sweep would and stores it for replay.
StoredFrame capture_frame(const ExperimentSpec& spec, double snr_db,
                          long frame_index);

}  // namespace iralat
