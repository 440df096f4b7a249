#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iralat/messages.hpp"
#include "iralat/partition.hpp"
#include "iralat/shaping.hpp"

namespace iralat {

/// Single-parameter Gaussian LLR model: mean sigma^2/2 in every component,
/// covariance sigma^2 on the diagonal and sigma^2/2 off it.
struct LlrModel {
    double sigma = 0.0;
    int dim = 25;
};

/// Draws from the model via w = (sigma^2/2) 1 + (sigma/sqrt 2)(z 1 + z'),
/// which reproduces the mean and covariance exactly.
std::vector<LlrVec> sample_llr(const LlrModel& model, std::uint64_t count,
                               std::uint64_t seed);

/// Sample-mean estimate of 1 - E[log_M sum_k exp(-w_k)], clipped to [0,1].
double mutual_info(const std::vector<LlrVec>& samples);

/// Precomputed monotone table of the sigma <-> mutual-information map.
class JTable {
  public:
    static JTable build(int dim, double sigma_max, double step,
                        std::uint64_t samples_per_point, std::uint64_t seed,
                        int workers = 1);
    /// Loads from the cache file when present, otherwise builds and saves.
    static JTable cached(int dim, const std::string& cache_dir = "",
                         int workers = 1);

    double j(double sigma) const;
    double j_inv(double info) const;
    double sigma_max() const { return sigmas_.back(); }

    std::string to_json() const;
    static JTable from_json(const std::string& text);

  private:
    int dim_ = 0;
    std::uint64_t samples_ = 0, seed_ = 0;
    std::vector<double> sigmas_, values_;
    std::vector<double> slopes_;  // monotone cubic tangents
    void finalize();
};

struct ExitCurve {
    std::vector<double> grid;    // ascending I_A values
    std::vector<double> values;  // I_E per grid point
    double snr_db = 0.0;

    std::string to_json() const;
    std::string to_plot_data() const;  // two-column text
};

/// Closed-form VND transfer: sum_i alpha_i J(sqrt(i-1) Jinv(I_A)).
ExitCurve vnd_curve(const std::map<int, double>& edge_vn,
                    const std::vector<double>& grid, const JTable& jt);

double vnd_eval(const std::map<int, double>& edge_vn, double info,
                const JTable& jt);

struct CndConfig {
    int trials = 4000;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Per-degree conditional check-node transfers, estimated jointly on
/// accumulator chains whose node degrees are drawn from the given edge
/// distribution, with fresh random sequences and AWGN parity observations.
/// Returns one curve per combiner degree present in the distribution.
std::map<int, ExitCurve> cnd_conditional(const std::map<int, double>& edge_cn,
                                         double snr_db,
                                         const std::vector<double>& grid,
                                         const PartitionTable& table,
                                         const Constellation& cons,
                                         const JTable& jt,
                                         const CndConfig& cfg);

/// One-iteration check-node transfer for a single combiner degree j,
/// measured on homogeneous accumulator chains.
ExitCurve cnd_curve_degree(int degree_j, double snr_db,
                           const std::vector<double>& grid,
                           const PartitionTable& table,
                           const Constellation& cons, const JTable& jt,
                           const CndConfig& cfg);

/// Mixture over the check-node edge distribution.
ExitCurve cnd_curve(const std::map<int, double>& edge_cn, double snr_db,
                    const std::vector<double>& grid,
                    const PartitionTable& table, const Constellation& cons,
                    const JTable& jt, const CndConfig& cfg);

struct OptimizerConfig {
    double gap = 0.0001;
    int outer_iterations = 10;
    int grid_size = 101;
    double lp_tolerance = 1e-9;
    CndConfig cnd;
};

std::vector<double> uniform_grid(int size);

/// True when the decoding tunnel is open: the one-sweep composite map
/// VND(CND(I)) exceeds I + gap at every interior grid point.
bool tunnel_open(const std::map<int, double>& edge_vn, const ExitCurve& cnd,
                 const JTable& jt, double gap);

struct OptimizeResult {
    bool feasible = false;
    std::map<int, double> edge_vn;
    std::map<int, double> edge_cn;
    double margin = 0.0;  // smallest tunnel slack (negative when infeasible)
};

/// LP curve fit of the VND to the CND transfer, alternated with a check
/// distribution refit, at a fixed SNR and target K/N rate.
OptimizeResult optimize_degrees(const std::map<int, double>& edge_cn,
                                double snr_db, double rate_target,
                                const PartitionTable& table,
                                const Constellation& cons, const JTable& jt,
                                const OptimizerConfig& cfg,
                                int max_vn_degree = 40);

/// Sampled density evolution over the ensemble: a population of
/// interleaver-edge messages is alternately passed through accumulator
/// chains (check side, with fresh dither and AWGN parity observations)
/// and repetition combinations (variable side).
struct DeConfig {
    int population = 8000;      // interleaver-edge messages tracked
    int max_iterations = 300;   // global message-passing rounds
    int chain_len = 50;         // accumulator span per sampled chain
    double convergence = 0.95;  // mean edge information declaring success
    std::uint64_t seed = 7;
    int workers = 1;
    int tasks = 64;  // fixed work partition, keeps results worker-invariant
};

/// True when the sampled-density-evolution population reaches the
/// convergence level within the iteration budget at this SNR.
bool ensemble_converges(const std::map<int, double>& edge_vn,
                        const std::map<int, double>& edge_cn, double snr_db,
                        const PartitionTable& table, const Constellation& cons,
                        const DeConfig& cfg);

struct ThresholdConfig {
    double lo_db = -5.0;
    double hi_db = 15.0;
    double resolution_db = 0.01;
    OptimizerConfig opt;
    DeConfig de;
};

/// Smallest SNR (bisection) at which the ensemble's sampled density
/// evolution converges for the given pair of degree distributions.
double threshold_search(const std::map<int, double>& edge_vn,
                        const std::map<int, double>& edge_cn,
                        const PartitionTable& table, const Constellation& cons,
                        const JTable& jt, const ThresholdConfig& cfg);

/// Uniform-input mutual information of the constellation over the complex
/// AWGN channel, in bits per complex dimension.
struct MiResult {
    double bits_per_complex_dim = 0.0;
    double stderr_ = 0.0;
};
MiResult constellation_mi(const Constellation& cons, double snr_db,
                          std::uint64_t samples, std::uint64_t seed);

/// SNR (dB) at which log2(1+SNR) equals the rate in bits per complex dim.
double shannon_limit_db(double rate_bits_per_complex_dim);

}  // namespace iralat
