#include "iralat/exit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "iralat/decoder.hpp"
#include "iralat/lp.hpp"
#include "iralat/rng.hpp"

namespace iralat {

std::vector<LlrVec> sample_llr(const LlrModel& model, std::uint64_t count,
                               std::uint64_t seed) {
    if (model.sigma < 0.0) throw std::invalid_argument("sample_llr: sigma < 0");
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double mean = model.sigma * model.sigma / 2.0;
    const double amp = model.sigma / std::sqrt(2.0);
    std::vector<LlrVec> out(count, LlrVec(model.dim));
    for (auto& w : out) {
        const double z = normal(rng);
        w[0] = 0.0;  // the true symbol's own log ratio
        for (int k = 1; k < model.dim; ++k)
            w[k] = mean + amp * (z + normal(rng));
    }
    return out;
}

namespace {

double mi_term(const LlrVec& w, double log_m) {
    // log(sum exp(-w_k)), stabilized around the smallest component
    double wmin = w[0];
    for (double v : w) wmin = std::min(wmin, v);
    double s = 0.0;
    for (double v : w) s += std::exp(-(v - wmin));
    return (std::log(s) - wmin) / log_m;
}

}  // namespace

double mutual_info(const std::vector<LlrVec>& samples) {
    if (samples.empty()) throw std::invalid_argument("mutual_info: no samples");
    const double log_m = std::log(static_cast<double>(samples[0].size()));
    double acc = 0.0;
    for (const auto& w : samples) acc += mi_term(w, log_m);
    return std::clamp(1.0 - acc / static_cast<double>(samples.size()), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// JTable

namespace {

double j_point(int dim, double sigma, std::uint64_t samples, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double mean = sigma * sigma / 2.0;
    const double amp = sigma / std::sqrt(2.0);
    const double log_m = std::log(static_cast<double>(dim));
    LlrVec w(dim);
    w[0] = 0.0;
    double acc = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double z = normal(rng);
        for (int k = 1; k < dim; ++k) w[k] = mean + amp * (z + normal(rng));
        acc += mi_term(w, log_m);
    }
    return std::clamp(1.0 - acc / static_cast<double>(samples), 0.0, 1.0);
}

}  // namespace

JTable JTable::build(int dim, double sigma_max, double step,
                     std::uint64_t samples_per_point, std::uint64_t seed,
                     int workers) {
    if (step <= 0.0 || step > 0.05 + 1e-12)
        throw std::invalid_argument("JTable::build: grid step must be <= 0.05");
    JTable t;
    t.dim_ = dim;
    t.samples_ = samples_per_point;
    t.seed_ = seed;
    const int points = static_cast<int>(std::floor(sigma_max / step + 1e-9)) + 1;
    t.sigmas_.resize(points);
    t.values_.resize(points);
    for (int i = 0; i < points; ++i) t.sigmas_[i] = i * step;

    if (workers < 1) workers = 1;
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= points) return;
            t.values_[i] =
                j_point(dim, t.sigmas_[i], samples_per_point, derive_seed(seed, i));
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    t.finalize();
    return t;
}

void JTable::finalize() {
    values_[0] = 0.0;
    // keep the table strictly increasing and stop once J is saturated
    std::size_t cut = values_.size();
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] <= values_[i - 1])
            values_[i] = values_[i - 1] + 1e-9;
        if (values_[i] >= 0.99995) {
            cut = i + 1;
            break;
        }
    }
    sigmas_.resize(std::min(cut, sigmas_.size()));
    values_.resize(sigmas_.size());
    if (values_.back() <= 0.9999)
        throw std::runtime_error("JTable: sigma_max does not reach J > 0.9999");

    // monotone cubic (Fritsch-Carlson) tangents
    const std::size_t n = sigmas_.size();
    slopes_.assign(n, 0.0);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (values_[i + 1] - values_[i]) / (sigmas_[i + 1] - sigmas_[i]);
    slopes_[0] = d[0];
    slopes_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        slopes_[i] = (d[i - 1] + d[i]) / 2.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            slopes_[i] = slopes_[i + 1] = 0.0;
            continue;
        }
        const double a = slopes_[i] / d[i], b = slopes_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            slopes_[i] = tau * a * d[i];
            slopes_[i + 1] = tau * b * d[i];
        }
    }
}

double JTable::j(double sigma) const {
    if (sigma <= 0.0) return 0.0;
    if (sigma >= sigmas_.back()) return values_.back();
    const auto it = std::upper_bound(sigmas_.begin(), sigmas_.end(), sigma);
    const std::size_t i = static_cast<std::size_t>(it - sigmas_.begin()) - 1;
    const double h = sigmas_[i + 1] - sigmas_[i];
    const double x = (sigma - sigmas_[i]) / h;
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return std::clamp(h00 * values_[i] + h10 * h * slopes_[i] +
                          h01 * values_[i + 1] + h11 * h * slopes_[i + 1],
                      0.0, 1.0);
}

double JTable::j_inv(double info) const {
    if (info < -1e-9 || info > 1.0 + 1e-9)
        throw std::invalid_argument("j_inv: mutual information outside [0,1]");
    if (info <= 0.0) return 0.0;
    if (info >= values_.back()) return sigmas_.back();
    double lo = 0.0, hi = sigmas_.back();
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (j(mid) < info ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string JTable::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    j["samples"] = samples_;
    j["seed"] = seed_;
    j["sigmas"] = sigmas_;
    j["values"] = values_;
    return j.dump();
}

JTable JTable::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    JTable t;
    t.dim_ = j.at("dim");
    t.samples_ = j.at("samples");
    t.seed_ = j.at("seed");
    t.sigmas_ = j.at("sigmas").get<std::vector<double>>();
    t.values_ = j.at("values").get<std::vector<double>>();
    t.finalize();
    return t;
}

namespace {
constexpr double kJSigmaMax = 10.0;
constexpr double kJStep = 0.05;
constexpr std::uint64_t kJSamples = 1000000;
constexpr std::uint64_t kJSeed = 0x4a544142ULL;
}  // namespace

JTable JTable::cached(int dim, const std::string& cache_dir, int workers) {
    std::string dir = cache_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("IRALAT_CACHE_DIR")) dir = env;
        else dir = ".iralat_cache";
    }
    std::filesystem::create_directories(dir);
    std::ostringstream name;
    name << "jtable_dim" << dim << "_s" << kJSigmaMax << "_n" << kJSamples
         << "_seed" << kJSeed << ".json";
    const auto path = std::filesystem::path(dir) / name.str();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            JTable t = from_json(ss.str());
            if (t.dim_ == dim && t.samples_ == kJSamples && t.seed_ == kJSeed)
                return t;
        } catch (const std::exception&) {
            // fall through and rebuild
        }
    }
    JTable t = build(dim, kJSigmaMax, kJStep, kJSamples, kJSeed, workers);
    std::ofstream out(path);
    out << t.to_json();
    return t;
}

// ---------------------------------------------------------------------------
// EXIT curves

std::vector<double> uniform_grid(int size) {
    std::vector<double> g(size);
    for (int i = 0; i < size; ++i)
        g[i] = static_cast<double>(i) / static_cast<double>(size - 1);
    return g;
}

double vnd_eval(const std::map<int, double>& edge_vn, double info,
                const JTable& jt) {
    double out = 0.0;
    const double s = jt.j_inv(std::clamp(info, 0.0, 1.0));
    for (const auto& [i, a] : edge_vn)
        out += a * jt.j(std::sqrt(static_cast<double>(i - 1)) * s);
    return out;
}

ExitCurve vnd_curve(const std::map<int, double>& edge_vn,
                    const std::vector<double>& grid, const JTable& jt) {
    ExitCurve c;
    c.grid = grid;
    c.values.reserve(grid.size());
    for (double ia : grid) c.values.push_back(vnd_eval(edge_vn, ia, jt));
    return c;
}

namespace {

/// Accumulator chain length used by the check-node transfer simulation.
/// The combiner and the time-varying accumulator form one component
/// decoder, so a trial runs exact forward/backward inference along a
/// finite chain rather than updating an isolated check node.
constexpr int kCndChainLen = 100;

/// Message about the symbol 0 observed through the dithered AWGN channel
/// at transmit amplitude `amp`: draw a uniform dither r, transmit the
/// leader of r, demap, remove the dither.  The mean mutual-information
/// integrand of this ensemble is exactly the (normalized) constellation
/// mutual information at that amplitude.
ProbVec channel_msg(double amp, const PartitionTable& table,
                    const Constellation& cons, std::mt19937_64& rng) {
    const int m = table.size();
    std::uniform_int_distribution<int> leader(0, m - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int r = leader(rng);
    const auto& pt_tx = cons.points[r];
    std::array<double, 4> y{};
    const int dims = 2 * cons.complex_dims;
    for (int i = 0; i < dims; ++i)
        y[i] = amp * pt_tx[i] + normal(rng) * std::sqrt(0.5);
    ProbVec p(m);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> d2(m);
    for (int k = 0; k < m; ++k) {
        double d = 0.0;
        for (int i = 0; i < dims; ++i) {
            const double e = y[i] - amp * cons.points[k][i];
            d += e * e;
        }
        d2[k] = d;
        best = std::min(best, d);
    }
    for (int k = 0; k < m; ++k) p[k] = std::exp(-(d2[k] - best));
    normalize(p);
    // coset removal: message about c = x (-) r
    ProbVec q(m);
    for (int k = 0; k < m; ++k) q[k] = p[table.add(k, r)];
    return q;
}

/// Maps a-priori information to the auxiliary channel amplitude whose
/// demapper output carries exactly that information.  Built once per
/// alphabet by Monte-Carlo and inverted by interpolation; returns a
/// negative value when the request saturates the table (use an exact
/// point mass instead).
double apriori_amp(double info, const PartitionTable& table,
                   const Constellation& cons) {
    struct MiTable {
        std::vector<double> snr, mi;
    };
    static std::mutex mu;
    static std::map<int, MiTable> cache;
    const int m = table.size();
    MiTable* t;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(m);
        if (it == cache.end()) {
            MiTable built;
            const double log_m = std::log(static_cast<double>(m));
            auto rng = make_rng(0x61757853ULL + static_cast<std::uint64_t>(m));
            double peak = 0.0;
            for (double s = -20.0; s <= 26.0 && peak < 0.999999; s += 0.5) {
                const double amp = std::sqrt(std::pow(10.0, s / 10.0));
                double acc = 0.0;
                const int samples = 20000;
                for (int i = 0; i < samples; ++i)
                    acc += mi_term(prob_to_llr(channel_msg(amp, table, cons, rng)),
                                   log_m);
                const double v = std::clamp(1.0 - acc / samples, 0.0, 1.0);
                peak = std::max(peak, v);
                built.snr.push_back(s);
                built.mi.push_back(peak);  // cumulative max: monotone by force
            }
            it = cache.emplace(m, std::move(built)).first;
        }
        t = &it->second;
    }
    if (info >= t->mi.back()) return -1.0;
    if (info <= t->mi.front()) return 0.0;
    const auto hi = std::upper_bound(t->mi.begin(), t->mi.end(), info);
    const std::size_t i = static_cast<std::size_t>(hi - t->mi.begin());
    const double m0 = t->mi[i - 1], m1 = t->mi[i];
    const double frac = m1 > m0 ? (info - m0) / (m1 - m0) : 0.0;
    const double snr = t->snr[i - 1] + frac * (t->snr[i] - t->snr[i - 1]);
    return std::sqrt(std::pow(10.0, snr / 10.0));
}

/// One chain trial: simulates the all-zero codeword, dithered AWGN
/// observations of the parity symbols, a-priori inputs on the combiner
/// edges, and one full forward/backward sweep.  Node n of the chain has
/// combiner degree degrees[n]; the mutual-information integrand of the
/// extrinsic output on one combiner edge per chain node is accumulated
/// into the node's degree bucket, so the conditional transfer of each
/// degree class is measured on the mixed accumulator it actually runs in.
/// The a-priori inputs are drawn from the single-parameter Gaussian
/// model at standard deviation `sigma_a`.
void cnd_chain_trial(const std::vector<int>& degrees, double sigma_a,
                     double snr_db, const PartitionTable& table,
                     const Constellation& cons, std::mt19937_64& rng,
                     std::map<int, double>& acc, std::map<int, long>& count) {
    const int m = table.size();
    const int len = static_cast<int>(degrees.size());
    std::uniform_int_distribution<int> leader(0, m - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double log_m = std::log(static_cast<double>(m));

    // all-zero codeword: every transmitted symbol equals its coset leader
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    auto parity_msg = [&] { return channel_msg(amp, table, cons, rng); };

    const double mean = sigma_a * sigma_a / 2.0;
    const double ampw = sigma_a / std::sqrt(2.0);
    auto apriori_msg = [&] {
        const double z = normal(rng);
        ProbVec p(m);
        p[0] = 1.0;
        for (int k = 1; k < m; ++k)
            p[k] = std::exp(-(mean + ampw * (z + normal(rng))));
        normalize(p);
        return p;
    };

    // per-node random sequences; the combiner factor on edge 0 is solved
    // from the linearity constraint so the all-zero word is a codeword
    std::vector<std::vector<int>> g(len);
    std::vector<int> gp(len), gpp(len);
    std::vector<std::vector<ProbVec>> ap(len);
    std::vector<ProbVec> ch(len);
    for (int n = 0; n < len; ++n) {
        const int dj = degrees[n];
        g[n].resize(dj);
        gp[n] = leader(rng);
        gpp[n] = leader(rng);
        int sum = table.add(gp[n], gpp[n]);
        for (int i = 1; i < dj; ++i) {
            g[n][i] = leader(rng);
            sum = table.add(sum, g[n][i]);
        }
        g[n][0] = table.neg(sum);
        ap[n].reserve(dj);
        for (int i = 0; i < dj; ++i) ap[n].push_back(apriori_msg());
        ch[n] = parity_msg();
    }

    // forward sweep: fwd[n] = extrinsic of node n toward its right parity
    // symbol c_n; the left neighbor of node 0 is the known zero state
    std::vector<ProbVec> fwd(len);
    {
        ProbVec left = point_mass(m, 0);
        for (int n = 0; n < len; ++n) {
            std::vector<ProbVec> in(ap[n].begin(), ap[n].end());
            std::vector<int> h(g[n].begin(), g[n].end());
            std::vector<int> s(degrees[n], 1);
            in.push_back(left);
            h.push_back(gp[n]);
            s.push_back(1);
            h.push_back(gpp[n]);
            s.push_back(-1);
            fwd[n] = cn_update_dft(in, h, table, &s);
            if (n + 1 < len) left = vn_update({fwd[n]}, ch[n]);
        }
    }
    // backward sweep: bwd[n] = extrinsic of node n toward c_{n-1}
    std::vector<ProbVec> bwd(len);
    {
        ProbVec right = ch[len - 1];  // no node beyond the chain end
        for (int n = len - 1; n >= 0; --n) {
            std::vector<ProbVec> in(ap[n].begin(), ap[n].end());
            std::vector<int> h(g[n].begin(), g[n].end());
            std::vector<int> s(degrees[n], 1);
            in.push_back(right);
            h.push_back(gpp[n]);
            s.push_back(-1);
            h.push_back(gp[n]);
            s.push_back(1);
            bwd[n] = cn_update_dft(in, h, table, &s);
            if (n > 0) right = vn_update({bwd[n]}, ch[n - 1]);
        }
    }

    // extrinsic output on combiner edge 0 of every node
    for (int n = 0; n < len; ++n) {
        std::vector<ProbVec> in;
        std::vector<int> h, s;
        for (int i = 1; i < degrees[n]; ++i) {
            in.push_back(ap[n][i]);
            h.push_back(g[n][i]);
            s.push_back(1);
        }
        in.push_back(n == 0 ? point_mass(m, 0)
                            : vn_update({fwd[n - 1]}, ch[n - 1]));
        h.push_back(gp[n]);
        s.push_back(1);
        in.push_back(n + 1 < len ? vn_update({bwd[n + 1]}, ch[n])
                                 : ch[n]);
        h.push_back(gpp[n]);
        s.push_back(-1);
        h.push_back(g[n][0]);
        s.push_back(1);
        const ProbVec out = cn_update_dft(in, h, table, &s);
        acc[degrees[n]] += mi_term(prob_to_llr(out), log_m);
        ++count[degrees[n]];
    }
}

}  // namespace

/// Conditional per-degree CND transfer curves, measured on accumulator
/// chains whose node degrees follow the node-perspective distribution of
/// the given edge distribution.
std::map<int, ExitCurve> cnd_conditional(const std::map<int, double>& edge_cn,
                                         double snr_db,
                                         const std::vector<double>& grid,
                                         const PartitionTable& table,
                                         const Constellation& cons,
                                         const JTable& jt,
                                         const CndConfig& cfg) {
    // node fractions b_j are proportional to beta_j / j
    std::vector<int> degs;
    std::vector<double> node_w;
    for (const auto& [j, beta] : edge_cn) {
        if (beta <= 0.0) continue;
        degs.push_back(j);
        node_w.push_back(beta / j);
    }
    if (degs.empty())
        throw std::invalid_argument("cnd curves: empty check distribution");
    const std::size_t ndeg = degs.size();

    std::map<int, ExitCurve> out;
    for (int j : degs) {
        out[j].grid = grid;
        out[j].snr_db = snr_db;
        out[j].values.assign(grid.size(), 0.0);
    }

    std::uint64_t dist_tag = 0;  // sequences with equal support+weights share seeds
    for (std::size_t d = 0; d < ndeg; ++d)
        dist_tag = mix64(dist_tag ^ (static_cast<std::uint64_t>(degs[d]) * 0x9e3779b97f4a7c15ULL +
                                     static_cast<std::uint64_t>(std::llround(node_w[d] * 1e9))));

    const int workers = std::max(1, cfg.workers);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t gi = next.fetch_add(1);
            if (gi >= grid.size()) return;
            const double sigma_a = jt.j_inv(grid[gi]);
            auto rng = make_rng(derive_seed(
                cfg.seed ^ dist_tag, gi,
                static_cast<std::uint64_t>(std::llround(snr_db * 1000.0))));
            std::discrete_distribution<int> pick(node_w.begin(), node_w.end());
            std::map<int, double> acc;
            std::map<int, long> count;
            const long target = static_cast<long>(cfg.trials) * static_cast<long>(ndeg);
            long total = 0;
            while (total < target) {
                std::vector<int> degrees(kCndChainLen);
                for (int& dj : degrees) dj = degs[pick(rng)];
                cnd_chain_trial(degrees, sigma_a, snr_db, table, cons, rng,
                                acc, count);
                total += kCndChainLen;
            }
            for (int j : degs) {
                const long n = count.count(j) ? count.at(j) : 0;
                out.at(j).values[gi] =
                    n == 0 ? 0.0
                           : std::clamp(1.0 - acc.at(j) / n, 0.0, 1.0);
            }
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return out;
}

ExitCurve cnd_curve_degree(int degree_j, double snr_db,
                           const std::vector<double>& grid,
                           const PartitionTable& table,
                           const Constellation& cons, const JTable& jt,
                           const CndConfig& cfg) {
    return cnd_conditional({{degree_j, 1.0}}, snr_db, grid, table, cons, jt,
                           cfg)
        .at(degree_j);
}

ExitCurve cnd_curve(const std::map<int, double>& edge_cn, double snr_db,
                    const std::vector<double>& grid,
                    const PartitionTable& table, const Constellation& cons,
                    const JTable& jt, const CndConfig& cfg) {
    const auto cond =
        cnd_conditional(edge_cn, snr_db, grid, table, cons, jt, cfg);
    ExitCurve mix;
    mix.grid = grid;
    mix.snr_db = snr_db;
    mix.values.assign(grid.size(), 0.0);
    for (const auto& [j, beta] : edge_cn) {
        if (beta <= 0.0) continue;
        for (std::size_t i = 0; i < grid.size(); ++i)
            mix.values[i] += beta * cond.at(j).values[i];
    }
    return mix;
}

bool tunnel_open(const std::map<int, double>& edge_vn, const ExitCurve& cnd,
                 const JTable& jt, double gap) {
    for (std::size_t i = 0; i < cnd.grid.size(); ++i) {
        const double ia = cnd.grid[i];
        if (ia >= 1.0 - 1e-12) continue;  // converged end point
        if (vnd_eval(edge_vn, cnd.values[i], jt) < ia + gap) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// degree optimization

namespace {

double inv_edge_mean(const std::map<int, double>& edge) {
    double s = 0.0;
    for (const auto& [d, v] : edge) s += v / d;
    return s;
}

/// Inverse of the closed-form VND transfer by bisection.
double vnd_inverse(const std::map<int, double>& edge_vn, double y,
                   const JTable& jt) {
    if (y <= 0.0) return 0.0;
    if (y >= vnd_eval(edge_vn, 1.0, jt)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (vnd_eval(edge_vn, mid, jt) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct AlphaFit {
    bool feasible = false;
    double margin = 0.0;
    std::map<int, double> alpha;
};

AlphaFit fit_alpha(const std::vector<std::pair<double, double>>& tunnel_pts,
                   double rate_edge_sum, const JTable& jt, double gap,
                   int max_degree) {
    // variables: alpha_2..alpha_max, t+, t-
    std::vector<int> degs;
    for (int i = 2; i <= max_degree; ++i) degs.push_back(i);
    const std::size_t nd = degs.size();
    const std::size_t nv = nd + 2;

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    // tunnel: -sum alpha_i V_i(c) + t <= -(I + gap)
    for (const auto& [ia, c] : tunnel_pts) {
        std::vector<double> row(nv, 0.0);
        const double s = jt.j_inv(std::clamp(c, 0.0, 1.0));
        for (std::size_t d = 0; d < nd; ++d)
            row[d] = -jt.j(std::sqrt(static_cast<double>(degs[d] - 1)) * s);
        row[nd] = 1.0;
        row[nd + 1] = -1.0;
        a.push_back(std::move(row));
        b.push_back(-(ia + gap));
    }
    // sum alpha = 1
    {
        std::vector<double> row(nv, 0.0);
        for (std::size_t d = 0; d < nd; ++d) row[d] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
        for (std::size_t d = 0; d < nd; ++d) row[d] = -1.0;
        row[nd] = row[nd + 1] = 0.0;
        a.push_back(row);
        b.push_back(-1.0);
    }
    // rate: sum alpha_i / i = rate_edge_sum (within a small tolerance)
    {
        const double tol = 1e-7;
        std::vector<double> row(nv, 0.0);
        for (std::size_t d = 0; d < nd; ++d) row[d] = 1.0 / degs[d];
        a.push_back(row);
        b.push_back(rate_edge_sum + tol);
        for (std::size_t d = 0; d < nd; ++d) row[d] = -1.0 / degs[d];
        a.push_back(row);
        b.push_back(-(rate_edge_sum - tol));
    }
    // bound the margin so the LP stays bounded
    {
        std::vector<double> row(nv, 0.0);
        row[nd] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
    }
    std::vector<double> c(nv, 0.0);
    c[nd] = 1.0;
    c[nd + 1] = -1.0;

    const LpResult r = lp_solve(a, b, c);
    AlphaFit fit;
    if (!r.feasible) return fit;
    fit.margin = r.objective;
    fit.feasible = r.objective >= 0.0;
    for (std::size_t d = 0; d < nd; ++d)
        if (r.x[d] > 1e-9) fit.alpha[degs[d]] = r.x[d];
    // renormalize away LP round-off
    double s = 0.0;
    for (auto& [i, v] : fit.alpha) s += v;
    for (auto& [i, v] : fit.alpha) v /= s;
    return fit;
}

}  // namespace

OptimizeResult optimize_degrees(const std::map<int, double>& edge_cn,
                                double snr_db, double rate_target,
                                const PartitionTable& table,
                                const Constellation& cons, const JTable& jt,
                                const OptimizerConfig& cfg, int max_vn_degree) {
    const std::vector<double> grid = uniform_grid(cfg.grid_size);

    // conditional per-degree CND basis curves; they depend on the chain
    // composition, so they are refreshed whenever beta changes
    std::map<int, ExitCurve> basis;
    auto mixture = [&](const std::map<int, double>& beta) {
        ExitCurve c;
        c.grid = grid;
        c.snr_db = snr_db;
        c.values.assign(grid.size(), 0.0);
        for (const auto& [j, v] : beta)
            for (std::size_t i = 0; i < grid.size(); ++i)
                c.values[i] += v * basis.at(j).values[i];
        return c;
    };

    std::map<int, double> beta = edge_cn;
    OptimizeResult best;
    best.margin = -1.0;

    for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
        basis = cnd_conditional(beta, snr_db, grid, table, cons, jt, cfg.cnd);
        for (const auto& [j, v] : edge_cn)
            if (!basis.count(j))
                basis[j] = cnd_curve_degree(j, snr_db, grid, table, cons, jt,
                                            cfg.cnd);
        const ExitCurve cnd = mixture(beta);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid[i] < 1.0 - 1e-12) pts.emplace_back(grid[i], cnd.values[i]);

        const double rate_edge_sum = rate_target * inv_edge_mean(beta);
        const AlphaFit fit =
            fit_alpha(pts, rate_edge_sum, jt, cfg.gap, max_vn_degree);
        if (fit.margin > best.margin && !fit.alpha.empty()) {
            best.margin = fit.margin;
            best.feasible = fit.feasible;
            best.edge_vn = fit.alpha;
            best.edge_cn = beta;
        }
        if (fit.alpha.empty()) break;

        // beta refit: CND_beta(I) >= VND^{-1}(I + gap) at every grid point,
        // linear in beta since the basis curves are fixed
        std::vector<int> jdegs;
        for (const auto& [j, v] : edge_cn) jdegs.push_back(j);
        const std::size_t njd = jdegs.size(), nv = njd + 2;
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] >= 1.0 - 1e-12) continue;
            const double need = vnd_inverse(fit.alpha, grid[i] + cfg.gap, jt);
            std::vector<double> row(nv, 0.0);
            for (std::size_t d = 0; d < njd; ++d)
                row[d] = -basis.at(jdegs[d]).values[i];
            row[njd] = 1.0;
            row[njd + 1] = -1.0;
            a.push_back(std::move(row));
            b.push_back(-need);
        }
        {
            std::vector<double> row(nv, 0.0);
            for (std::size_t d = 0; d < njd; ++d) row[d] = 1.0;
            a.push_back(row);
            b.push_back(1.0);
            for (std::size_t d = 0; d < njd; ++d) row[d] = -1.0;
            row[njd] = row[njd + 1] = 0.0;
            a.push_back(row);
            b.push_back(-1.0);
        }
        {
            const double need = inv_edge_mean(fit.alpha) / rate_target;
            const double tol = 1e-7;
            std::vector<double> row(nv, 0.0);
            for (std::size_t d = 0; d < njd; ++d) row[d] = 1.0 / jdegs[d];
            a.push_back(row);
            b.push_back(need + tol);
            for (std::size_t d = 0; d < njd; ++d) row[d] = -1.0 / jdegs[d];
            a.push_back(row);
            b.push_back(-(need - tol));
        }
        {
            std::vector<double> row(nv, 0.0);
            row[njd] = 1.0;
            a.push_back(row);
            b.push_back(1.0);
        }
        std::vector<double> c(nv, 0.0);
        c[njd] = 1.0;
        c[njd + 1] = -1.0;
        const LpResult r = lp_solve(a, b, c);
        if (!r.feasible) continue;
        std::map<int, double> new_beta;
        double s = 0.0;
        for (std::size_t d = 0; d < njd; ++d)
            if (r.x[d] > 1e-9) {
                new_beta[jdegs[d]] = r.x[d];
                s += r.x[d];
            }
        if (new_beta.empty()) continue;
        for (auto& [j, v] : new_beta) v /= s;
        beta = std::move(new_beta);
    }
    return best;
}

namespace {

/// One sampled-density-evolution round for `ensemble_converges`: the
/// population P of variable-to-check messages is consumed by freshly
/// sampled accumulator chains whose extrinsic outputs form the
/// check-to-variable population Q, and P is regenerated by repetition
/// combining of Q draws.  Returns the mean mutual-information of the new
/// P.  Work is split into cfg.tasks fixed chunks with per-chunk derived
/// seeds, so the result does not depend on cfg.workers.
double de_round(std::vector<ProbVec>& P, const std::map<int, double>& edge_vn,
                const std::map<int, double>& edge_cn, double snr_db,
                const PartitionTable& table, const Constellation& cons,
                const DeConfig& cfg, std::uint64_t round) {
    const int m = table.size();
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    const int ntasks = std::max(1, cfg.tasks);
    const int workers = std::max(1, cfg.workers);
    const std::size_t per_task =
        (P.size() + static_cast<std::size_t>(ntasks) - 1) / ntasks;

    std::vector<int> cdeg;
    std::vector<double> cw;
    for (const auto& [j, b] : edge_cn)
        if (b > 0.0) {
            cdeg.push_back(j);
            cw.push_back(b / j);  // node-perspective chain sampling
        }
    std::vector<int> vdeg;
    std::vector<double> vw;
    for (const auto& [i, a] : edge_vn)
        if (a > 0.0) {
            vdeg.push_back(i);
            vw.push_back(a);
        }

    // check side: chains consume random P draws, emit Q
    std::vector<std::vector<ProbVec>> qparts(ntasks);
    {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        auto work = [&] {
            for (;;) {
                const int ti = next.fetch_add(1);
                if (ti >= ntasks) return;
                auto rng = make_rng(derive_seed(cfg.seed, round, 2 * ti));
                std::uniform_int_distribution<int> leader(0, m - 1);
                std::uniform_int_distribution<std::size_t> pickP(0, P.size() - 1);
                std::discrete_distribution<int> pick_deg(cw.begin(), cw.end());
                auto& Q = qparts[ti];
                while (Q.size() < per_task) {
                    const int len = cfg.chain_len;
                    std::vector<int> dj(len);
                    for (int& d : dj) d = cdeg[pick_deg(rng)];
                    std::vector<std::vector<int>> g(len);
                    std::vector<int> gp(len), gpp(len);
                    std::vector<std::vector<ProbVec>> ap(len);
                    std::vector<ProbVec> ch(len);
                    for (int n = 0; n < len; ++n) {
                        g[n].resize(dj[n]);
                        gp[n] = leader(rng);
                        gpp[n] = leader(rng);
                        int sum = table.add(gp[n], gpp[n]);
                        for (int i = 1; i < dj[n]; ++i) {
                            g[n][i] = leader(rng);
                            sum = table.add(sum, g[n][i]);
                        }
                        g[n][0] = table.neg(sum);
                        ap[n].reserve(dj[n]);
                        for (int i = 0; i < dj[n]; ++i)
                            ap[n].push_back(P[pickP(rng)]);
                        ch[n] = channel_msg(amp, table, cons, rng);
                    }
                    std::vector<ProbVec> fwd(len), bwd(len);
                    {
                        ProbVec left = point_mass(m, 0);
                        for (int n = 0; n < len; ++n) {
                            std::vector<ProbVec> in(ap[n].begin(), ap[n].end());
                            std::vector<int> h(g[n].begin(), g[n].end());
                            std::vector<int> s(dj[n], 1);
                            in.push_back(left);
                            h.push_back(gp[n]);
                            s.push_back(1);
                            h.push_back(gpp[n]);
                            s.push_back(-1);
                            fwd[n] = cn_update_dft(in, h, table, &s);
                            if (n + 1 < len) left = vn_update({fwd[n]}, ch[n]);
                        }
                        ProbVec right = ch[len - 1];
                        for (int n = len - 1; n >= 0; --n) {
                            std::vector<ProbVec> in(ap[n].begin(), ap[n].end());
                            std::vector<int> h(g[n].begin(), g[n].end());
                            std::vector<int> s(dj[n], 1);
                            in.push_back(right);
                            h.push_back(gpp[n]);
                            s.push_back(-1);
                            h.push_back(gp[n]);
                            s.push_back(1);
                            bwd[n] = cn_update_dft(in, h, table, &s);
                            if (n > 0) right = vn_update({bwd[n]}, ch[n - 1]);
                        }
                    }
                    for (int n = 0; n < len && Q.size() < per_task; ++n) {
                        const ProbVec left =
                            n == 0 ? point_mass(m, 0)
                                   : vn_update({fwd[n - 1]}, ch[n - 1]);
                        const ProbVec right = n + 1 < len
                                                  ? vn_update({bwd[n + 1]}, ch[n])
                                                  : ch[n];
                        for (int e = 0; e < dj[n] && Q.size() < per_task; ++e) {
                            std::vector<ProbVec> in;
                            std::vector<int> h, s;
                            for (int i = 0; i < dj[n]; ++i) {
                                if (i == e) continue;
                                in.push_back(ap[n][i]);
                                h.push_back(g[n][i]);
                                s.push_back(1);
                            }
                            in.push_back(left);
                            h.push_back(gp[n]);
                            s.push_back(1);
                            in.push_back(right);
                            h.push_back(gpp[n]);
                            s.push_back(-1);
                            h.push_back(g[n][e]);
                            s.push_back(1);
                            Q.push_back(cn_update_dft(in, h, table, &s));
                        }
                    }
                }
            }
        };
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    std::vector<ProbVec> Q;
    Q.reserve(per_task * ntasks);
    for (auto& part : qparts)
        for (auto& q : part) Q.push_back(std::move(q));

    // variable side: repetition combining of Q draws regenerates P
    const double log_m = std::log(static_cast<double>(m));
    std::vector<double> mi_parts(ntasks, 0.0);
    {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        auto work = [&] {
            for (;;) {
                const int ti = next.fetch_add(1);
                if (ti >= ntasks) return;
                auto rng = make_rng(derive_seed(cfg.seed, round, 2 * ti + 1));
                std::uniform_int_distribution<std::size_t> pickQ(0, Q.size() - 1);
                std::discrete_distribution<int> pick_v(vw.begin(), vw.end());
                const std::size_t b0 = ti * per_task;
                const std::size_t b1 = std::min(P.size(), b0 + per_task);
                double acc = 0.0;
                for (std::size_t p = b0; p < b1; ++p) {
                    const int i = vdeg[pick_v(rng)];
                    std::vector<ProbVec> rest;
                    rest.reserve(i > 1 ? i - 2 : 0);
                    ProbVec first;
                    for (int k = 0; k + 1 < i; ++k) {
                        if (k == 0) first = Q[pickQ(rng)];
                        else rest.push_back(Q[pickQ(rng)]);
                    }
                    P[p] = i <= 1 ? ProbVec(m, 1.0 / m)
                                  : vn_update(rest, first);
                    acc += 1.0 - mi_term(prob_to_llr(P[p]), log_m);
                }
                mi_parts[ti] = acc;
            }
        };
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    double mi = 0.0;
    for (double v : mi_parts) mi += v;
    return mi / static_cast<double>(P.size());
}

}  // namespace

bool ensemble_converges(const std::map<int, double>& edge_vn,
                        const std::map<int, double>& edge_cn, double snr_db,
                        const PartitionTable& table, const Constellation& cons,
                        const DeConfig& cfg) {
    if (edge_vn.empty() || edge_cn.empty())
        throw std::invalid_argument("ensemble_converges: empty distribution");
    const int m = table.size();
    std::vector<ProbVec> P(static_cast<std::size_t>(std::max(64, cfg.population)),
                           ProbVec(m, 1.0 / m));
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const double mi = de_round(P, edge_vn, edge_cn, snr_db, table, cons,
                                   cfg, static_cast<std::uint64_t>(it));
        if (mi >= cfg.convergence) return true;
    }
    return false;
}

double threshold_search(const std::map<int, double>& edge_vn,
                        const std::map<int, double>& edge_cn,
                        const PartitionTable& table, const Constellation& cons,
                        const JTable& jt, const ThresholdConfig& cfg) {
    (void)jt;  // the search runs on sampled density evolution
    auto open_at = [&](double snr) {
        DeConfig dc = cfg.de;
        dc.seed = derive_seed(
            cfg.de.seed, static_cast<std::uint64_t>(std::llround(snr * 1000.0)));
        return ensemble_converges(edge_vn, edge_cn, snr, table, cons, dc);
    };
    double lo = cfg.lo_db, hi = cfg.hi_db;
    if (open_at(lo))
        throw std::runtime_error(
            "threshold_search: converges at the lower bracket");
    if (!open_at(hi))
        throw std::runtime_error(
            "threshold_search: no convergence at the upper bracket");
    while (hi - lo > cfg.resolution_db) {
        const double mid = 0.5 * (lo + hi);
        (open_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------

MiResult constellation_mi(const Constellation& cons, double snr_db,
                          std::uint64_t samples, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cons.points.size()) - 1);
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    const int m = static_cast<int>(cons.points.size());
    const int dims = 2 * cons.complex_dims;

    double acc = 0.0, acc2 = 0.0;
    std::vector<double> d2(m);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const int k = pick(rng);
        std::array<double, 4> y{};
        for (int i = 0; i < dims; ++i)
            y[i] = amp * cons.points[k][i] + normal(rng);
        double best = std::numeric_limits<double>::infinity();
        for (int kk = 0; kk < m; ++kk) {
            double d = 0.0;
            for (int i = 0; i < dims; ++i) {
                const double e = y[i] - amp * cons.points[kk][i];
                d += e * e;
            }
            d2[kk] = d;
            best = std::min(best, d);
        }
        double z = 0.0;
        for (int kk = 0; kk < m; ++kk) z += std::exp(-(d2[kk] - best));
        // log2( p(y|x_k) / mean_k' p(y|x_k') )
        const double term =
            (-(d2[k] - best) - std::log(z / m)) / std::numbers::ln2;
        acc += term;
        acc2 += term * term;
    }
    const double n = static_cast<double>(samples);
    MiResult r;
    const double mean = acc / n;
    r.bits_per_complex_dim = mean / cons.complex_dims;
    const double var = std::max(0.0, acc2 / n - mean * mean);
    r.stderr_ = std::sqrt(var / n) / cons.complex_dims;
    return r;
}

double shannon_limit_db(double rate_bits_per_complex_dim) {
    if (rate_bits_per_complex_dim <= 0.0)
        throw std::invalid_argument("shannon_limit_db: rate must be positive");
    return 10.0 * std::log10(std::pow(2.0, rate_bits_per_complex_dim) - 1.0);
}

std::string ExitCurve::to_json() const {
    nlohmann::json j;
    j["grid"] = grid;
    j["values"] = values;
    j["snr_db"] = snr_db;
    return j.dump(2);
}

std::string ExitCurve::to_plot_data() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << grid[i] << " " << values[i] << "\n";
    return os.str();
}

}  // namespace iralat
