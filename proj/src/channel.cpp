#include "iralat/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iralat/rng.hpp"

namespace iralat {

ReceivedFrame awgn_transmit(const std::vector<int>& x,
                            const Constellation& constellation,
                            const ChannelConfig& config) {
    auto rng = make_rng(config.seed);
    // unit variance per complex dimension -> 1/2 per real dimension
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
    const double amp = std::sqrt(std::pow(10.0, config.snr_db / 10.0));
    const int dims = 2 * constellation.complex_dims;

    ReceivedFrame frame;
    frame.y.reserve(x.size());
    for (int idx : x) {
        const auto& pt = constellation.points.at(idx);
        std::array<double, 4> y{0.0, 0.0, 0.0, 0.0};
        for (int i = 0; i < dims; ++i)
            y[i] = amp * pt[i] + (config.noiseless ? 0.0 : noise(rng));
        frame.y.push_back(y);
    }
    return frame;
}

std::vector<ProbVec> compute_app(const ReceivedFrame& frame,
                                 const Constellation& constellation,
                                 const ChannelConfig& config) {
    const double amp = std::sqrt(std::pow(10.0, config.snr_db / 10.0));
    const int dims = 2 * constellation.complex_dims;
    const int m = static_cast<int>(constellation.points.size());

    std::vector<ProbVec> app;
    app.reserve(frame.y.size());
    std::vector<double> d2(m);
    for (const auto& y : frame.y) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < m; ++k) {
            double d = 0.0;
            for (int i = 0; i < dims; ++i) {
                const double e = y[i] - amp * constellation.points[k][i];
                d += e * e;
            }
            d2[k] = d;
            best = std::min(best, d);
        }
        // exp(-||y - sqrt(SNR) psi||^2 / (2 * 1/2)), max-shifted
        ProbVec p(m);
        for (int k = 0; k < m; ++k) p[k] = std::exp(-(d2[k] - best));
        normalize(p);
        app.push_back(std::move(p));
    }
    return app;
}

std::vector<ProbVec> remove_coset(const std::vector<ProbVec>& app,
                                  const std::vector<int>& r,
                                  const PartitionTable& table) {
    if (app.size() != r.size())
        throw std::invalid_argument("remove_coset: length mismatch");
    const int m = table.size();
    std::vector<ProbVec> out;
    out.reserve(app.size());
    for (std::size_t n = 0; n < app.size(); ++n) {
        ProbVec p(m);
        // P(c = psi_k) = P(x = psi_k (+) r_n)
        for (int k = 0; k < m; ++k) p[k] = app[n][table.add(k, r[n])];
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace iralat
