#include "iralat/shaping.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "iralat/rng.hpp"

namespace iralat {

namespace {

struct Moments {
    double sum = 0.0;
    double sum2 = 0.0;
};

Moments nsm_block(Lattice lattice, std::uint64_t count, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Moments m;
    for (std::uint64_t s = 0; s < count; ++s) {
        std::array<double, 4> x{uni(rng), uni(rng), uni(rng), uni(rng)};
        const Hurwitz q = (lattice == Lattice::hurwitz) ? quantize_hurwitz(x)
                                                        : quantize_cubic(x);
        double e = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double r = x[i] - q.coord(i);
            e += r * r;
        }
        e /= 4.0;
        m.sum += e;
        m.sum2 += e * e;
    }
    return m;
}

}  // namespace

NsmResult nsm_estimate(Lattice lattice, std::uint64_t samples,
                       std::uint64_t seed, int workers) {
    if (samples < 100000)
        throw std::invalid_argument("nsm_estimate: needs at least 1e5 samples");
    if (workers < 1) workers = 1;

    std::vector<Moments> parts(workers);
    std::vector<std::uint64_t> counts(workers, samples / workers);
    counts[0] += samples % workers;

    if (workers == 1) {
        parts[0] = nsm_block(lattice, counts[0], derive_seed(seed, 0));
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                parts[w] = nsm_block(lattice, counts[w], derive_seed(seed, w));
            });
        for (auto& th : pool) th.join();
    }

    Moments m;
    for (const auto& p : parts) {
        m.sum += p.sum;
        m.sum2 += p.sum2;
    }
    const double n = static_cast<double>(samples);
    const double mean = m.sum / n;
    const double var = std::max(0.0, m.sum2 / n - mean * mean);
    // Vol(H) = 1/2, Vol(Z^4) = 1; NSM = P / Vol^{2/n}
    const double vol_factor =
        (lattice == Lattice::hurwitz) ? std::pow(0.5, 0.5) : 1.0;
    NsmResult r;
    r.nsm = mean / vol_factor;
    r.stderr_ = std::sqrt(var / n) / vol_factor;
    return r;
}

double shaping_gain_db(double nsm) {
    if (nsm <= 0.0) throw std::invalid_argument("shaping_gain_db: nsm <= 0");
    return 10.0 * std::log10((1.0 / 12.0) / nsm);
}

Constellation normalize_constellation(const PartitionTable& table) {
    if (table.size() < 2)
        throw std::invalid_argument("normalize_constellation: degenerate table");
    Constellation c;
    c.complex_dims = (table.ring == Ring::hurwitz) ? 2 : 1;
    double mean_energy = 0.0;
    for (const auto& l : table.leaders) {
        double e = 0.0;
        for (int i = 0; i < 4; ++i) e += l.coord(i) * l.coord(i);
        mean_energy += e;
    }
    mean_energy /= static_cast<double>(table.size());
    const double per_complex = mean_energy / c.complex_dims;
    c.scale = 1.0 / std::sqrt(per_complex);
    c.points.reserve(table.size());
    for (const auto& l : table.leaders)
        c.points.push_back({c.scale * l.coord(0), c.scale * l.coord(1),
                            c.scale * l.coord(2), c.scale * l.coord(3)});
    c.energy_per_complex_dim = 1.0;
    return c;
}

}  // namespace iralat
