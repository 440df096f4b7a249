#include "iralat/decoder.hpp"

#include <numbers>
#include <stdexcept>
#include <cstdlib>
#include <cmath>
#include <limits>

namespace iralat {

GroupDft::GroupDft(const PartitionTable& table)
    : m_(table.size()), coords_(&table.phi_coords), p_(table.p) {
    kernel_.resize(static_cast<std::size_t>(m_) * m_);
    std::vector<std::complex<double>> roots(p_);
    for (int k = 0; k < p_; ++k) {
        const double ang = -2.0 * std::numbers::pi * k / p_;
        roots[k] = {std::cos(ang), std::sin(ang)};
    }
    for (int u = 0; u < m_; ++u)
        for (int v = 0; v < m_; ++v) {
            int dot = 0;
            for (int g = 0; g < table.m_exp; ++g)
                dot = (dot + (*coords_)[u][g] * (*coords_)[v][g]) % p_;
            kernel_[static_cast<std::size_t>(u) * m_ + v] = roots[dot];
        }
}

std::vector<std::complex<double>> GroupDft::forward(const ProbVec& x) const {
    std::vector<std::complex<double>> f(m_);
    for (int u = 0; u < m_; ++u) {
        std::complex<double> acc = 0.0;
        const auto* row = &kernel_[static_cast<std::size_t>(u) * m_];
        for (int v = 0; v < m_; ++v) acc += row[v] * x[v];
        f[u] = acc;
    }
    return f;
}

ProbVec GroupDft::inverse(const std::vector<std::complex<double>>& f) const {
    ProbVec x(m_);
    for (int v = 0; v < m_; ++v) {
        std::complex<double> acc = 0.0;
        for (int u = 0; u < m_; ++u)
            acc += std::conj(kernel_[static_cast<std::size_t>(u) * m_ + v]) * f[u];
        x[v] = acc.real() / m_;
    }
    return x;
}

namespace {

int edge_sign(const std::vector<int>* signs, std::size_t i) {
    return signs ? (*signs)[i] : 1;
}

/// value of the term s*t (+) h appearing in the parity check
int term_value(const PartitionTable& t, int val, int h, int sign) {
    const int v = (sign >= 0) ? val : t.neg(val);
    return t.add(v, h);
}

/// solve s*k (+) h = target for k
int solve_target(const PartitionTable& t, int target, int h, int sign) {
    const int v = t.sub(target, h);
    return (sign >= 0) ? v : t.neg(v);
}

}  // namespace

ProbVec cn_update_direct(const std::vector<ProbVec>& incoming,
                         const std::vector<int>& h, const PartitionTable& table,
                         const std::vector<int>* signs) {
    const std::size_t deg = incoming.size();
    if (h.size() != deg + 1)
        throw std::invalid_argument("cn_update_direct: h must have one entry per "
                                    "incoming message plus the target edge");
    if (deg + 1 > 6)
        throw std::invalid_argument("cn_update_direct: degree too large");
    const int m = table.size();
    ProbVec out(m, 0.0);

    // enumerate configurations of the incoming variables
    std::vector<int> cfg(deg, 0);
    for (;;) {
        int sum = 0;
        double prod = 1.0;
        for (std::size_t i = 0; i < deg; ++i) {
            sum = table.add(sum, term_value(table, cfg[i], h[i], edge_sign(signs, i)));
            prod *= incoming[i][cfg[i]];
        }
        // constraint: sum (+) (s_T k (+) h_T) = 0
        const int k = solve_target(table, table.neg(sum), h[deg],
                                   edge_sign(signs, deg));
        out[k] += prod;

        std::size_t pos = 0;
        while (pos < deg && ++cfg[pos] == m) cfg[pos++] = 0;
        if (pos == deg) break;
    }
    normalize(out);
    return out;
}

ProbVec cn_update_dft(const std::vector<ProbVec>& incoming,
                      const std::vector<int>& h, const PartitionTable& table,
                      const std::vector<int>* signs) {
    const std::size_t deg = incoming.size();
    if (h.size() != deg + 1)
        throw std::invalid_argument("cn_update_dft: h must have one entry per "
                                    "incoming message plus the target edge");
    const int m = table.size();
    const GroupDft dft(table);

    std::vector<std::complex<double>> spec(m, 1.0);
    ProbVec q(m);
    for (std::size_t i = 0; i < deg; ++i) {
        std::fill(q.begin(), q.end(), 0.0);
        for (int t = 0; t < m; ++t)
            q[term_value(table, t, h[i], edge_sign(signs, i))] = incoming[i][t];
        const auto f = dft.forward(q);
        for (int u = 0; u < m; ++u) spec[u] *= f[u];
    }
    const ProbVec conv = dft.inverse(spec);
    ProbVec out(m);
    for (int k = 0; k < m; ++k)
        out[k] = conv[table.neg(term_value(table, k, h[deg], edge_sign(signs, deg)))];
    normalize(out);
    return out;
}

ProbVec vn_update(const std::vector<ProbVec>& incoming, const ProbVec& prior) {
    ProbVec out = prior;
    for (const auto& msg : incoming)
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] *= msg[k];
            if (out[k] < kProbClip) out[k] = (out[k] <= 0.0) ? 0.0 : kProbClip;
        }
    for (double& v : out)
        if (v > 0.0 && v < kProbClip) v = kProbClip;
    normalize(out);
    return out;
}

namespace {

struct CnEdge {
    const ProbVec* in;
    ProbVec* out;  // nullptr for the dummy-parity edge
    int h;
    int sign;
};

}  // namespace

DecodeResult bp_decode(const std::vector<ProbVec>& app, const TannerGraph& gr,
                       const PartitionTable& table, int max_iter,
                       DecodeTrace* trace) {
    if (static_cast<int>(app.size()) != gr.N)
        throw std::invalid_argument("bp_decode: APP length mismatch");
    const int m = table.size();
    for (const auto& p : app)
        if (static_cast<int>(p.size()) != m || !is_valid_prob(p))
            throw std::invalid_argument("bp_decode: invalid APP vector");

    const GroupDft dft(table);
    const ProbVec uni = uniform_prob(m);
    const ProbVec dummy = point_mass(m, 0);

    static const double exp_gamma = std::getenv("BPG") ? std::atof(std::getenv("BPG")) : 0.7;
    static const double exp_delta = std::getenv("BPD") ? std::atof(std::getenv("BPD")) : 0.2;
    static const int exp_stall = std::getenv("BPS") ? std::atoi(std::getenv("BPS")) : 20;

    std::vector<ProbVec> appl(gr.N);
    std::vector<ProbVec> r_slot, l_slot, r_left, l_left, r_right, l_right;

    // Deterministic per-(attempt, symbol, component) jitter in [0, 1).
    auto jitter = [](std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    };
    // (Re)initialize all messages.  Attempts after the first perturb the
    // working prior by a small multiplicative jitter: decoding success this
    // close to the waterfall is chaotically sensitive to the input, so
    // trajectories from perturbed priors fail nearly independently.
    auto reset = [&](int attempt) {
        for (int n = 0; n < gr.N; ++n) {
            appl[n] = app[n];
            if (attempt > 0) {
                for (int k = 0; k < m; ++k) {
                    const double u =
                        jitter((static_cast<std::uint64_t>(attempt) << 40) ^
                               (static_cast<std::uint64_t>(n) << 8) ^
                               static_cast<std::uint64_t>(k));
                    appl[n][k] *= std::exp(exp_delta * (2.0 * u - 1.0));
                }
                normalize(appl[n]);
            }
        }
        r_slot.assign(gr.L, uni);
        l_slot.assign(gr.L, uni);
        l_left.assign(gr.N, uni);
        l_right.assign(gr.N, uni);
        r_left.resize(gr.N);
        r_right.resize(gr.N);
        for (int n = 0; n < gr.N; ++n) {
            r_left[n] = (n == 0) ? dummy : appl[n - 1];
            r_right[n] = appl[n];
        }
    };
    reset(0);

    std::vector<int> u_hat(gr.K, 0), c_hat(gr.N, 0);
    DecodeResult res;

    ProbVec q(m);
    std::vector<std::complex<double>> prefix, suffix;

    // One check-node update (all outgoing extrinsics of check n).
    auto cn_update = [&](int n) {
        std::vector<CnEdge> edges;
            edges.reserve(gr.cn_span[n] + 2);
            for (long l = gr.cn_first[n]; l < gr.cn_first[n] + gr.cn_span[n]; ++l)
                edges.push_back({&r_slot[l], &l_slot[l], gr.g[l], 1});
            edges.push_back({n == 0 ? &dummy : &r_left[n],
                             n == 0 ? nullptr : &l_left[n], gr.gp[n], 1});
            edges.push_back({&r_right[n], &l_right[n], gr.gpp[n], -1});

            const std::size_t ne = edges.size();
            std::vector<std::vector<std::complex<double>>> spec(ne);
            for (std::size_t e = 0; e < ne; ++e) {
                std::fill(q.begin(), q.end(), 0.0);
                for (int t = 0; t < m; ++t)
                    q[term_value(table, t, edges[e].h, edges[e].sign)] =
                        (*edges[e].in)[t];
                spec[e] = dft.forward(q);
            }
            prefix.assign((ne + 1) * m, 1.0);
            suffix.assign((ne + 1) * m, 1.0);
            for (std::size_t e = 0; e < ne; ++e)
                for (int u = 0; u < m; ++u)
                    prefix[(e + 1) * m + u] = prefix[e * m + u] * spec[e][u];
            for (std::size_t e = ne; e-- > 0;)
                for (int u = 0; u < m; ++u)
                    suffix[e * m + u] = suffix[(e + 1) * m + u] * spec[e][u];

            std::vector<std::complex<double>> s(m);
            for (std::size_t e = 0; e < ne; ++e) {
                if (!edges[e].out) continue;
                for (int u = 0; u < m; ++u)
                    s[u] = prefix[e * m + u] * suffix[(e + 1) * m + u];
                const ProbVec conv = dft.inverse(s);
                ProbVec& out = *edges[e].out;
                for (int k = 0; k < m; ++k)
                    out[k] = conv[table.neg(
                        term_value(table, k, edges[e].h, edges[e].sign))];
                normalize(out);
            }
    };

    int attempt = 0, stall = 0;
    int best_viol = std::numeric_limits<int>::max();
    int overall_best = std::numeric_limits<int>::max();
    std::vector<int> best_u = u_hat;
    for (int it = 1; it <= max_iter; ++it) {
        // ---- check-node updates ----
        // Serial zigzag schedule over the accumulator chain: sweep the check
        // nodes in alternating order and propagate the chain message eagerly,
        // so channel information crosses the whole chain every iteration
        // instead of advancing one parity position per iteration.
        const bool fwd = (it & 1) != 0;
        if (fwd) {
            for (int n = 0; n < gr.N; ++n) {
                cn_update(n);
                if (n + 1 < gr.N) r_left[n + 1] = vn_update({l_right[n]}, appl[n]);
            }
        } else {
            for (int n = gr.N - 1; n >= 0; --n) {
                cn_update(n);
                if (n > 0) r_right[n - 1] = vn_update({l_left[n]}, appl[n - 1]);
            }
        }

        // ---- variable-node updates ----
        for (int k = 0; k < gr.K; ++k) {
            const auto& slots = gr.vn_slots[k];
            for (std::size_t a = 0; a < slots.size(); ++a) {
                std::vector<ProbVec> others;
                others.reserve(slots.size() - 1);
                for (std::size_t b = 0; b < slots.size(); ++b)
                    if (b != a) others.push_back(l_slot[slots[b]]);
                const double gamma = exp_gamma;
                ProbVec fresh = vn_update(others, uni);
                ProbVec& cur = r_slot[slots[a]];
                for (std::size_t i = 0; i < fresh.size(); ++i)
                    cur[i] = std::pow(cur[i], 1.0 - gamma) * std::pow(fresh[i], gamma);
                normalize(cur);
            }
        }
        for (int n = 0; n < gr.N; ++n) {
            // parity node c_n: right edge of check n, left edge of check n+1
            if (n + 1 < gr.N) {
                r_right[n] = vn_update({l_left[n + 1]}, appl[n]);
                r_left[n + 1] = vn_update({l_right[n]}, appl[n]);
            } else {
                r_right[n] = vn_update({}, appl[n]);
            }
        }

        // ---- hard decisions and stopping test ----
        for (int k = 0; k < gr.K; ++k) {
            std::vector<ProbVec> all;
            for (long l : gr.vn_slots[k]) all.push_back(l_slot[l]);
            u_hat[k] = hard_decision(vn_update(all, uni));
        }
        for (int n = 0; n < gr.N; ++n) {
            std::vector<ProbVec> all{l_right[n]};
            if (n + 1 < gr.N) all.push_back(l_left[n + 1]);
            c_hat[n] = hard_decision(vn_update(all, appl[n]));
        }

        int violations = 0;
        for (int n = 0; n < gr.N; ++n) {
            int sum = 0;
            for (long l = gr.cn_first[n]; l < gr.cn_first[n] + gr.cn_span[n]; ++l)
                sum = table.add(sum, table.add(u_hat[gr.slot_owner[l]], gr.g[l]));
            const int prev = (n == 0) ? 0 : c_hat[n - 1];
            sum = table.add(sum, table.add(prev, gr.gp[n]));
            sum = table.add(sum, table.add(table.neg(c_hat[n]), gr.gpp[n]));
            if (sum != 0) ++violations;
        }
        if (trace) {
            trace->violations.push_back(violations);
            trace->u_hats.push_back(u_hat);
        }
        res.iterations = it;
        if (violations == 0) {
            res.converged = true;
            break;
        }
        if (violations < overall_best) {
            overall_best = violations;
            best_u = u_hat;
        }
        // Stall detection: no new violation low for a while means the
        // trajectory is trapped; restart from jittered priors.
        if (violations < best_viol) {
            best_viol = violations;
            stall = 0;
        } else if (++stall >= exp_stall) {
            reset(++attempt);
            best_viol = std::numeric_limits<int>::max();
            stall = 0;
        }
    }
    res.u_hat = res.converged ? u_hat : best_u;
    return res;
}

}  // namespace iralat
