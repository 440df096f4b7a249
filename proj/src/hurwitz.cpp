#include "iralat/hurwitz.hpp"

#include <cmath>
#include <sstream>

namespace iralat {

namespace {

void require_valid(const Hurwitz& a, const char* who) {
    if (!a.valid())
        throw std::invalid_argument(std::string(who) +
                                    ": not a Hurwitz integer (mixed parity)");
}

// ceil(a/b) for b > 0
std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return a / b + ((a % b != 0 && (a ^ b) > 0) ? 1 : 0);
}

// nearest integer to n/d with ties toward the smaller integer, d > 0
std::int64_t round_half_down(std::int64_t n, std::int64_t d) {
    return ceil_div(2 * n - d, 2 * d);
}

}  // namespace

std::string Hurwitz::str() const {
    std::ostringstream os;
    os << "(" << coord(0) << "," << coord(1) << "," << coord(2) << ","
       << coord(3) << ")";
    return os.str();
}

Hurwitz hw_add(const Hurwitz& a, const Hurwitz& b) {
    require_valid(a, "hw_add");
    require_valid(b, "hw_add");
    return Hurwitz::from_doubled(a.d[0] + b.d[0], a.d[1] + b.d[1],
                                 a.d[2] + b.d[2], a.d[3] + b.d[3]);
}

Hurwitz hw_sub(const Hurwitz& a, const Hurwitz& b) {
    require_valid(a, "hw_sub");
    require_valid(b, "hw_sub");
    return Hurwitz::from_doubled(a.d[0] - b.d[0], a.d[1] - b.d[1],
                                 a.d[2] - b.d[2], a.d[3] - b.d[3]);
}

Hurwitz hw_neg(const Hurwitz& a) {
    return Hurwitz::from_doubled(-a.d[0], -a.d[1], -a.d[2], -a.d[3]);
}

Hurwitz hw_conj(const Hurwitz& a) {
    return Hurwitz::from_doubled(a.d[0], -a.d[1], -a.d[2], -a.d[3]);
}

Hurwitz hw_mul(const Hurwitz& a, const Hurwitz& b) {
    require_valid(a, "hw_mul");
    require_valid(b, "hw_mul");
    // product of doubled representations carries an extra factor of 2
    const std::int64_t a1 = a.d[0], ai = a.d[1], aj = a.d[2], ak = a.d[3];
    const std::int64_t b1 = b.d[0], bi = b.d[1], bj = b.d[2], bk = b.d[3];
    const std::int64_t c1 = a1 * b1 - ai * bi - aj * bj - ak * bk;
    const std::int64_t ci = a1 * bi + ai * b1 + aj * bk - ak * bj;
    const std::int64_t cj = a1 * bj - ai * bk + aj * b1 + ak * bi;
    const std::int64_t ck = a1 * bk + ai * bj - aj * bi + ak * b1;
    // closure of the Hurwitz order makes these halvings exact
    return Hurwitz::from_doubled(c1 / 2, ci / 2, cj / 2, ck / 2);
}

std::int64_t hw_norm(const Hurwitz& a) {
    require_valid(a, "hw_norm");
    const std::int64_t s = a.d[0] * a.d[0] + a.d[1] * a.d[1] +
                           a.d[2] * a.d[2] + a.d[3] * a.d[3];
    return s / 4;
}

Hurwitz quantize_hurwitz(const std::array<double, 4>& x) {
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument("quantize_hurwitz: non-finite input");
    std::array<std::int64_t, 4> a{}, b{};
    for (int i = 0; i < 4; ++i) {
        // nearest integer, ties toward the smaller value
        a[i] = static_cast<std::int64_t>(std::ceil(x[i] - 0.5));
        // nearest half-odd integer (doubled coordinate 2m+1)
        const std::int64_t m = static_cast<std::int64_t>(std::ceil(x[i] - 1.0));
        b[i] = 2 * m + 1;
    }
    double da = 0.0, db = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double ea = x[i] - static_cast<double>(a[i]);
        const double eb = x[i] - static_cast<double>(b[i]) / 2.0;
        da += ea * ea;
        db += eb * eb;
    }
    const Hurwitz ha = Hurwitz::from_doubled(2 * a[0], 2 * a[1], 2 * a[2], 2 * a[3]);
    const Hurwitz hb = Hurwitz::from_doubled(b[0], b[1], b[2], b[3]);
    if (da < db) return ha;
    if (db < da) return hb;
    return ha.lex_less(hb) ? ha : hb;
}

Hurwitz quantize_hurwitz_rational(const std::array<std::int64_t, 4>& num,
                                  std::int64_t den) {
    if (den <= 0) throw std::invalid_argument("quantize_hurwitz_rational: den <= 0");
    std::array<std::int64_t, 4> a{}, b{};
    for (int i = 0; i < 4; ++i) {
        a[i] = round_half_down(num[i], den);
        // nearest half-odd: m + 1/2 with m = round_half_down(num/den - 1/2)
        const std::int64_t m = ceil_div(num[i] - den, den);
        b[i] = 2 * m + 1;
    }
    // squared distances scaled by (2*den)^2, exact
    std::int64_t da = 0, db = 0;
    for (int i = 0; i < 4; ++i) {
        const std::int64_t ea = 2 * num[i] - 2 * den * a[i];
        const std::int64_t eb = 2 * num[i] - den * b[i];
        da += ea * ea;
        db += eb * eb;
    }
    const Hurwitz ha = Hurwitz::from_doubled(2 * a[0], 2 * a[1], 2 * a[2], 2 * a[3]);
    const Hurwitz hb = Hurwitz::from_doubled(b[0], b[1], b[2], b[3]);
    if (da < db) return ha;
    if (db < da) return hb;
    return ha.lex_less(hb) ? ha : hb;
}

Hurwitz quantize_cubic(const std::array<double, 4>& x) {
    std::array<std::int64_t, 4> a{};
    for (int i = 0; i < 4; ++i)
        a[i] = static_cast<std::int64_t>(std::ceil(x[i] - 0.5));
    return Hurwitz::from_doubled(2 * a[0], 2 * a[1], 2 * a[2], 2 * a[3]);
}

Hurwitz mod_xi(const Hurwitz& lambda, const Hurwitz& xi, Ring ring) {
    require_valid(lambda, "mod_xi");
    require_valid(xi, "mod_xi");
    const std::int64_t n = hw_norm(xi);
    if (n == 0) throw std::invalid_argument("mod_xi: xi = 0");
    // xi^{-1} lambda = conj(xi) lambda / N(xi); coordinates are the doubled
    // coordinates of conj(xi)*lambda over 2*N(xi)
    const Hurwitz t = hw_mul(hw_conj(xi), lambda);
    Hurwitz q;
    if (ring == Ring::hurwitz) {
        q = quantize_hurwitz_rational(t.d, 2 * n);
    } else {
        if (lambda.d[2] != 0 || lambda.d[3] != 0 || xi.d[2] != 0 || xi.d[3] != 0)
            throw std::invalid_argument("mod_xi: gaussian point with j/k part");
        const std::int64_t qr = round_half_down(t.d[0], 2 * n);
        const std::int64_t qi = round_half_down(t.d[1], 2 * n);
        q = Hurwitz::from_ints(qr, qi, 0, 0);
    }
    return hw_sub(lambda, hw_mul(xi, q));
}

}  // namespace iralat
