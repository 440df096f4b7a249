#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iralat {

/// A Hurwitz quaternion integer a+bi+cj+dk where either all four
/// coordinates are integers or all four are half-integers.  Coordinates
/// are stored doubled so that parity and arithmetic stay exact.
struct Hurwitz {
    // doubled coordinates: the represented point is d/2
    std::array<std::int64_t, 4> d{0, 0, 0, 0};

    constexpr Hurwitz() = default;
    constexpr Hurwitz(std::int64_t c1, std::int64_t ci, std::int64_t cj,
                      std::int64_t ck, bool doubled)
        : d{doubled ? c1 : 2 * c1, doubled ? ci : 2 * ci,
            doubled ? cj : 2 * cj, doubled ? ck : 2 * ck} {}

    static constexpr Hurwitz from_ints(std::int64_t a, std::int64_t b,
                                       std::int64_t c, std::int64_t e) {
        return Hurwitz(a, b, c, e, false);
    }
    static constexpr Hurwitz from_doubled(std::int64_t a, std::int64_t b,
                                          std::int64_t c, std::int64_t e) {
        return Hurwitz(a, b, c, e, true);
    }

    bool valid() const {
        const bool p0 = (d[0] & 1) != 0;
        for (int i = 1; i < 4; ++i)
            if (((d[i] & 1) != 0) != p0) return false;
        return true;
    }

    bool is_zero() const { return d[0] == 0 && d[1] == 0 && d[2] == 0 && d[3] == 0; }

    double coord(int i) const { return static_cast<double>(d[i]) / 2.0; }

    bool operator==(const Hurwitz&) const = default;

    // lexicographic order on doubled coordinates, used for tie-breaking
    bool lex_less(const Hurwitz& o) const { return d < o.d; }

    std::string str() const;
};

Hurwitz hw_add(const Hurwitz& a, const Hurwitz& b);
Hurwitz hw_sub(const Hurwitz& a, const Hurwitz& b);
Hurwitz hw_neg(const Hurwitz& a);
Hurwitz hw_conj(const Hurwitz& a);

/// Quaternion product (non-commutative), closed in the Hurwitz order.
Hurwitz hw_mul(const Hurwitz& a, const Hurwitz& b);

/// N(a) = sum of squared coordinates; an integer for every Hurwitz point.
std::int64_t hw_norm(const Hurwitz& a);

/// Gaussian integer re + im*i with exact integer coordinates.
struct Gaussian {
    std::int64_t re = 0;
    std::int64_t im = 0;
    bool operator==(const Gaussian&) const = default;
};

inline Gaussian gs_add(Gaussian a, Gaussian b) { return {a.re + b.re, a.im + b.im}; }
inline Gaussian gs_mul(Gaussian a, Gaussian b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline std::int64_t gs_norm(Gaussian a) { return a.re * a.re + a.im * a.im; }

/// Nearest Hurwitz integer to x, computed as the better of the integer
/// and half-integer rounding; ties broken toward the lexicographically
/// smallest doubled-coordinate vector.
Hurwitz quantize_hurwitz(const std::array<double, 4>& x);

/// Exact nearest-point quantization for rational inputs num[i]/den.
Hurwitz quantize_hurwitz_rational(const std::array<std::int64_t, 4>& num,
                                  std::int64_t den);

/// Nearest Z^4 point (componentwise rounding, ties toward the smaller
/// integer).  Used by the cubic-lattice shaping baseline.
Hurwitz quantize_cubic(const std::array<double, 4>& x);

enum class Ring { hurwitz, gaussian };

/// lambda mod xi*Lambda using left multiplication by xi: the reduction is
/// lambda - xi*Q(xi^{-1} lambda) with xi^{-1} lambda = conj(xi) lambda / N(xi),
/// evaluated in exact rational arithmetic.  For Ring::gaussian, points are
/// embedded with cj = ck = 0 and the quantizer is componentwise rounding.
Hurwitz mod_xi(const Hurwitz& lambda, const Hurwitz& xi, Ring ring);

}  // namespace iralat
