#pragma once

// Overflow-safe scalar special functions shared by the rest of the library:
// log-factorials, rising factorials, Hermite polynomials, the terminating
// Gauss hypergeometric sum, and the scaled-complex carrier used to hold
// super-factorially large intermediates.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ncoptics {

using cplx = std::complex<double>;

// Natural-log representation of a nonnegative magnitude. is_zero = true
// forces the value 0 regardless of log_abs.
struct LogMagnitude {
    double log_abs = 0.0;
    bool is_zero = false;

    static LogMagnitude zero() { return {0.0, true}; }

    static LogMagnitude from_value(double v) {
        if (v < 0.0) throw std::invalid_argument("LogMagnitude: negative magnitude");
        if (v == 0.0) return zero();
        return {std::log(v), false};
    }

    double value() const { return is_zero ? 0.0 : std::exp(log_abs); }
};

// Kahan-compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct KahanSumComplex {
    KahanSum re, im;

    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

// Complex value carried as mantissa * exp(log_scale). Rescaling pulls the
// mantissa back toward O(1) only when it leaves [1e-150, 1e150], so inside
// that range arithmetic on the mantissa is plain double arithmetic.
struct ScaledComplex {
    cplx mantissa{0.0, 0.0};
    double log_scale = 0.0;

    static ScaledComplex from(cplx v) {
        ScaledComplex s{v, 0.0};
        s.rescale();
        return s;
    }
    static ScaledComplex one() { return ScaledComplex{{1.0, 0.0}, 0.0}; }
    static ScaledComplex zero() { return ScaledComplex{{0.0, 0.0}, 0.0}; }

    bool is_zero() const { return mantissa == cplx{0.0, 0.0}; }

    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return log_scale + std::log(std::abs(mantissa));
    }

    cplx unit_phase() const {
        if (is_zero()) return {0.0, 0.0};
        return mantissa / std::abs(mantissa);
    }

    // Representable-range value; overflows to inf exactly like exp() would.
    cplx value() const {
        if (is_zero()) return {0.0, 0.0};
        if (log_scale == 0.0) return mantissa;
        return mantissa * std::exp(log_scale);
    }

    void rescale() {
        if (is_zero()) {
            log_scale = 0.0;
            return;
        }
        double m = std::max(std::fabs(mantissa.real()), std::fabs(mantissa.imag()));
        if (m > 1e150 || m < 1e-150) {
            double shift = std::log(m);
            mantissa *= std::exp(-shift);
            log_scale += shift;
        }
    }

    ScaledComplex& operator*=(cplx z) {
        mantissa *= z;
        rescale();
        return *this;
    }

    ScaledComplex& operator*=(const ScaledComplex& o) {
        mantissa *= o.mantissa;
        log_scale += o.log_scale;
        rescale();
        return *this;
    }

    // Multiply by exp(l) without touching the mantissa.
    ScaledComplex& mul_log(double l) {
        if (!is_zero()) log_scale += l;
        return *this;
    }
};

inline ScaledComplex operator*(cplx z, ScaledComplex s) {
    s *= z;
    return s;
}

inline ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) {
    a *= b;
    return a;
}

inline ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.log_scale == b.log_scale) {
        ScaledComplex r{a.mantissa + b.mantissa, a.log_scale};
        r.rescale();
        return r;
    }
    const ScaledComplex& big = (a.log_scale >= b.log_scale) ? a : b;
    const ScaledComplex& small = (a.log_scale >= b.log_scale) ? b : a;
    double d = small.log_scale - big.log_scale;  // <= 0
    ScaledComplex r{big.mantissa + small.mantissa * std::exp(d), big.log_scale};
    r.rescale();
    return r;
}

// ln(n!)
inline double log_factorial(unsigned n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// Rising factorial (x)^(n) = x (x+1) ... (x+n-1); empty product for n = 0.
inline double pochhammer_rising(double x, unsigned n) {
    double p = 1.0;
    for (unsigned k = 0; k < n; ++k) p *= (x + static_cast<double>(k));
    return p;
}

// Physicists' Hermite polynomial H_n(x), three-term recurrence.
inline cplx hermite(unsigned n, cplx x) {
    if (n == 0) return {1.0, 0.0};
    cplx hm1{1.0, 0.0};
    cplx h = 2.0 * x;
    for (unsigned m = 1; m < n; ++m) {
        cplx next = 2.0 * x * h - 2.0 * static_cast<double>(m) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

namespace detail {

// Double-double arithmetic (Dekker/Knuth error-free transforms). Used to
// evaluate the terminating hypergeometric sum, whose alternating terms at
// z = 2 cancel far below the magnitude of the largest term.
struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double v = s - a;
    return {s, (a - (s - v)) + (b - v)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline dd dd_div(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = dd_add(a, dd_neg(dd_mul({q1, 0.0}, b)));
    double q2 = r.hi / b.hi;
    r = dd_add(r, dd_neg(dd_mul({q2, 0.0}, b)));
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return dd_add(q, {q3, 0.0});
}

struct ddc {
    dd re, im;
};

inline ddc ddc_from(cplx z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }

inline ddc ddc_add(ddc a, ddc b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

inline ddc ddc_mul(ddc a, ddc b) {
    dd re = dd_add(dd_mul(a.re, b.re), dd_neg(dd_mul(a.im, b.im)));
    dd im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
    return {re, im};
}

inline ddc ddc_scale(ddc a, dd s) { return {dd_mul(a.re, s), dd_mul(a.im, s)}; }

inline ddc ddc_div_real(ddc a, dd s) { return {dd_div(a.re, s), dd_div(a.im, s)}; }

inline cplx ddc_fold(ddc a) { return {a.re.hi + a.re.lo, a.im.hi + a.im.lo}; }

}  // namespace detail

// Terminating Gauss hypergeometric sum
//   2F1(-n, b; c; z) = sum_{j=0}^{n} (-n)_j (b)_j / (c)_j * z^j / j!.
// The first parameter being a negative integer makes the series finite.
// Throws std::domain_error when some (c)_j in the sum vanishes.
inline cplx terminating_2f1(unsigned n, cplx b, double c, double z) {
    if (n >= 1 && c <= 0.0 && c == std::trunc(c) && c >= -(static_cast<double>(n) - 1.0))
        throw std::domain_error("terminating_2f1: denominator Pochhammer term vanishes");

    using namespace detail;
    ddc term{{1.0, 0.0}, {0.0, 0.0}};
    ddc sum = term;
    ddc bdd = ddc_from(b);
    for (unsigned j = 0; j < n; ++j) {
        double jd = static_cast<double>(j);
        // term *= (-n + j)(b + j) z / ((c + j)(j + 1))
        ddc bj = ddc_add(bdd, ddc_from({jd, 0.0}));
        term = ddc_mul(term, bj);
        term = ddc_scale(term, dd_mul({jd - static_cast<double>(n), 0.0}, {z, 0.0}));
        term = ddc_div_real(term, dd_mul({c + jd, 0.0}, {jd + 1.0, 0.0}));
        sum = ddc_add(sum, term);
    }
    return ddc_fold(sum);
}

}  // namespace ncoptics
