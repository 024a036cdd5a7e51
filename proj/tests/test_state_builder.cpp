#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "highprec.hpp"
#include "ncoptics/state_builder.hpp"

using namespace ncoptics;

namespace {

double mag(const cplx& z) { return std::abs(z); }

double norm_sq(const FockVector& v) {
    KahanSum s;
    for (const cplx& c : v.coeffs) s.add(std::norm(c));
    return s.value();
}

cplx overlap(const FockVector& a, const FockVector& b) {
    KahanSumComplex s;
    for (size_t n = 0; n < a.coeffs.size() && n < b.coeffs.size(); ++n)
        s.add(std::conj(a.coeffs[n]) * b.coeffs[n]);
    return s.value();
}

}  // namespace

TEST_CASE("recurrence with zero squeeze is an exact power chain") {
    DeformedOscillator m{0.5};
    auto t = recurrence_I({1.5, 0.0}, {0.0, 0.0}, m, 30);
    double exact = 1.0;
    for (unsigned n = 0; n <= 30; ++n) {
        REQUIRE(t.value(n) == cplx{exact, 0.0});  // 1.5^n is representable here
        exact *= 1.5;
    }

    cplx a{0.6, 0.3};
    auto tc = recurrence_I(a, {0.0, 0.0}, m, 25);
    cplx chain{1.0, 0.0};
    for (unsigned n = 0; n <= 25; ++n) {
        REQUIRE(tc.value(n) == chain);
        chain *= a;
    }

    REQUIRE_THROWS_AS(recurrence_I(a, a, m, 0), std::invalid_argument);
}

TEST_CASE("first recurrence steps by hand") {
    DeformedOscillator m{0.5};  // k(1) = 1.5
    cplx alpha{0.8, 0.2};
    cplx zeta{0.3, -0.1};
    auto t = recurrence_I(alpha, zeta, m, 3);
    REQUIRE(t.value(0) == cplx{1.0, 0.0});
    REQUIRE(t.value(1) == alpha);
    cplx expect2 = alpha * alpha - zeta * cplx{1.5, 0.0};
    REQUIRE(mag(t.value(2) - expect2) <= 1e-15 * mag(expect2));
    // I(3) = alpha I(2) - zeta k(2) I(1), k(2) = 3.5
    cplx expect3 = alpha * expect2 - zeta * cplx{3.5, 0.0} * alpha;
    REQUIRE(mag(t.value(3) - expect3) <= 1e-14 * mag(expect3));
}

TEST_CASE("recurrence agrees with 200-bit arithmetic deep into rescaling") {
    cplx alpha{0.7, 0.4};
    cplx zeta{0.5, 0.33};
    double tau = 1.0;
    DeformedOscillator m{tau};
    const unsigned deep = 150;
    auto got = recurrence_I(alpha, zeta, m, deep);
    auto want = hp::recurrence_I(hp::from(alpha), hp::from(zeta), hp::real(tau), deep);
    // the magnitudes blow past double range; compare in log-magnitude + phase
    for (unsigned n : {10u, 40u, 90u, 150u}) {
        const ScaledComplex& s = got.values[n];
        hp::real w_abs = hp::abs(want[n]);
        double log_want = hp::to_double(log(w_abs));
        REQUIRE(std::abs(s.log_abs() - log_want) <= 1e-10 * std::max(1.0, std::abs(log_want)));
        cplx got_ph = s.unit_phase();
        cplx want_ph = hp::to_complex(want[n] / w_abs);
        REQUIRE(mag(got_ph - want_ph) <= 1e-9);
    }
}

TEST_CASE("closed form: base cases, singular preconditions, linear term") {
    DeformedOscillator m{0.5};
    DeformedOscillator flat{0.0};
    REQUIRE(closed_form_I({1.0, 2.0}, {0.5, 0.0}, m, 0) == cplx{1.0, 0.0});
    REQUIRE_THROWS_AS(closed_form_I({1.0, 0.0}, {0.5, 0.0}, flat, 3), std::domain_error);
    REQUIRE_THROWS_AS(closed_form_I({1.0, 0.0}, {0.0, 0.0}, m, 3), std::domain_error);

    std::mt19937 rng(20260817);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.05, 1.0);
    for (int draw = 0; draw < 10; ++draw) {
        cplx alpha{u(rng), u(rng)};
        cplx zeta{u(rng) * 0.4, u(rng) * 0.4};
        if (std::abs(zeta) < 1e-3) zeta = {0.3, 0.1};
        DeformedOscillator mm{pos(rng)};
        cplx got = closed_form_I(alpha, zeta, mm, 1);
        REQUIRE(mag(got - alpha) <= 1e-12 * std::max(1.0, mag(alpha)));
    }
}

TEST_CASE("recurrence and closed form agree across the verification grid") {
    for (double tau : {0.1, 0.5}) {
        DeformedOscillator m{tau};
        for (double zr : {0.25, 0.75})
            for (double ar : {0.0, 0.5, 1.0, 2.0}) {
                cplx alpha{ar, 0.0};
                cplx zeta{zr, 0.0};
                auto rec = recurrence_I(alpha, zeta, m, 30);
                for (unsigned n = 0; n <= 30; ++n) {
                    cplx r = rec.value(n);
                    cplx c = closed_form_I(alpha, zeta, m, n);
                    REQUIRE(mag(r - c) <= 1e-9 * std::max(mag(r), 1.0));
                }
            }
    }
}

TEST_CASE("closed form tracks the 200-bit evaluation") {
    double tau = 0.5;
    DeformedOscillator m{tau};
    cplx zeta{0.25, 0.0};
    for (cplx alpha : {cplx{0.0, 0.0}, cplx{0.5, 0.3}})
        for (unsigned n : {2u, 4u, 11u, 24u}) {
            cplx got = closed_form_I(alpha, zeta, m, n);
            cplx want = hp::to_complex(
                hp::closed_form_I(hp::from(alpha), hp::from(zeta), hp::real(tau), n));
            REQUIRE(mag(got - want) <= 1e-11 * std::max(1.0, mag(want)));
        }
}

TEST_CASE("deformed coherent state at tau = 0 is the ordinary coherent state") {
    DeformedOscillator flat{0.0};
    for (double ar : {0.5, 2.0}) {
        const unsigned N = 30;
        FockVector got = nc_coherent({ar, 0.0}, flat, N);
        std::vector<cplx> raw(N + 1);
        raw[0] = {1.0, 0.0};
        for (unsigned n = 1; n <= N; ++n)
            raw[n] = raw[n - 1] * cplx{ar / std::sqrt(double(n)), 0.0};
        FockVector want = normalize(raw);
        for (unsigned n = 0; n <= N; ++n)
            REQUIRE(mag(got.coeffs[n] - want.coeffs[n]) <= 1e-13);
    }
}

TEST_CASE("deformed vacuum keeps a four-quantum admixture") {
    DeformedOscillator flat{0.0};
    FockVector plain = nc_coherent({0.0, 0.0}, flat, 12);
    REQUIRE(mag(plain.coeffs[0] - cplx{1.0, 0.0}) <= 1e-15);
    for (unsigned n = 1; n <= 12; ++n) REQUIRE(plain.coeffs[n] == cplx{0.0, 0.0});

    DeformedOscillator m{0.5};
    FockVector v = nc_coherent({0.0, 0.0}, m, 12);
    // only |0> and |4> survive alpha = 0; their ratio is tau/16 sqrt(4!)
    double expect = 0.5 / 16.0 * std::sqrt(24.0);
    REQUIRE(mag(v.coeffs[4] / v.coeffs[0] - cplx{expect, 0.0}) <= 1e-12);
    for (unsigned n = 1; n <= 12; ++n)
        if (n != 4) REQUIRE(v.coeffs[n] == cplx{0.0, 0.0});
    REQUIRE(std::abs(norm_sq(v) - 1.0) <= 1e-12);
}

TEST_CASE("series assembly matches the eigenstate-by-eigenstate assembly") {
    const unsigned N = 24;
    for (double tau : {0.1, 0.5}) {
        DeformedOscillator m{tau};
        auto lrho = log_rho_table(m, N + 4);
        for (double ar : {0.5, 1.0, 2.0}) {
            FockVector direct = nc_coherent({ar, 0.0}, m, N);

            std::vector<cplx> acc(N + 1, cplx{0.0, 0.0});
            for (unsigned n = 0; n <= N + 4; ++n) {
                double logw = n * std::log(ar) - 0.5 * lrho[n];
                double w = std::exp(logw);
                for (const auto& [level, amp] : perturbed_eigenstate(m, n).terms)
                    if (level <= N) acc[level] += cplx{w * amp, 0.0};
            }
            FockVector assembled = normalize(acc);
            double fidelity = mag(overlap(direct, assembled));
            REQUIRE(fidelity >= 1.0 - 1e-10);
        }
    }
}

TEST_CASE("squeezed builder limits: vanishing squeeze, vanishing deformation") {
    DeformedOscillator m{0.5};
    // zeta -> 0 joins continuously onto the coherent builder
    FockVector squeezed = nc_squeezed({1.0, 0.0}, {1e-12, 0.0}, m, 20);
    FockVector coherent = nc_coherent({1.0, 0.0}, m, 20);
    for (unsigned n = 0; n <= 20; ++n)
        REQUIRE(mag(squeezed.coeffs[n] - coherent.coeffs[n]) <= 1e-8);

    // tau = 0 reduces to the Hermite-form ordinary squeezed state. The
    // absolute floor covers mathematically-null coefficients: e.g. at
    // alpha = 0.5, zeta = 0.25 the Hermite argument sits exactly on the
    // H_2 root, so c_2 is pure cancellation residue on both sides and a
    // relative comparison is meaningless there.
    DeformedOscillator flat{0.0};
    for (double zr : {0.25, 0.75})
        for (double ar : {0.0, 0.5, 1.0, 2.0}) {
            const unsigned N = 30;
            FockVector a = nc_squeezed({ar, 0.0}, {zr, 0.0}, flat, N);
            FockVector b = ho_squeezed({ar, 0.0}, {zr, 0.0}, N);
            for (unsigned n = 0; n <= N; ++n) {
                double diff = mag(a.coeffs[n] - b.coeffs[n]);
                double scale = std::max(mag(a.coeffs[n]), mag(b.coeffs[n]));
                REQUIRE((diff <= 1e-9 * scale || diff <= 1e-12));
            }
        }
}

TEST_CASE("squeezed vacuum parity") {
    FockVector ho = ho_squeezed({0.0, 0.0}, {0.5, 0.0}, 16);
    for (unsigned n = 1; n <= 16; n += 2) REQUIRE(ho.coeffs[n] == cplx{0.0, 0.0});
    REQUIRE(mag(ho.coeffs[0]) > 0.5);

    DeformedOscillator m{0.5};
    FockVector nc = nc_squeezed({0.0, 0.0}, {0.5, 0.0}, m, 16);
    for (unsigned n = 1; n <= 16; n += 2) REQUIRE(nc.coeffs[n] == cplx{0.0, 0.0});

    // c2/c0 for the ordinary squeezed state: (zeta/2) H2(x) / sqrt(2), x = 1/sqrt(2 zeta)
    FockVector hs = ho_squeezed({1.0, 0.0}, {0.25, 0.0}, 16);
    double expect = 0.125 * 6.0 / std::sqrt(2.0);
    REQUIRE(mag(hs.coeffs[2] / hs.coeffs[0] - cplx{expect, 0.0}) <= 1e-12);
}

TEST_CASE("builder outputs are normalized with sane diagnostics") {
    DeformedOscillator half{0.5};
    DeformedOscillator one{1.0};
    FockVector battery[] = {
        nc_coherent({2.0, 0.0}, half, 24),
        nc_squeezed({1.0, 0.5}, {0.3, 0.4}, one, 40),
        ho_squeezed({2.0, 0.0}, {0.75, 0.0}, 60),
        ho_coherent({3.0, 0.0}, 50),
    };
    for (const FockVector& v : battery) {
        REQUIRE(std::abs(norm_sq(v) - 1.0) <= 1e-12);
        REQUIRE(v.tail_mass >= 0.0);
        REQUIRE(v.tail_mass < 1.0);
        REQUIRE(std::isfinite(v.norm_log));
        REQUIRE(v.coeffs.size() == v.truncation + 1);
    }
}

TEST_CASE("builder precondition failures") {
    DeformedOscillator m{0.5};
    REQUIRE_THROWS_AS(nc_squeezed({1.0, 0.0}, {0.0, 0.0}, m, 20), std::invalid_argument);
    REQUIRE_THROWS_AS(ho_squeezed({1.0, 0.0}, {0.0, 0.0}, 20), std::invalid_argument);
    REQUIRE_THROWS_AS(nc_coherent({1.0, 0.0}, m, 7), std::invalid_argument);
    REQUIRE_THROWS_AS(nc_squeezed({1.0, 0.0}, {0.5, 0.0}, m, 7), std::invalid_argument);
    StateSpec bad{{1.0, 0.0}, {0.5, 0.0}, m, StateFamily::nc_coherent};
    REQUIRE_THROWS_AS(build_state(bad, 20), std::invalid_argument);
}

TEST_CASE("normalize: exact small case, idempotence, extreme dynamic range") {
    FockVector v = normalize({{3.0, 0.0}, {4.0, 0.0}});
    REQUIRE(mag(v.coeffs[0] - cplx{0.6, 0.0}) <= 1e-15);
    REQUIRE(mag(v.coeffs[1] - cplx{0.8, 0.0}) <= 1e-15);
    REQUIRE(std::abs(v.norm_log - std::log(5.0)) <= 1e-14);

    FockVector again = normalize(v.coeffs);
    for (size_t n = 0; n < v.coeffs.size(); ++n)
        REQUIRE(mag(again.coeffs[n] - v.coeffs[n]) <= 1e-15);
    REQUIRE(std::abs(again.norm_log) <= 1e-14);

    REQUIRE_THROWS_AS(normalize({}), std::invalid_argument);
    REQUIRE_THROWS_AS(normalize({{0.0, 0.0}, {0.0, 0.0}}), std::invalid_argument);

    // forty orders of magnitude between the smallest and largest entries
    std::vector<cplx> wide(41);
    for (unsigned n = 0; n <= 40; ++n) {
        double phase = 0.37 * n;
        wide[n] = std::pow(10.0, double(n) - 20.0) * cplx{std::cos(phase), std::sin(phase)};
    }
    FockVector w = normalize(wide);
    REQUIRE(std::abs(norm_sq(w) - 1.0) <= 1e-12);
    double hp_log_norm = hp::to_double(log(hp::norm_from(wide)));
    REQUIRE(std::abs(w.norm_log - hp_log_norm) <= 1e-12 * std::abs(hp_log_norm));
}

TEST_CASE("truncation search doubles until the tail estimate settles") {
    StateSpec coh{{1.0, 0.0}, {0.0, 0.0}, DeformedOscillator{0.0}, StateFamily::ho_coherent};
    ConvergedState c = converge_truncation(coh, 1e-10, 8, 256);
    REQUIRE(c.converged);
    REQUIRE(c.state.truncation <= 20);
    REQUIRE(c.state.tail_mass < 1e-10);

    // an impossible tolerance walks to N_max and reports failure, not a throw
    ConvergedState never = converge_truncation(coh, 0.0, 8, 40);
    REQUIRE_FALSE(never.converged);
    REQUIRE(never.state.truncation == 40);

    REQUIRE_THROWS_AS(converge_truncation(coh, 1e-8, 4, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(converge_truncation(coh, 1e-8, 16, 8), std::invalid_argument);
}
