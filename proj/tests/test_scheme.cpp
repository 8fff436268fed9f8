#include "homog/lattice.hpp"
#include "homog/scheme.hpp"
#include "homog/solver.hpp"
#include "homog/spectral.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace homog;
using testing::random_env;

namespace {

Rational q(long n, long d = 1) { return Rational(n) / Rational(d); }

Rational pow2r(int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= 2;
    return r;
}

}  // namespace

TEST_CASE("coefficient tables for k = 1..4") {
    const auto k1 = coefficients(1);
    CHECK(k1.a == std::vector<Rational>{q(1)});
    CHECK(k1.eta == std::vector<Rational>{q(0)});

    const auto k2 = coefficients(2);
    CHECK(k2.eta == std::vector<Rational>{q(-3), q(-2)});
    CHECK(k2.nu_at(0, 1) == q(5));
    CHECK(k2.a == std::vector<Rational>{q(1, 1), q(-1, 1)});

    const auto k3 = coefficients(3);
    CHECK(k3.eta == std::vector<Rational>{q(-55, 9), q(-8), q(-4, 9)});
    CHECK(k3.nu_at(0, 1) == q(41, 3));
    CHECK(k3.nu_at(0, 2) == q(-22, 9));
    CHECK(k3.nu_at(1, 2) == q(10, 3));

    const auto k4 = coefficients(4);
    CHECK(k4.eta == std::vector<Rational>{q(-3655, 441), q(-128, 9), q(-16, 9), q(-8, 441)});
    CHECK(k4.nu_at(0, 1) == q(1325, 63));
    CHECK(k4.nu_at(0, 2) == q(-370, 63));
    CHECK(k4.nu_at(0, 3) == q(184, 441));
    CHECK(k4.nu_at(1, 2) == q(82, 9));
    CHECK(k4.nu_at(1, 3) == q(-44, 63));
    CHECK(k4.nu_at(2, 3) == q(20, 63));
}

TEST_CASE("c_m = 1/(2^m - 1) and the a_k,i sum to zero") {
    const auto top = coefficients(kMaxSchemeOrder);
    for (int m = 1; m <= kMaxSchemeOrder; ++m) CHECK(top.c[m - 1] == Rational(1) / (pow2r(m) - 1));
    for (int k = 2; k <= kMaxSchemeOrder; ++k) {
        Rational s(0);
        for (const auto& a : coefficients(k).a) s += a;
        CHECK(s == 0);
    }
    CHECK_THROWS_AS(coefficients(0), std::invalid_argument);
    CHECK_THROWS_AS(coefficients(kMaxSchemeOrder + 1), std::invalid_argument);
}

TEST_CASE("sum_i a_i/(2^i + l) has a single pole product") {
    // sum_i a_i / (2^i + l) * prod_j (2^j + l) does not depend on l.
    for (int k = 1; k <= 8; ++k) {
        const auto co = coefficients(k);
        std::vector<Rational> values;
        for (const Rational& lam : {q(0), q(1, 3), q(5, 2), q(17), q(-7, 5)}) {
            Rational s(0), prod(1);
            for (int i = 0; i < k; ++i) {
                s += co.a[i] / (pow2r(i) + lam);
                prod *= pow2r(i) + lam;
            }
            values.push_back(s * prod);
        }
        for (const auto& v : values) CHECK(v == values.front());
        CHECK(values.front() != 0);
    }
}

TEST_CASE("spectral identity of the eta/nu tables (exact)") {
    // Per unit spectral weight at mu = 1, the masked terms of the estimator give
    //   -(l+2)/(1+l)^2 + sum eta_i/(2^i+l)^2 + sum nu_ij/((2^i+l)(2^j+l))
    // and this must equal -(prod_j (2^j+l)^2 - 2^{k(k-1)}) / (l prod_j (2^j+l)^2).
    for (int k = 1; k <= 8; ++k) {
        const auto co = coefficients(k);
        for (const Rational& lam : {q(1, 7), q(1), q(3, 2), q(10), q(1000, 3)}) {
            Rational lhs = -(lam + 2) / ((1 + lam) * (1 + lam));
            Rational prod(1);
            for (int i = 0; i < k; ++i) {
                const Rational si = pow2r(i) + lam;
                prod *= si * si;
                lhs += co.eta[i] / (si * si);
                for (int j = i + 1; j < k; ++j) lhs += co.nu_at(i, j) / (si * (pow2r(j) + lam));
            }
            const Rational rhs = -(prod - pow2r(k * (k - 1))) / (lam * prod);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("eta/nu through quadratic-form updates") {
    // Q holds eta on the diagonal and nu/2 off it; each order adds
    // -2^{k(k-1)} E - 2^{k^2+1} D with E_ij = -(2^i+2^j)/2 a_i a_j, D = a a^T.
    std::vector<std::vector<Rational>> Q(1, std::vector<Rational>(1, Rational(0)));
    std::vector<Rational> a{Rational(1)};
    Rational c(1);
    for (int k = 1; k < 9; ++k) {
        std::vector<Rational> next(static_cast<std::size_t>(k + 1), Rational(0));
        for (int i = 0; i < k; ++i) {
            next[i] += c * a[i];
            next[i + 1] -= c * a[i] / pow2r(k - 1);
        }
        std::vector<std::vector<Rational>> Qn(static_cast<std::size_t>(k + 1),
                                              std::vector<Rational>(static_cast<std::size_t>(k + 1), Rational(0)));
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j) {
                const Rational base = (i < k && j < k) ? Q[i][j] : Rational(0);
                const Rational e = -(pow2r(i) + pow2r(j)) / 2 * next[i] * next[j];
                Qn[i][j] = base - pow2r(k * (k - 1)) * e - pow2r(k * k + 1) * next[i] * next[j];
            }
        Q = std::move(Qn);
        a = std::move(next);
        c = Rational(1) / (Rational(2) / c + 1);

        const auto co = coefficients(k + 1);
        for (int i = 0; i <= k; ++i) {
            CHECK(co.a[i] == a[i]);
            CHECK(co.eta[i] == Q[i][i]);
            for (int j = i + 1; j <= k; ++j) CHECK(co.nu_at(i, j) == 2 * Q[i][j]);
        }
    }
}

TEST_CASE("coefficient printing") {
    std::ostringstream os;
    print_coefficients(os, coefficients(2), true);
    CHECK(os.str() == "k = 2\nc[1] = 1\nc[2] = 1/3\na[0] = 1\na[1] = -1\neta[0] = -3\neta[1] = -2\nnu[0][1] = 5\n");
    std::ostringstream dec;
    print_coefficients(dec, coefficients(3), false);
    CHECK(dec.str().find("eta[0] = -6.111111111111111\n") != std::string::npos);
    CHECK(format_rational(q(-22, 9)) == "-22/9");
    CHECK(format_rational(q(12)) == "12");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-11) == "1e-11");
}

TEST_CASE("filters") {
    CHECK(Filter::parse("bump").kind() == Filter::Kind::SmoothBump);
    CHECK(Filter::parse("poly3").order() == 3);
    CHECK(Filter::parse("poly0").name() == "poly0");
    CHECK_THROWS_AS(Filter::parse("poly"), std::invalid_argument);
    CHECK_THROWS_AS(Filter::parse("poly2x"), std::invalid_argument);
    CHECK_THROWS_AS(Filter::parse("gauss"), std::invalid_argument);
    CHECK_THROWS_AS(Filter::polynomial(-1), std::invalid_argument);

    const Filter bump = Filter::smooth_bump();
    CHECK(bump.profile(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(bump.profile(1.0) == 0.0);
    CHECK(bump.profile(-1.5) == 0.0);
    CHECK(Filter::polynomial(2).profile(0.5) == doctest::Approx(0.5625));
}

TEST_CASE("masks") {
    const Geometry g = Geometry::centered_box(2, 21);
    const LatticeField flat = build_mask(Filter::polynomial(0), 4.0, g);
    int support = 0;
    double total = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        total += flat[s];
        const bool inside = std::abs(g.centered_coordinate(s, 0)) < 4 && std::abs(g.centered_coordinate(s, 1)) < 4;
        if (inside) {
            ++support;
            CHECK(flat[s] == doctest::Approx(1.0 / 49.0).epsilon(1e-14));
        } else {
            CHECK(flat[s] == 0.0);
        }
    }
    CHECK(support == 49);
    CHECK(std::abs(total - 1.0) < 1e-14);

    for (const Filter& f : {Filter::smooth_bump(), Filter::polynomial(3)}) {
        const LatticeField m = build_mask(f, 7.5, g);
        double sum = 0.0;
        for (std::size_t s = 0; s < g.size(); ++s) {
            CHECK(m[s] >= 0.0);
            sum += m[s];
            std::vector<int> c = g.coordinates(s);
            c[0] = g.extent(0) - 1 - c[0];
            CHECK(m[g.site_of(c)] == m[s]);
            c[1] = g.extent(1) - 1 - c[1];
            CHECK(m[g.site_of(c)] == m[s]);
        }
        CHECK(std::abs(sum - 1.0) < 1e-14);
        CHECK_NOTHROW(require_normalized_mask(m));
    }
    CHECK_NOTHROW(build_mask(Filter::smooth_bump(), 11.0, g));
    CHECK_THROWS_AS(build_mask(Filter::smooth_bump(), 11.5, g), std::invalid_argument);
    CHECK_THROWS_AS(build_mask(Filter::smooth_bump(), 0.0, g), std::invalid_argument);
    // L <= 1 keeps only the center.
    const LatticeField point = build_mask(Filter::smooth_bump(), 1.0, g);
    CHECK(point[g.site_of(std::vector<int>{10, 10})] == 1.0);
}

TEST_CASE("estimator on simple environments") {
    const Environment h = Environment::homogeneous(Geometry::centered_box(2, 15), 4.5);
    for (int k = 1; k <= 4; ++k) {
        const auto rep = estimate(h, 0.1, k, 7.0, Filter::smooth_bump(), Direction{{0.6, 0.8}});
        CHECK(rep.estimate == doctest::Approx(4.5).epsilon(1e-12));
        CHECK(rep.mask_sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(estimate(h, 0.1, 1, 16.0, Filter::smooth_bump(), Direction::unit(2, 0)), std::invalid_argument);
    CHECK_THROWS_AS(estimate(h, 0.0, 1, 4.0, Filter::smooth_bump(), Direction::unit(2, 0)), std::invalid_argument);
    CHECK_THROWS_AS(estimate(h, 0.1, 1, 4.0, Filter::smooth_bump(), Direction{{1.0, 1.0}}), std::invalid_argument);

    const Environment env = random_env({9, 9}, 5, 1.0, 10.0, Topology::Box);
    const auto k1 = estimate(env, 0.2, 1, 4.0, Filter::polynomial(2), Direction::unit(2, 0));
    CHECK(k1.eta_term == 0.0);
    CHECK(k1.nu_term == 0.0);
    CHECK(k1.estimate == k1.energy_term);
    CHECK(k1.iterations.size() == 1);
}

TEST_CASE("estimate is invariant under xi -> -xi") {
    const Environment env = random_env({12, 12}, 17);
    const Direction xi{{0.6, 0.8}};
    for (int k = 1; k <= 3; ++k) {
        const auto a = estimate(env, 0.05, k, 6.0, Filter::smooth_bump(), xi);
        const auto b = estimate(env, 0.05, k, 6.0, Filter::smooth_bump(), xi.negated());
        CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-13));
    }
}

TEST_CASE("physical estimator with the uniform mask equals the spectral formula") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (const std::vector<int>& ext : {std::vector<int>{3, 3}, std::vector<int>{4, 4}}) {
            const Environment env = random_env(ext, seed, 1.0, 10.0);
            const Direction xi = Direction::unit(2, 0);
            const SpectralMeasure m = spectral_measure(env, xi);
            const LatticeField uni = uniform_mask(env.geometry());
            for (double mu : {0.05, 0.3}) {
                for (int k = 1; k <= 6; ++k) {
                    const double phys = estimate_with_mask(env, mu, k, uni, xi).estimate;
                    const double spectral = a_mu_k_spectral(m, m.mean_energy, mu, k);
                    CHECK(std::abs(phys - spectral) <= 1e-9 * std::abs(spectral));
                }
            }
        }
    }
}

TEST_CASE("corrector combination: prod_j (2^j mu + L) sum_i a_i phi_i = C mu^{k-1} d") {
    const Environment env = random_env({6, 5}, 23, 1.0, 10.0, Topology::Box);
    const Direction xi = Direction::unit(2, 1);
    const double mu = 0.3;
    for (int k = 2; k <= 4; ++k) {
        const auto co = coefficients(k);
        Rational C(0), prod(1);
        for (int i = 0; i < k; ++i) {
            C += co.a[i] / pow2r(i);
            prod *= pow2r(i);
        }
        C *= prod;  // value of sum_i a_i/(2^i + l) prod_j (2^j + l) at l = 0
        const CorrectorSet set = solve_corrector_set(env, mu, k, xi);
        LatticeField v = dmuk_set(set, co);
        double shift = mu;
        for (int j = 0; j < k; ++j, shift *= 2.0) v = apply_operator(env, shift, v);
        const LatticeField d = local_drift(env, xi);
        const double scale = to_double(C) * std::pow(mu, k - 1);
        double err = 0.0;
        for (std::size_t s = 0; s < env.size(); ++s) err = std::max(err, std::abs(v[s] - scale * d[s]));
        CHECK(err <= 1e-8 * norm2(d) * std::abs(scale));
    }
}
