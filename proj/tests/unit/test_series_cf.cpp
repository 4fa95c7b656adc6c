#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ptband/operator_model.hpp"
#include "ptband/series_cf.hpp"

using namespace ptband;
using namespace ptband::series_cf;
using namespace std::complex_literals;

namespace {

struct Sample {
    cplx a, lambda;
};

// Random points with |a| < 2 and |lambda| <= 9.
std::vector<Sample> samples(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        const cplx a = std::polar(1.99 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
        const cplx l = std::polar(9.0 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
        out.push_back({a, l});
    }
    return out;
}

bool valid_path(const IndexPath& p) {
    int sum = 0;
    for (std::size_t s = 0; s < p.signs.size(); ++s) {
        if (std::abs(p.signs[s]) != 1) return false;
        sum += p.signs[s];
        if ((s + 1) % 2 == 0 && 3 + sum <= 1) return false;
    }
    return sum == 1 || sum == -1;
}

double rel(cplx x, cplx y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

}  // namespace

TEST_CASE("index paths") {
    CHECK(enumerate_paths(2).size() == 2);
    CHECK(enumerate_paths(3).size() == 5);
    // Exhaustive oracle: all sign tuples filtered by the prefix rule.
    for (int k = 4; k <= 7; ++k) {
        const int len = 2 * k - 3;
        std::size_t count = 0;
        for (int mask = 0; mask < (1 << len); ++mask) {
            IndexPath p;
            for (int s = 0; s < len; ++s) p.signs.push_back(mask >> s & 1 ? 1 : -1);
            if (valid_path(p)) ++count;
        }
        CHECK(enumerate_paths(k).size() == count);
    }
    for (const auto& p : enumerate_paths(6)) CHECK(valid_path(p));
    CHECK(enumerate_paths(3)[0].position(0) == 3);
    CHECK_THROWS_AS(enumerate_paths(1), DomainError);
    CHECK_THROWS_AS(enumerate_paths(13), DomainError);
}

TEST_CASE("A_1 by substitution") {
    const cplx a = std::sqrt(cplx(-2.0)), l = 2.0;
    CHECK(std::abs(A_k(a, l, 1).value - (-4.0 / 6664.0)) < 1e-16);
    CHECK(std::abs(A1_closed(-2.0, 2.0) - (-4.0 / 6664.0)) < 1e-16);
}

TEST_CASE("path sums, walk recursion and closed forms agree") {
    for (const auto& s : samples(20, 3)) {
        const cplx a2 = s.a * s.a;
        CHECK(rel(A_k(s.a, s.lambda, 2).value, A2_closed(a2, s.lambda)) < 1e-12);
        CHECK(rel(A_k(s.a, s.lambda, 3).value, A3_closed(a2, s.lambda)) < 1e-12);
        CHECK(rel(A_k(s.a, s.lambda, 4).value, A4_closed(a2, s.lambda)) < 1e-12);
        CHECK(rel(A4_closed(a2, s.lambda), C4_closed(a2, s.lambda) + D4_closed(a2, s.lambda) + E4_closed(a2, s.lambda)) < 1e-12);
        for (int k = 2; k <= 7; ++k) {
            const auto x = A_k(s.a, s.lambda, k), y = A_k_from_paths(s.a, s.lambda, k);
            CHECK(rel(x.value, y.value) < 1e-12);
            CHECK(rel(x.d1, y.d1) < 1e-12);
            CHECK(rel(x.d2, y.d2) < 1e-12);
        }
    }
}

TEST_CASE("pole guard names the pole") {
    try {
        A_k(0.5, 16.0, 2);
        FAIL("expected a singularity error");
    } catch (const SingularityError& e) {
        CHECK(e.pole() == 16.0);
    }
    CHECK_THROWS_AS(A_k(0.5, 36.0 + 1e-9, 3), SingularityError);
}

TEST_CASE("per-term bound for k >= 2") {
    for (const auto& s : samples(200, 5))
        for (int k = 2; k <= 10; ++k) CHECK(std::abs(A_k(s.a, s.lambda, k).value) <= term_bound(k));
}

TEST_CASE("the k = 1 term can exceed the uniform per-term bound") {
    // |A_1| peaks at |a| -> 2, lambda = 9: 16 / (49 * 27), twice the uniform constant.
    const double peak = std::abs(A_k(cplx(0.0, 1.999999), 9.0, 1).value);
    CHECK(peak > term_bound(1));
    CHECK(peak == doctest::Approx(16.0 / (49.0 * 27.0)).epsilon(1e-5));
}

TEST_CASE("characteristic function at a = 0") {
    CHECK(std::abs(characteristic_N(0.0, 0.0).N_val) < 1e-15);
    CHECK(std::abs(characteristic_N(0.0, 4.0).N_val) < 1e-13);
    CHECK(std::abs(characteristic_N(0.0, 3.0).N_val - (9.0 - 12.0)) < 1e-13);
}

TEST_CASE("N' and N'' match central differences") {
    for (const auto& s : samples(50, 9)) {
        const cplx l = s.lambda * 0.999;  // keep lambda +- h inside the disc
        const double h = 1e-6;
        const auto e = characteristic_N(s.a, l);
        const auto p = characteristic_N(s.a, l + h), m = characteristic_N(s.a, l - h);
        CHECK(rel(e.N_d1, (p.N_val - m.N_val) / (2 * h)) < 1e-6);
        CHECK(rel(e.N_d2, (p.N_d1 - m.N_d1) / (2 * h)) < 1e-6);
    }
}

TEST_CASE("tail bound shrinks at least geometrically with ratio 16/189") {
    const cplx a = 1.5i, l(3.0, 2.0);
    for (int m = 1; m < 10; ++m) {
        const double t0 = characteristic_N_truncated(a, l, m).tail_bound, t1 = characteristic_N_truncated(a, l, m + 1).tail_bound;
        CHECK(t1 <= t0 * 16.0 / 189.0 * (1 + 1e-12));
    }
    const auto e = characteristic_N(a, l);
    CHECK(e.tail_bound <= 1e-14);
    CHECK(e.m_used >= 1);
    CHECK_THROWS_AS(characteristic_N(2.0i, 1.0), DomainError);
    CHECK_THROWS_AS(characteristic_N(1.0i, 9.5), DomainError);
}

TEST_CASE("remainder bound") {
    CHECK(remainder_bound(1) == doctest::Approx(64.0 / 1323.0).epsilon(1e-15));
    CHECK(remainder_bound(2) == doctest::Approx(4.0 / 7.0 * std::pow(16.0 / 189.0, 2)).epsilon(1e-15));
    for (int m = 1; m < 12; ++m) CHECK(remainder_bound(m + 1) / remainder_bound(m) == doctest::Approx(16.0 / 189.0).epsilon(1e-14));
    CHECK_THROWS_AS(remainder_bound(0), DomainError);
}

TEST_CASE("conjugation for real a^2") {
    for (const cplx a : {cplx(0.0, 1.3), cplx(1.1, 0.0)})
        for (const cplx l : {cplx(2.0, 1.0), cplx(-4.0, 3.5)}) {
            const cplx x = characteristic_N(a, l).N_val, y = characteristic_N(a, std::conj(l)).N_val;
            CHECK(std::abs(y - std::conj(x)) < 1e-12 * (1.0 + std::abs(x)));
        }
}

TEST_CASE("P expands (l-16)^3 (l-36)^2 (l-64) Q") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-70.0, 70.0);
    for (double a2 : {0.0, -2.15728123, 1.7}) {
        const auto P = build_P(a2);
        CHECK(P.coeffs[8] == cplx(1.0));
        for (int i = 0; i < 20; ++i) {
            const cplx l(u(rng), u(rng));
            const cplx direct = std::pow(l - 16.0, 3) * std::pow(l - 36.0, 2) * (l - 64.0) * Q(a2, l);
            CHECK(rel(P(l), direct) < 1e-10);
        }
    }
    const auto P0 = build_P(0.0);
    for (const cplx l : {cplx(1.0), cplx(5.0, 1.0)})
        CHECK(rel(P0(l), l * (l - 4.0) * std::pow(l - 16.0, 3) * std::pow(l - 36.0, 2) * (l - 64.0)) < 1e-12);
    const auto& c = p_symbolic_coefficients();
    CHECK(c[8][0] == 1);
    CHECK(c[0][0] == 0);
}

TEST_CASE("roots of P") {
    const auto r0 = roots_P(0.0);
    const double expect[] = {0, 4, 16, 16, 16, 36, 36, 64};
    REQUIRE(r0.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(r0[i] - expect[i]) < 1e-4);  // triple root at 16

    auto has = [](const std::vector<cplx>& r, cplx z) {
        return std::any_of(r.begin(), r.end(), [&](cplx x) { return std::abs(x - z) < 5e-7; });
    };
    const auto r1 = roots_P(-2.15728123);
    for (const cplx z : {cplx(2.088438808), cplx(2.088959036), cplx(15.85581654), cplx(63.99999991),
                         cplx(15.98321016, 0.11878598), cplx(15.98321016, -0.11878598), cplx(36.00018270, 0.00333046),
                         cplx(36.00018270, -0.00333046)})
        CHECK_MESSAGE(has(r1, z), z);
    const auto r2 = roots_P(-2.157281295);
    CHECK(has(r2, cplx(2.088698925, 0.000232839)));
    CHECK(has(r2, cplx(2.088698925, -0.000232839)));
}

TEST_CASE("Q stays away from zero on the first two circles") {
    const auto g = gamma_circles();
    double low = 1e300;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 360; ++i) {
            const cplx l = g[c].center + std::polar(g[c].radius, 2 * M_PI * i / 360);
            low = std::min(low, std::abs(Q(-2.15728123, l)));
        }
    CHECK(low > 5e-8);
}

TEST_CASE("sharp tail bound on the circles") {
    const auto g = gamma_circles();
    CHECK(g[0].radius == 0.00023);
    double worst = 0.0;
    for (const auto& c : g)
        for (int i = 0; i < 90; ++i)
            for (double a2 : {-2.1561, -2.15728123, -2.1579}) {
                const cplx l = c.center + std::polar(c.radius, 2 * M_PI * i / 90);
                const double b = tail_bound_sharp(a2, l);
                worst = std::max(worst, b);
                // The bound dominates the actual tail it certifies.
                const cplx a = std::sqrt(cplx(a2));
                cplx tail = 0.0;
                for (int k = 3; k <= 12; ++k) tail += l * A_k(a, l, k).value;
                CHECK(std::abs(tail) <= b);
            }
    CHECK(worst < 4.7357e-8);
    CHECK_THROWS_AS(tail_bound_sharp(-2.0, 2.0885), DomainError);
    CHECK_THROWS_AS(tail_bound_sharp(-2.157, 5.0), DomainError);
}

TEST_CASE("uniform component bounds") {
    const auto u = uniform_tail_bounds();
    CHECK(u.geometric_tail < 4.101e-11);
    CHECK(u.a3 < 2.2707e-8);
}

TEST_CASE("derivative sums stay below their stated limits") {
    double s1 = 0.0, s2 = 0.0;
    for (double r : {0.5, 1.5, 1.999})
        for (int i = 0; i < 24; ++i)
            for (double lr : {0.0, 4.5, 9.0}) {
                const cplx a = std::polar(r, 2 * M_PI * i / 24);
                for (int j = 0; j < 8; ++j) {
                    const cplx l = std::polar(lr, 2 * M_PI * j / 8);
                    double d1 = 0.0, d2 = 0.0;
                    for (int k = 1; k <= 12; ++k) {
                        const auto t = A_k(a, l, k);
                        d1 += std::abs(t.d1);
                        d2 += std::abs(t.d2);
                    }
                    s1 = std::max(s1, d1);
                    s2 = std::max(s2, d2);
                }
            }
    CHECK(s1 < 1.0 / 200.0);
    CHECK(s2 < 1.0 / 300.0);
}

TEST_CASE("the two PN roots inside |lambda| < 9") {
    SUBCASE("small coupling") {
        const cplx a = 0.1i, a2 = a * a;
        const auto [l0, l2] = pn_roots_in_D9(a);
        CHECK(std::abs(l0 - (-a2 / 2.0)) < std::pow(0.1, 3));
        CHECK(std::abs(l2 - (4.0 + 5.0 / 12.0 * a2)) < std::pow(0.1, 3));
    }
    SUBCASE("inside the first two circles") {
        const auto g = gamma_circles();
        const auto [l0, l2] = pn_roots_in_D9(cplx(0.0, std::sqrt(2.15728123)));
        CHECK(std::abs(l0 - g[0].center) < g[0].radius);
        CHECK(std::abs(l2 - g[1].center) < g[1].radius);
    }
    SUBCASE("against the PN matrix") {
        const cplx a = 1.2i;
        const auto [l0, l2] = pn_roots_in_D9(a);
        const auto pn = operator_model::class_eigenvalues(operator_model::SymmetryClass::PN, a, 32, 40.0);
        CHECK(std::abs(l0 - pn[0].value) < 1e-7);
        CHECK(std::abs(l2 - pn[1].value) < 1e-7);
    }
    CHECK_THROWS_AS(pn_roots_in_D9(0.5), DomainError);
    CHECK_THROWS_AS(pn_roots_in_D9(2.0i), DomainError);
}
