#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ptband/discriminant.hpp"
#include "ptband/operator_model.hpp"

using namespace ptband;
using namespace ptband::discriminant;
using namespace std::complex_literals;

namespace {

// Free case: F = 2 cos(pi sqrt(lambda)), valid on every branch of the root.
cplx free_F(cplx lambda) { return 2.0 * std::cos(M_PI * std::sqrt(lambda)); }

std::vector<cplx> matrix_values(cplx a, double t, double bound) {
    const auto list = t == 0.0 ? operator_model::periodic_eigenvalues(a) : operator_model::antiperiodic_eigenvalues(a);
    std::vector<cplx> out;
    for (const auto& e : list)
        if (std::abs(e.value) < bound) out.push_back(e.value);
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) { return operator_model::label_less(x, y); });
    return out;
}

}  // namespace

TEST_CASE("monodromy of the free equation") {
    auto m = monodromy(0.0, 4.0);
    CHECK(std::abs(m.theta_pi - 1.0) < 1e-10);
    CHECK(std::abs(m.phi_prime_pi - 1.0) < 1e-10);
    CHECK(std::abs(m.F() - 2.0) < 1e-10);
    CHECK(std::abs(monodromy(0.0, 1.0).F() + 2.0) < 1e-10);
    m = monodromy(0.0, 0.0);
    CHECK(std::abs(m.theta_pi - 1.0) < 1e-10);
    CHECK(std::abs(m.phi_pi - M_PI) < 1e-10);
    CHECK(std::abs(m.F() - 2.0) < 1e-10);
}

TEST_CASE("discriminant matches the free closed form") {
    for (double l : {0.3, 2.5, 7.0, 30.0, 123.4}) CHECK(std::abs(hill_discriminant(0.0, l).F - free_F(l)) < 1e-9);
    const cplx l(3.0, 0.7);
    CHECK(std::abs(hill_discriminant(0.0, l).F - free_F(l)) < 1e-9);
}

TEST_CASE("matrix eigenvalue satisfies F = 2") {
    const auto p = operator_model::periodic_eigenvalues(1.0);
    CHECK(std::abs(hill_discriminant(1.0, p[0].value).F - 2.0) <= 1e-8);
}

TEST_CASE("derivatives agree with finite differences") {
    const cplx a = 0.8i;
    for (const cplx l : {cplx(1.3, 0.0), cplx(5.0, 0.4), cplx(20.0, -1.0)}) {
        const double h = 1e-5;
        const auto j = discriminant_jet(a, l);
        const cplx fp = hill_discriminant(a, l + h).F, fm = hill_discriminant(a, l - h).F;
        CHECK(std::abs(j.dF - (fp - fm) / (2 * h)) < 1e-6 * (1.0 + std::abs(j.dF)));
        const cplx gp = hill_discriminant(a, l + h).F_prime, gm = hill_discriminant(a, l - h).F_prime;
        CHECK(std::abs(j.d2F - (gp - gm) / (2 * h)) < 1e-6 * (1.0 + std::abs(j.d2F)));
        CHECK(std::abs(hill_discriminant(a, l).F_prime - j.dF) < 1e-12 * (1.0 + std::abs(j.dF)));
    }
}

TEST_CASE("Wronskian stays at 1 on random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-2.0, 2.0), ul(-100.0, 100.0);
    const double tol = kDefaultTol;
    int tested = 0;
    while (tested < 1000) {
        const cplx a(ua(rng), ua(rng)), l(ul(rng), ul(rng));
        if (std::abs(a) > 2.0 || std::abs(l) > 100.0) continue;
        const auto m = monodromy(a, l, tol);
        const double scale = std::max({1.0, std::abs(m.theta_pi * m.phi_prime_pi), std::abs(m.theta_prime_pi * m.phi_pi)});
        CHECK(std::abs(m.wronskian() - 1.0) <= 100.0 * tol * scale);
        ++tested;
    }
}

TEST_CASE("PT symmetry: F is real on the real axis and conjugation-covariant") {
    for (double c : {0.5, 1.2, 1.9}) {
        const cplx a(0.0, c);
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const double l = -5.0 + 55.0 * i / 499.0;
            const cplx F = hill_discriminant(a, l).F;
            worst = std::max(worst, std::abs(F.imag()));
            // Antiperiodic eigenvalues are nonreal, so F never reaches -2 on the axis.
            CHECK(F.real() > -2.0);
        }
        CHECK(worst < 1e-9);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-20.0, 20.0);
        for (int i = 0; i < 20; ++i) {
            const cplx l(u(rng), u(rng) / 4);
            const cplx F1 = hill_discriminant(a, l).F, F2 = hill_discriminant(a, std::conj(l)).F;
            CHECK(std::abs(F2 - std::conj(F1)) < 1e-9 * (1.0 + std::abs(F1)));
        }
    }
}

TEST_CASE("Bloch roots of the free problem") {
    const auto r = bloch_roots_detailed(0.0, 0.0, {-5.0, 40.0, -5.0, 5.0});
    CHECK(r.winding == 7);
    const auto roots = bloch_roots(0.0, 0.0, {-5.0, 40.0, -5.0, 5.0});
    const double expect[] = {0, 4, 4, 16, 16, 36, 36};
    REQUIRE(roots.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(std::abs(roots[i] - expect[i]) < 1e-6);
}

TEST_CASE("Bloch roots near lambda = 1 at small imaginary a") {
    const cplx a = 0.01i;
    const auto roots = bloch_roots(a, M_PI, Region::around(1.0, 1.5));
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - (1.0 - a)) < 2e-4);
    CHECK(std::abs(roots[1] - (1.0 + a)) < 2e-4);
}

TEST_CASE("discriminant roots agree with the matrix eigenvalues") {
    for (const cplx a : {cplx(0.5, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.5), cplx(0.0, 1.5)})
        for (double t : {0.0, M_PI}) {
            const Region box{-10.0, 39.5, -4.0, 4.0};
            const auto roots = bloch_roots(a, t, box);
            auto expect = matrix_values(a, t, 1e9);
            expect.erase(std::remove_if(expect.begin(), expect.end(), [&](cplx z) { return !box.contains(z); }), expect.end());
            REQUIRE_MESSAGE(roots.size() == expect.size(), "a=" << a << " t=" << t);
            for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - expect[i]) < 1e-8);
        }
}

TEST_CASE("interior quasimomentum: roots agree with the Floquet matrix") {
    const cplx a = 0.8i;
    for (double t : {0.7, 2.0}) {
        const Region box{-5.0, 30.0, -3.0, 3.0};
        const auto roots = bloch_roots(a, t, box);
        std::vector<cplx> q;
        for (cplx z : operator_model::quasiperiodic_eigenvalues(a, t))
            if (box.contains(z)) q.push_back(z);
        REQUIRE(roots.size() == q.size());
        for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - q[i]) < 1e-8);
    }
}

TEST_CASE("real spectrum membership") {
    const cplx a = 0.98i;  // V = 0.7, Case1
    const auto p = operator_model::periodic_eigenvalues(a);
    CHECK(real_spectrum_membership(a, 0.5 * (p[0].value.real() + p[1].value.real())));
    CHECK_FALSE(real_spectrum_membership(a, 0.5 * (p[1].value.real() + p[2].value.real())));
    CHECK_FALSE(real_spectrum_membership(a, p[0].value.real() - 2.0));
    CHECK(hill_discriminant(a, p[0].value.real() - 2.0).F.real() > 2.0);
}

TEST_CASE("double roots and helpers") {
    // At a = 0, lambda = 4 is a double root of F = 2 with F' = 0.
    const auto pr = resolve_pair(0.0, 2.0, cplx(4.01, 0.0));
    REQUIRE(pr.has_value());
    CHECK(std::abs(pr->first - 4.0) < 1e-6);
    CHECK(std::abs(pr->second - 4.0) < 1e-6);
    const auto r = newton_polish(0.0, 2.0 * std::cos(0.5), cplx(0.03, 0.0));
    REQUIRE(r.has_value());
    CHECK(std::abs(*r - std::pow(0.5 / M_PI, 2)) < 1e-10);
    CHECK(winding_number([](cplx z) { return z - cplx(0.3, 0.1); }, {-1.0, 1.0, -1.0, 1.0}) == 1);
    CHECK(winding_number([](cplx z) { return (z - 0.5) * (z + 0.5); }, {-1.0, 1.0, -1.0, 1.0}) == 2);
    CHECK(winding_number([](cplx z) { return z - 5.0; }, {-1.0, 1.0, -1.0, 1.0}) == 0);
}

TEST_CASE("tolerance guard") {
    CHECK_THROWS_AS(monodromy(0.5, 1.0, 1e-3), DomainError);
    CHECK_THROWS_AS(monodromy(0.5, 1.0, 0.0), DomainError);
}
