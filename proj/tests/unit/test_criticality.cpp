#include <doctest.h>

#include <cmath>

#include "ptband/criticality.hpp"
#include "ptband/operator_model.hpp"

using namespace ptband;
using namespace ptband::criticality;

namespace {
double V_of_c(double c) { return 0.5 * std::sqrt(1.0 + c * c); }
}  // namespace

TEST_CASE("gap indicator") {
    CHECK(gap_indicator(cplx(0.0, 0.1)).delta_sq > 0.0);
    CHECK(gap_indicator(cplx(0.0, 1.5)).delta_sq < 0.0);
    // small coupling: lambda_2- - lambda_0 ~ 4 + 11 a^2 / 12
    const double c = 0.05;
    CHECK(std::sqrt(gap_indicator(cplx(0.0, c)).delta_sq) == doctest::Approx(4.0 - 11.0 / 12.0 * c * c).epsilon(1e-6));
    CHECK_THROWS_AS(gap_indicator(0.5), DomainError);
    CHECK_THROWS_AS(gap_indicator(cplx(0.0, 2.0)), DomainError);
}

TEST_CASE("V_2 from the series indicator") {
    const auto cp = find_V2();
    CHECK(cp.k == 2);
    CHECK(cp.bracket_hi - cp.bracket_lo <= 1e-12);
    CHECK(cp.bracket_lo <= cp.V_k);
    CHECK(cp.V_k <= cp.bracket_hi);
    CHECK(cp.V_k == doctest::Approx(0.8884370040752).epsilon(1e-12));
    CHECK(-cp.r_hi * cp.r_hi > -2.157281295);
    CHECK(-cp.r_lo * cp.r_lo < -2.15728123);
    CHECK(cp.pair_lo == "0");
    CHECK(cp.pair_hi == "2-");
    REQUIRE(cp.check);
    CHECK(cp.check->passed);
    CHECK_THROWS_AS(find_V2(1e-13), DomainError);
}

TEST_CASE("the indicator changes sign once on (0.04, 1.9)") {
    int changes = 0;
    double prev = gap_indicator(cplx(0.0, 0.04)).delta_sq;
    for (int i = 1; i <= 50; ++i) {
        const double c = 0.04 + (1.9 - 0.04) * i / 50;
        const double g = gap_indicator(cplx(0.0, c)).delta_sq;
        if ((g > 0) != (prev > 0)) ++changes;
        prev = g;
    }
    CHECK(changes == 1);
}

TEST_CASE("V_k from the matrix route") {
    const auto v1 = find_Vk(1);
    CHECK(v1.V_k == 0.5);
    CHECK(v1.pair_lo == "1-");

    // Independent of the series: the matrix collision must land on the same V_2.
    const auto v2 = find_Vk(2);
    CHECK(std::abs(v2.V_k - find_V2().V_k) < 1e-8);
    CHECK(v2.pair_hi == "2-");

    const auto v3 = find_Vk(3);
    CHECK(v3.V_k == doctest::Approx(3.50037).epsilon(1e-5));
    CHECK(v3.pair_lo == "2+");
    CHECK(v3.pair_hi == "4-");
    REQUIRE(v3.check);
    CHECK(v3.check->passed);
    CHECK(V_of_c(v3.r_lo) == doctest::Approx(v3.bracket_lo));

    SearchOptions small;
    small.V_max = 2.0;
    CHECK_THROWS_AS(find_Vk(3, 1e-12, small), NotFoundError);
    CHECK_THROWS_AS(find_Vk(7), DomainError);
    CHECK_THROWS_AS(find_Vk(0), DomainError);
    small.V_max = 0.4;
    CHECK_THROWS_AS(find_Vk(3, 1e-12, small), ConfigError);
}

TEST_CASE("phase classification") {
    CHECK(classify_phase(0.7) == Phase::Case1);
    CHECK(classify_phase(1.0) == Phase::Case3);
    CHECK(classify_phase(cached_V2().V_k) == Phase::Case2);
    CHECK(std::string(to_string(Phase::Case2)) == "Case2");
    CHECK_THROWS_AS(classify_phase(0.5), DomainError);
    CHECK_THROWS_AS(classify_phase(1.2), DomainError);
}

TEST_CASE("reality ladder between critical strengths") {
    // Between V_k and V_{k+1} the periodic eigenvalues from the (k, k+1) collision on are real,
    // the colliding lower ones form conjugate pairs.
    auto nonreal_periodic = [](double V) {
        int n = 0;
        for (const auto& e : operator_model::periodic_eigenvalues(operator_model::a_from_V(V), 48))
            if (e.level <= 10 && std::abs(e.value.imag()) > 1e-8 * (1 + std::abs(e.value))) ++n;
        return n;
    };
    CHECK(nonreal_periodic(0.7) == 0);
    CHECK(nonreal_periodic(1.0) == 2);
    CHECK(nonreal_periodic(4.0) == 4);

    for (double V : {0.7, 1.0}) {
        const auto ap = operator_model::antiperiodic_eigenvalues(operator_model::a_from_V(V), 48);
        CHECK(std::abs(ap[0].value.imag()) > 1e-3);
        CHECK(std::abs(ap[0].value - std::conj(ap[1].value)) < 1e-9);
    }
}

TEST_CASE("collision checks hold along the found points") {
    for (int k = 2; k <= 4; ++k) {
        const auto cp = find_Vk(k, 1e-10);
        REQUIRE(cp.check);
        CHECK(cp.check->passed);
        CHECK(std::abs(cp.check->F_prime) < 1e-6);
        CHECK(std::abs(cp.check->F.real() - 2.0) < 1e-6);  // periodic collision: F = +2
    }
}
