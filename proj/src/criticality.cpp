#include "ptband/criticality.hpp"

#include <cmath>
#include <sstream>

#include "ptband/discriminant.hpp"
#include "ptband/operator_model.hpp"
#include "ptband/series_cf.hpp"

namespace ptband::criticality {

using operator_model::SymmetryClass;

const char* to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Case1: return "Case1";
        case Phase::Case2: return "Case2";
        case Phase::Case3: return "Case3";
    }
    return "?";
}

namespace {

double V_of_c(double c) { return 0.5 * std::sqrt(1.0 + c * c); }

bool in_I2(cplx a) { return std::abs(a.real()) <= 1e-14 * std::abs(a) && a.imag() > 0.0 && a.imag() < 2.0; }

CollisionCheck check_collision(double r, cplx lambda) {
    const auto d = discriminant::hill_discriminant(cplx(0.0, r), lambda);
    CollisionCheck c{lambda, d.F, d.F_prime, false};
    c.passed = std::abs(d.F_prime) < 1e-6 && std::abs(std::abs(d.F) - 2.0) < 1e-6;
    return c;
}

}  // namespace

GapIndicator gap_indicator(cplx a) {
    if (!in_I2(a)) throw DomainError("gap_indicator requires a = ic with 0 < c < 2");
    const auto [l0, l2] = series_cf::pn_roots_in_D9(a);
    const cplx d2 = (l0 - l2) * (l0 - l2);
    if (std::abs(d2.imag()) >= 1e-8) {
        std::ostringstream os;
        os << "(lambda_0 - lambda_2-)^2 = " << d2 << " is not real at a=" << a;
        throw ModelViolation(os.str());
    }
    return {a, d2.real()};
}

CriticalPoint find_V2(double tol_V) {
    if (!(tol_V >= 1e-12)) throw DomainError("tol_V must be at least 1e-12");
    auto sign_at = [](double c) { return gap_indicator(cplx(0.0, c)).delta_sq; };
    double lo = 0.05, hi = 1.9;
    if (!(sign_at(lo) > 0.0) || !(sign_at(hi) < 0.0))
        throw NotFoundError("no sign change of (lambda_0 - lambda_2-)^2 on (0, 2)", 0.0, 2.0);
    for (int it = 0; it < 200 && V_of_c(hi) - V_of_c(lo) > tol_V; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (sign_at(mid) > 0.0 ? lo : hi) = mid;
    }
    CriticalPoint cp;
    cp.k = 2;
    cp.r_lo = lo;
    cp.r_hi = hi;
    cp.r = 0.5 * (lo + hi);
    cp.V_k = V_of_c(cp.r);
    cp.bracket_lo = V_of_c(lo);
    cp.bracket_hi = V_of_c(hi);
    cp.pair_lo = "0";
    cp.pair_hi = "2-";
    const auto [l0, l2] = series_cf::pn_roots_in_D9(cplx(0.0, cp.r));
    cp.check = check_collision(cp.r, 0.5 * (l0 + l2));
    return cp;
}

cplx matrix_gap_sq(int k, double c, int trunc_N) {
    if (k < 2) throw DomainError("matrix_gap_sq requires k >= 2");
    const SymmetryClass cls = k % 2 == 0 ? SymmetryClass::PN : SymmetryClass::PD;
    const int j = 2 * ((k - 2) / 2);
    const auto vals = operator_model::class_eigenvalues(cls, cplx(0.0, c), trunc_N,
                                                        operator_model::max_region_bound(cls, trunc_N));
    if (int(vals.size()) < j + 2) throw TruncationError("truncation too small for the requested critical index");
    const cplx d = vals[j + 1].value - vals[j].value;
    return d * d;
}

namespace {

std::string periodic_label(int level, char branch) {
    std::string s = std::to_string(level);
    if (level != 0) s += branch;
    return s;
}

}  // namespace

CriticalPoint find_Vk(int k, double tol_V, const SearchOptions& opts) {
    if (k < 1 || k > 6) throw DomainError("find_Vk supports 1 <= k <= 6");
    if (!(tol_V >= 1e-12)) throw DomainError("tol_V must be at least 1e-12");
    if (!(opts.V_max > 0.5)) throw ConfigError("V_max must exceed 1/2");
    if (opts.scan_points < 10) throw ConfigError("scan_points must be at least 10");
    CriticalPoint cp;
    cp.k = k;
    if (k == 1) {
        cp.V_k = cp.bracket_lo = cp.bracket_hi = 0.5;
        cp.pair_lo = "1-";
        cp.pair_hi = "1+";
        return cp;
    }
    auto gap = [&](double c) {
        const cplx g = matrix_gap_sq(k, c, opts.trunc_N);
        if (std::abs(g.imag()) > 1e-6 * std::max(1.0, std::abs(g))) {
            std::ostringstream os;
            os << "squared gap " << g << " is not real at a=i" << c;
            throw ModelViolation(os.str());
        }
        return g.real();
    };
    const double c_max = std::sqrt(4.0 * opts.V_max * opts.V_max - 1.0);
    double lo = -1.0, hi = -1.0;
    double prev_c = c_max / opts.scan_points;
    bool prev_pos = gap(prev_c) > 0.0;
    for (int i = 2; i <= opts.scan_points; ++i) {
        const double c = c_max * i / opts.scan_points;
        const bool pos = gap(c) > 0.0;
        if (prev_pos && !pos) {
            lo = prev_c;
            hi = c;
            break;
        }
        prev_c = c;
        prev_pos = pos;
    }
    if (lo < 0.0) {
        std::ostringstream os;
        os << "no collision for k=" << k << " with V in (1/2, " << opts.V_max << ")";
        throw NotFoundError(os.str(), 0.5, opts.V_max);
    }
    for (int it = 0; it < 200 && V_of_c(hi) - V_of_c(lo) > tol_V; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    cp.r_lo = lo;
    cp.r_hi = hi;
    cp.r = 0.5 * (lo + hi);
    cp.V_k = V_of_c(cp.r);
    cp.bracket_lo = V_of_c(lo);
    cp.bracket_hi = V_of_c(hi);
    cp.pair_lo = periodic_label(2 * k - 4, '+');
    cp.pair_hi = periodic_label(2 * k - 2, '-');

    const SymmetryClass cls = k % 2 == 0 ? SymmetryClass::PN : SymmetryClass::PD;
    const int j = 2 * ((k - 2) / 2);
    const auto vals = operator_model::class_eigenvalues(cls, cplx(0.0, cp.r), opts.trunc_N,
                                                        operator_model::max_region_bound(cls, opts.trunc_N));
    cp.check = check_collision(cp.r, 0.5 * (vals[j].value + vals[j + 1].value));
    return cp;
}

const CriticalPoint& cached_V2() {
    static const CriticalPoint cp = find_V2(1e-12);
    return cp;
}

Phase classify_phase(double V) {
    if (!(V > 0.5 && V < 0.5 * std::sqrt(5.0))) throw DomainError("classify_phase requires 1/2 < V < sqrt(5)/2");
    const CriticalPoint& cp = cached_V2();
    if (V < cp.bracket_lo) return Phase::Case1;
    if (V > cp.bracket_hi) return Phase::Case3;
    return Phase::Case2;
}

}  // namespace ptband::criticality
