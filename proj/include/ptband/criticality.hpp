#pragma once

#include <optional>
#include <string>

#include "ptband/errors.hpp"

/// Degeneration points: couplings a = ir at which two neighbouring periodic
/// eigenvalues collide, and the critical strengths V_k = sqrt(1 + r^2)/2.
namespace ptband::criticality {

struct GapIndicator {
    cplx a;
    double delta_sq = 0.0;  ///< (lambda_0 - lambda_2-)^2, real for a in I(2)
};

/// Verification of a collision through the discriminant: F'(lambda) ~ 0.
struct CollisionCheck {
    cplx lambda;
    cplx F, F_prime;
    bool passed = false;
};

struct CriticalPoint {
    int k = 0;
    double r = 0.0;  ///< a = i r at the collision (0 for k = 1)
    double V_k = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;  ///< certified V-interval
    double r_lo = 0.0, r_hi = 0.0;              ///< bisection interval in r
    std::string pair_lo, pair_hi;               ///< labels of the collided pair
    std::optional<CollisionCheck> check;
};

enum class Phase { Case1, Case2, Case3 };
const char* to_string(Phase p) noexcept;

/// Squared gap of the first two PN eigenvalues from the series. Requires a in I(2).
GapIndicator gap_indicator(cplx a);

/// Bisection on c = a/i over (0, 2) with the series indicator.
CriticalPoint find_V2(double tol_V = 1e-12);

struct SearchOptions {
    double V_max = 30.0;
    int trunc_N = 48;
    int scan_points = 400;
};

/// Squared gap of the class pair colliding at V_k, from the truncated matrix.
cplx matrix_gap_sq(int k, double c, int trunc_N = 48);

/// k-th critical point; k = 1 is exactly 1/2, k >= 2 via the matrix route.
CriticalPoint find_Vk(int k, double tol_V = 1e-12, const SearchOptions& opts = {});

/// Case1 below the V_2 bracket, Case2 inside it, Case3 above. Requires V in (1/2, sqrt(5)/2).
Phase classify_phase(double V);

/// The V_2 result used by classify_phase, computed once per process.
const CriticalPoint& cached_V2();

}  // namespace ptband::criticality
