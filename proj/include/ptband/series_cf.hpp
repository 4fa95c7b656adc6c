#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ptband/errors.hpp"

/// Iterated characteristic series for the first two PN eigenvalues:
///   N(a, l) = l^2 - 4l - 2a^2 - a^2 l/(l-16) - sum_k l A_k(a, l),
/// its derivatives, the second polynomial approximation P, and the
/// remainder and tail bounds valid for |a| < 2, |l| <= 9.
namespace ptband::series_cf {

/// Signs n_1..n_{2k-3} of one summand of A_k (k >= 2).
struct IndexPath {
    std::vector<int> signs;

    /// Position p_s = 3 + n_1 + ... + n_s, with p_0 = 3.
    int position(int s) const;
};

/// Value and first two lambda-derivatives.
struct SeriesTerm {
    int k = 0;
    cplx value, d1, d2;
};

struct CharacteristicEval {
    cplx a, lambda;
    cplx N_val, N_d1, N_d2;
    int m_used = 0;
    double tail_bound = 0.0;  ///< bound on |sum_{k>m} l A_k|
};

/// Degree-8 polynomial P(a^2, l) = (l-16)^3 (l-36)^2 (l-64) Q(a^2, l).
struct ApproxPolynomial {
    double a_squared = 0.0;
    std::array<cplx, 9> coeffs{};  ///< coeffs[j] multiplies l^j

    cplx operator()(cplx lambda) const;
};

struct Circle {
    cplx center;
    double radius;
};

inline constexpr int kMaxPathOrder = 12;

/// Sign sequences of length 2k-3 with total +-1 and every even prefix giving
/// a position above 1. Cached per k; safe for concurrent readers.
const std::vector<IndexPath>& enumerate_paths(int k);

/// A_k with derivatives from the walk recursion over positions (fast route).
SeriesTerm A_k(cplx a, cplx lambda, int k);

/// A_k with derivatives summed term by term over enumerate_paths(k), each
/// product differentiated logarithmically.
SeriesTerm A_k_from_paths(cplx a, cplx lambda, int k);

/// Hand-expanded closed forms used as oracles and in the uniform bounds.
cplx A1_closed(cplx a2, cplx lambda);
cplx A2_closed(cplx a2, cplx lambda);
cplx A3_closed(cplx a2, cplx lambda);
cplx C4_closed(cplx a2, cplx lambda);
cplx D4_closed(cplx a2, cplx lambda);
cplx E4_closed(cplx a2, cplx lambda);
/// A_4 = C_4 + D_4 + E_4.
cplx A4_closed(cplx a2, cplx lambda);

/// N, N', N'' summed until the tail bound of N and both derivatives is at or
/// below target_tail. Requires |a| < 2, |l| <= 9.
CharacteristicEval characteristic_N(cplx a, cplx lambda, double target_tail = 1e-14);

/// N, N', N'' with exactly m series terms (the m-th approximation).
CharacteristicEval characteristic_N_truncated(cplx a, cplx lambda, int m);

/// Geometric bounds on sum_{k>m} |A_k|, |A_k'|, |A_k''| at a given point.
struct TailBounds {
    double value, d1, d2;
};
TailBounds pointwise_tail(cplx a2, cplx lambda, int m);

/// (4/7)(16/189)^m.
double remainder_bound(int m);
/// Uniform per-term bound (1/14)(16/189)^k.
double term_bound(int k);

/// Q of the second approximation, evaluated directly.
cplx Q(double a_squared, cplx lambda);

/// Integer coefficients of P: entry [j][i] multiplies l^j (a^2)^i.
const std::array<std::array<long long, 4>, 9>& p_symbolic_coefficients();
ApproxPolynomial build_P(double a_squared);
/// All eight roots, sorted by real then imaginary part.
std::vector<cplx> roots_P(double a_squared);

/// The two roots of N(a, .) in |l| < 9 for purely imaginary a, |a| < 2.
/// Ordered lambda_0, lambda_2-: ascending when real, Im < 0 first otherwise.
std::pair<cplx, cplx> pn_roots_in_D9(cplx a, double tol = 1e-13);

/// Circles around the two real roots at a^2 = -2.15728123 (first two) and
/// the conjugate pair at a^2 = -2.157281295 (last two).
std::array<Circle, 4> gamma_circles();

/// Certified bound on |sum_{k>=3} l A_k| at one point: exact |A_3 + A_4|
/// plus the geometric tail for k > 4. Requires 2.156 < -a^2 < 2.158 and l
/// within 10^-3 of the union of the gamma circles.
double tail_bound_sharp(double a_squared, cplx lambda);

/// Uniform constants for the region 2.156 < -a^2 < 2.158, |l - 2.0887| small.
struct UniformTailBounds {
    double geometric_tail;  ///< sum_{k>4} |A_k|
    double a3;              ///< |A_3|
    double e4;              ///< |E_4|
    double one_plus_f;      ///< factor with C_4 + D_4 = F A_3
    double total;           ///< |l| sup times (|A_3| (1+F) + |E_4| + tail)
};
UniformTailBounds uniform_tail_bounds();

}  // namespace ptband::series_cf
