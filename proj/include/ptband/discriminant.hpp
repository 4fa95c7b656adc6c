#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ptband/errors.hpp"
#include "ptband/operator_model.hpp"

/// Monodromy of -y'' + 2a cos(2x) y = lambda y over [0, pi], the Hill
/// discriminant F = theta(pi) + phi'(pi), and Bloch eigenvalues as roots of
/// F(lambda) = 2 cos t.
namespace ptband::discriminant {

inline constexpr double kDefaultTol = 1e-12;

struct Monodromy {
    cplx theta_pi, theta_prime_pi, phi_pi, phi_prime_pi;
    cplx lambda, a;

    cplx wronskian() const noexcept { return theta_pi * phi_prime_pi - theta_prime_pi * phi_pi; }
    cplx F() const noexcept { return theta_pi + phi_prime_pi; }
};

struct DiscriminantValue {
    cplx lambda, F, F_prime;
};

/// F with its first two lambda-derivatives.
struct DiscriminantJet {
    cplx lambda, F, dF, d2F;
};

/// Monodromy entries together with their lambda-derivatives.
struct MonodromyJet {
    Monodromy m;
    cplx d_theta_pi, d_theta_prime_pi, d_phi_pi, d_phi_prime_pi;
};

struct BlochPoint {
    double t = 0.0;
    cplx mu;
    int band_index = 0;
};

/// Axis-aligned rectangle in the complex plane.
struct Region {
    double re_min, re_max, im_min, im_max;

    bool contains(cplx z) const noexcept {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
    }
    static Region around(cplx center, double half_width) {
        return {center.real() - half_width, center.real() + half_width, center.imag() - half_width,
                center.imag() + half_width};
    }
};

Monodromy monodromy(cplx a, cplx lambda, double tol = kDefaultTol);
MonodromyJet monodromy_jet(cplx a, cplx lambda, double tol = kDefaultTol);
DiscriminantValue hill_discriminant(cplx a, cplx lambda, double tol = kDefaultTol);
DiscriminantJet discriminant_jet(cplx a, cplx lambda, double tol = kDefaultTol);

struct BlochRoot {
    cplx value;
    int multiplicity = 1;
    /// Parity class for t = 0 or pi, when the potential is even.
    std::optional<operator_model::SymmetryClass> cls;
};

struct BlochRootSet {
    std::vector<BlochRoot> roots;
    int winding = 0;  ///< argument-principle count on the region boundary
};

/// All roots of F - 2cos t in the region, with multiplicity and the
/// argument-principle count. Throws MissedRootError when the two disagree.
BlochRootSet bloch_roots_detailed(cplx a, double t, const Region& region, double tol = kDefaultTol);

/// Roots listed with multiplicity, sorted by real then imaginary part.
std::vector<cplx> bloch_roots(cplx a, double t, const Region& region, double tol = kDefaultTol);

/// Winding number of f around the boundary of the region, using adaptive
/// sampling so that consecutive arguments differ by less than pi/4.
int winding_number(const std::function<cplx(cplx)>& f, const Region& region, int min_points_per_side = 64);

/// True iff F(lambda) lies in [-2 - tol, 2 + tol] (lambda real).
bool real_spectrum_membership(cplx a, double lambda, double tol = 1e-9);

/// Newton on F - w from a seed; nullopt when it does not converge.
std::optional<cplx> newton_polish(cplx a, cplx w, cplx seed, double tol = kDefaultTol, int max_iter = 60);

/// Resolve a pair of nearby roots of F - w via the critical point of F:
/// lambda_c +- sqrt(2 (w - F(lambda_c)) / F''(lambda_c)).
std::optional<std::pair<cplx, cplx>> resolve_pair(cplx a, cplx w, cplx seed, double tol = kDefaultTol);

}  // namespace ptband::discriminant
