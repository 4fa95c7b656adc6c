#include "ptband/discriminant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace ptband::discriminant {

namespace odeint = boost::numeric::odeint;
using operator_model::SymmetryClass;

namespace {

// Fundamental solutions theta, phi and their lambda-derivatives up to Order,
// packed as interleaved re/im doubles: for order o, slot 4o + {0,1,2,3} holds
// theta, theta', phi, phi' (derivatives of order o in lambda).
template <int Order>
using State = std::array<double, 8 * (Order + 1)>;

template <int Order>
struct HillSystem {
    cplx a, lambda;

    void operator()(const State<Order>& s, State<Order>& ds, double x) const {
        const cplx w = 2.0 * a * std::cos(2.0 * x) - lambda;
        auto get = [&s](int i) { return cplx(s[2 * i], s[2 * i + 1]); };
        auto put = [&ds](int i, cplx v) {
            ds[2 * i] = v.real();
            ds[2 * i + 1] = v.imag();
        };
        for (int o = 0; o <= Order; ++o) {
            for (int sol = 0; sol < 2; ++sol) {
                const int y = 4 * o + 2 * sol;
                const int yp = y + 1;
                put(y, get(yp));
                cplx rhs = w * get(y);
                if (o > 0) rhs -= double(o) * get(4 * (o - 1) + 2 * sol);
                put(yp, rhs);
            }
        }
    }
};

template <int Order>
std::array<cplx, 4 * (Order + 1)> integrate(cplx a, cplx lambda, double tol) {
    if (!(tol > 0.0) || tol > 1e-6) throw DomainError("integration tolerance must lie in (0, 1e-6]");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || !std::isfinite(a.real()) ||
        !std::isfinite(a.imag()))
        throw DomainError("non-finite input to the monodromy integrator");
    State<Order> s{};
    s[0] = 1.0;  // theta(0) = 1
    s[6] = 1.0;  // phi'(0) = 1
    HillSystem<Order> sys{a, lambda};
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State<Order>>());
    double x = 0.0;
    const double end = M_PI;
    double dt = 0.05 / (1.0 + std::sqrt(std::abs(lambda)));
    int steps = 0, rejects = 0;
    while (x < end) {
        if (x + dt > end) dt = end - x;
        const auto res = stepper.try_step(sys, s, x, dt);
        if (res == odeint::success) {
            ++steps;
        } else if (++rejects > 10000 || dt < 1e-14) {
            std::ostringstream os;
            os << "step size underflow at x=" << x << " for lambda=" << lambda;
            throw IntegrationFailure(os.str(), lambda);
        }
        if (steps > 1000000) throw IntegrationFailure("step budget exhausted", lambda);
        if (end - x < 1e-15 * end) break;
    }
    std::array<cplx, 4 * (Order + 1)> out;
    for (int i = 0; i < 4 * (Order + 1); ++i) {
        out[i] = cplx(s[2 * i], s[2 * i + 1]);
        if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
            throw IntegrationFailure("non-finite solution", lambda);
    }
    return out;
}

void check_wronskian(const Monodromy& m, double tol) {
    const double scale =
        std::max({1.0, std::abs(m.theta_pi * m.phi_prime_pi), std::abs(m.theta_prime_pi * m.phi_pi)});
    const double defect = std::abs(m.wronskian() - 1.0);
    if (defect > 100.0 * tol * scale) {
        std::ostringstream os;
        os << "Wronskian defect " << defect << " exceeds " << 100.0 * tol * scale << " at lambda=" << m.lambda;
        throw IntegrationFailure(os.str(), m.lambda);
    }
}

}  // namespace

Monodromy monodromy(cplx a, cplx lambda, double tol) {
    const auto y = integrate<0>(a, lambda, tol);
    Monodromy m{y[0], y[1], y[2], y[3], lambda, a};
    check_wronskian(m, tol);
    return m;
}

MonodromyJet monodromy_jet(cplx a, cplx lambda, double tol) {
    const auto y = integrate<1>(a, lambda, tol);
    MonodromyJet j{{y[0], y[1], y[2], y[3], lambda, a}, y[4], y[5], y[6], y[7]};
    check_wronskian(j.m, tol);
    return j;
}

DiscriminantValue hill_discriminant(cplx a, cplx lambda, double tol) {
    const MonodromyJet j = monodromy_jet(a, lambda, tol);
    return {lambda, j.m.F(), j.d_theta_pi + j.d_phi_prime_pi};
}

DiscriminantJet discriminant_jet(cplx a, cplx lambda, double tol) {
    const auto y = integrate<2>(a, lambda, tol);
    Monodromy m{y[0], y[1], y[2], y[3], lambda, a};
    check_wronskian(m, tol);
    return {lambda, y[0] + y[3], y[4] + y[7], y[8] + y[11]};
}

int winding_number(const std::function<cplx(cplx)>& f, const Region& region, int min_points_per_side) {
    const std::array<cplx, 5> corners{cplx(region.re_min, region.im_min), cplx(region.re_max, region.im_min),
                                      cplx(region.re_max, region.im_max), cplx(region.re_min, region.im_max),
                                      cplx(region.re_min, region.im_min)};
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
        const cplx p0 = corners[side], p1 = corners[side + 1];
        // Stack of (s0, f0, s1, f1) segments, refined while the phase jump is large.
        struct Seg {
            double s0;
            cplx f0;
            double s1;
            cplx f1;
            int depth;
        };
        std::vector<Seg> stack;
        const cplx prev = f(p0);
        std::vector<std::pair<double, cplx>> coarse;
        for (int i = 0; i <= min_points_per_side; ++i) {
            const double s = double(i) / min_points_per_side;
            coarse.emplace_back(s, i == 0 ? prev : f(p0 + s * (p1 - p0)));
        }
        for (int i = min_points_per_side - 1; i >= 0; --i)
            stack.push_back({coarse[i].first, coarse[i].second, coarse[i + 1].first, coarse[i + 1].second, 0});
        while (!stack.empty()) {
            Seg g = stack.back();
            stack.pop_back();
            if (g.f0 == 0.0 || g.f1 == 0.0) throw MissedRootError("function vanishes on the contour");
            const double jump = std::arg(g.f1 / g.f0);
            if (std::abs(jump) > M_PI / 4 && g.depth < 30) {
                const double sm = 0.5 * (g.s0 + g.s1);
                const cplx fm = f(p0 + sm * (p1 - p0));
                stack.push_back({sm, fm, g.s1, g.f1, g.depth + 1});
                stack.push_back({g.s0, g.f0, sm, fm, g.depth + 1});
                continue;
            }
            total += jump;
        }
    }
    return int(std::lround(total / (2.0 * M_PI)));
}

std::optional<cplx> newton_polish(cplx a, cplx w, cplx seed, double tol, int max_iter) {
    cplx z = seed;
    const double max_step = 2.0 + 0.1 * std::abs(seed);
    for (int it = 0; it < max_iter; ++it) {
        const DiscriminantValue d = hill_discriminant(a, z, tol);
        if (d.F_prime == 0.0) return std::nullopt;
        cplx step = (d.F - w) / d.F_prime;
        if (std::abs(step) > max_step) step *= max_step / std::abs(step);
        z -= step;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) return z;
    }
    return std::nullopt;
}

std::optional<std::pair<cplx, cplx>> resolve_pair(cplx a, cplx w, cplx seed, double tol) {
    cplx z = seed;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const DiscriminantJet j = discriminant_jet(a, z, tol);
        if (j.d2F == 0.0) return std::nullopt;
        cplx step = j.dF / j.d2F;
        if (std::abs(step) > 1.0) step /= std::abs(step);
        z -= step;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) {
            converged = true;
            break;
        }
    }
    if (!converged) return std::nullopt;
    const DiscriminantJet c = discriminant_jet(a, z, tol);
    const cplx s = std::sqrt(2.0 * (w - c.F) / c.d2F);
    cplx r1 = z - s, r2 = z + s;
    if (std::abs(s) > 1e-5) {
        auto p1 = newton_polish(a, w, r1, tol);
        auto p2 = newton_polish(a, w, r2, tol);
        if (p1 && p2 && std::abs(*p1 - r1) < 0.5 * std::abs(s) && std::abs(*p2 - r2) < 0.5 * std::abs(s)) {
            r1 = *p1;
            r2 = *p2;
        }
    }
    if (operator_model::label_less(r2, r1)) std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

namespace {

bool is_parity_point(double t) { return t == 0.0 || t == M_PI; }

// Seeds: free-problem roots near the region, offset in four directions by
// multiples of |a|, plus a uniform grid of the given spacing.
std::vector<cplx> seeds(cplx a, double t, const Region& region, int refine) {
    std::vector<cplx> out;
    const double abs_a = std::abs(a);
    const double shift = t / M_PI;
    const int kmax = int(std::ceil(std::sqrt(std::max(0.0, region.re_max)) / 2.0)) + 2;
    for (int k = -kmax; k <= kmax; ++k) {
        const double w = 2.0 * k + shift;
        const cplx base = w * w;
        out.push_back(base);
        for (double f : {0.5, 1.5}) {
            const double d = f * abs_a;
            if (d == 0.0) continue;
            for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) out.push_back(base + d * dir);
        }
    }
    const double width = region.re_max - region.re_min, height = region.im_max - region.im_min;
    const int nx = std::max(2, int(std::ceil(width / 4.0))) << refine;
    const int ny = std::max(2, int(std::ceil(height / 4.0))) << refine;
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            out.push_back({region.re_min + width * i / nx, region.im_min + height * j / ny});
    std::vector<cplx> in;
    for (cplx z : out)
        if (region.contains(z)) in.push_back(z);
    return in;
}

// Newton on a scalar function with derivative; returns the root or nullopt.
template <class Fn>
std::optional<cplx> newton(Fn&& fn, cplx z, const Region& region) {
    const double max_step = 2.0 + 0.1 * std::abs(z);
    for (int it = 0; it < 80; ++it) {
        const auto [g, dg] = fn(z);
        if (dg == 0.0) return std::nullopt;
        cplx step = g / dg;
        if (std::abs(step) > max_step) step *= max_step / std::abs(step);
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        const Region wide{region.re_min - 5, region.re_max + 5, region.im_min - 5, region.im_max + 5};
        if (!wide.contains(z)) return std::nullopt;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) return z;
    }
    return std::nullopt;
}

void add_unique(std::vector<BlochRoot>& roots, BlochRoot r, double radius) {
    for (const auto& q : roots)
        if (q.cls == r.cls && std::abs(q.value - r.value) <= radius * (1.0 + std::abs(r.value))) return;
    roots.push_back(r);
}

std::vector<BlochRoot> parity_roots(cplx a, double t, const Region& region, double tol, int refine) {
    const double s = std::cos(t) > 0 ? 1.0 : -1.0;
    std::vector<BlochRoot> roots;
    auto neumann = [&](cplx z) {
        const MonodromyJet j = monodromy_jet(a, z, tol);
        return std::pair<cplx, cplx>(j.m.theta_prime_pi, j.d_theta_prime_pi);
    };
    auto dirichlet = [&](cplx z) {
        const MonodromyJet j = monodromy_jet(a, z, tol);
        return std::pair<cplx, cplx>(j.m.phi_pi, j.d_phi_pi);
    };
    for (cplx z0 : seeds(a, t, region, refine)) {
        for (int kind = 0; kind < 2; ++kind) {
            const auto root = kind == 0 ? newton(neumann, z0, region) : newton(dirichlet, z0, region);
            if (!root || !region.contains(*root)) continue;
            const MonodromyJet j = monodromy_jet(a, *root, tol);
            if (j.m.theta_pi.real() * s <= 0.0) continue;
            BlochRoot br{*root, 1, std::nullopt};
            if (kind == 0) {
                br.cls = s > 0 ? SymmetryClass::PN : SymmetryClass::AN;
                if (std::abs(j.d_theta_prime_pi) < 1e-6) br.multiplicity = 2;
            } else {
                br.cls = s > 0 ? SymmetryClass::PD : SymmetryClass::AD;
                if (std::abs(j.d_phi_pi) < 1e-6) br.multiplicity = 2;
            }
            add_unique(roots, br, br.multiplicity > 1 ? 1e-5 : 1e-8);
        }
    }
    return roots;
}

std::vector<BlochRoot> generic_roots(cplx a, double t, const Region& region, double tol, int refine) {
    const cplx w = 2.0 * std::cos(t);
    std::vector<BlochRoot> roots;
    auto g = [&](cplx z) {
        const DiscriminantValue d = hill_discriminant(a, z, tol);
        return std::pair<cplx, cplx>(d.F - w, d.F_prime);
    };
    std::vector<cplx> found;
    for (cplx z0 : seeds(a, t, region, refine)) {
        const auto root = newton(g, z0, region);
        if (root && region.contains(*root)) found.push_back(*root);
    }
    for (cplx z : found) {
        bool dup = false;
        for (const auto& q : roots)
            if (std::abs(q.value - z) <= (q.multiplicity > 1 ? 1e-4 : 1e-8) * (1.0 + std::abs(z))) dup = true;
        if (dup) continue;
        const DiscriminantValue d = hill_discriminant(a, z, tol);
        if (std::abs(d.F_prime) < 1e-6) {
            // Near-double root: resolve both members through the critical point.
            if (auto pr = resolve_pair(a, w, z, tol)) {
                if (std::abs(pr->first - pr->second) <= 1e-8 * (1.0 + std::abs(z))) {
                    roots.push_back({0.5 * (pr->first + pr->second), 2, std::nullopt});
                } else {
                    add_unique(roots, {pr->first, 1, std::nullopt}, 1e-8);
                    add_unique(roots, {pr->second, 1, std::nullopt}, 1e-8);
                }
                continue;
            }
        }
        add_unique(roots, {z, 1, std::nullopt}, 1e-8);
    }
    return roots;
}

}  // namespace

BlochRootSet bloch_roots_detailed(cplx a, double t, const Region& region, double tol) {
    if (!(t >= 0.0 && t <= M_PI)) throw DomainError("quasimomentum t must lie in [0, pi]");
    if (!(region.re_max > region.re_min && region.im_max > region.im_min) || !std::isfinite(region.re_min) ||
        !std::isfinite(region.re_max) || !std::isfinite(region.im_min) || !std::isfinite(region.im_max))
        throw DomainError("region must be a bounded non-empty rectangle");
    const cplx w = 2.0 * std::cos(t);
    const int winding = winding_number([&](cplx z) { return monodromy(a, z, tol).F() - w; }, region);
    BlochRootSet out;
    out.winding = winding;
    for (int refine = 0; refine < 3; ++refine) {
        out.roots = is_parity_point(t) ? parity_roots(a, t, region, tol, refine) : generic_roots(a, t, region, tol, refine);
        int count = 0;
        for (const auto& r : out.roots) count += r.multiplicity;
        if (count == winding) {
            std::sort(out.roots.begin(), out.roots.end(),
                      [](const BlochRoot& x, const BlochRoot& y) { return operator_model::label_less(x.value, y.value); });
            return out;
        }
    }
    std::ostringstream os;
    int count = 0;
    for (const auto& r : out.roots) count += r.multiplicity;
    os << "found " << count << " roots but the argument principle counts " << winding << " in region [" << region.re_min
       << ", " << region.re_max << "] x [" << region.im_min << ", " << region.im_max << "]";
    throw MissedRootError(os.str());
}

std::vector<cplx> bloch_roots(cplx a, double t, const Region& region, double tol) {
    std::vector<cplx> out;
    for (const auto& r : bloch_roots_detailed(a, t, region, tol).roots)
        for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.value);
    return out;
}

bool real_spectrum_membership(cplx a, double lambda, double tol) {
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    const cplx F = monodromy(a, lambda, kDefaultTol).F();
    if (std::abs(F.imag()) > 1e-8 * (1.0 + std::abs(F))) return false;
    return F.real() >= -2.0 - tol && F.real() <= 2.0 + tol;
}

}  // namespace ptband::discriminant
