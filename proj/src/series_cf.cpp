#include "ptband/series_cf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ptband/operator_model.hpp"

namespace ptband::series_cf {

namespace {

// Value with first and second lambda-derivatives.
struct Jet {
    cplx v{0.0}, d1{0.0}, d2{0.0};
};

Jet operator*(const Jet& f, const Jet& g) {
    return {f.v * g.v, f.d1 * g.v + f.v * g.d1, f.d2 * g.v + 2.0 * f.d1 * g.d1 + f.v * g.d2};
}
Jet operator+(const Jet& f, const Jet& g) { return {f.v + g.v, f.d1 + g.d1, f.d2 + g.d2}; }

// 1/(lambda - c) as a jet.
Jet inv_shift(cplx lambda, double c) {
    const cplx u = 1.0 / (lambda - c);
    return {u, -u * u, 2.0 * u * u * u};
}

Jet constant(cplx c) { return {c, 0.0, 0.0}; }

void pole_guard(cplx lambda, int k) {
    // Poles at (2p)^2 for p = 2 .. k+2 cover every factor of A_k.
    for (int p = 2; p <= k + 2; ++p) {
        const double pole = 4.0 * p * p;
        if (std::abs(lambda - pole) <= 1e-6) {
            std::ostringstream os;
            os << "lambda=" << lambda << " is within 1e-6 of the pole " << pole;
            throw SingularityError(os.str(), pole);
        }
    }
}

// a^{2k+2} / ((l-16)^2 (l-36)^2) as a jet.
Jet prefactor(cplx a, cplx lambda, int k) {
    const Jet u16 = inv_shift(lambda, 16.0), u36 = inv_shift(lambda, 36.0);
    return constant(std::pow(a * a, k + 1)) * u16 * u16 * u36 * u36;
}

}  // namespace

int IndexPath::position(int s) const {
    int p = 3;
    for (int i = 0; i < s; ++i) p += signs[i];
    return p;
}

const std::vector<IndexPath>& enumerate_paths(int k) {
    if (k < 2) throw DomainError("enumerate_paths requires k >= 2");
    if (k > kMaxPathOrder) throw DomainError("enumerate_paths supports k <= 12");
    static std::mutex mu;
    static std::map<int, std::vector<IndexPath>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;

    const int len = 2 * k - 3;
    std::vector<IndexPath> out;
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
        std::vector<int> signs(len);
        int sum = 0;
        bool ok = true;
        for (int s = 0; s < len; ++s) {
            signs[s] = (mask >> s) & 1u ? 1 : -1;
            sum += signs[s];
            if ((s + 1) % 2 == 0 && 3 + sum <= 1) {
                ok = false;
                break;
            }
        }
        if (ok && std::abs(sum) == 1) out.push_back({std::move(signs)});
    }
    return cache.emplace(k, std::move(out)).first->second;
}

SeriesTerm A_k(cplx a, cplx lambda, int k) {
    if (k < 1) throw DomainError("A_k requires k >= 1");
    pole_guard(lambda, k);
    if (k == 1) {
        const Jet u16 = inv_shift(lambda, 16.0), u36 = inv_shift(lambda, 36.0);
        const Jet r = constant(std::pow(a * a, 2)) * u16 * u16 * u36;
        return {1, r.v, r.d1, r.d2};
    }
    // Walk over positions p starting at 3; even steps must stay above 1.
    const int len = 2 * k - 3;
    const int pmax = 3 + len;
    std::vector<Jet> w(pmax + 2), next(pmax + 2);
    w[3] = constant(1.0);
    for (int s = 1; s <= len; ++s) {
        std::fill(next.begin(), next.end(), Jet{});
        for (int p = 1; p <= pmax; ++p) {
            if (w[p].v == 0.0 && w[p].d1 == 0.0 && w[p].d2 == 0.0) continue;
            for (int step : {-1, 1}) {
                const int q = p + step;
                if (q < 1 || q > pmax) continue;
                if (s % 2 == 0 && q <= 1) continue;
                next[q] = next[q] + w[p] * inv_shift(lambda, 4.0 * q * q);
            }
        }
        std::swap(w, next);
    }
    const Jet total = prefactor(a, lambda, k) * (w[2] + w[4]);
    return {k, total.v, total.d1, total.d2};
}

SeriesTerm A_k_from_paths(cplx a, cplx lambda, int k) {
    if (k == 1) return A_k(a, lambda, 1);
    pole_guard(lambda, k);
    const Jet pre = prefactor(a, lambda, k);
    cplx v = 0.0, d1 = 0.0, d2 = 0.0;
    for (const IndexPath& path : enumerate_paths(k)) {
        // term = prod 1/(l - c_s); term'/term = -sum u_s, term''/term = (sum u_s)^2 + sum u_s^2.
        cplx term = 1.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t s = 1; s <= path.signs.size(); ++s) {
            const int p = path.position(int(s));
            const cplx u = 1.0 / (lambda - 4.0 * p * p);
            term *= u;
            s1 += u;
            s2 += u * u;
        }
        v += term;
        d1 += -term * s1;
        d2 += term * (s1 * s1 + s2);
    }
    const Jet r = pre * Jet{v, d1, d2};
    return {k, r.v, r.d1, r.d2};
}

cplx A1_closed(cplx a2, cplx l) { return a2 * a2 / (std::pow(l - 16.0, 2) * (l - 36.0)); }

cplx A2_closed(cplx a2, cplx l) {
    const cplx a6 = a2 * a2 * a2;
    return a6 / (std::pow(l - 16.0, 3) * std::pow(l - 36.0, 2)) +
           a6 / (std::pow(l - 16.0, 2) * std::pow(l - 36.0, 2) * (l - 64.0));
}

cplx A3_closed(cplx a2, cplx l) {
    const cplx a8 = std::pow(a2, 4);
    const cplx x16 = l - 16.0, x36 = l - 36.0, x64 = l - 64.0, x100 = l - 100.0;
    return a8 / (std::pow(x16, 4) * std::pow(x36, 3)) + a8 / (std::pow(x16, 2) * std::pow(x36, 3) * std::pow(x64, 2)) +
           2.0 * a8 / (std::pow(x16, 3) * std::pow(x36, 3) * x64) +
           a8 / (std::pow(x16, 2) * std::pow(x36, 2) * std::pow(x64, 2) * x100);
}

cplx C4_closed(cplx a2, cplx l) { return a2 / ((l - 16.0) * (l - 36.0)) * A3_closed(a2, l); }

cplx D4_closed(cplx a2, cplx l) { return a2 / ((l - 64.0) * (l - 36.0)) * A3_closed(a2, l); }

cplx E4_closed(cplx a2, cplx l) {
    const cplx a10 = std::pow(a2, 5);
    const cplx x16 = l - 16.0, x36 = l - 36.0, x64 = l - 64.0, x100 = l - 100.0, x144 = l - 144.0;
    const cplx base = std::pow(x16, 2) * std::pow(x36, 2);
    return a10 / (base * std::pow(x64, 2) * std::pow(x100, 2) * x144) +
           a10 / (base * std::pow(x64, 3) * std::pow(x100, 2)) + a10 / (base * x36 * std::pow(x64, 3) * x100) +
           a10 / (base * x16 * x36 * std::pow(x64, 2) * x100);
}

cplx A4_closed(cplx a2, cplx l) { return C4_closed(a2, l) + D4_closed(a2, l) + E4_closed(a2, l); }

double remainder_bound(int m) {
    if (m < 1) throw DomainError("remainder_bound requires m >= 1");
    return 4.0 / 7.0 * std::pow(16.0 / 189.0, m);
}

double term_bound(int k) {
    if (k < 1) throw DomainError("term_bound requires k >= 1");
    return std::pow(16.0 / 189.0, k) / 14.0;
}

TailBounds pointwise_tail(cplx a2, cplx lambda, int m) {
    const double d16 = std::abs(lambda - 16.0), d36 = std::abs(lambda - 36.0);
    const double pre = std::abs(a2) / (8.0 * d16);
    const double rho = 4.0 * std::abs(a2) / (d16 * d36);
    if (rho >= 1.0) throw DomainError("series tail does not converge at this point");
    TailBounds t{0.0, 0.0, 0.0};
    double rk = std::pow(rho, m + 1);
    for (int k = m + 1; k < m + 400; ++k) {
        const double base = pre * rk;
        t.value += base;
        t.d1 += base * (2.0 * k + 1.0) / d16;
        t.d2 += base * (2.0 * k + 1.0) * (2.0 * k + 2.0) / (d16 * d16);
        if (base * (2.0 * k + 1.0) * (2.0 * k + 2.0) < 1e-30) break;
        rk *= rho;
    }
    return t;
}

namespace {

void check_validity(cplx a, cplx lambda) {
    if (!(std::abs(a) < 2.0)) throw DomainError("characteristic_N requires |a| < 2");
    if (!(std::abs(lambda) <= 9.0 * (1.0 + 1e-12))) throw DomainError("characteristic_N requires |lambda| <= 9");
}

CharacteristicEval assemble(cplx a, cplx lambda, int m) {
    const cplx a2 = a * a;
    const cplx x16 = lambda - 16.0;
    // l^2 - 4l - 2a^2 - a^2 l/(l-16)
    cplx N = lambda * lambda - 4.0 * lambda - 2.0 * a2 - a2 * lambda / x16;
    cplx N1 = 2.0 * lambda - 4.0 - a2 / x16 + a2 * lambda / (x16 * x16);
    cplx N2 = 2.0 + 2.0 * a2 / (x16 * x16) - 2.0 * a2 * lambda / (x16 * x16 * x16);
    for (int k = 1; k <= m; ++k) {
        const SeriesTerm t = A_k(a, lambda, k);
        N -= lambda * t.value;
        N1 -= t.value + lambda * t.d1;
        N2 -= 2.0 * t.d1 + lambda * t.d2;
    }
    CharacteristicEval e{a, lambda, N, N1, N2, m, 0.0};
    const TailBounds tb = pointwise_tail(a2, lambda, m);
    e.tail_bound = std::abs(lambda) * tb.value;
    return e;
}

}  // namespace

CharacteristicEval characteristic_N_truncated(cplx a, cplx lambda, int m) {
    check_validity(a, lambda);
    if (m < 1) throw DomainError("series truncation m must be >= 1");
    return assemble(a, lambda, m);
}

CharacteristicEval characteristic_N(cplx a, cplx lambda, double target_tail) {
    check_validity(a, lambda);
    if (!(target_tail > 0.0)) throw DomainError("target_tail must be positive");
    const cplx a2 = a * a;
    const double abs_l = std::abs(lambda);
    for (int m = 1; m <= kMaxPathOrder; ++m) {
        const TailBounds tb = pointwise_tail(a2, lambda, m);
        // Tails of N, N' and N'' (product rule on l A_k).
        const double tN = abs_l * tb.value;
        const double tN1 = tb.value + abs_l * tb.d1;
        const double tN2 = 2.0 * tb.d1 + abs_l * tb.d2;
        if (std::max({tN, tN1, tN2}) <= target_tail) return assemble(a, lambda, m);
    }
    std::ostringstream os;
    os << "tail bound " << target_tail << " is unreachable with k <= " << kMaxPathOrder << " at a=" << a
       << ", lambda=" << lambda;
    throw PrecisionError(os.str());
}

cplx Q(double s, cplx l) {
    const cplx x16 = l - 16.0, x36 = l - 36.0, x64 = l - 64.0;
    return l * l - 4.0 * l - 2.0 * s - s * l / x16 - s * s * l / (x16 * x16 * x36) -
           s * s * s * l / (x16 * x16 * x16 * x36 * x36) - s * s * s * l / (x16 * x16 * x36 * x36 * x64);
}

namespace {

// Polynomials in l with integer coefficients, coefficient j of l^j.
using IPoly = std::vector<long long>;

IPoly mul(const IPoly& p, const IPoly& q) {
    IPoly r(p.size() + q.size() - 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

IPoly linear(long long root) { return {-root, 1}; }

IPoly power(long long root, int e) {
    IPoly r{1};
    for (int i = 0; i < e; ++i) r = mul(r, linear(root));
    return r;
}

void add_into(std::array<std::array<long long, 4>, 9>& c, const IPoly& p, int s_power, long long scale) {
    for (std::size_t j = 0; j < p.size(); ++j) c[j][s_power] += scale * p[j];
}

std::array<std::array<long long, 4>, 9> make_p_coefficients() {
    std::array<std::array<long long, 4>, 9> c{};
    const IPoly lam{0, 1};
    const IPoly D = mul(mul(power(16, 3), power(36, 2)), linear(64));
    add_into(c, mul(D, IPoly{0, -4, 1}), 0, 1);                                          // (l^2 - 4l) D
    add_into(c, D, 1, -2);                                                               // -2 s D
    add_into(c, mul(lam, mul(mul(power(16, 2), power(36, 2)), linear(64))), 1, -1);      // -s l (l-16)^2 (l-36)^2 (l-64)
    add_into(c, mul(lam, mul(mul(linear(16), linear(36)), linear(64))), 2, -1);          // -s^2 l (l-16)(l-36)(l-64)
    add_into(c, mul(lam, linear(64)), 3, -1);                                            // -s^3 l (l-64)
    add_into(c, mul(lam, linear(16)), 3, -1);                                            // -s^3 l (l-16)
    return c;
}

using lcplx = std::complex<long double>;

lcplx horner(const std::array<long double, 9>& c, lcplx z) {
    lcplx r = c[8];
    for (int j = 7; j >= 0; --j) r = r * z + c[j];
    return r;
}

}  // namespace

const std::array<std::array<long long, 4>, 9>& p_symbolic_coefficients() {
    static const auto c = make_p_coefficients();
    return c;
}

cplx ApproxPolynomial::operator()(cplx lambda) const {
    cplx r = coeffs[8];
    for (int j = 7; j >= 0; --j) r = r * lambda + coeffs[j];
    return r;
}

ApproxPolynomial build_P(double a_squared) {
    if (!std::isfinite(a_squared)) throw DomainError("a^2 must be finite");
    ApproxPolynomial p;
    p.a_squared = a_squared;
    const auto& c = p_symbolic_coefficients();
    const long double s = a_squared;
    for (int j = 0; j < 9; ++j) {
        long double v = 0.0L;
        for (int i = 3; i >= 0; --i) v = v * s + static_cast<long double>(c[j][i]);
        p.coeffs[j] = cplx(static_cast<double>(v), 0.0);
    }
    return p;
}

std::vector<cplx> roots_P(double a_squared) {
    const ApproxPolynomial p = build_P(a_squared);
    // Long-double coefficients straight from the integer table.
    std::array<long double, 9> c{};
    const auto& sym = p_symbolic_coefficients();
    for (int j = 0; j < 9; ++j) {
        long double v = 0.0L;
        for (int i = 3; i >= 0; --i) v = v * static_cast<long double>(a_squared) + static_cast<long double>(sym[j][i]);
        c[j] = v;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(8, 8);
    for (int i = 1; i < 8; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 8; ++i) comp(i, 7) = -p.coeffs[i] / p.coeffs[8];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + 8);

    std::array<long double, 9> dc{};
    for (int j = 1; j < 9; ++j) dc[j - 1] = j * c[j];
    for (cplx& r : roots) {
        lcplx z(r.real(), r.imag());
        for (int it = 0; it < 50; ++it) {
            const lcplx f = horner(c, z), df = horner(dc, z);
            if (df == lcplx(0.0L)) break;
            const lcplx step = f / df;
            // Newton stalls on multiple roots; stop once it no longer helps.
            if (std::abs(horner(c, z - step)) >= std::abs(f)) break;
            z -= step;
        }
        r = cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) { return operator_model::label_less(x, y, 1e-12); });
    return roots;
}

namespace {

int circle_winding(cplx a, double radius) {
    const int n = 512;
    double total = 0.0;
    cplx prev = characteristic_N(a, radius, 1e-8).N_val;
    for (int i = 1; i <= n; ++i) {
        const cplx z = std::polar(radius, 2.0 * M_PI * i / n);
        const cplx cur = characteristic_N(a, z, 1e-8).N_val;
        total += std::arg(cur / prev);
        prev = cur;
    }
    return int(std::lround(total / (2.0 * M_PI)));
}

// Newton on N (or on N' when derivative = true) from z.
std::optional<cplx> series_newton(cplx a, cplx z, bool derivative) {
    for (int it = 0; it < 80; ++it) {
        const CharacteristicEval e = characteristic_N(a, z);
        const cplx f = derivative ? e.N_d1 : e.N_val;
        const cplx df = derivative ? e.N_d2 : e.N_d1;
        if (df == 0.0) return std::nullopt;
        cplx step = f / df;
        if (std::abs(step) > 1.0) step /= std::abs(step);
        z -= step;
        if (std::abs(z) > 9.0) return std::nullopt;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) return z;
    }
    return z;
}

}  // namespace

std::pair<cplx, cplx> pn_roots_in_D9(cplx a, double tol) {
    if (!(std::abs(a.real()) <= 1e-14 * std::abs(a)) || !(std::abs(a) > 0.0) || !(std::abs(a) < 2.0))
        throw DomainError("pn_roots_in_D9 requires purely imaginary a with 0 < |a| < 2");
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    a = cplx(0.0, a.imag());
    const int w = circle_winding(a, 9.0);
    if (w != 2) {
        std::ostringstream os;
        os << "N(a, .) has winding number " << w << " on |lambda| = 9 (expected 2) at a=" << a;
        throw ModelViolation(os.str());
    }
    std::vector<cplx> seeds;
    for (cplx r : roots_P((a * a).real()))
        if (std::abs(r) < 9.0) seeds.push_back(r);
    cplx center = 2.0;
    if (seeds.size() == 2) center = 0.5 * (seeds[0] + seeds[1]);
    // The critical point of N between the two roots; by conjugation symmetry
    // it is real, so only the real part is kept.
    const auto c = series_newton(a, center, true);
    if (!c) throw NumericalFailure("critical point of N did not converge");
    const double lc = c->real();
    const CharacteristicEval e = characteristic_N(a, lc);
    const cplx half = std::sqrt(-2.0 * e.N_val / e.N_d2);
    cplx r0 = lc - half, r2 = lc + half;
    if (std::abs(half) > 1e-7) {
        const auto p0 = series_newton(a, r0, false);
        const auto p2 = series_newton(a, r2, false);
        const double keep = 0.5 * std::abs(half);
        if (p0 && std::abs(*p0 - r0) < keep) r0 = *p0;
        if (p2 && std::abs(*p2 - r2) < keep) r2 = *p2;
    }
    const double real_tol = std::max(tol, 1e-13);
    if (std::abs(r0.imag()) <= real_tol && std::abs(r2.imag()) <= real_tol) {
        r0 = r0.real();
        r2 = r2.real();
        if (r2.real() < r0.real()) std::swap(r0, r2);
    } else if (r0.imag() > r2.imag()) {
        std::swap(r0, r2);
    }
    return {r0, r2};
}

std::array<Circle, 4> gamma_circles() {
    return {Circle{2.088438808, 0.00023}, Circle{2.088959036, 0.00023}, Circle{{2.088698925, -0.000232839}, 0.00023},
            Circle{{2.088698925, 0.000232839}, 0.00023}};
}

double tail_bound_sharp(double a_squared, cplx lambda) {
    if (!(-a_squared > 2.156 && -a_squared < 2.158)) throw DomainError("tail_bound_sharp requires 2.156 < -a^2 < 2.158");
    double dist = 1e300;
    for (const Circle& c : gamma_circles()) dist = std::min(dist, std::abs(std::abs(lambda - c.center) - c.radius));
    if (dist > 1e-3) throw DomainError("tail_bound_sharp requires lambda on the gamma circles");
    const cplx a2 = a_squared;
    const cplx a = std::sqrt(a2);
    const cplx a34 = A_k(a, lambda, 3).value + A_k(a, lambda, 4).value;
    const double tail = pointwise_tail(a2, lambda, 4).value;
    return std::abs(lambda) * (std::abs(a34) + tail);
}

UniformTailBounds uniform_tail_bounds() {
    // Worst-case evaluation points: |a^2| <= 2.16, |l| <= 2.1 with l - 16 and
    // l - 36 bounded below at l = 2.1; F uses a^2 = -2.15 and l = 2.
    UniformTailBounds u{};
    const double pre = 2.16 / (8.0 * (16.0 - 2.1));
    const double rho = 4.0 * 2.16 / ((16.0 - 2.1) * (36.0 - 2.1));
    u.geometric_tail = pre * std::pow(rho, 5) / (1.0 - rho);
    u.a3 = std::abs(A3_closed(2.16, 2.1));
    u.e4 = std::abs(E4_closed(-2.16, 2.1));
    const double f = -2.15 / ((2.0 - 16.0) * (2.0 - 36.0)) + -2.15 / ((2.0 - 64.0) * (2.0 - 36.0));
    u.one_plus_f = 1.0 + f;
    u.total = 2.1 * (u.geometric_tail + u.e4 + u.one_plus_f * u.a3);
    return u;
}

}  // namespace ptband::series_cf
