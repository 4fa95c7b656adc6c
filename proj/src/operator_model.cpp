#include "ptband/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ptband {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::ModelViolation: return "model_violation";
        case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

namespace operator_model {

std::string_view to_string(SymmetryClass c) noexcept {
    switch (c) {
        case SymmetryClass::PN: return "PN";
        case SymmetryClass::PD: return "PD";
        case SymmetryClass::AD: return "AD";
        case SymmetryClass::AN: return "AN";
    }
    return "?";
}

SymmetryClass symmetry_class_from_string(std::string_view s) {
    if (s == "PN") return SymmetryClass::PN;
    if (s == "PD") return SymmetryClass::PD;
    if (s == "AD") return SymmetryClass::AD;
    if (s == "AN") return SymmetryClass::AN;
    throw DomainError("unknown symmetry class '" + std::string(s) + "'");
}

cplx a_from_V(double V) {
    if (!std::isfinite(V) || V < 0.0) throw DomainError("V must be finite and non-negative");
    const double d = 1.0 - 4.0 * V * V;
    if (d >= 0.0) return {std::sqrt(d), 0.0};
    return {0.0, std::sqrt(-d)};
}

double V_from_a(cplx a) {
    const cplx a2 = a * a;
    const double scale = std::max(1.0, std::abs(a2));
    if (!std::isfinite(a2.real()) || std::abs(a2.imag()) > 1e-12 * scale)
        throw DomainError("V is defined only for real a^2");
    if (a2.real() > 1.0 + 1e-15) throw DomainError("V is defined only for a^2 <= 1");
    return 0.5 * std::sqrt(std::max(0.0, 1.0 - a2.real()));
}

PotentialSpec PotentialSpec::from_V(double V) { return {V, a_from_V(V), Origin::FromV}; }

PotentialSpec PotentialSpec::from_a(cplx a) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("a must be finite");
    double V = std::nan("");
    try {
        V = V_from_a(a);
    } catch (const DomainError&) {
    }
    return {V, a, Origin::FromA};
}

double diagonal_entry(SymmetryClass cls, int k) noexcept {
    switch (cls) {
        case SymmetryClass::PN: return 4.0 * k * k;
        case SymmetryClass::PD: return 4.0 * (k + 1) * (k + 1);
        case SymmetryClass::AD:
        case SymmetryClass::AN: return double(2 * k + 1) * double(2 * k + 1);
    }
    return 0.0;
}

TruncatedMatrix build_truncated_matrix(SymmetryClass cls, cplx a, int N) {
    if (N < kMinTruncation)
        throw ConfigError("truncation order N=" + std::to_string(N) + " is below the minimum " +
                          std::to_string(kMinTruncation));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    for (int k = 0; k < N; ++k) {
        m(k, k) = diagonal_entry(cls, k);
        if (k + 1 < N) {
            m(k, k + 1) = a;
            m(k + 1, k) = a;
        }
    }
    if (cls == SymmetryClass::PN) {
        m(0, 1) = std::sqrt(2.0) * a;
        m(1, 0) = std::sqrt(2.0) * a;
    } else if (cls == SymmetryClass::AD) {
        m(0, 0) += a;
    } else if (cls == SymmetryClass::AN) {
        m(0, 0) -= a;
    }
    return {cls, a, N, std::move(m)};
}

double disc_radius(SymmetryClass cls, int level, double abs_a) noexcept {
    if (is_periodic(cls)) {
        if (level == 0) return std::sqrt(2.0) * abs_a;
        if (level == 2) return (1.0 + std::sqrt(2.0)) * abs_a;
    }
    return 2.0 * abs_a;
}

double max_region_bound(SymmetryClass cls, int N) noexcept { return diagonal_entry(cls, N - 1) / 4.0; }

std::string LabeledEigenvalue::label() const {
    std::string s = std::to_string(level);
    if (branch == Branch::Minus) s += "-";
    if (branch == Branch::Plus) s += "+";
    return s;
}

bool LabeledEigenvalue::in_disc(double slack) const noexcept {
    return std::abs(value - disc_center) <= disc_radius + slack;
}

bool label_less(cplx x, cplx y, double tol) noexcept {
    const double scale = 1.0 + std::max(std::abs(x), std::abs(y));
    if (std::abs(x.real() - y.real()) > tol * scale) return x.real() < y.real();
    return x.imag() < y.imag();
}

namespace {

// Sort by real part, then reorder runs of equal real part by imaginary part.
void label_sort(std::vector<cplx>& v, double tol) {
    std::sort(v.begin(), v.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = i; j > 0 && label_less(v[j], v[j - 1], tol); --j) std::swap(v[j], v[j - 1]);
}

bool is_real(cplx z, double tol) { return std::abs(z.imag()) <= tol * (1.0 + std::abs(z)); }

int first_level(SymmetryClass cls) {
    switch (cls) {
        case SymmetryClass::PN: return 0;
        case SymmetryClass::PD: return 2;
        default: return 1;
    }
}

}  // namespace

std::vector<LabeledEigenvalue> class_eigenvalues(SymmetryClass cls, cplx a, int N, double region_bound,
                                                 double tol) {
    if (!(region_bound > 0.0)) throw ConfigError("region_bound must be positive");
    const TruncatedMatrix tm = build_truncated_matrix(cls, a, N);
    if (region_bound > max_region_bound(cls, N)) {
        std::ostringstream os;
        os << "truncation N=" << N << " resolves |lambda| <= " << max_region_bound(cls, N)
           << " only; requested region " << region_bound << " (raise N)";
        throw TruncationError(os.str());
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(tm.entries, false);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
    std::vector<cplx> vals(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
    label_sort(vals, tol);

    const double abs_a = std::abs(a);
    std::vector<LabeledEigenvalue> out;
    int level = first_level(cls);
    for (cplx z : vals) {
        if (std::abs(z) <= region_bound) {
            LabeledEigenvalue e{z, cls, level, Branch::None, double(level) * level, disc_radius(cls, level, abs_a)};
            out.push_back(e);
        }
        level += 2;
    }
    // Every eigenvalue must sit in the union of the class discs.
    const double slack = 1e-9;
    for (const auto& e : out) {
        bool inside = false;
        for (int l = first_level(cls); l * l <= std::abs(e.value) + 4.0 * abs_a + 4.0 * l + 16.0; l += 2) {
            if (std::abs(e.value - double(l) * l) <= disc_radius(cls, l, abs_a) + slack * (1.0 + std::abs(e.value))) {
                inside = true;
                break;
            }
        }
        if (!inside) {
            std::ostringstream os;
            os << to_string(cls) << " eigenvalue " << e.value << " escapes every localization disc (raise N)";
            throw TruncationError(os.str());
        }
    }
    return out;
}

std::vector<LabeledEigenvalue> merge_levels(const std::vector<LabeledEigenvalue>& first,
                                            const std::vector<LabeledEigenvalue>& second, cplx a, double tol) {
    std::map<int, std::vector<LabeledEigenvalue>> by_level;
    for (const auto& e : first) by_level[e.level].push_back(e);
    for (const auto& e : second) by_level[e.level].push_back(e);
    const int top = by_level.empty() ? 0 : by_level.rbegin()->first;
    const bool real_a = std::abs(a.imag()) <= tol * (1.0 + std::abs(a));

    std::vector<LabeledEigenvalue> out;
    for (auto& [level, items] : by_level) {
        if (items.size() == 1) {
            // An unpaired top level was cut by the region bound.
            if (level == top && level != 0) continue;
            out.push_back(items.front());
            continue;
        }
        if (items.size() != 2) throw NumericalFailure("more than two eigenvalues at level " + std::to_string(level));
        LabeledEigenvalue x = items[0], y = items[1];
        const double scale = 1.0 + std::abs(x.value);
        const bool both_real = is_real(x.value, tol) && is_real(y.value, tol);
        // A near-real conjugate pair that has not split visibly is legitimate;
        // two classes sharing a clearly nonreal value is not.
        const bool near_conjugate = std::abs(x.value - std::conj(y.value)) <= 10.0 * tol * scale;
        if (!both_real && !near_conjugate && std::abs(x.value - y.value) <= 10.0 * tol * scale) {
            std::ostringstream os;
            os << "eigenvalues of classes " << to_string(x.cls) << " and " << to_string(y.cls) << " coincide at level "
               << level << ": " << x.value << " vs " << y.value;
            throw DegeneracyError(os.str(), x.value, y.value);
        }
        bool x_minus;
        if (level == 2 && is_periodic(x.cls) && !real_a) {
            x_minus = x.cls == SymmetryClass::PN;
        } else if (both_real && real_a) {
            x_minus = x.value.real() <= y.value.real();
        } else {
            x_minus = label_less(x.value, y.value, tol);
        }
        if (!x_minus) std::swap(x, y);
        x.branch = Branch::Minus;
        y.branch = Branch::Plus;
        out.push_back(x);
        out.push_back(y);
    }
    return out;
}

namespace {

double default_bound(int N) { return std::min(max_region_bound(SymmetryClass::PN, N), max_region_bound(SymmetryClass::AD, N)); }

}  // namespace

std::vector<LabeledEigenvalue> periodic_eigenvalues(cplx a, int N, std::optional<double> region_bound, double tol) {
    const double bound = region_bound.value_or(default_bound(N));
    auto pn = class_eigenvalues(SymmetryClass::PN, a, N, bound, tol);
    auto pd = class_eigenvalues(SymmetryClass::PD, a, N, bound, tol);
    return merge_levels(pn, pd, a, tol);
}

std::vector<LabeledEigenvalue> antiperiodic_eigenvalues(cplx a, int N, std::optional<double> region_bound,
                                                        double tol) {
    const double bound = region_bound.value_or(default_bound(N));
    auto ad = class_eigenvalues(SymmetryClass::AD, a, N, bound, tol);
    auto an = class_eigenvalues(SymmetryClass::AN, a, N, bound, tol);
    return merge_levels(ad, an, a, tol);
}

std::vector<cplx> quasiperiodic_eigenvalues(cplx a, double t, int K) {
    if (K < 4) throw ConfigError("quasiperiodic truncation K must be at least 4");
    const int n = 2 * K + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const double shift = t / M_PI;
    for (int i = 0; i < n; ++i) {
        const double w = 2.0 * (i - K) + shift;
        m(i, i) = w * w;
        if (i + 1 < n) {
            m(i, i + 1) = a;
            m(i + 1, i) = a;
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
    std::vector<cplx> vals(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    label_sort(vals, kDefaultTol);
    return vals;
}

}  // namespace operator_model
}  // namespace ptband
