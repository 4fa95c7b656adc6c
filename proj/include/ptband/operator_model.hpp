#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ptband/errors.hpp"

/// Potential family 4cos^2 x + 4iV sin 2x, its reduction to the complex
/// Mathieu coupling a, and truncated Fourier matrices for the periodic and
/// antiperiodic problems split by parity.
namespace ptband::operator_model {

enum class SymmetryClass { PN, PD, AD, AN };

std::string_view to_string(SymmetryClass c) noexcept;
SymmetryClass symmetry_class_from_string(std::string_view s);
inline bool is_periodic(SymmetryClass c) noexcept { return c == SymmetryClass::PN || c == SymmetryClass::PD; }

enum class Origin { FromV, FromA };

struct PotentialSpec {
    double V = 0.0;
    cplx a{1.0, 0.0};
    Origin origin = Origin::FromV;

    static PotentialSpec from_V(double V);
    /// V is only meaningful when a^2 is real and <= 1; otherwise it is NaN.
    static PotentialSpec from_a(cplx a);
};

/// a = sqrt(1 - 4V^2), principal branch (a = i*sqrt(4V^2-1) above V = 1/2).
cplx a_from_V(double V);
/// V = sqrt(1 - a^2)/2. Requires a^2 real and <= 1.
double V_from_a(cplx a);

inline constexpr int kMinTruncation = 8;
inline constexpr int kDefaultTruncation = 32;
inline constexpr double kDefaultTol = 1e-9;

struct TruncatedMatrix {
    SymmetryClass cls;
    cplx a;
    int N;
    Eigen::MatrixXcd entries;
};

TruncatedMatrix build_truncated_matrix(SymmetryClass cls, cplx a, int N);

/// Diagonal entry of row k (0-based) for the given class.
double diagonal_entry(SymmetryClass cls, int k) noexcept;

enum class Branch { None, Minus, Plus };

struct LabeledEigenvalue {
    cplx value;
    SymmetryClass cls;
    int level = 0;  ///< n in lambda_n: the eigenvalue sits near n^2
    Branch branch = Branch::None;
    double disc_center = 0.0;
    double disc_radius = 0.0;

    /// "0", "2-", "1+", ... ; a bare level when the branch is not assigned.
    std::string label() const;
    bool in_disc(double slack = 0.0) const noexcept;
};

/// Localization disc radius for the given class and level at coupling |a|.
double disc_radius(SymmetryClass cls, int level, double abs_a) noexcept;

/// Largest region bound that the truncation rule accepts for N modes.
double max_region_bound(SymmetryClass cls, int N) noexcept;

/// Eigenvalues of one parity class with |lambda| <= region_bound, sorted by
/// real part (imaginary part breaking ties) and assigned consecutive levels.
std::vector<LabeledEigenvalue> class_eigenvalues(SymmetryClass cls, cplx a, int N, double region_bound,
                                                 double tol = kDefaultTol);

/// Merge two class lists (PN with PD, or AD with AN) level by level and assign
/// the -/+ branches. Throws DegeneracyError when two members of one level
/// coincide without both being real.
std::vector<LabeledEigenvalue> merge_levels(const std::vector<LabeledEigenvalue>& first,
                                            const std::vector<LabeledEigenvalue>& second, cplx a,
                                            double tol = kDefaultTol);

/// lambda_0, lambda_2-, lambda_2+, lambda_4-, ... in that order.
std::vector<LabeledEigenvalue> periodic_eigenvalues(cplx a, int N = kDefaultTruncation,
                                                    std::optional<double> region_bound = std::nullopt,
                                                    double tol = kDefaultTol);

/// lambda_1-, lambda_1+, lambda_3-, lambda_3+, ... in that order.
std::vector<LabeledEigenvalue> antiperiodic_eigenvalues(cplx a, int N = kDefaultTruncation,
                                                        std::optional<double> region_bound = std::nullopt,
                                                        double tol = kDefaultTol);

/// Eigenvalues of the t-quasiperiodic problem from the exponential basis
/// e^{i(2k + t/pi)x}, k = -K..K; sorted by real part. Floquet plumbing used as
/// a seed generator and cross-check, not as the authority.
std::vector<cplx> quasiperiodic_eigenvalues(cplx a, double t, int K = kDefaultTruncation);

/// Strict-weak order used for labeling: by real part, then imaginary part.
/// Real parts closer than tol*(1+|z|) count as equal.
bool label_less(cplx x, cplx y, double tol = kDefaultTol) noexcept;

}  // namespace ptband::operator_model
