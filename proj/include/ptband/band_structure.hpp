#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptband/discriminant.hpp"
#include "ptband/errors.hpp"
#include "ptband/operator_model.hpp"

/// Bloch bands mu_n(t) over t in [0, pi], the real spectral components, the
/// interior double points where two bands meet, and a property report.
namespace ptband::band_structure {

using discriminant::BlochPoint;
using operator_model::LabeledEigenvalue;

struct SpectralSingularity {
    double Lambda = 0.0;  ///< double Bloch eigenvalue
    double t_n = 0.0;     ///< quasimomentum in (0, pi); 0 when degenerate
    int n = 0;            ///< joins bands 2n-1 and 2n
    bool degenerate = false;
    double F_value = 0.0;
    double F_prime = 0.0;
};

struct RealComponent {
    int index = 0;
    double lo = 0.0;  ///< lambda_{2n-2}+
    double hi = 0.0;  ///< lambda_{2n}-
    bool degenerate = false;
};

struct Band {
    int index = 0;
    std::vector<BlochPoint> samples;
    LabeledEigenvalue endpoint_0;
    LabeledEigenvalue endpoint_pi;
    std::optional<double> real_until;
    std::optional<SpectralSingularity> singularity;
};

struct TraceOptions {
    int t_steps = 256;
    double min_step = 1e-5 * M_PI;
    std::vector<double> extra_t;
    int threads = 1;
    int trunc_N = operator_model::kDefaultTruncation;
    double tol = discriminant::kDefaultTol;
};

/// Bands 1..n_max. Requires a = ic with 0 < c < 2, or real a in (0, 2].
std::vector<Band> trace_bands(cplx a, int n_max, const TraceOptions& opts = {});

/// Real components I_1..I_{n_max}; the first is degenerate at the critical
/// coupling and absent past it. Requires a = ic with 0 < c < 2.
std::vector<RealComponent> real_components(cplx a, int n_max);

/// Double point of bands 2n-1 and 2n inside I_n.
SpectralSingularity find_singularity(cplx a, int n);

/// Phase label for a: "real", "Case1", "Case2" or "Case3".
std::string phase_of(cplx a);

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< measured quantity
    double threshold = 0.0;  ///< limit it was compared against
    std::string detail;
    /// False when the quantity is below double-precision resolution; such
    /// checks are reported but do not count towards all_passed().
    bool resolved = true;
};

struct PropertyReport {
    cplx a;
    std::string phase;
    int n_max = 0;
    std::vector<RealComponent> components;
    std::vector<SpectralSingularity> singularities;
    std::vector<PropertyCheck> checks;

    bool all_passed() const;
};

/// Runs the band and spectrum checks appropriate to the phase of a.
PropertyReport verify_properties(cplx a, int n_max, const TraceOptions& opts = {});

/// Whether two polyline segments p0-p1 and q0-q1 cross (shared endpoints excluded).
bool segments_intersect(cplx p0, cplx p1, cplx q0, cplx q1);

}  // namespace ptband::band_structure
