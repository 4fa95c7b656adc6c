#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ptband/band_structure.hpp"
#include "ptband/criticality.hpp"
#include "ptband/discriminant.hpp"
#include "ptband/operator_model.hpp"

/// JSON and CSV renderings of library results. Complex numbers are {re, im}
/// objects in JSON and re/im column pairs in CSV; every number carries at
/// most 12 significant digits so identical inputs give identical bytes.
namespace ptband::serialize {

using Json = nlohmann::ordered_json;

enum class Format { Json, Csv };
Format format_from_string(const std::string& s);

inline constexpr int kSchemaVersion = 1;

/// Number rounded to 12 significant digits; NaN and infinities become null.
Json number(double x);
Json complex(cplx z);
std::string csv_number(double x);

/// Common header: schema version, command name and the coupling.
Json header(const std::string& command, cplx a);

Json eigenvalue_json(const operator_model::LabeledEigenvalue& e);

struct SpectrumData {
    cplx a;
    int trunc_N = 0;
    std::vector<operator_model::LabeledEigenvalue> periodic, antiperiodic;
};
Json spectrum_json(const SpectrumData& d);
std::string spectrum_csv(const SpectrumData& d);

struct BandsData {
    cplx a;
    std::string phase;
    int n_max = 0;
    int t_steps = 0;
    std::vector<band_structure::Band> bands;
    std::vector<band_structure::RealComponent> components;
    std::vector<band_structure::SpectralSingularity> singularities;
};
Json bands_json(const BandsData& d);
std::string bands_csv(const BandsData& d);

Json critical_json(const criticality::CriticalPoint& cp);
std::string critical_csv(const criticality::CriticalPoint& cp);

struct DiscriminantData {
    cplx a;
    discriminant::Monodromy m;
    cplx F_prime;
    bool real_lambda = false;
    bool in_spectrum = false;
};
Json discriminant_json(const DiscriminantData& d);
std::string discriminant_csv(const DiscriminantData& d);

Json report_json(const band_structure::PropertyReport& r);
std::string report_csv(const band_structure::PropertyReport& r);

/// {"error": {"kind", "type", "message", ...}} for a library error.
Json error_json(const Error& e);
Json usage_error_json(const std::string& message);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace ptband::serialize
