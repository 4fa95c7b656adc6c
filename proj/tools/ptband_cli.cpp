// ptband: spectrum, bands, critical couplings and property checks for
// -y'' + 2a cos(2x) y = lambda y, written as JSON or CSV.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "ptband/band_structure.hpp"
#include "ptband/criticality.hpp"
#include "ptband/discriminant.hpp"
#include "ptband/operator_model.hpp"
#include "ptband/serialize.hpp"

namespace {

using namespace ptband;
namespace ser = ptband::serialize;

enum Exit { kOk = 0, kUsage = 2, kModel = 3, kNumerical = 4 };

struct RunConfig {
    std::string command;
    std::optional<double> V, a_imag;
    int n_max = 6;
    bool n_max_given = false;
    int t_steps = 256;
    int trunc_N = operator_model::kDefaultTruncation;
    double tol = discriminant::kDefaultTol;
    std::string format = "json";
    std::string output;
    int k = 0;
    std::optional<double> lambda;
    double lambda_im = 0.0;
    double V_max = criticality::SearchOptions{}.V_max;
};

cplx coupling(const RunConfig& c) {
    if (c.V.has_value() == c.a_imag.has_value()) throw ConfigError("exactly one of --V and --a-imag is required");
    if (c.V) {
        if (!(*c.V >= 0.0)) throw DomainError("--V must be non-negative");
        return operator_model::a_from_V(*c.V);
    }
    return cplx(0.0, *c.a_imag);
}

int threads_from_env() {
    if (const char* s = std::getenv("PTBAND_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || n < 1 || n > 256) throw ConfigError("PTBAND_THREADS must be an integer in [1, 256]");
        return int(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

band_structure::TraceOptions trace_options(const RunConfig& c) {
    band_structure::TraceOptions o;
    o.t_steps = c.t_steps;
    o.trunc_N = c.trunc_N;
    o.tol = c.tol;
    o.threads = threads_from_env();
    return o;
}

struct Output {
    ser::Json json;
    std::string csv;
    int code = kOk;
};

Output run_spectrum(const RunConfig& c) {
    ser::SpectrumData d{coupling(c), c.trunc_N, {}, {}};
    d.periodic = operator_model::periodic_eigenvalues(d.a, c.trunc_N);
    d.antiperiodic = operator_model::antiperiodic_eigenvalues(d.a, c.trunc_N);
    if (c.n_max_given) {
        if (int(d.periodic.size()) > c.n_max) d.periodic.resize(c.n_max);
        if (int(d.antiperiodic.size()) > c.n_max) d.antiperiodic.resize(c.n_max);
    }
    return {ser::spectrum_json(d), ser::spectrum_csv(d)};
}

Output run_bands(const RunConfig& c) {
    ser::BandsData d;
    d.a = coupling(c);
    d.phase = band_structure::phase_of(d.a);
    d.n_max = c.n_max;
    d.t_steps = c.t_steps;
    d.bands = band_structure::trace_bands(d.a, c.n_max, trace_options(c));
    if (d.phase != "real") {
        d.components = band_structure::real_components(d.a, std::max(1, (c.n_max + 1) / 2));
        for (const auto& b : d.bands)
            if (b.singularity && (d.singularities.empty() || d.singularities.back().n != b.singularity->n))
                d.singularities.push_back(*b.singularity);
    }
    return {ser::bands_json(d), ser::bands_csv(d)};
}

Output run_critical(const RunConfig& c) {
    criticality::SearchOptions so;
    so.V_max = c.V_max;
    const double tol_V = std::max(c.tol, 1e-12);
    const auto cp = c.k == 2 ? criticality::find_V2(tol_V) : criticality::find_Vk(c.k, tol_V, so);
    return {ser::critical_json(cp), ser::critical_csv(cp)};
}

Output run_discriminant(const RunConfig& c) {
    if (!c.lambda) throw ConfigError("--lambda is required");
    ser::DiscriminantData d;
    d.a = coupling(c);
    const cplx lambda(*c.lambda, c.lambda_im);
    d.m = discriminant::monodromy(d.a, lambda, c.tol);
    d.F_prime = discriminant::hill_discriminant(d.a, lambda, c.tol).F_prime;
    d.real_lambda = c.lambda_im == 0.0;
    if (d.real_lambda) d.in_spectrum = discriminant::real_spectrum_membership(d.a, *c.lambda);
    return {ser::discriminant_json(d), ser::discriminant_csv(d)};
}

Output run_verify(const RunConfig& c) {
    const auto rep = band_structure::verify_properties(coupling(c), c.n_max, trace_options(c));
    return {ser::report_json(rep), ser::report_csv(rep), rep.all_passed() ? kOk : kModel};
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Domain:
        case ErrorKind::Configuration: return kUsage;
        case ErrorKind::ModelViolation: return kModel;
        case ErrorKind::Numerical: return kNumerical;
    }
    return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band spectrum of the PT-symmetric Hill operator -y'' + 2a cos(2x) y"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_coupling = [&](CLI::App* sub) {
        auto* v = sub->add_option("--V", cfg.V, "optical strength V >= 0; a = sqrt(1 - 4V^2)");
        auto* ai = sub->add_option("--a-imag", cfg.a_imag, "imaginary coupling c, a = ic");
        v->excludes(ai);
        ai->excludes(v);
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--trunc-N", cfg.trunc_N, "matrix truncation size (>= 8)");
        sub->add_option("--tol", cfg.tol, "integrator / bracket tolerance");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", cfg.output, "write to this file instead of stdout");
    };
    auto add_bands = [&](CLI::App* sub) {
        sub->add_option("--n-max", cfg.n_max, "number of bands (1..12)");
        sub->add_option("--t-steps", cfg.t_steps, "uniform quasimomentum steps (>= 64)");
    };

    auto* spectrum = app.add_subcommand("spectrum", "periodic and antiperiodic eigenvalues");
    add_coupling(spectrum);
    add_common(spectrum);
    auto* n_opt = spectrum->add_option("--n-max", cfg.n_max, "list only the first n eigenvalues of each kind");

    auto* bands = app.add_subcommand("bands", "Bloch bands, real components and singularities");
    add_coupling(bands);
    add_common(bands);
    add_bands(bands);

    auto* critical = app.add_subcommand("critical", "critical strength V_k");
    critical->add_option("--k", cfg.k, "index 1..6")->required()->check(CLI::Range(1, 6));
    critical->add_option("--V-max", cfg.V_max, "upper end of the V scan");
    add_common(critical);

    auto* disc = app.add_subcommand("discriminant", "Hill discriminant and monodromy at lambda");
    add_coupling(disc);
    add_common(disc);
    disc->add_option("--lambda", cfg.lambda, "spectral parameter (real part)")->required();
    disc->add_option("--lambda-im", cfg.lambda_im, "imaginary part of lambda");

    auto* verify = app.add_subcommand("verify", "band and spectrum property checks");
    add_coupling(verify);
    add_common(verify);
    add_bands(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << ser::dump(ser::usage_error_json(e.what()));
        return kUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.n_max_given = n_opt->count() > 0;

    Output out;
    try {
        ser::format_from_string(cfg.format);
        threads_from_env();
        if (cfg.command == "spectrum") out = run_spectrum(cfg);
        else if (cfg.command == "bands") out = run_bands(cfg);
        else if (cfg.command == "critical") out = run_critical(cfg);
        else if (cfg.command == "discriminant") out = run_discriminant(cfg);
        else out = run_verify(cfg);
    } catch (const Error& e) {
        std::cerr << ser::dump(ser::error_json(e));
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << ser::dump(ser::Json{{"error", ser::Json{{"kind", "numerical"}, {"type", "internal"}, {"message", e.what()}}}});
        return kNumerical;
    }

    const std::string text = cfg.format == "csv" ? out.csv : ser::dump(out.json);
    if (cfg.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f || !(f << text)) {
            std::cerr << ser::dump(ser::usage_error_json("cannot write " + cfg.output));
            return kUsage;
        }
    }
    return out.code;
}
