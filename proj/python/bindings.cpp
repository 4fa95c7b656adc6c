#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptband/band_structure.hpp"
#include "ptband/criticality.hpp"
#include "ptband/discriminant.hpp"
#include "ptband/operator_model.hpp"
#include "ptband/series_cf.hpp"

namespace py = pybind11;
using namespace ptband;

namespace {

py::dict eigenvalue(const operator_model::LabeledEigenvalue& e) {
    py::dict d;
    d["label"] = e.label();
    d["class"] = std::string(operator_model::to_string(e.cls));
    d["level"] = e.level;
    d["value"] = e.value;
    d["disc_center"] = e.disc_center;
    d["disc_radius"] = e.disc_radius;
    return d;
}

py::list eigenvalues(const std::vector<operator_model::LabeledEigenvalue>& v) {
    py::list out;
    for (const auto& e : v) out.append(eigenvalue(e));
    return out;
}

py::dict singularity(const band_structure::SpectralSingularity& s) {
    py::dict d;
    d["n"] = s.n;
    d["Lambda"] = s.Lambda;
    d["t_n"] = s.t_n;
    d["degenerate"] = s.degenerate;
    d["F"] = s.F_value;
    d["F_prime"] = s.F_prime;
    return d;
}

py::dict component(const band_structure::RealComponent& c) {
    py::dict d;
    d["index"] = c.index;
    d["lo"] = c.lo;
    d["hi"] = c.hi;
    d["degenerate"] = c.degenerate;
    return d;
}

py::dict critical(const criticality::CriticalPoint& cp) {
    py::dict d;
    d["k"] = cp.k;
    d["V_k"] = cp.V_k;
    d["r"] = cp.r;
    d["bracket"] = py::make_tuple(cp.bracket_lo, cp.bracket_hi);
    d["r_bracket"] = py::make_tuple(cp.r_lo, cp.r_hi);
    d["pair"] = py::make_tuple(cp.pair_lo, cp.pair_hi);
    if (cp.check) {
        py::dict c;
        c["lambda"] = cp.check->lambda;
        c["F"] = cp.check->F;
        c["F_prime"] = cp.check->F_prime;
        c["passed"] = cp.check->passed;
        d["check"] = c;
    } else {
        d["check"] = py::none();
    }
    return d;
}

band_structure::TraceOptions trace_opts(int t_steps, int trunc_N, int threads) {
    band_structure::TraceOptions o;
    o.t_steps = t_steps;
    o.trunc_N = trunc_N;
    o.threads = threads;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Band spectrum of the PT-symmetric Hill operator -y'' + 2a cos(2x) y";

    // Python exception hierarchy mirrors the C++ error kinds.
    static py::exception<Error> base(m, "PtbandError");
    static py::exception<DomainError> domain(m, "DomainError", base.ptr());
    static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
    static py::exception<ModelViolation> model(m, "ModelViolation", base.ptr());
    static py::exception<NumericalFailure> numerical(m, "NumericalFailure", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::Domain: py::set_error(domain, e.what()); return;
                case ErrorKind::Configuration: py::set_error(config, e.what()); return;
                case ErrorKind::ModelViolation: py::set_error(model, e.what()); return;
                case ErrorKind::Numerical: py::set_error(numerical, e.what()); return;
            }
        }
    });

    m.def("a_from_V", &operator_model::a_from_V, py::arg("V"));
    m.def("V_from_a", &operator_model::V_from_a, py::arg("a"));

    m.def(
        "periodic_eigenvalues",
        [](cplx a, int N) { return eigenvalues(operator_model::periodic_eigenvalues(a, N)); }, py::arg("a"),
        py::arg("N") = operator_model::kDefaultTruncation);
    m.def(
        "antiperiodic_eigenvalues",
        [](cplx a, int N) { return eigenvalues(operator_model::antiperiodic_eigenvalues(a, N)); }, py::arg("a"),
        py::arg("N") = operator_model::kDefaultTruncation);

    m.def(
        "hill_discriminant",
        [](cplx a, cplx lambda) {
            const auto d = discriminant::hill_discriminant(a, lambda);
            return py::make_tuple(d.F, d.F_prime);
        },
        py::arg("a"), py::arg("lambda_"), "(F, F') at lambda");
    m.def(
        "bloch_roots",
        [](cplx a, double t, std::tuple<double, double, double, double> box) {
            auto [r0, r1, i0, i1] = box;
            return discriminant::bloch_roots(a, t, {r0, r1, i0, i1});
        },
        py::arg("a"), py::arg("t"), py::arg("region"), "roots of F = 2 cos t in (re_min, re_max, im_min, im_max)");

    m.def("roots_P", &series_cf::roots_P, py::arg("a_squared"));
    m.def(
        "characteristic_N",
        [](cplx a, cplx lambda) {
            const auto e = series_cf::characteristic_N(a, lambda);
            return py::make_tuple(e.N_val, e.N_d1, e.N_d2);
        },
        py::arg("a"), py::arg("lambda_"), "(N, N', N'') for |a| < 2, |lambda| <= 9");

    m.def("find_V2", [](double tol_V) { return critical(criticality::find_V2(tol_V)); }, py::arg("tol_V") = 1e-12);
    m.def(
        "find_Vk",
        [](int k, double tol_V, double V_max) {
            criticality::SearchOptions so;
            so.V_max = V_max;
            return critical(criticality::find_Vk(k, tol_V, so));
        },
        py::arg("k"), py::arg("tol_V") = 1e-12, py::arg("V_max") = criticality::SearchOptions{}.V_max);

    m.def("phase_of", &band_structure::phase_of, py::arg("a"));
    m.def(
        "trace_bands",
        [](cplx a, int n_max, int t_steps, int trunc_N, int threads) {
            std::vector<band_structure::Band> bands;
            {
                py::gil_scoped_release release;
                bands = band_structure::trace_bands(a, n_max, trace_opts(t_steps, trunc_N, threads));
            }
            py::list out;
            for (const auto& b : bands) {
                py::dict d;
                d["index"] = b.index;
                std::vector<double> t;
                std::vector<cplx> mu;
                for (const auto& p : b.samples) {
                    t.push_back(p.t);
                    mu.push_back(p.mu);
                }
                d["t"] = t;
                d["mu"] = mu;
                d["endpoint_0"] = eigenvalue(b.endpoint_0);
                d["endpoint_pi"] = eigenvalue(b.endpoint_pi);
                d["real_until"] = b.real_until ? py::cast(*b.real_until) : py::none();
                d["singularity"] = b.singularity ? py::object(singularity(*b.singularity)) : py::none();
                out.append(d);
            }
            return out;
        },
        py::arg("a"), py::arg("n_max") = 4, py::arg("t_steps") = 256, py::arg("trunc_N") = operator_model::kDefaultTruncation,
        py::arg("threads") = 1);
    m.def(
        "real_components",
        [](cplx a, int n_max) {
            py::list out;
            for (const auto& c : band_structure::real_components(a, n_max)) out.append(component(c));
            return out;
        },
        py::arg("a"), py::arg("n_max"));
    m.def(
        "find_singularity", [](cplx a, int n) { return singularity(band_structure::find_singularity(a, n)); },
        py::arg("a"), py::arg("n"));
    m.def(
        "verify_properties",
        [](cplx a, int n_max, int t_steps, int threads) {
            band_structure::PropertyReport rep;
            {
                py::gil_scoped_release release;
                rep = band_structure::verify_properties(a, n_max, trace_opts(t_steps, operator_model::kDefaultTruncation, threads));
            }
            py::dict d;
            d["phase"] = rep.phase;
            d["passed"] = rep.all_passed();
            py::list checks;
            for (const auto& c : rep.checks) {
                py::dict x;
                x["name"] = c.name;
                x["passed"] = c.passed;
                x["resolved"] = c.resolved;
                x["value"] = c.value;
                x["threshold"] = c.threshold;
                x["detail"] = c.detail;
                checks.append(x);
            }
            d["checks"] = checks;
            return d;
        },
        py::arg("a"), py::arg("n_max") = 3, py::arg("t_steps") = 256, py::arg("threads") = 1);
}
