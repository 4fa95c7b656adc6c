#include "ptband/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ptband::serialize {

Format format_from_string(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw ConfigError("unknown output format '" + s + "' (expected json or csv)");
}

namespace {

std::string g12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string branch_string(operator_model::Branch b) {
    switch (b) {
        case operator_model::Branch::Minus: return "-";
        case operator_model::Branch::Plus: return "+";
        case operator_model::Branch::None: break;
    }
    return "";
}

}  // namespace

Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    // Round through the 12-digit decimal form; the shortest repr of the result
    // that the JSON writer emits has at most 12 digits.
    double r = std::strtod(g12(x).c_str(), nullptr);
    if (r == 0.0) r = 0.0;  // drop negative zero
    return r;
}

namespace {

// Bracket ends are rounded outward so the printed interval still contains the computed one.
Json number_outward(double x, bool down) {
    if (!std::isfinite(x) || x == 0.0) return number(x);
    double r = std::strtod(g12(x).c_str(), nullptr);
    const double unit = std::pow(10.0, std::floor(std::log10(std::abs(x))) - 11.0);
    if (down && r > x) r = std::strtod(g12(r - unit).c_str(), nullptr);
    if (!down && r < x) r = std::strtod(g12(r + unit).c_str(), nullptr);
    return r;
}

Json interval(double lo, double hi) { return Json{{"lo", number_outward(lo, true)}, {"hi", number_outward(hi, false)}}; }

}  // namespace

Json complex(cplx z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

std::string csv_number(double x) {
    if (!std::isfinite(x)) return "";
    if (x == 0.0) return "0";
    return g12(x);
}

Json header(const std::string& command, cplx a) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["a"] = complex(a);
    j["V"] = number(operator_model::PotentialSpec::from_a(a).V);
    return j;
}

Json eigenvalue_json(const operator_model::LabeledEigenvalue& e) {
    return Json{{"label", e.label()},
                {"class", std::string(operator_model::to_string(e.cls))},
                {"level", e.level},
                {"branch", branch_string(e.branch)},
                {"value", complex(e.value)},
                {"disc", Json{{"center", number(e.disc_center)}, {"radius", number(e.disc_radius)}}}};
}

Json spectrum_json(const SpectrumData& d) {
    Json j = header("spectrum", d.a);
    j["trunc_N"] = d.trunc_N;
    Json p = Json::array(), ap = Json::array();
    for (const auto& e : d.periodic) p.push_back(eigenvalue_json(e));
    for (const auto& e : d.antiperiodic) ap.push_back(eigenvalue_json(e));
    j["periodic"] = std::move(p);
    j["antiperiodic"] = std::move(ap);
    return j;
}

std::string spectrum_csv(const SpectrumData& d) {
    std::ostringstream os;
    os << "set,label,class,level,re,im,disc_center,disc_radius\n";
    auto rows = [&](const char* set, const std::vector<operator_model::LabeledEigenvalue>& v) {
        for (const auto& e : v)
            os << set << ',' << e.label() << ',' << operator_model::to_string(e.cls) << ',' << e.level << ','
               << csv_number(e.value.real()) << ',' << csv_number(e.value.imag()) << ',' << csv_number(e.disc_center)
               << ',' << csv_number(e.disc_radius) << '\n';
    };
    rows("periodic", d.periodic);
    rows("antiperiodic", d.antiperiodic);
    return os.str();
}

namespace {

Json component_json(const band_structure::RealComponent& c) {
    return Json{{"index", c.index}, {"lo", number(c.lo)}, {"hi", number(c.hi)}, {"degenerate", c.degenerate}};
}

Json singularity_json(const band_structure::SpectralSingularity& s) {
    return Json{{"n", s.n},
                {"Lambda", number(s.Lambda)},
                {"t_n", number(s.t_n)},
                {"degenerate", s.degenerate},
                {"F", number(s.F_value)},
                {"F_prime", number(s.F_prime)}};
}

}  // namespace

Json bands_json(const BandsData& d) {
    Json j = header("bands", d.a);
    j["phase"] = d.phase;
    j["n_max"] = d.n_max;
    j["t_steps"] = d.t_steps;
    Json bands = Json::array();
    for (const auto& b : d.bands) {
        Json jb;
        jb["index"] = b.index;
        jb["endpoint_0"] = eigenvalue_json(b.endpoint_0);
        jb["endpoint_pi"] = eigenvalue_json(b.endpoint_pi);
        jb["real_until"] = b.real_until ? number(*b.real_until) : Json(nullptr);
        Json samples = Json::array();
        for (const auto& p : b.samples) samples.push_back(Json{{"t", number(p.t)}, {"mu", complex(p.mu)}});
        jb["samples"] = std::move(samples);
        bands.push_back(std::move(jb));
    }
    j["bands"] = std::move(bands);
    Json comps = Json::array(), sings = Json::array();
    for (const auto& c : d.components) comps.push_back(component_json(c));
    for (const auto& s : d.singularities) sings.push_back(singularity_json(s));
    j["components"] = std::move(comps);
    j["singularities"] = std::move(sings);
    return j;
}

std::string bands_csv(const BandsData& d) {
    std::ostringstream os;
    os << "band,t,mu_re,mu_im\n";
    for (const auto& b : d.bands)
        for (const auto& p : b.samples)
            os << b.index << ',' << csv_number(p.t) << ',' << csv_number(p.mu.real()) << ',' << csv_number(p.mu.imag())
               << '\n';
    os << "\ncomponent,lo,hi,degenerate\n";
    for (const auto& c : d.components)
        os << c.index << ',' << csv_number(c.lo) << ',' << csv_number(c.hi) << ',' << (c.degenerate ? 1 : 0) << '\n';
    os << "\nsingularity,Lambda,t_n,degenerate,F,F_prime\n";
    for (const auto& s : d.singularities)
        os << s.n << ',' << csv_number(s.Lambda) << ',' << csv_number(s.t_n) << ',' << (s.degenerate ? 1 : 0) << ','
           << csv_number(s.F_value) << ',' << csv_number(s.F_prime) << '\n';
    return os.str();
}

Json critical_json(const criticality::CriticalPoint& cp) {
    Json j = header("critical", cplx(0.0, cp.r));
    j["k"] = cp.k;
    j["V_k"] = number(cp.V_k);
    j["r"] = number(cp.r);
    j["a_squared"] = number(-cp.r * cp.r);
    j["bracket"] = interval(cp.bracket_lo, cp.bracket_hi);
    j["r_bracket"] = interval(cp.r_lo, cp.r_hi);
    j["a_squared_bracket"] = interval(-cp.r_hi * cp.r_hi, -cp.r_lo * cp.r_lo);
    j["width"] = number(cp.bracket_hi - cp.bracket_lo);
    j["pair"] = Json::array({cp.pair_lo, cp.pair_hi});
    if (cp.check) {
        j["check"] = Json{{"lambda", complex(cp.check->lambda)},
                          {"F", complex(cp.check->F)},
                          {"F_prime", complex(cp.check->F_prime)},
                          {"passed", cp.check->passed}};
    } else {
        j["check"] = nullptr;
    }
    return j;
}

std::string critical_csv(const criticality::CriticalPoint& cp) {
    std::ostringstream os;
    os << "k,V_k,V_lo,V_hi,r,r_lo,r_hi,pair_lo,pair_hi,check_passed\n";
    os << cp.k << ',' << csv_number(cp.V_k) << ',' << csv_number(cp.bracket_lo) << ',' << csv_number(cp.bracket_hi)
       << ',' << csv_number(cp.r) << ',' << csv_number(cp.r_lo) << ',' << csv_number(cp.r_hi) << ',' << cp.pair_lo
       << ',' << cp.pair_hi << ',' << (cp.check ? (cp.check->passed ? "1" : "0") : "") << '\n';
    return os.str();
}

Json discriminant_json(const DiscriminantData& d) {
    Json j = header("discriminant", d.a);
    j["lambda"] = complex(d.m.lambda);
    j["F"] = complex(d.m.F());
    j["F_prime"] = complex(d.F_prime);
    j["monodromy"] = Json{{"theta", complex(d.m.theta_pi)},
                          {"theta_prime", complex(d.m.theta_prime_pi)},
                          {"phi", complex(d.m.phi_pi)},
                          {"phi_prime", complex(d.m.phi_prime_pi)}};
    j["wronskian"] = complex(d.m.wronskian());
    j["in_spectrum"] = d.real_lambda ? Json(d.in_spectrum) : Json(nullptr);
    return j;
}

std::string discriminant_csv(const DiscriminantData& d) {
    std::ostringstream os;
    os << "lambda_re,lambda_im,F_re,F_im,F_prime_re,F_prime_im,wronskian_re,wronskian_im,in_spectrum\n";
    const cplx w = d.m.wronskian(), F = d.m.F();
    os << csv_number(d.m.lambda.real()) << ',' << csv_number(d.m.lambda.imag()) << ',' << csv_number(F.real()) << ','
       << csv_number(F.imag()) << ',' << csv_number(d.F_prime.real()) << ',' << csv_number(d.F_prime.imag()) << ','
       << csv_number(w.real()) << ',' << csv_number(w.imag()) << ',' << (d.real_lambda ? (d.in_spectrum ? "1" : "0") : "")
       << '\n';
    return os.str();
}

Json report_json(const band_structure::PropertyReport& r) {
    Json j = header("verify", r.a);
    j["phase"] = r.phase;
    j["n_max"] = r.n_max;
    j["passed"] = r.all_passed();
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name},
                              {"passed", c.passed},
                              {"value", number(c.value)},
                              {"threshold", number(c.threshold)},
                              {"resolved", c.resolved},
                              {"detail", c.detail}});
    j["checks"] = std::move(checks);
    Json comps = Json::array(), sings = Json::array();
    for (const auto& c : r.components) comps.push_back(component_json(c));
    for (const auto& s : r.singularities) sings.push_back(singularity_json(s));
    j["components"] = std::move(comps);
    j["singularities"] = std::move(sings);
    return j;
}

std::string report_csv(const band_structure::PropertyReport& r) {
    std::ostringstream os;
    os << "check,passed,resolved,value,threshold,detail\n";
    for (const auto& c : r.checks) {
        std::string detail = c.detail;
        for (auto& ch : detail)
            if (ch == '"') ch = '\'';
        os << c.name << ',' << (c.passed ? 1 : 0) << ',' << (c.resolved ? 1 : 0) << ',' << csv_number(c.value) << ',' << csv_number(c.threshold) << ",\""
           << detail << "\"\n";
    }
    return os.str();
}

Json error_json(const Error& e) {
    Json err{{"kind", to_string(e.kind())}, {"type", e.tag()}, {"message", e.what()}};
    if (auto* t = dynamic_cast<const TracingError*>(&e)) err["t_interval"] = Json::array({number(t->t_lo()), number(t->t_hi())});
    if (auto* n = dynamic_cast<const NotFoundError*>(&e)) err["searched"] = Json::array({number(n->lo()), number(n->hi())});
    if (auto* i = dynamic_cast<const IntegrationFailure*>(&e)) err["lambda"] = complex(i->lambda());
    if (auto* d = dynamic_cast<const DegeneracyError*>(&e)) err["pair"] = Json::array({complex(d->first()), complex(d->second())});
    if (auto* s = dynamic_cast<const SingularityError*>(&e)) err["pole"] = number(s->pole());
    return Json{{"error", std::move(err)}};
}

Json usage_error_json(const std::string& message) {
    return Json{{"error", Json{{"kind", "usage"}, {"type", "usage"}, {"message", message}}}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ptband::serialize
