#include <doctest.h>

#include <cmath>
#include <limits>

#include "ptband/serialize.hpp"

using namespace ptband;
using namespace ptband::serialize;

TEST_CASE("numbers carry 12 significant digits") {
    CHECK(number(0.1 + 0.2).dump() == "0.3");
    CHECK(number(1.0 / 3.0).dump() == "0.333333333333");
    CHECK(number(-0.0).dump() == "0.0");
    CHECK(number(std::nan("")).is_null());
    CHECK(number(std::numeric_limits<double>::infinity()).is_null());
    CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
    CHECK(csv_number(-0.0) == "0");
    CHECK(csv_number(std::nan("")).empty());
}

TEST_CASE("complex values") {
    const auto j = complex(cplx(1.5, -2.0));
    CHECK(j["re"] == 1.5);
    CHECK(j["im"] == -2.0);
    CHECK(j.dump() == R"({"re":1.5,"im":-2.0})");
}

TEST_CASE("header") {
    const auto h = header("spectrum", operator_model::a_from_V(0.5));
    CHECK(h["schema_version"] == kSchemaVersion);
    CHECK(h["command"] == "spectrum");
    CHECK(h["V"] == 0.5);
}

TEST_CASE("spectrum output") {
    SpectrumData d;
    d.a = operator_model::a_from_V(0.7);
    d.trunc_N = 32;
    d.periodic = operator_model::periodic_eigenvalues(d.a, 32);
    d.antiperiodic = operator_model::antiperiodic_eigenvalues(d.a, 32);
    const auto csv = spectrum_csv(d);
    CHECK(csv.rfind("set,label,class,level,re,im,disc_center,disc_radius\n", 0) == 0);
    CHECK(csv.find("periodic,0,PN,0,") != std::string::npos);
    const auto j = spectrum_json(d);
    CHECK(j["periodic"][0]["label"] == "0");
    CHECK(j["antiperiodic"][0]["branch"] == "-");
    CHECK(dump(j) == dump(spectrum_json(d)));
    CHECK(dump(j).back() == '\n');
}

TEST_CASE("format names") {
    CHECK(format_from_string("json") == Format::Json);
    CHECK(format_from_string("csv") == Format::Csv);
    CHECK_THROWS_AS(format_from_string("xml"), ConfigError);
}

TEST_CASE("error objects") {
    const auto e = error_json(NotFoundError("nothing", 0.5, 3.0));
    CHECK(e["error"]["kind"] == "model_violation");
    CHECK(e["error"]["type"] == "not_found");
    CHECK(e["error"]["message"] == "nothing");
    CHECK(e["error"]["searched"][1] == 3.0);
    const auto s = error_json(SingularityError("pole", 16.0));
    CHECK(s["error"]["pole"] == 16.0);
    const auto d = error_json(DomainError("bad V"));
    CHECK(d["error"]["kind"] == "domain");
    CHECK(usage_error_json("x")["error"]["kind"] == "usage");
}

TEST_CASE("report CSV") {
    band_structure::PropertyReport r;
    r.a = cplx(0.0, 1.0);
    r.checks.push_back({"pr2", true, 1e-12, 1e-8, "say \"hi\"", true});
    const auto csv = report_csv(r);
    CHECK(csv == "check,passed,resolved,value,threshold,detail\npr2,1,1,1e-12,1e-08,\"say 'hi'\"\n");
    CHECK(report_json(r)["passed"] == true);
}

TEST_CASE("critical brackets round outward") {
    criticality::CriticalPoint cp;
    cp.k = 2;
    cp.bracket_lo = 0.88843700407519;
    cp.bracket_hi = 0.88843700407521;
    cp.r_lo = 1.4687;
    cp.r_hi = 1.4688;
    const auto j = critical_json(cp);
    CHECK(j["bracket"]["lo"].get<double>() <= cp.bracket_lo);
    CHECK(j["bracket"]["hi"].get<double>() >= cp.bracket_hi);
    CHECK(j["check"].is_null());
    CHECK(critical_csv(cp).rfind("k,V_k,V_lo,V_hi,r,r_lo,r_hi,pair_lo,pair_hi,check_passed\n", 0) == 0);
}
