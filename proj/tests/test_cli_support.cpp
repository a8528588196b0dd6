#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rankone/cli.hpp"

using namespace rankone;
using namespace rankone::cli;

namespace {

std::string temp_csv(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("rankone_support_" + name + ".csv");
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST(ParseDomain, Intervals) {
  auto d = parse_domain("0,10");
  EXPECT_TRUE(d.contains(cplx(5.0)));
  EXPECT_FALSE(d.contains(cplx(0.0)));
  EXPECT_FALSE(d.contains(cplx(10.0)));
  auto c = parse_domain("[0,10]");
  EXPECT_TRUE(c.contains(cplx(0.0)));
  EXPECT_TRUE(c.contains(cplx(10.0)));
  auto h = parse_domain("(-1,2]");
  EXPECT_FALSE(h.contains(cplx(-1.0)));
  EXPECT_TRUE(h.contains(cplx(2.0)));
  EXPECT_TRUE(d.is_real());
  EXPECT_THROW(parse_domain("3,1"), InputError);
  EXPECT_THROW(parse_domain("1"), InputError);
  EXPECT_THROW(parse_domain("a,b"), InputError);
}

TEST(ParseDomain, ComplexRegions) {
  auto disc = parse_domain("disc:2");
  EXPECT_TRUE(disc.contains(cplx(1.0, 1.0)));
  EXPECT_FALSE(disc.contains(cplx(2.0, 0.0)));
  EXPECT_FALSE(disc.is_real());

  auto ann = parse_domain("annulus:0.5:2");
  EXPECT_TRUE(ann.contains(cplx(0.1, 0.0)));
  EXPECT_FALSE(ann.contains(cplx(0.1, 0.1)));
  EXPECT_TRUE(ann.contains(cplx(0.0, 0.5)));
  EXPECT_FALSE(ann.contains(cplx(0.0, 2.0)));

  auto ci = parse_domain("circle+interval:0,3");
  EXPECT_TRUE(ci.contains(std::polar(1.0, 2.0)));
  EXPECT_TRUE(ci.contains(cplx(2.5)));
  EXPECT_FALSE(ci.contains(cplx(0.0, 0.5)));
}

TEST(ParseGrid, Kinds) {
  auto lin = parse_grid("lin:0:1:3");
  ASSERT_EQ(lin.size(), 3u);
  EXPECT_DOUBLE_EQ(lin[0].real(), 0.25);
  EXPECT_DOUBLE_EQ(lin[2].real(), 0.75);

  auto geo = parse_grid("geo:1:16:3");
  ASSERT_EQ(geo.size(), 3u);
  EXPECT_DOUBLE_EQ(geo[0].real(), 2.0);
  EXPECT_DOUBLE_EQ(geo[1].real(), 4.0);

  auto circ = parse_grid("circle:4");
  ASSERT_EQ(circ.size(), 4u);
  EXPECT_EQ(circ[0], cplx(1.0, 0.0));
  EXPECT_EQ(circ[1], cplx(0.0, 1.0));
  EXPECT_EQ(circ[2], cplx(-1.0, 0.0));
  EXPECT_EQ(circ[3], cplx(0.0, -1.0));

  auto both = parse_grid("list:0.5;-0.5+circle:2");
  ASSERT_EQ(both.size(), 4u);
  EXPECT_EQ(both[1], cplx(-0.5));
  EXPECT_EQ(both[3], cplx(-1.0));

  EXPECT_THROW(parse_grid("geo:-1:1:3"), InputError);
  EXPECT_THROW(parse_grid("lin:0:1"), InputError);
  EXPECT_THROW(parse_grid("sobol:5"), InputError);
  EXPECT_THROW(parse_grid("circle:0"), InputError);
}

TEST(ParseFunction, BuiltinsAndMembers) {
  auto dom = parse_domain("0,10");
  EXPECT_EQ(parse_function("affine:1:1", dom)(cplx(2.0)), cplx(3.0));
  EXPECT_DOUBLE_EQ(parse_function("exp:1", dom)(cplx(1.0)).real(), std::exp(1.0));
  EXPECT_DOUBLE_EQ(parse_function("log:2", dom)(cplx(std::exp(1.0))).real(), 2.0);
  EXPECT_EQ(parse_function("max:1", dom)(cplx(0.5)), cplx(1.0));
  EXPECT_EQ(parse_function("abs", parse_domain("-1,1"))(cplx(-0.5)), cplx(0.5));
  EXPECT_DOUBLE_EQ(parse_function("phi:3:2", dom)(cplx(2.0)).real(), 12.0);
  EXPECT_FALSE(parse_function("log:1", parse_domain("-1,1")).defined_at(cplx(-0.5)));

  EXPECT_THROW(parse_function("affine:1", dom), InputError);
  EXPECT_THROW(parse_function("sin", dom), InputError);
  EXPECT_THROW(parse_function("exp:1", parse_domain("disc:1")), InputError);
}

TEST(ParseFunction, Table) {
  auto path = temp_csv("table", "x,value\n1,2\n2,5\n");
  auto f = parse_function("table:" + path, parse_domain("0,10"));
  EXPECT_EQ(f(cplx(2.0)), cplx(5.0));
  EXPECT_TRUE(f.defined_at(cplx(1.0)));
  EXPECT_FALSE(f.defined_at(cplx(1.5)));
  EXPECT_THROW(f(cplx(1.5)), DomainError);
}

TEST(ReadSamplesCsv, ParsesRealAndComplex) {
  std::istringstream real("# comment\nx,value\n\n1,2\n-3.5,4e-1\n");
  auto r = read_samples_csv(real, "r.csv");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].point, cplx(-3.5));
  EXPECT_EQ(r[1].value, cplx(0.4));

  std::istringstream cx("re_x,im_x,re_v,im_v\n0,1,0,-1\n");
  auto c = read_samples_csv(cx, "c.csv");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].point, cplx(0.0, 1.0));
  EXPECT_EQ(c[0].value, cplx(0.0, -1.0));
}

TEST(ReadSamplesCsv, ErrorsNameTheLine) {
  auto message = [](const std::string& body) {
    std::istringstream in(body);
    try {
      read_samples_csv(in, "s.csv");
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("x,value\n1,2\n3\n").find("s.csv:3:"), std::string::npos);
  EXPECT_NE(message("x,value\n1,abc\n").find("s.csv:2:"), std::string::npos);
  EXPECT_NE(message("x,value\n1,nan\n").find("s.csv:2:"), std::string::npos);
  EXPECT_NE(message("1,2\n3,4\n").find("s.csv:1:"), std::string::npos);
  EXPECT_NE(message("a,b,c\n").find("s.csv:1:"), std::string::npos);
  EXPECT_NE(message("x,value\n").find("no sample rows"), std::string::npos);
  EXPECT_NE(message("").find("empty"), std::string::npos);
  EXPECT_THROW(read_samples_file("/nonexistent/file.csv"), InputError);
}

TEST(MatrixJson, RoundTripIsExact) {
  auto real = HermitianMatrix::from_real_rows({{1.0 / 3.0, 0.1}, {0.1, 2e-300}});
  auto back = matrix_from_json(to_json(real));
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(back(r, c), real(r, c));

  auto cx = HermitianMatrix::from_rows({{cplx(1.0), cplx(0.1, 0.7)}, {cplx(0.1, -0.7), cplx(3.0)}});
  auto j = to_json(cx);
  EXPECT_EQ(j["field"], "complex");
  auto back2 = matrix_from_json(j);
  EXPECT_EQ(back2(0, 1), cx(0, 1));
  EXPECT_EQ(back2(1, 0), cx(1, 0));

  json bad = to_json(real);
  bad["n"] = 3;
  EXPECT_THROW(matrix_from_json(bad), InputError);
}

TEST(CertificateJson, RoundTripRechecks) {
  auto dom = parse_domain("0,10");
  auto f = parse_function("affine:1:1", dom);
  ConeSpec spec(3, 1, dom);
  auto v = check_preserver(f, spec, 1, 0, 7);
  ASSERT_TRUE(v.certificate.has_value());
  auto j = to_json(*v.certificate);
  auto back = certificate_from_json(j);
  EXPECT_EQ(back.construction, v.certificate->construction);
  EXPECT_EQ(back.params, v.certificate->params);
  EXPECT_EQ(failure_kind(back.failure), failure_kind(v.certificate->failure));
  EXPECT_TRUE(recheck(back, f, spec));
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(RunCommands, VerdictShapes) {
  CheckOptions co;
  co.fn = "phi:1:2";
  co.domain = "-5,10";
  co.trials = 50;
  auto chk = run_check(co);
  EXPECT_EQ(chk["verdict"]["status"], "no_violation_found");
  EXPECT_TRUE(chk["verdict"]["certificate"].is_null());

  auto path = temp_csv("mixed", "x,value\n1,1\n2,4\n3,9\n4,16\n-1,1\n-2,-4\n");
  auto cls = run_classify({path, "real", "", kDefaultClassifyTol});
  EXPECT_EQ(cls["verdict"]["status"], "not_classified");
  EXPECT_EQ(cls["verdict"]["kind"], "mixed_sign");

  IndependenceOptions io{{"const:1", "phi:1:1", "psi:1:1"}, "lin:-1:1:20", kIndependenceRelTol};
  EXPECT_EQ(run_independence(io)["verdict"]["independent"], true);
}

TEST(RunVerify, DetectsTamperedVerdict) {
  CheckOptions co;
  co.fn = "affine:1:1";
  co.domain = "0,10";
  co.trials = 10;
  co.seed = 11;
  auto res = run_check(co);
  auto report = make_report("check", {"rankone", "check"}, res, co.seed, 0.0);
  auto ok = run_verify(report);
  EXPECT_EQ(ok["verdict"]["verified"], true);
  EXPECT_EQ(ok["verdict"]["certificate_rechecked"], true);

  auto tampered = report;
  tampered["verdict"]["witnesses"] = 999;
  EXPECT_EQ(run_verify(tampered)["verdict"]["replay_matches"], false);

  auto bad_cert = report;
  bad_cert["verdict"]["certificate"]["matrix"] = to_json(HermitianMatrix::identity(3));
  auto r = run_verify(bad_cert);
  EXPECT_EQ(r["verdict"]["verified"], false);

  json unknown = report;
  unknown["command"] = "frobnicate";
  EXPECT_THROW(run_verify(unknown), InputError);
}

TEST(DefaultSeed, EnvironmentOverride) {
  ::unsetenv(kSeedEnv);
  EXPECT_EQ(default_seed(), kDefaultSeed);
  ::setenv(kSeedEnv, "42", 1);
  EXPECT_EQ(default_seed(), 42u);
  ::setenv(kSeedEnv, "-3", 1);
  EXPECT_THROW(default_seed(), InputError);
  ::unsetenv(kSeedEnv);
}

TEST(Summarize, OneLine) {
  json v = {{"independent", false}};
  EXPECT_EQ(summarize("independence", v), "independence: dependent");
}
