#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankone/cauchy.hpp"
#include "rankone/cli.hpp"
#include "rankone/entrywise.hpp"

using namespace rankone;

namespace {

constexpr double kPsdTol = 1e-8;
constexpr double kMinorTol = 1e-12;
constexpr double kFitTol = 1e-9;
constexpr double kBetaTol = 1e-9;
constexpr double kIndepRatio = 1e-8;
constexpr double kTimeBudgetSeconds = 10.0;
constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// Criterion 1: rank-one images of power-family members.
Outcome preserver_suite() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  const ToleranceProfile tol{kPsdTol, ToleranceProfile{}.rank_tol};
  for (double a : {-1.5, -0.5, 0.0, 0.5, 1.0, 2.0, 3.7})
    for (std::size_t n : {3u, 4u, 5u})
      for (bool odd : {false, true}) {
        Region dom = odd ? Region(Interval::open(-5.0, 10.0)) : Region(Interval::open(0.0, 10.0));
        auto m = odd ? PowerFamilyMember::psi(1.0, a) : PowerFamilyMember::phi(1.0, a);
        auto f = make_member_candidate(m, dom);
        ConeSpec spec(n, 1, dom);
        for (std::uint64_t i = 0; i < 1000; ++i) {
          auto rng = trial_rng(kSeed + n, i);
          auto img = apply_entrywise(f, sample_rank1(spec, rng)).matrix();
          auto psd = is_psd(img, tol);
          std::size_t rank = numeric_rank(img, tol);
          ++checked;
          if (!psd.psd || rank > 1) {
            std::ostringstream os;
            os << m.to_string() << " n=" << n << " trial " << i << " min eig " << psd.min_eigenvalue << " rank " << rank;
            o.fail(os.str());
          }
        }
      }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= kTimeBudgetSeconds) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = std::to_string(checked) + " images in " + std::to_string(secs) + " s";
  return o;
}

// Criterion 2: deterministic certificates for non-family candidates.
Outcome falsification() {
  Outcome o;
  Region dom(Interval::open(0.0, 10.0));
  ConeSpec spec(3, 1, dom);
  struct Case {
    std::string name;
    std::function<double(double)> f;
  };
  std::vector<Case> cases = {{"x+1", [](double x) { return x + 1.0; }},
                             {"exp", [](double x) { return std::exp(x); }},
                             {"max(x,1)", [](double x) { return std::max(x, 1.0); }}};
  std::ostringstream summary;
  for (const auto& c : cases) {
    auto f = make_real_candidate(c.f, dom, c.name);
    auto cert = find_violation(f, spec, 0, kSeed);
    if (!cert) {
      o.fail(c.name + ": no certificate");
      continue;
    }
    if (cert->construction == "random") o.fail(c.name + ": certificate came from random trials");
    if (!recheck(*cert, f, spec)) o.fail(c.name + ": certificate does not recheck");
    summary << c.name << "->" << cert->construction << " ";
    if (c.name != "x+1") continue;
    const auto* mv = std::get_if<MinorViolation>(&cert->failure);
    if (cert->construction != "ones_xy" || !mv) {
      o.fail("x+1: expected a ones_xy minor certificate, got " + cert->construction);
      continue;
    }
    double x = 0, y = 0;
    for (const auto& [k, v] : cert->params) {
      if (k == "x") x = v;
      if (k == "y") y = v;
    }
    auto img = apply_entrywise(f, cert->matrix);
    auto idx = mv->index;
    cplx det = img(idx.r0, idx.c0) * img(idx.r1, idx.c1) - img(idx.r0, idx.c1) * img(idx.r1, idx.c0);
    double analytic = -(x - 1.0) * (y - 1.0);
    double gap = std::max(std::abs(det - analytic), std::abs(mv->value - analytic));
    if (gap > kMinorTol * std::max(1.0, std::abs(analytic)))
      o.fail("x+1 minor " + std::to_string(det.real()) + " vs " + std::to_string(analytic));
    summary << "(x=" << x << ", y=" << y << ", minor gap " << gap << ") ";
  }
  if (o.pass) o.detail = summary.str();
  return o;
}

std::vector<double> signed_grid() {
  std::vector<double> g = {0.0};
  for (int k = -20; k <= 20; ++k) {
    double x = k == 0 ? 1.0 : std::pow(10.0, k / 20.0);
    if (x < 10.0) g.push_back(x);
    if (x < 5.0) g.push_back(-x);
  }
  return g;
}

std::vector<cplx> complex_grid() {
  std::vector<cplx> pts;
  for (int k = -10; k <= 10; ++k) pts.emplace_back(k == 0 ? 1.0 : std::pow(2.0, k / 4.0), 0.0);
  for (int j = 0; j < 16; ++j) pts.push_back(std::polar(1.0, -std::numbers::pi + 2.0 * std::numbers::pi * (j + 0.5) / 16));
  pts.emplace_back(-1.0, 0.0);
  for (double r : {0.5, 1.7, 2.5})
    for (double t : {-2.9, -1.1, 0.4, 2.2}) pts.push_back(std::polar(r, t));
  return pts;
}

// Criterion 3: classifier round-trips.
Outcome classifier_round_trips() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> uc(0.1, 10.0), ua(-3.0, 4.0);
  std::uniform_int_distribution<int> ufam(0, 2);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double c = uc(rng), a = ua(rng);
    int fam = ufam(rng);
    auto m = fam == 0 ? PowerFamilyMember::phi(c, a) : fam == 1 ? PowerFamilyMember::psi(c, a) : PowerFamilyMember::constant(c);
    auto s = SampleSet::tabulate_real([&](double x) { return eval_member(m, x); }, signed_grid(),
                                      Interval::open(-5.0, 10.0));
    try {
      auto r = fit_real_power(s);
      worst = std::max(worst, r.residual);
      bool same = r.member.family() == m.family() && std::abs(r.member.c() - c) <= kFitTol * c &&
                  (m.family() == Family::constant || std::abs(r.member.alpha() - a) <= kFitTol);
      if (!same || r.residual >= kFitTol) o.fail(m.to_string() + " fitted as " + r.member.to_string());
    } catch (const Error& e) {
      o.fail(m.to_string() + ": " + e.what());
    }
  }
  for (long b = -3; b <= 3; ++b)
    for (double a : {-1.0, 0.5, 2.0}) {
      auto m = PowerFamilyMember::complex_power(1.0, a, b);
      auto s = SampleSet::tabulate([&](cplx z) { return eval_member(m, z); }, complex_grid(), Region::disc({0.0, 0.0}, kInf));
      try {
        auto r = fit_complex_power(s);
        worst = std::max(worst, r.residual);
        if (r.member.family() != Family::complex_power || r.member.beta() != b ||
            std::abs(r.member.alpha() - a) > kFitTol || r.residual >= kFitTol)
          o.fail(m.to_string() + " fitted as " + r.member.to_string());
      } catch (const Error& e) {
        o.fail(m.to_string() + ": " + e.what());
      }
    }
  if (o.pass) {
    std::ostringstream os;
    os << "20 real + 21 complex members, worst residual " << worst;
    o.detail = os.str();
  }
  return o;
}

// Criterion 4: a sign-modulated square preserves 2x2 rank-one matrices only.
Outcome rank2_exception() {
  Outcome o;
  Region dom(Interval::open(-5.0, 10.0));
  auto base = PowerFamilyMember::phi(1.0, 2.0);
  auto f = make_sign_modulated(base, [](double x) { return x > -1.0 ? 1 : -1; }, dom, "eps*phi2");
  ConeSpec two(2, 1, dom);
  std::size_t violations = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto rng = trial_rng(kSeed, i);
    if (image_failure(f, sample_rank1(two, rng), 1, {})) ++violations;
  }
  if (violations) o.fail(std::to_string(violations) + " violations among 2x2 trials");
  ConeSpec three(3, 1, dom);
  auto cert = find_violation(f, three, 0, kSeed);
  if (!cert) o.fail("no certificate at n = 3");
  else if (cert->construction == "random") o.fail("n = 3 certificate came from random trials");
  else if (!recheck(*cert, f, three)) o.fail("n = 3 certificate does not recheck");
  if (o.pass) o.detail = "0/1000 violations at n = 2; n = 3 certificate " + cert->construction + " (" + failure_kind(cert->failure) + ")";
  return o;
}

// Criterion 5: independence of distinct characters.
Outcome independence() {
  Outcome o;
  std::vector<cplx> grid;
  for (int k = 1; k <= 50; ++k) grid.emplace_back(-1.0 + 2.0 * k / 51.0, 0.0);
  std::vector<PowerFamilyMember> ms = {PowerFamilyMember::constant(1.0), PowerFamilyMember::phi(1.0, 0.5),
                                       PowerFamilyMember::psi(1.0, 0.5), PowerFamilyMember::phi(1.0, 1.0),
                                       PowerFamilyMember::psi(1.0, 1.0), PowerFamilyMember::phi(1.0, 2.0)};
  auto r = dedekind_independence(ms, grid, kIndepRatio);
  double ratio = r.smallest_singular_value / r.largest_singular_value;
  if (!(ratio > kIndepRatio)) o.fail("sigma ratio " + std::to_string(ratio));
  std::vector<cplx> pos;
  for (int k = 1; k <= 50; ++k) pos.emplace_back(k / 51.0, 0.0);
  auto d = dedekind_independence({PowerFamilyMember::phi(1.0, 0.5), PowerFamilyMember::psi(1.0, 0.5)}, pos, kIndepRatio);
  if (d.independent) o.fail("phi/psi not detected as dependent on positives");
  if (o.pass) {
    std::ostringstream os;
    os << "sigma_min/sigma_max = " << ratio << "; positive grid sigma_min = " << d.smallest_singular_value;
    o.detail = os.str();
  }
  return o;
}

SampleSet arithmetic(const std::function<double(double)>& f, Interval dom) {
  std::vector<double> pts;
  for (int k = -24; k <= 24; ++k)
    if (dom.contains(0.125 * k)) pts.push_back(0.125 * k);
  return SampleSet::tabulate_real(f, pts, dom);
}

SampleSet geometric(const std::function<double(double)>& f, Interval dom, bool with_zero) {
  std::vector<double> pts;
  for (int k = -20; k <= 20; ++k) {
    double x = k == 0 ? 1.0 : std::pow(1.1, k);
    if (dom.contains(x)) pts.push_back(x);
  }
  if (with_zero) pts.push_back(0.0);
  return SampleSet::tabulate_real(f, pts, dom);
}

// Criterion 6: Cauchy round-trips and degenerate branches.
Outcome cauchy_round_trips() {
  Outcome o;
  Interval sym = Interval::open(-3.0, 3.0);
  auto lin = classify_additive(arithmetic([](double x) { return 2.5 * x; }, sym));
  if (lin.solution != SolutionKind::linear || std::abs(lin.beta - 2.5) > kBetaTol) o.fail("linear beta " + std::to_string(lin.beta));
  auto ex = classify_exponential(arithmetic([](double x) { return std::exp(2.3 * x); }, sym));
  if (ex.solution != SolutionKind::exp || std::abs(ex.beta - 2.3) > kBetaTol) o.fail("exp beta " + std::to_string(ex.beta));
  auto lg = classify_logarithmic(geometric([](double x) { return 4.0 * std::log(x); }, Interval::open(0.2, 5.0), false));
  if (lg.solution != SolutionKind::log || std::abs(lg.beta - 4.0) > kBetaTol) o.fail("log beta " + std::to_string(lg.beta));

  auto zero = [](double) { return 0.0; };
  if (classify_additive(arithmetic(zero, sym)).beta != 0.0) o.fail("additive zero");
  if (classify_multiplicative(geometric(zero, Interval::open(0.1, 10.0), false)).solution != SolutionKind::zero)
    o.fail("multiplicative zero");
  if (classify_exponential(arithmetic(zero, sym)).solution != SolutionKind::zero) o.fail("exponential zero");
  if (classify_logarithmic(geometric(zero, Interval::open(-1.0, 2.0), true)).solution != SolutionKind::zero)
    o.fail("logarithmic zero with 0 in the domain");
  try {
    classify_logarithmic(geometric([](double x) { return x == 0.0 ? 0.0 : std::log(x); }, Interval::open(-1.0, 2.0), true));
    o.fail("nonzero logarithmic samples accepted with 0 in the domain");
  } catch (const ClassificationError&) {
  }
  if (o.pass) {
    std::ostringstream os;
    os.precision(17);
    os << "beta: linear " << lin.beta << ", exp " << ex.beta << ", log " << lg.beta;
    o.detail = os.str();
  }
  return o;
}

bool smooth_at_origin_probe(const std::function<double(double)>& f, int n) {
  auto diff = [&](int k, double h) {
    double s = 0.0, binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      s += ((k - j) % 2 == 0 ? 1.0 : -1.0) * binom * f(j * h);
      binom = binom * (k - j) / (j + 1);
    }
    return s / std::pow(std::abs(h), k);
  };
  for (double sgn : {1.0, -1.0}) {
    double gl = std::abs(f(sgn * 1e-2) - f(0.0)), gs = std::abs(f(sgn * 1e-4) - f(0.0));
    if (gs > 1e-6 && gs > 0.5 * gl) return false;
  }
  for (int k = 1; k <= n; ++k) {
    double sign = k % 2 == 0 ? 1.0 : -1.0;
    double fl = diff(k, 1e-2), fs = diff(k, 1e-4), bl = sign * diff(k, -1e-2), bs = sign * diff(k, -1e-4);
    if (std::abs(fs) > 5.0 * std::abs(fl) + 1e-6 || std::abs(bs) > 5.0 * std::abs(bl) + 1e-6) return false;
    double gl = std::abs(fl - bl), gs = std::abs(fs - bs);
    if (gs > 1e-6 && gs > 0.3 * gl) return false;
  }
  return true;
}

// Criterion 7: C^n predicate against the finite-difference probe.
Outcome cn_table() {
  Outcome o;
  // Precomputed with smooth_at_origin_probe; rows phi1, phi2, phi2.5, psi1, psi2, psi2.5.
  const bool table[6][3] = {{false, false, false}, {true, true, true},   {true, true, false},
                            {true, true, true},    {true, false, false}, {true, true, false}};
  int row = 0, cases = 0;
  for (bool odd : {false, true})
    for (double a : {1.0, 2.0, 2.5}) {
      auto m = odd ? PowerFamilyMember::psi(1.0, a) : PowerFamilyMember::phi(1.0, a);
      for (int n = 1; n <= 3; ++n) {
        ++cases;
        bool probe = smooth_at_origin_probe([&](double x) { return eval_member(m, x); }, n);
        bool pred = is_Cn_multiplicative(m, n);
        if (probe != table[row][n - 1] || pred != table[row][n - 1])
          o.fail(m.to_string() + " n=" + std::to_string(n) + " probe " + std::to_string(probe) + " predicate " +
                 std::to_string(pred));
      }
      ++row;
    }
  if (o.pass) o.detail = std::to_string(cases) + " cases agree";
  return o;
}

std::string run_tool(const std::string& args) {
  std::string cmd = "'" + std::string(RANKONE_TOOL) + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "exit:" + std::to_string(status);
  return out;
}

// Criterion 8: byte-identical reports (timing excluded) across three runs.
Outcome determinism() {
  Outcome o;
  auto dir = std::filesystem::temp_directory_path() / "rankone_acceptance";
  std::filesystem::create_directories(dir);
  auto csv = (dir / "phi.csv").string();
  {
    std::ofstream out(csv);
    out.precision(17);
    out << "x,value\n";
    for (double x : signed_grid()) out << x << "," << 3.0 * eval_phi(1.7, x) << "\n";
  }
  auto exp_csv = (dir / "exp.csv").string();
  {
    std::ofstream out(exp_csv);
    out.precision(17);
    out << "x,value\n";
    for (int k = -16; k <= 16; ++k) out << 0.125 * k << "," << std::exp(2.3 * 0.125 * k) << "\n";
  }
  const std::vector<std::string> commands = {
      "check --fn psi:1:0.5 --domain=-5,10 --n 4 --trials 500 --seed 7",
      "check --fn affine:1:1 --domain 0,10 --n 3 --seed 7",
      "classify '" + csv + "' --mode real",
      "cauchy '" + exp_csv + "' --equation c",
      "independence --members const:1 phi:1:0.5 psi:1:0.5 --grid lin:-1:1:50",
  };
  for (const auto& c : commands) {
    std::string first;
    for (int i = 0; i < 3; ++i) {
      auto out = run_tool(c);
      std::string payload;
      try {
        auto j = cli::json::parse(out);
        j.erase("timing");
        payload = j.dump();
      } catch (const std::exception&) {
        o.fail(c + ": unparsable output " + out.substr(0, 40));
        break;
      }
      if (i == 0) first = payload;
      else if (payload != first) o.fail(c + ": run " + std::to_string(i + 1) + " differs");
    }
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " commands x 3 runs identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, preserver_suite}, {2, falsification}, {3, classifier_round_trips}, {4, rank2_exception},
      {5, independence},    {6, cauchy_round_trips}, {7, cn_table},      {8, determinism}};
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << "\n";
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
