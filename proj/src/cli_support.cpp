#include "rankone/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "rankone/numeric_text.hpp"

namespace rankone::cli {

namespace {

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from(const json& j) {
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.get<double>(), 0.0};
}

std::string entry_text(double v) { return format_double17(v); }

Interval parse_interval(std::string_view text) {
  std::string_view s = trim(text);
  bool lo_closed = false, hi_closed = false;
  if (!s.empty() && (s.front() == '[' || s.front() == '(')) {
    lo_closed = s.front() == '[';
    s.remove_prefix(1);
  }
  if (!s.empty() && (s.back() == ']' || s.back() == ')')) {
    hi_closed = s.back() == ']';
    s.remove_suffix(1);
  }
  auto parts = split(s, ',');
  if (parts.size() != 2) throw InputError("interval must look like lo,hi: '" + std::string(text) + "'");
  double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw InputError("interval needs lo <= hi: '" + std::string(text) + "'");
  return Interval(lo, hi, lo_closed, hi_closed);
}

std::size_t parse_count(std::string_view s) {
  long n = parse_integer(s);
  if (n < 1) throw InputError("grid size must be positive");
  return static_cast<std::size_t>(n);
}

cplx circle_point(std::size_t k, std::size_t n) {
  if (k == 0) return {1.0, 0.0};
  if (2 * k == n) return {-1.0, 0.0};
  if (4 * k == n) return {0.0, 1.0};
  if (4 * k == 3 * n) return {0.0, -1.0};
  double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return {std::cos(t), std::sin(t)};
}

void grid_part(std::string_view text, std::vector<cplx>& out) {
  auto parts = split(trim(text), ':');
  std::string_view tag = parts[0];
  auto want = [&](std::size_t n) {
    if (parts.size() != n) throw InputError("malformed grid '" + std::string(text) + "'");
  };
  if (tag == "lin" || tag == "geo") {
    want(4);
    double lo = parse_double(parts[1]), hi = parse_double(parts[2]);
    std::size_t n = parse_count(parts[3]);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw InputError("grid needs finite lo < hi");
    double steps = static_cast<double>(n + 1);
    if (tag == "lin") {
      for (std::size_t k = 1; k <= n; ++k) out.emplace_back(lo + (hi - lo) * static_cast<double>(k) / steps, 0.0);
    } else {
      if (!(lo * hi > 0.0)) throw InputError("geometric grid endpoints must be nonzero with equal signs");
      for (std::size_t k = 1; k <= n; ++k)
        out.emplace_back(lo * std::pow(hi / lo, static_cast<double>(k) / steps), 0.0);
    }
    return;
  }
  if (tag == "circle") {
    want(2);
    std::size_t n = parse_count(parts[1]);
    for (std::size_t k = 0; k < n; ++k) out.push_back(circle_point(k, n));
    return;
  }
  if (tag == "list") {
    want(2);
    for (auto p : split(parts[1], ';')) out.emplace_back(parse_double(p), 0.0);
    return;
  }
  throw InputError("unknown grid kind '" + std::string(tag) + "'");
}

json failure_json(const FailureObservable& f) {
  json j;
  j["kind"] = failure_kind(f);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NegativeEigenvalue>) {
          j["eigenvalue"] = x.eigenvalue;
          j["threshold"] = x.threshold;
        } else if constexpr (std::is_same_v<T, MinorViolation>) {
          j["rows"] = {x.index.r0, x.index.r1};
          j["cols"] = {x.index.c0, x.index.c1};
          j["value"] = cplx_json(x.value);
        } else if constexpr (std::is_same_v<T, RankExcess>) {
          j["rank"] = x.rank;
          j["bound"] = x.bound;
        } else if constexpr (std::is_same_v<T, HermitianLoss>) {
          j["row"] = x.row;
          j["col"] = x.col;
          j["upper"] = cplx_json(x.upper);
          j["lower"] = cplx_json(x.lower);
        } else {
          j["row"] = x.row;
          j["col"] = x.col;
        }
      },
      f);
  return j;
}

FailureObservable failure_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "negative_eigenvalue")
    return NegativeEigenvalue{j.at("eigenvalue").get<double>(), j.at("threshold").get<double>()};
  if (kind == "minor_violation") {
    MinorIndex idx{j.at("rows").at(0).get<std::size_t>(), j.at("rows").at(1).get<std::size_t>(),
                   j.at("cols").at(0).get<std::size_t>(), j.at("cols").at(1).get<std::size_t>()};
    return MinorViolation{idx, cplx_from(j.at("value"))};
  }
  if (kind == "rank_excess") return RankExcess{j.at("rank").get<std::size_t>(), j.at("bound").get<std::size_t>()};
  if (kind == "hermitian_loss")
    return HermitianLoss{j.at("row").get<std::size_t>(), j.at("col").get<std::size_t>(), cplx_from(j.at("upper")),
                         cplx_from(j.at("lower"))};
  if (kind == "non_finite_entry") return NonFiniteEntry{j.at("row").get<std::size_t>(), j.at("col").get<std::size_t>()};
  throw InputError("unknown failure kind '" + kind + "'");
}

json member_json(const PowerFamilyMember& m) {
  json j;
  j["spec"] = m.to_string();
  j["family"] = to_string(m.family());
  j["c"] = m.c();
  j["alpha"] = m.alpha();
  j["beta"] = m.beta();
  return j;
}

Region samples_domain(const std::string& text, const std::vector<Sample>& samples) {
  if (!text.empty()) return parse_domain(text);
  bool real = std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.point.imag() == 0.0; });
  return real ? Region(Interval::real_line()) : Region::disc({0.0, 0.0}, kInf);
}

json error_verdict(const char* status, const ClassificationError& e) {
  json j;
  j["status"] = status;
  j["kind"] = e.kind();
  j["message"] = e.what();
  return j;
}

json result(json inputs, json verdict) {
  json j;
  j["inputs"] = std::move(inputs);
  j["verdict"] = std::move(verdict);
  return j;
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (!env || !*env) return kDefaultSeed;
  std::string_view s = trim(env);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(std::string(kSeedEnv) + " must be a nonnegative integer, got '" + env + "'");
  return v;
}

Region parse_domain(std::string_view text) {
  std::string_view s = trim(text);
  if (s.starts_with("disc:")) return Region::disc({0.0, 0.0}, parse_double(s.substr(5)));
  if (s.starts_with("annulus:")) {
    auto parts = split(s.substr(8), ':');
    if (parts.size() != 2) throw InputError("annulus domain must look like annulus:r:R");
    double r = parse_double(parts[0]), big = parse_double(parts[1]);
    return Region::union_of({Region(Interval::open(-big, big)), Region::annulus(r, big, true, false)});
  }
  if (s.starts_with("circle+interval:"))
    return Region::union_of({Region::unit_circle(), Region(parse_interval(s.substr(16)))});
  return Region(parse_interval(s));
}

std::vector<cplx> parse_grid(std::string_view text) {
  std::vector<cplx> out;
  for (auto part : split(trim(text), '+')) grid_part(part, out);
  return out;
}

CandidateFunction parse_function(std::string_view text, const Region& domain) {
  std::string_view s = trim(text);
  auto parts = split(s, ':');
  std::string_view tag = parts[0];
  std::string label(s);
  if (tag == "zero" || tag == "const" || tag == "phi" || tag == "psi" || tag == "cpow")
    return make_member_candidate(PowerFamilyMember::parse(s), domain);
  if (tag == "table") {
    if (s.size() <= 6) throw InputError("table function needs a path");
    std::string path(s.substr(6));
    auto samples = read_samples_file(path);
    auto table = std::make_shared<std::map<std::pair<double, double>, cplx>>();
    bool real = true;
    for (const auto& x : samples) {
      (*table)[{x.point.real(), x.point.imag()}] = x.value;
      real = real && x.value.imag() == 0.0;
    }
    auto eval = [table, label](cplx z) -> cplx {
      auto it = table->find({z.real(), z.imag()});
      if (it == table->end()) throw DomainError(label + " is not tabulated at the requested point");
      return it->second;
    };
    CandidateFunction f{std::move(eval), domain, label, real, {}};
    f.support = [table](cplx z) { return table->count({z.real(), z.imag()}) > 0; };
    return f;
  }

  if (!domain.is_real()) throw InputError("built-in function '" + label + "' is real; use a real interval domain");
  auto want = [&](std::size_t n) {
    if (parts.size() != n) throw InputError("malformed function '" + label + "'");
  };
  if (tag == "affine") {
    want(3);
    double a = parse_double(parts[1]), b = parse_double(parts[2]);
    return make_real_candidate([a, b](double x) { return a * x + b; }, domain, label);
  }
  if (tag == "exp") {
    want(2);
    double b = parse_double(parts[1]);
    return make_real_candidate([b](double x) { return std::exp(b * x); }, domain, label);
  }
  if (tag == "log") {
    want(2);
    double b = parse_double(parts[1]);
    auto f = make_real_candidate(
        [b, label](double x) {
          if (!(x > 0.0)) throw DomainError(label + " is defined on positive reals only");
          return b * std::log(x);
        },
        domain, label);
    f.support = [](cplx z) { return z.real() > 0.0; };
    return f;
  }
  if (tag == "abs") {
    want(1);
    return make_real_candidate([](double x) { return std::abs(x); }, domain, label);
  }
  if (tag == "max") {
    want(2);
    double t = parse_double(parts[1]);
    return make_real_candidate([t](double x) { return std::max(x, t); }, domain, label);
  }
  throw InputError("unknown function '" + label + "'");
}

std::vector<Sample> read_samples_csv(std::istream& in, const std::string& source) {
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0, columns = 0;
  auto fail = [&](const std::string& msg) { throw InputError(source + ":" + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s, ',');
    if (columns == 0) {
      columns = cells.size();
      if (columns != 2 && columns != 4) fail("header must have 2 (x,value) or 4 (re_x,im_x,re_v,im_v) columns");
      bool numeric = true;
      try {
        for (auto c : cells) parse_double(c);
      } catch (const InputError&) {
        numeric = false;
      }
      if (numeric) fail("missing header row");
      continue;
    }
    if (cells.size() != columns)
      fail("expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()));
    std::vector<double> v;
    try {
      for (auto c : cells) v.push_back(parse_double(c));
    } catch (const InputError& e) {
      fail(e.what());
    }
    for (double x : v)
      if (!std::isfinite(x)) fail("non-finite value");
    if (columns == 2) out.push_back({{v[0], 0.0}, {v[1], 0.0}});
    else out.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  if (columns == 0) throw InputError(source + ": empty sample file");
  if (out.empty()) throw InputError(source + ": no sample rows");
  return out;
}

std::vector<Sample> read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file '" + path + "'");
  return read_samples_csv(in, path);
}

json to_json(const HermitianMatrix& m) {
  json j;
  std::size_t n = m.dim();
  bool real = m.is_real();
  j["n"] = n;
  j["field"] = real ? "real" : "complex";
  json entries = json::array();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      cplx z = m(r, c);
      if (real) entries.push_back(entry_text(z.real()));
      else entries.push_back(json::array({entry_text(z.real()), entry_text(z.imag())}));
    }
  j["entries"] = std::move(entries);
  return j;
}

HermitianMatrix matrix_from_json(const json& j) {
  std::size_t n = j.at("n").get<std::size_t>();
  bool real = j.at("field").get<std::string>() == "real";
  const auto& e = j.at("entries");
  if (e.size() != n * n) throw InputError("matrix entry count does not match n");
  std::vector<std::vector<cplx>> rows(n, std::vector<cplx>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto& x = e.at(r * n + c);
      if (real) rows[r][c] = {parse_double(x.get<std::string>()), 0.0};
      else rows[r][c] = {parse_double(x.at(0).get<std::string>()), parse_double(x.at(1).get<std::string>())};
    }
  return HermitianMatrix::from_rows(rows);
}

json to_json(const WitnessCertificate& c) {
  json j;
  j["construction"] = c.construction;
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = std::move(params);
  j["matrix"] = to_json(c.matrix);
  j["failure"] = failure_json(c.failure);
  j["out_k"] = c.out_k;
  j["psd_tol"] = c.tol.psd_tol;
  j["rank_tol"] = c.tol.rank_tol;
  return j;
}

WitnessCertificate certificate_from_json(const json& j) {
  ParamList params;
  for (const auto& [k, v] : j.at("params").items()) params.emplace_back(k, v.get<double>());
  ToleranceProfile tol{j.at("psd_tol").get<double>(), j.at("rank_tol").get<double>()};
  return WitnessCertificate{matrix_from_json(j.at("matrix")), j.at("construction").get<std::string>(),
                            std::move(params), failure_from_json(j.at("failure")), j.at("out_k").get<std::size_t>(), tol};
}

json to_json(const PreserverVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["witnesses"] = v.witnesses;
  j["trials"] = v.trials;
  j["skipped"] = v.skipped;
  j["seed"] = v.seed;
  j["notes"] = v.notes;
  j["certificate"] = v.certificate ? to_json(*v.certificate) : json(nullptr);
  return j;
}

json to_json(const ClassificationResult& r) {
  json j;
  j["status"] = "classified";
  j["member"] = member_json(r.member);
  j["residual"] = r.residual;
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  j["diagnostics"] = std::move(diag);
  json alts = json::array();
  for (const auto& [m, res] : r.alternatives) alts.push_back({{"member", m.to_string()}, {"residual", res}});
  j["alternatives"] = std::move(alts);
  j["ambiguous"] = r.ambiguous;
  return j;
}

json to_json(const Rank2ExceptionProfile& p) {
  json j;
  j["status"] = "classified";
  j["base"] = member_json(p.base);
  json eps = json::array();
  for (const auto& [x, e] : p.eps) eps.push_back(json::array({x, e}));
  j["eps"] = std::move(eps);
  j["eps_constant"] = p.eps_constant();
  j["residual"] = p.residual;
  return j;
}

json to_json(const CauchyVerdict& v) {
  json j;
  j["status"] = v.satisfied ? "solved" : "equation_violated";
  j["equation"] = to_string(v.equation);
  j["satisfied"] = v.satisfied;
  j["solution"] = v.satisfied ? json(to_string(v.solution)) : json(nullptr);
  j["beta"] = v.beta;
  j["member"] = v.member ? member_json(*v.member) : json(nullptr);
  j["equation_residual"] = v.equation_residual;
  j["residual"] = v.residual;
  j["triples"] = v.triples;
  j["worst"] = v.worst ? json::array({v.worst->first.real(), v.worst->second.real()}) : json(nullptr);
  return j;
}

json to_json(const IndependenceResult& r) {
  json j;
  j["independent"] = r.independent;
  j["smallest_singular_value"] = r.smallest_singular_value;
  j["largest_singular_value"] = r.largest_singular_value;
  j["threshold"] = r.threshold;
  return j;
}

json run_check(const CheckOptions& o) {
  Region dom = parse_domain(o.domain);
  ConeSpec spec(o.n, 1, dom);
  auto f = parse_function(o.fn, dom);
  ToleranceProfile tol{o.psd_tol, o.rank_tol};
  auto v = check_preserver(f, spec, o.out_k, o.trials, o.seed, tol);
  json in;
  in["fn"] = o.fn;
  in["domain"] = o.domain;
  in["region"] = dom.to_string();
  in["n"] = o.n;
  in["out_k"] = o.out_k;
  in["trials"] = o.trials;
  in["psd_tol"] = o.psd_tol;
  in["rank_tol"] = o.rank_tol;
  return result(std::move(in), to_json(v));
}

json run_classify(const ClassifyOptions& o) {
  auto samples = read_samples_file(o.samples);
  Region dom = samples_domain(o.domain, samples);
  json in;
  in["samples"] = o.samples;
  in["mode"] = o.mode;
  in["domain"] = o.domain;
  in["region"] = dom.to_string();
  in["sample_count"] = samples.size();
  in["tol"] = o.tol;
  SampleSet s(std::move(samples), dom);
  json verdict;
  try {
    if (o.mode == "real") verdict = to_json(fit_real_power(s, o.tol));
    else if (o.mode == "complex") verdict = to_json(fit_complex_power(s, o.tol));
    else if (o.mode == "rank2") verdict = to_json(fit_rank2_exception(s, o.tol));
    else throw InputError("unknown mode '" + o.mode + "' (expected real, complex or rank2)");
  } catch (const ClassificationError& e) {
    verdict = error_verdict("not_classified", e);
  }
  return result(std::move(in), std::move(verdict));
}

json run_cauchy(const CauchyOptions& o) {
  auto eq = parse_equation(o.equation);
  auto samples = read_samples_file(o.samples);
  Region dom = samples_domain(o.domain, samples);
  json in;
  in["samples"] = o.samples;
  in["equation"] = o.equation;
  in["domain"] = o.domain;
  in["region"] = dom.to_string();
  in["sample_count"] = samples.size();
  in["tol"] = o.tol;
  SampleSet s(std::move(samples), dom);
  json verdict;
  try {
    verdict = to_json(classify_cauchy(s, eq, o.tol));
  } catch (const ClassificationError& e) {
    verdict = error_verdict("inconsistent", e);
  }
  return result(std::move(in), std::move(verdict));
}

json run_independence(const IndependenceOptions& o) {
  std::vector<PowerFamilyMember> members;
  for (const auto& m : o.members) members.push_back(PowerFamilyMember::parse(m));
  auto grid = parse_grid(o.grid);
  auto r = dedekind_independence(members, grid, o.rel_tol);
  json in;
  in["members"] = o.members;
  in["grid"] = o.grid;
  in["grid_size"] = grid.size();
  in["rel_tol"] = o.rel_tol;
  return result(std::move(in), to_json(r));
}

json run_verify(const json& report) {
  std::string cmd = report.at("command").get<std::string>();
  const json& in = report.at("inputs");
  json replay;
  std::optional<bool> rechecked;
  if (cmd == "check") {
    CheckOptions o;
    o.fn = in.at("fn").get<std::string>();
    o.domain = in.at("domain").get<std::string>();
    o.n = in.at("n").get<std::size_t>();
    o.out_k = in.at("out_k").get<std::size_t>();
    o.trials = in.at("trials").get<std::size_t>();
    o.psd_tol = in.at("psd_tol").get<double>();
    o.rank_tol = in.at("rank_tol").get<double>();
    o.seed = report.at("seed").get<std::uint64_t>();
    replay = run_check(o);
    const json& cert = report.at("verdict").at("certificate");
    if (!cert.is_null()) {
      Region dom = parse_domain(o.domain);
      rechecked = recheck(certificate_from_json(cert), parse_function(o.fn, dom), ConeSpec(o.n, 1, dom));
    }
  } else if (cmd == "classify") {
    replay = run_classify({in.at("samples").get<std::string>(), in.at("mode").get<std::string>(),
                           in.at("domain").get<std::string>(), in.at("tol").get<double>()});
  } else if (cmd == "cauchy") {
    replay = run_cauchy({in.at("samples").get<std::string>(), in.at("equation").get<std::string>(),
                         in.at("domain").get<std::string>(), in.at("tol").get<double>()});
  } else if (cmd == "independence") {
    replay = run_independence({in.at("members").get<std::vector<std::string>>(), in.at("grid").get<std::string>(),
                               in.at("rel_tol").get<double>()});
  } else {
    throw InputError("cannot verify a report of command '" + cmd + "'");
  }
  bool matches = replay.at("verdict").dump() == report.at("verdict").dump();
  json v;
  v["replay_matches"] = matches;
  v["certificate_rechecked"] = rechecked ? json(*rechecked) : json(nullptr);
  v["verified"] = matches && rechecked.value_or(true);
  json inputs;
  inputs["report_command"] = cmd;
  return result(std::move(inputs), std::move(v));
}

json make_report(const std::string& command, const std::vector<std::string>& argv, const json& res,
                 std::optional<std::uint64_t> seed, double seconds) {
  json j;
  j["command"] = command;
  j["argv"] = argv;
  j["inputs"] = res.at("inputs");
  j["verdict"] = res.at("verdict");
  j["timing"] = {{"seconds", seconds}};
  j["seed"] = seed ? json(*seed) : json(nullptr);
  return j;
}

std::string summarize(const std::string& command, const json& v) {
  std::ostringstream os;
  os << command << ": ";
  if (command == "check") {
    os << v.at("status").get<std::string>() << " after " << v.at("witnesses").get<std::size_t>() << " witnesses and "
       << v.at("trials").get<std::size_t>() << " random trials";
    if (!v.at("certificate").is_null())
      os << " (" << v.at("certificate").at("construction").get<std::string>() << ", "
         << v.at("certificate").at("failure").at("kind").get<std::string>() << ")";
  } else if (command == "classify") {
    os << v.at("status").get<std::string>();
    if (v.contains("member")) os << " " << v.at("member").at("spec").get<std::string>();
    if (v.contains("base")) os << " base " << v.at("base").at("spec").get<std::string>();
    if (v.contains("message")) os << " (" << v.at("message").get<std::string>() << ")";
  } else if (command == "cauchy") {
    os << v.at("status").get<std::string>();
    if (v.contains("solution") && !v.at("solution").is_null()) os << " " << v.at("solution").get<std::string>();
    if (v.contains("message")) os << " (" << v.at("message").get<std::string>() << ")";
  } else if (command == "independence") {
    os << (v.at("independent").get<bool>() ? "independent" : "dependent");
  } else if (command == "verify") {
    os << (v.at("verified").get<bool>() ? "verified" : "NOT verified");
  }
  return os.str();
}

}  // namespace rankone::cli
