#pragma once

// Recovering a power-family member from sampled values of a function:
// multiplicativity checks, (c, alpha) and (c, alpha, beta) fits, and the
// sign-map profile that appears for 2 x 2 matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rankone/cones.hpp"
#include "rankone/entrywise.hpp"
#include "rankone/errors.hpp"
#include "rankone/powerfam.hpp"

namespace rankone {

struct Sample {
  cplx point;
  cplx value;
};

// Finite list of (point, value) pairs over a region. Points are distinct and
// lie in the region.
class SampleSet {
 public:
  SampleSet(std::vector<Sample> samples, Region domain) : samples_(std::move(samples)), domain_(std::move(domain)) {
    for (const auto& s : samples_) {
      if (!finite(s.point) || !finite(s.value)) throw InputError("samples must be finite");
      if (!domain_.contains(s.point)) {
        std::ostringstream os;
        os << "sample point " << s.point << " lies outside " << domain_.to_string();
        throw InputError(os.str());
      }
    }
    std::vector<cplx> pts;
    for (const auto& s : samples_) pts.push_back(s.point);
    std::sort(pts.begin(), pts.end(), less);
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i] == pts[i - 1]) {
        std::ostringstream os;
        os << "duplicate sample point " << pts[i];
        throw InputError(os.str());
      }
  }

  template <typename F>
  static SampleSet tabulate(F&& f, const std::vector<cplx>& points, Region domain) {
    std::vector<Sample> s;
    s.reserve(points.size());
    for (const auto& p : points) s.push_back({p, cplx(f(p))});
    return SampleSet(std::move(s), std::move(domain));
  }

  static SampleSet tabulate_real(const std::function<double(double)>& f, const std::vector<double>& points,
                                 Region domain) {
    std::vector<Sample> s;
    s.reserve(points.size());
    for (double p : points) s.push_back({cplx(p, 0.0), cplx(f(p), 0.0)});
    return SampleSet(std::move(s), std::move(domain));
  }

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Region& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return samples_.size(); }

  bool is_real() const {
    return std::all_of(samples_.begin(), samples_.end(),
                       [](const Sample& s) { return s.point.imag() == 0.0 && s.value.imag() == 0.0; });
  }

  std::optional<cplx> value_at(cplx p) const {
    for (const auto& s : samples_)
      if (s.point == p) return s.value;
    return std::nullopt;
  }

  template <typename Pred>
  SampleSet filtered(Pred&& keep, Region domain) const {
    std::vector<Sample> out;
    for (const auto& s : samples_)
      if (keep(s)) out.push_back(s);
    return SampleSet(std::move(out), std::move(domain));
  }

 private:
  static bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
  static bool less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

  std::vector<Sample> samples_;
  Region domain_;
};

// |a - b| / scale, with 0/0 read as agreement.
inline double relative_gap(cplx a, cplx b, double scale) {
  double d = std::abs(a - b);
  if (d == 0.0) return 0.0;
  return scale > 0.0 ? d / scale : std::numeric_limits<double>::infinity();
}

// Pointwise deviation used for every fit residual: |v - m| / max(|v|, |m|).
inline double value_deviation(cplx observed, cplx model) {
  return relative_gap(observed, model, std::max(std::abs(observed), std::abs(model)));
}

// ---------------------------------------------------------------------------
// Matched triples
// ---------------------------------------------------------------------------

// Points are matched to x*y (or x+y) when they agree to this relative
// tolerance (log-space for products).
inline constexpr double kMatchTol = 1e-12;

enum class Combine { sum, product };

struct Triple {
  std::size_t x, y, xy;  // indices into the sample list
};

// All unordered pairs (x, y), x == y allowed, whose sum or product is itself
// a sampled point.
inline std::vector<Triple> matched_triples(const SampleSet& s, Combine op) {
  const auto& v = s.samples();
  std::vector<std::pair<double, std::size_t>> by_mod;
  for (std::size_t i = 0; i < v.size(); ++i) by_mod.emplace_back(std::abs(v[i].point), i);
  std::sort(by_mod.begin(), by_mod.end());

  auto find = [&](cplx target) -> std::optional<std::size_t> {
    double m = std::abs(target);
    double slack;
    if (op == Combine::product) {
      if (m == 0.0) slack = 0.0;
      else slack = m * (std::exp(kMatchTol) - 1.0);
    } else {
      slack = kMatchTol * std::max(1.0, m);
    }
    auto it = std::lower_bound(by_mod.begin(), by_mod.end(), std::pair{m - slack, std::size_t{0}});
    for (; it != by_mod.end() && it->first <= m + slack; ++it) {
      cplx p = v[it->second].point;
      bool hit = op == Combine::product ? (m == 0.0 ? p == cplx(0.0, 0.0) : std::abs(p - target) <= slack)
                                        : std::abs(p - target) <= slack;
      if (hit) return it->second;
    }
    return std::nullopt;
  };

  std::vector<Triple> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i; j < v.size(); ++j) {
      cplx t = op == Combine::product ? v[i].point * v[j].point : v[i].point + v[j].point;
      if (auto k = find(t)) out.push_back({i, j, *k});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multiplicativity
// ---------------------------------------------------------------------------

struct MultiplicativityReport {
  bool ok = true;
  double max_residual = 0.0;
  std::size_t triples = 0;
  std::optional<std::pair<cplx, cplx>> worst;  // (x, y) attaining max_residual
};

inline cplx value_at_one(const SampleSet& s) {
  auto k1 = s.value_at(cplx(1.0, 0.0));
  if (!k1) throw InputError("samples must include the point 1");
  return *k1;
}

// max over matched (x, y, xy) of |K(xy) - K(x)K(y)/K(1)| relative to
// max(|K(xy)|, |K(x)K(y)/K(1)|).
inline MultiplicativityReport check_multiplicative(const SampleSet& s, double tol) {
  cplx k1 = value_at_one(s);
  if (std::abs(k1) < 1e-300) throw ClassificationError("degenerate_normalization", "K(1) is zero; cannot normalize");
  MultiplicativityReport r;
  const auto& v = s.samples();
  for (const auto& t : matched_triples(s, Combine::product)) {
    cplx lhs = v[t.xy].value;
    cplx rhs = v[t.x].value * v[t.y].value / k1;
    double res = relative_gap(lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)));
    ++r.triples;
    if (res > r.max_residual || !r.worst) {
      if (res >= r.max_residual) {
        r.max_residual = res;
        r.worst = std::pair{v[t.x].point, v[t.y].point};
      }
    }
  }
  r.ok = r.max_residual <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Classification results
// ---------------------------------------------------------------------------

inline constexpr double kDefaultClassifyTol = 1e-6;

struct ClassificationResult {
  PowerFamilyMember member = PowerFamilyMember::zero();
  double residual = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;
  // Other members fitting the samples equally well (ranked by residual).
  std::vector<std::pair<PowerFamilyMember, double>> alternatives;
  // The samples cannot separate `member` from an alternative (0 lies in the
  // domain but was not sampled).
  bool ambiguous = false;
};

// Max value_deviation of the member over all samples.
inline double member_residual(const PowerFamilyMember& m, const SampleSet& s) {
  double r = 0.0;
  for (const auto& x : s.samples()) r = std::max(r, value_deviation(x.value, eval_member(m, x.point)));
  return r;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Least-squares slope through the origin.
inline double slope_through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

inline void add_multiplicativity(ClassificationResult& r, const SampleSet& s) {
  try {
    auto m = check_multiplicative(s, std::numeric_limits<double>::infinity());
    if (m.triples > 0) r.diagnostics.emplace_back("multiplicativity", m.max_residual);
  } catch (const ClassificationError&) {
  }
}

}  // namespace detail

// Fits Constant(c), Phi(c, alpha) or Psi(c, alpha) with c = K(1) and alpha
// from log|K(x)/c| against log x on the positive samples.
inline ClassificationResult fit_real_power(const SampleSet& s, double tol = kDefaultClassifyTol) {
  if (!s.is_real()) throw InputError("fit_real_power needs real points and values");
  double c = value_at_one(s).real();

  std::vector<double> lx, lr;
  std::size_t positives = 0;
  for (const auto& x : s.samples()) {
    double p = x.point.real();
    if (p > 0.0 && p != 1.0) ++positives;
  }
  if (positives < 3) throw InputError("need at least 3 positive sample points besides 1");

  ClassificationResult r;
  if (c == 0.0) {
    bool all_zero = std::all_of(s.samples().begin(), s.samples().end(), [](const Sample& x) { return x.value == 0.0; });
    if (!all_zero) throw ClassificationError("k1_zero", "K(1) = 0 while other samples are nonzero");
    r.member = PowerFamilyMember::zero();
    return r;
  }

  for (const auto& x : s.samples()) {
    double p = x.point.real();
    if (p <= 0.0) continue;
    double ratio = x.value.real() / c;
    if (!(ratio > 0.0))
      throw ClassificationError("not_in_family", "value at " + detail::fmt(p) + " does not share the sign of K(1)");
    lx.push_back(std::log(p));
    lr.push_back(std::log(ratio));
  }
  double alpha = detail::slope_through_origin(lx, lr);

  std::optional<double> v0;
  if (auto z = s.value_at(cplx(0.0, 0.0))) v0 = z->real();
  bool zero_unsampled = s.domain().contains(0.0) && !v0;

  bool all_c = std::all_of(s.samples().begin(), s.samples().end(),
                           [&](const Sample& x) { return std::abs(x.value.real() - c) <= tol * std::abs(c); });
  if (all_c) {
    r.member = PowerFamilyMember::constant(c);
    r.residual = member_residual(r.member, s);
    if (zero_unsampled) {
      auto phi0 = PowerFamilyMember::phi(c, 0.0);
      r.alternatives.emplace_back(phi0, member_residual(phi0, s));
      r.ambiguous = true;
    }
    detail::add_multiplicativity(r, s);
    return r;
  }

  std::optional<double> plus_at, minus_at;
  for (const auto& x : s.samples()) {
    double p = x.point.real();
    if (p >= 0.0) continue;
    double v = x.value.real() / c;
    if (v > 0.0 && !plus_at) plus_at = p;
    if (v < 0.0 && !minus_at) minus_at = p;
    if (v == 0.0) throw ClassificationError("not_in_family", "K vanishes at the negative point " + detail::fmt(p));
  }
  if (plus_at && minus_at)
    throw ClassificationError("mixed_sign", "sign map is not constant on the negative axis: K(" + detail::fmt(*plus_at) +
                                                ")/K(1) > 0 but K(" + detail::fmt(*minus_at) +
                                                ")/K(1) < 0; this is the 2x2 sign-map profile");
  if (v0 && *v0 != 0.0)
    throw ClassificationError("not_in_family", "non-constant samples must vanish at 0, got K(0) = " + detail::fmt(*v0));

  r.member = minus_at ? PowerFamilyMember::psi(c, alpha) : PowerFamilyMember::phi(c, alpha);
  r.residual = member_residual(r.member, s);
  r.diagnostics.emplace_back("sign_consistency", 0.0);
  if (!plus_at && !minus_at) {
    auto twin = PowerFamilyMember::psi(c, alpha);
    r.alternatives.emplace_back(twin, member_residual(twin, s));
  }
  if (std::abs(alpha) <= tol && zero_unsampled && !minus_at) {
    auto k = PowerFamilyMember::constant(c);
    r.alternatives.emplace_back(k, member_residual(k, s));
    r.ambiguous = true;
  }
  detail::add_multiplicativity(r, s);
  if (r.residual > tol)
    throw ClassificationError("not_in_family", "best power fit " + r.member.to_string() + " leaves residual " +
                                                   detail::fmt(r.residual));
  return r;
}

// Fits K = c * Psi_{alpha, beta} (or the constant c) over a complex region.
// Needs a positive-real subgrid and at least 8 unit-circle angles.
inline ClassificationResult fit_complex_power(const SampleSet& s, double tol = kDefaultClassifyTol) {
  cplx k1 = value_at_one(s);
  if (!(k1.real() > 0.0) || std::abs(k1.imag()) > tol * k1.real())
    throw ClassificationError("k1_not_positive", "K(1) must be a positive real");
  double c = k1.real();

  std::vector<double> lx, lr;
  std::vector<std::pair<double, cplx>> circle;  // (theta, K(z)/c)
  circle.emplace_back(0.0, cplx(1.0, 0.0));
  for (const auto& x : s.samples()) {
    cplx p = x.point;
    if (p == cplx(1.0, 0.0)) continue;
    if (p.imag() == 0.0 && p.real() > 0.0) {
      cplx w = x.value / c;
      if (!(w.real() > 0.0) || std::abs(w.imag()) > tol * w.real())
        throw ClassificationError("not_in_family",
                                  "value at the positive real " + detail::fmt(p.real()) + " is not a positive real");
      lx.push_back(std::log(p.real()));
      lr.push_back(std::log(w.real()));
    }
    if (std::abs(std::abs(p) - 1.0) <= kMatchTol) {
      double theta = (p.imag() == 0.0 && p.real() < 0.0) ? std::numbers::pi : std::arg(p);
      circle.emplace_back(theta, x.value / c);
    }
  }
  if (lx.size() < 3) throw InputError("need at least 3 positive real sample points besides 1");
  if (circle.size() < 9) throw InputError("need at least 8 unit-circle sample angles besides 1");

  for (const auto& x : s.samples()) {
    if (x.point.imag() == 0.0) continue;
    if (auto vc = s.value_at(std::conj(x.point))) {
      double scale = std::max(std::abs(*vc), std::abs(x.value));
      if (relative_gap(*vc, std::conj(x.value), scale) > tol) {
        std::ostringstream os;
        os << "K(conj z) != conj K(z) at z = " << x.point << "; preservers are conjugation-equivariant";
        throw ClassificationError("not_equivariant", os.str());
      }
    }
  }

  double alpha = detail::slope_through_origin(lx, lr);

  for (const auto& [theta, w] : circle)
    if (std::abs(std::abs(w) - 1.0) > tol)
      throw ClassificationError("not_in_family", "|K(z)/K(1)| != 1 on the unit circle at angle " + detail::fmt(theta));

  // Unwrap the phase along increasing angle, anchored at theta = 0.
  std::sort(circle.begin(), circle.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> thetas, phases;
  double prev = 0.0;
  for (std::size_t i = 0; i < circle.size(); ++i) {
    double ph = std::arg(circle[i].second);
    if (i > 0) {
      double step = ph - std::remainder(prev, 2.0 * std::numbers::pi);
      step = std::remainder(step, 2.0 * std::numbers::pi);
      ph = prev + step;
    }
    prev = ph;
    thetas.push_back(circle[i].first);
    phases.push_back(ph);
  }
  std::size_t origin = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (thetas[i] == 0.0) origin = i;
  double offset = phases[origin];
  for (double& ph : phases) ph -= offset;
  double beta_real = detail::slope_through_origin(thetas, phases);
  double beta_round = std::round(beta_real);
  double integrality = std::abs(beta_real - beta_round);
  if (integrality > tol)
    throw ClassificationError("beta_not_integral",
                              "phase slope " + detail::fmt(beta_real) + " on the unit circle is not an integer");
  long beta = static_cast<long>(beta_round);

  ClassificationResult r;
  std::optional<cplx> v0 = s.value_at(cplx(0.0, 0.0));
  bool zero_unsampled = s.domain().contains(cplx(0.0, 0.0)) && !v0;
  bool all_c = std::all_of(s.samples().begin(), s.samples().end(),
                           [&](const Sample& x) { return std::abs(x.value - c) <= tol * c; });
  if (all_c) {
    r.member = PowerFamilyMember::constant(c);
    if (zero_unsampled) {
      auto flat = PowerFamilyMember::complex_power(c, 0.0, 0);
      r.alternatives.emplace_back(flat, member_residual(flat, s));
      r.ambiguous = true;
    }
  } else {
    r.member = PowerFamilyMember::complex_power(c, alpha, beta);
  }
  r.residual = member_residual(r.member, s);
  r.diagnostics.emplace_back("beta_integrality", integrality);
  r.diagnostics.emplace_back("beta_slope", beta_real);
  if (r.residual > tol)
    throw ClassificationError("not_in_family", "best complex power fit " + r.member.to_string() + " leaves residual " +
                                                   detail::fmt(r.residual));
  return r;
}

// ---------------------------------------------------------------------------
// The 2 x 2 sign-map profile
// ---------------------------------------------------------------------------

// K(x) = eps(x) K(|x|) on the negative axis with a power-family base on the
// nonnegative axis.
struct Rank2ExceptionProfile {
  PowerFamilyMember base = PowerFamilyMember::zero();
  std::vector<std::pair<double, int>> eps;  // sampled negative point -> +1 / -1, increasing
  double residual = 0.0;

  bool eps_constant() const {
    return std::all_of(eps.begin(), eps.end(), [&](const auto& e) { return e.second == eps.front().second; });
  }

  // Nearest sampled sign, for points between samples.
  int eps_at(double x) const {
    if (eps.empty()) throw DomainError("profile has no negative samples");
    auto it = std::lower_bound(eps.begin(), eps.end(), x, [](const auto& e, double v) { return e.first < v; });
    if (it == eps.end()) return eps.back().second;
    if (it == eps.begin()) return it->second;
    auto prev = std::prev(it);
    return (x - prev->first <= it->first - x) ? prev->second : it->second;
  }

  double value(double x) const {
    if (x >= 0.0) return eval_member(base, x);
    return eps_at(x) * eval_member(base, -x);
  }
};

inline Rank2ExceptionProfile fit_rank2_exception(const SampleSet& s, double tol = kDefaultClassifyTol) {
  if (!s.is_real()) throw InputError("fit_rank2_exception needs real samples");
  auto axis = s.domain().real_interval();
  if (!axis) throw InputError("fit_rank2_exception needs an interval domain");
  auto nonneg_domain = axis->intersect(Interval(0.0, kInf, true, false));
  if (!nonneg_domain) throw InputError("domain has no nonnegative part");
  auto nonneg = s.filtered([](const Sample& x) { return x.point.real() >= 0.0; }, Region(*nonneg_domain));

  Rank2ExceptionProfile p;
  auto base_fit = fit_real_power(nonneg, tol);
  p.base = base_fit.member;
  if (p.base.family() == Family::psi) p.base = PowerFamilyMember::phi(p.base.c(), p.base.alpha());
  if (p.base.family() == Family::zero) throw ClassificationError("not_in_family", "K vanishes on the positive axis");
  p.residual = base_fit.residual;

  for (const auto& x : s.samples()) {
    double pt = x.point.real();
    if (pt >= 0.0) continue;
    double b = eval_member(p.base, -pt);
    double v = x.value.real();
    if (b == 0.0 || v == 0.0)
      throw ClassificationError("not_in_family", "cannot read a sign at " + detail::fmt(pt));
    p.eps.emplace_back(pt, (v / b) > 0.0 ? 1 : -1);
    p.residual = std::max(p.residual, value_deviation(std::abs(v), std::abs(b)));
  }
  std::sort(p.eps.begin(), p.eps.end());
  if (p.residual > tol)
    throw ClassificationError("not_in_family", "|K(x)| differs from the base at |x|; residual " + detail::fmt(p.residual));
  return p;
}

// K(x) = eps(x) * base(|x|) for x < 0, base(x) otherwise.
inline CandidateFunction make_sign_modulated(const PowerFamilyMember& base, std::function<int(double)> eps,
                                             Region domain, std::string label) {
  if (!base.is_real_valued()) throw InputError("sign modulation needs a real base member");
  return make_real_candidate(
      [base, eps = std::move(eps)](double x) {
        if (x >= 0.0) return eval_member(base, x);
        return eps(x) * eval_member(base, -x);
      },
      std::move(domain), std::move(label));
}

inline CandidateFunction profile_candidate(const Rank2ExceptionProfile& p, Region domain) {
  return make_sign_modulated(p.base, [p](double x) { return p.eps_at(x); }, std::move(domain),
                             "rank2_profile(" + p.base.to_string() + ")");
}

}  // namespace rankone
