#pragma once

// The four Cauchy equations
//   (a) K(x+y) = K(x) + K(y)    (b) K(xy) = K(x) K(y)
//   (c) K(x+y) = K(x) K(y)      (d) K(xy) = K(x) + K(y)
// checked on matched sample triples, the C^n multiplicative predicate, and
// the linear-independence test for distinct characters.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankone/classify.hpp"
#include "rankone/cones.hpp"
#include "rankone/errors.hpp"
#include "rankone/powerfam.hpp"

namespace rankone {

enum class CauchyEquation { additive, multiplicative, exponential, logarithmic };
enum class SolutionKind { zero, linear, power, exp, log };

inline const char* to_string(CauchyEquation e) {
  switch (e) {
    case CauchyEquation::additive: return "additive";
    case CauchyEquation::multiplicative: return "multiplicative";
    case CauchyEquation::exponential: return "exponential";
    case CauchyEquation::logarithmic: return "logarithmic";
  }
  return "unknown";
}

inline const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::zero: return "zero";
    case SolutionKind::linear: return "linear";
    case SolutionKind::power: return "power";
    case SolutionKind::exp: return "exp";
    case SolutionKind::log: return "log";
  }
  return "unknown";
}

inline CauchyEquation parse_equation(std::string_view s) {
  if (s == "a" || s == "additive") return CauchyEquation::additive;
  if (s == "b" || s == "multiplicative") return CauchyEquation::multiplicative;
  if (s == "c" || s == "exponential") return CauchyEquation::exponential;
  if (s == "d" || s == "logarithmic") return CauchyEquation::logarithmic;
  throw InputError("unknown equation '" + std::string(s) + "' (expected a, b, c or d)");
}

struct CauchyVerdict {
  CauchyEquation equation = CauchyEquation::additive;
  // False when the functional identity fails on some matched triple; the
  // solution fields are then unset and `worst` names the triple.
  bool satisfied = true;
  SolutionKind solution = SolutionKind::zero;
  double beta = 0.0;
  std::optional<PowerFamilyMember> member;
  double equation_residual = 0.0;
  // max(equation_residual, deviation of the solution from the samples)
  double residual = 0.0;
  std::size_t triples = 0;
  std::optional<std::pair<cplx, cplx>> worst;
};

inline constexpr double kDefaultCauchyTol = 1e-9;

struct EquationCheck {
  double residual = 0.0;
  std::size_t triples = 0;
  std::optional<std::pair<cplx, cplx>> worst;
};

// Relative residual of the identity over all matched triples. Sum-type
// right-hand sides are scaled by |a| + |b|.
inline EquationCheck equation_residual(const SampleSet& s, CauchyEquation eq) {
  bool additive_arg = eq == CauchyEquation::additive || eq == CauchyEquation::exponential;
  auto triples = matched_triples(s, additive_arg ? Combine::sum : Combine::product);
  if (triples.empty())
    throw InputError(std::string("no sample triples close under ") + (additive_arg ? "addition" : "multiplication") +
                     "; use an arithmetic (a, c) or geometric (b, d) grid");
  const auto& v = s.samples();
  EquationCheck r;
  r.triples = triples.size();
  for (const auto& t : triples) {
    cplx lhs = v[t.xy].value, a = v[t.x].value, b = v[t.y].value;
    double res;
    if (eq == CauchyEquation::additive || eq == CauchyEquation::logarithmic)
      res = relative_gap(lhs, a + b, std::max(std::abs(lhs), std::abs(a) + std::abs(b)));
    else
      res = relative_gap(lhs, a * b, std::max(std::abs(lhs), std::abs(a * b)));
    if (!r.worst || res > r.residual) {
      r.residual = res;
      r.worst = std::pair{v[t.x].point, v[t.y].point};
    }
  }
  return r;
}

// Value of the recorded solution at x.
inline double solution_value(const CauchyVerdict& v, double x) {
  switch (v.solution) {
    case SolutionKind::zero: return 0.0;
    case SolutionKind::linear: return v.beta * x;
    case SolutionKind::power: return eval_member(*v.member, x);
    case SolutionKind::exp: return std::exp(v.beta * x);
    case SolutionKind::log: return v.beta * std::log(x);
  }
  return 0.0;
}

// Recomputes the residual a verdict records.
inline double cauchy_residual(const CauchyVerdict& v, const SampleSet& s) {
  double r = equation_residual(s, v.equation).residual;
  if (!v.satisfied) return r;
  for (const auto& x : s.samples()) r = std::max(r, value_deviation(x.value, solution_value(v, x.point.real())));
  return r;
}

namespace detail {

inline Interval real_domain(const SampleSet& s) {
  if (!s.is_real()) throw InputError("Cauchy classifiers need real points and values");
  auto iv = s.domain().real_interval();
  if (!iv) throw InputError("Cauchy classifiers need an interval domain");
  return *iv;
}

inline CauchyVerdict start(const SampleSet& s, CauchyEquation eq, double tol) {
  auto chk = equation_residual(s, eq);
  CauchyVerdict v;
  v.equation = eq;
  v.equation_residual = chk.residual;
  v.residual = chk.residual;
  v.triples = chk.triples;
  v.worst = chk.worst;
  v.satisfied = chk.residual <= tol;
  return v;
}

inline void finish(CauchyVerdict& v, const SampleSet& s) { v.residual = cauchy_residual(v, s); }

inline bool all_zero(const SampleSet& s) {
  return std::all_of(s.samples().begin(), s.samples().end(), [](const Sample& x) { return x.value == 0.0; });
}

}  // namespace detail

inline CauchyVerdict classify_additive(const SampleSet& s, double tol = kDefaultCauchyTol) {
  auto iv = detail::real_domain(s);
  if (!iv.contains_interior(0.0)) throw InputError("additive classification needs 0 inside the domain");
  auto v = detail::start(s, CauchyEquation::additive, tol);
  if (!v.satisfied) return v;
  std::vector<double> xs, ys;
  for (const auto& x : s.samples()) {
    xs.push_back(x.point.real());
    ys.push_back(x.value.real());
  }
  v.solution = SolutionKind::linear;
  v.beta = detail::slope_through_origin(xs, ys);
  detail::finish(v, s);
  return v;
}

inline CauchyVerdict classify_multiplicative(const SampleSet& s, double tol = kDefaultCauchyTol) {
  detail::real_domain(s);
  double k1 = value_at_one(s).real();
  if (k1 == 0.0 && !detail::all_zero(s))
    throw ClassificationError("inconsistent_with_theorem", "K(1) = 0 forces K = 0, but nonzero samples exist");
  if (k1 != 0.0 && std::abs(k1 - 1.0) > tol)
    throw ClassificationError("inconsistent_with_theorem",
                              "a multiplicative K that is not identically zero has K(1) = 1, got " + detail::fmt(k1));
  auto v = detail::start(s, CauchyEquation::multiplicative, tol);
  if (!v.satisfied) return v;
  if (k1 == 0.0) {
    v.solution = SolutionKind::zero;
  } else {
    auto fit = fit_real_power(s, std::max(tol, kDefaultClassifyTol));
    const auto& m = fit.member;
    v.solution = SolutionKind::power;
    switch (m.family()) {
      case Family::constant: v.member = PowerFamilyMember::constant(1.0); break;
      case Family::phi: v.member = PowerFamilyMember::phi(1.0, m.alpha()); break;
      case Family::psi: v.member = PowerFamilyMember::psi(1.0, m.alpha()); break;
      default: v.member = m; break;
    }
  }
  detail::finish(v, s);
  return v;
}

inline CauchyVerdict classify_exponential(const SampleSet& s, double tol = kDefaultCauchyTol) {
  auto iv = detail::real_domain(s);
  if (!iv.contains_interior(0.0)) throw InputError("exponential classification needs 0 inside the domain");
  bool any_zero = false, any_nonzero = false;
  for (const auto& x : s.samples()) {
    double val = x.value.real();
    if (val == 0.0) any_zero = true;
    else any_nonzero = true;
    if (val < 0.0)
      throw ClassificationError("inconsistent_with_theorem",
                                "K(x) = K(x/2)^2 is nonnegative, but K(" + detail::fmt(x.point.real()) + ") < 0");
  }
  if (any_zero && any_nonzero)
    throw ClassificationError("inconsistent_with_theorem", "a zero value forces K = 0, but nonzero samples exist");
  auto v = detail::start(s, CauchyEquation::exponential, tol);
  if (!v.satisfied) return v;
  if (any_zero) {
    v.solution = SolutionKind::zero;
  } else {
    std::vector<double> xs, ys;
    for (const auto& x : s.samples()) {
      xs.push_back(x.point.real());
      ys.push_back(std::log(x.value.real()));
    }
    v.solution = SolutionKind::exp;
    v.beta = detail::slope_through_origin(xs, ys);
  }
  detail::finish(v, s);
  return v;
}

inline CauchyVerdict classify_logarithmic(const SampleSet& s, double tol = kDefaultCauchyTol) {
  auto iv = detail::real_domain(s);
  if (!iv.contains_interior(1.0)) throw InputError("logarithmic classification needs 1 inside the domain");
  if (iv.contains(0.0)) {
    if (!detail::all_zero(s))
      throw ClassificationError("inconsistent_with_theorem",
                                "K(0) = K(x) + K(0) forces K = 0 when 0 is in the domain, but nonzero samples exist");
    auto v = detail::start(s, CauchyEquation::logarithmic, tol);
    if (!v.satisfied) return v;
    v.solution = SolutionKind::zero;
    detail::finish(v, s);
    return v;
  }
  auto v = detail::start(s, CauchyEquation::logarithmic, tol);
  if (!v.satisfied) return v;
  std::vector<double> xs, ys;
  for (const auto& x : s.samples()) {
    xs.push_back(std::log(x.point.real()));
    ys.push_back(x.value.real());
  }
  v.solution = SolutionKind::log;
  v.beta = detail::slope_through_origin(xs, ys);
  detail::finish(v, s);
  return v;
}

inline CauchyVerdict classify_cauchy(const SampleSet& s, CauchyEquation eq, double tol = kDefaultCauchyTol) {
  switch (eq) {
    case CauchyEquation::additive: return classify_additive(s, tol);
    case CauchyEquation::multiplicative: return classify_multiplicative(s, tol);
    case CauchyEquation::exponential: return classify_exponential(s, tol);
    case CauchyEquation::logarithmic: return classify_logarithmic(s, tol);
  }
  throw InputError("unknown equation");
}

// Whether the multiplicative member is n times continuously differentiable,
// including at the origin: 0, 1, x^k for integer 0 < k <= n (phi for even k,
// psi for odd k), or phi/psi with alpha > n.
inline bool is_Cn_multiplicative(const PowerFamilyMember& m, int n) {
  if (n < 0) throw InputError("n must be nonnegative");
  switch (m.family()) {
    case Family::zero: return true;
    case Family::constant: return m.c() == 1.0;
    case Family::complex_power: throw InputError("is_Cn_multiplicative needs a real-valued member");
    case Family::phi:
    case Family::psi: {
      if (m.c() != 1.0) return false;
      double a = m.alpha();
      if (a > n) return true;
      if (a <= 0.0 || a != std::floor(a)) return false;
      bool even = std::fmod(a, 2.0) == 0.0;
      return m.family() == Family::phi ? even : !even;
    }
  }
  return false;
}

struct IndependenceResult {
  bool independent = false;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  double threshold = 0.0;
};

inline constexpr double kIndependenceRelTol = 1e-8;

// Evaluation matrix E[p][j] = members[j](grid[p]); independent iff its
// smallest singular value exceeds rel_tol times the largest.
inline IndependenceResult dedekind_independence(const std::vector<PowerFamilyMember>& members,
                                                const std::vector<cplx>& grid,
                                                double rel_tol = kIndependenceRelTol) {
  if (members.empty()) throw InputError("need at least one member");
  if (grid.size() < members.size()) throw InputError("grid must have at least as many points as members");
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (members[i] == members[j]) throw InputError("duplicate member " + members[i].to_string());

  Eigen::MatrixXcd e(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    bool nonzero = false;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      cplx val = eval_member(members[j], grid[p]);
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
        throw NumericalError("member " + members[j].to_string() + " is not finite at grid point " +
                             std::to_string(p));
      e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = val;
      if (val != cplx(0.0, 0.0)) nonzero = true;
    }
    if (!nonzero) throw InputError("member " + members[j].to_string() + " vanishes on the whole grid");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e);
  const auto& sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericalError("singular value decomposition produced non-finite values");
  IndependenceResult r;
  r.largest_singular_value = sv(0);
  r.smallest_singular_value = sv(sv.size() - 1);
  r.threshold = rel_tol * r.largest_singular_value;
  r.independent = r.smallest_singular_value > r.threshold;
  return r;
}

}  // namespace rankone
