#pragma once

// Matrix domain types and membership tests for the rank-constrained cones
// P_n^k(S): Hermitian positive semidefinite n x n matrices of rank at most k
// with every entry in S.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rankone/errors.hpp"

namespace rankone {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Interval
// ---------------------------------------------------------------------------

class Interval {
 public:
  Interval(double lo, double hi, bool lo_closed, bool hi_closed)
      : lo_(lo), hi_(hi), lo_closed_(lo_closed), hi_closed_(hi_closed) {
    if (std::isnan(lo) || std::isnan(hi)) throw InputError("interval endpoint is NaN");
    if ((std::isinf(lo) && lo_closed) || (std::isinf(hi) && hi_closed))
      throw InputError("infinite interval endpoints cannot be closed");
    if (lo > hi) throw InputError("interval has lo > hi");
    if (lo == hi && !(lo_closed && hi_closed))
      throw InputError("degenerate interval must be closed at both ends");
  }

  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval point(double x) { return {x, x, true, true}; }
  static Interval real_line() { return {-kInf, kInf, false, false}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool lo_closed() const noexcept { return lo_closed_; }
  bool hi_closed() const noexcept { return hi_closed_; }
  bool degenerate() const noexcept { return lo_ == hi_; }

  bool contains(double x) const noexcept {
    if (std::isnan(x)) return false;
    bool above = lo_closed_ ? x >= lo_ : x > lo_;
    bool below = hi_closed_ ? x <= hi_ : x < hi_;
    return above && below;
  }

  bool contains_interior(double x) const noexcept { return lo_ < x && x < hi_; }

  // True iff every point of `other` lies in this interval.
  bool contains(const Interval& other) const noexcept {
    bool lo_ok = other.lo_ > lo_ || (other.lo_ == lo_ && (lo_closed_ || !other.lo_closed_));
    bool hi_ok = other.hi_ < hi_ || (other.hi_ == hi_ && (hi_closed_ || !other.hi_closed_));
    return lo_ok && hi_ok;
  }

  // Intersection with another interval; nullopt when empty.
  std::optional<Interval> intersect(const Interval& o) const {
    double lo = lo_;
    bool lc = lo_closed_;
    if (o.lo_ > lo || (o.lo_ == lo && !o.lo_closed_)) {
      lo = o.lo_;
      lc = o.lo_closed_;
    }
    double hi = hi_;
    bool hc = hi_closed_;
    if (o.hi_ < hi || (o.hi_ == hi && !o.hi_closed_)) {
      hi = o.hi_;
      hc = o.hi_closed_;
    }
    if (lo > hi || (lo == hi && !(lc && hc))) return std::nullopt;
    return Interval(lo, hi, lc, hc);
  }

  // I_+ = I ∩ (0, inf)
  std::optional<Interval> positive_part() const { return intersect(Interval(0.0, kInf, false, false)); }
  // I_- = I ∩ (-inf, 0)
  std::optional<Interval> negative_part() const { return intersect(Interval(-kInf, 0.0, false, false)); }

  // {-x : x in I}
  Interval reflected() const { return {-hi_, -lo_, hi_closed_, lo_closed_}; }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    if (degenerate()) {
      os << '{' << lo_ << '}';
      return os.str();
    }
    os << (lo_closed_ ? '[' : '(') << lo_ << ',' << hi_ << (hi_closed_ ? ']' : ')');
    return os.str();
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
  bool lo_closed_;
  bool hi_closed_;
};

// Sorts and merges overlapping or touching intervals.
inline std::vector<Interval> merge_intervals(std::vector<Interval> parts) {
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
    if (a.lo() != b.lo()) return a.lo() < b.lo();
    return a.lo_closed() && !b.lo_closed();
  });
  std::vector<Interval> out;
  for (const auto& p : parts) {
    if (!out.empty()) {
      const Interval& last = out.back();
      bool joins = p.lo() < last.hi() || (p.lo() == last.hi() && (p.lo_closed() || last.hi_closed()));
      if (joins) {
        double hi = last.hi();
        bool hc = last.hi_closed();
        if (p.hi() > hi || (p.hi() == hi && p.hi_closed())) {
          hi = p.hi();
          hc = p.hi_closed();
        }
        out.back() = Interval(last.lo(), hi, last.lo_closed(), hc);
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

struct Disc {
  cplx center;
  double radius;  // > 0, may be infinite
  bool closed;
};

// Centered at the origin.
struct Annulus {
  double r_in;
  double r_out;
  bool in_closed;
  bool out_closed;
};

struct UnitCircle {};

// Entry domain: a real interval or a complex set built from discs, annuli,
// the unit circle and unions of these.
class Region {
 public:
  // Points whose modulus is within this many units of roundoff from 1 count
  // as lying on the unit circle.
  static constexpr double kCircleSlack = 4.0 * DBL_EPSILON;

  Region(Interval iv) : node_(std::move(iv)) {}  // NOLINT: implicit by intent
  static Region interval(Interval iv) { return Region(std::move(iv)); }

  static Region disc(cplx center, double radius, bool closed = false) {
    if (!(radius > 0.0) || std::isnan(radius)) throw InputError("disc radius must be positive");
    if (closed && std::isinf(radius)) throw InputError("infinite disc cannot be closed");
    if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
      throw InputError("disc center must be finite");
    return Region(Node{Disc{center, radius, closed}});
  }

  static Region annulus(double r_in, double r_out, bool in_closed = true, bool out_closed = false) {
    if (!(r_in >= 0.0) || !(r_out > r_in)) throw InputError("annulus needs 0 <= r_in < r_out");
    if (out_closed && std::isinf(r_out)) throw InputError("infinite annulus radius cannot be closed");
    return Region(Node{Annulus{r_in, r_out, in_closed, out_closed}});
  }

  static Region unit_circle() { return Region(Node{UnitCircle{}}); }

  static Region union_of(std::vector<Region> parts) {
    if (parts.empty()) throw InputError("empty region union");
    if (parts.size() == 1) return parts.front();
    return Region(Node{std::make_shared<const std::vector<Region>>(std::move(parts))});
  }

  bool contains(cplx z) const {
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Interval>) {
            return z.imag() == 0.0 && n.contains(z.real());
          } else if constexpr (std::is_same_v<T, Disc>) {
            if (std::isinf(n.radius)) return std::isfinite(z.real()) && std::isfinite(z.imag());
            double d = std::abs(z - n.center);
            return n.closed ? d <= n.radius : d < n.radius;
          } else if constexpr (std::is_same_v<T, Annulus>) {
            double m = std::abs(z);
            bool in_ok = n.in_closed ? m >= n.r_in : m > n.r_in;
            bool out_ok = n.out_closed ? m <= n.r_out : m < n.r_out;
            return in_ok && out_ok;
          } else if constexpr (std::is_same_v<T, UnitCircle>) {
            return std::abs(std::abs(z) - 1.0) <= kCircleSlack;
          } else {
            for (const auto& p : *n)
              if (p.contains(z)) return true;
            return false;
          }
        },
        node_);
  }

  bool contains(double x) const { return contains(cplx(x, 0.0)); }

  // True when the region is a single real interval.
  bool is_real_interval() const { return std::holds_alternative<Interval>(node_); }

  // Every point of the region is real.
  bool is_real() const {
    if (auto* u = std::get_if<Union>(&node_)) {
      return std::all_of((*u)->begin(), (*u)->end(), [](const Region& r) { return r.is_real(); });
    }
    return is_real_interval();
  }

  const Interval& as_interval() const {
    if (auto* iv = std::get_if<Interval>(&node_)) return *iv;
    throw InputError("region is not a real interval: " + to_string());
  }

  // G ∩ R as a list of disjoint intervals in increasing order.
  std::vector<Interval> real_section() const {
    std::vector<Interval> parts;
    collect_real_section(parts);
    return merge_intervals(std::move(parts));
  }

  // G ∩ R when it is a single interval.
  std::optional<Interval> real_interval() const {
    auto parts = real_section();
    if (parts.size() != 1) return std::nullopt;
    return parts.front();
  }

  // Sufficient test: each constituent is symmetric about the real axis.
  bool closed_under_conjugation() const {
    return std::visit(
        [](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return n.center.imag() == 0.0;
          } else if constexpr (std::is_same_v<T, Union>) {
            return std::all_of(n->begin(), n->end(), [](const Region& r) { return r.closed_under_conjugation(); });
          } else {
            return true;
          }
        },
        node_);
  }

  // z in G implies |z| in G.
  bool closed_under_modulus() const {
    auto section = real_section();
    std::vector<Interval> images;
    collect_modulus_images(images);
    for (const auto& img : merge_intervals(std::move(images))) {
      bool covered = std::any_of(section.begin(), section.end(), [&](const Interval& s) { return s.contains(img); });
      if (!covered) return false;
    }
    return true;
  }

  // I_z = {a > 0 : a z in G} for unit-modulus z, as disjoint intervals.
  std::vector<Interval> ray_section(cplx z) const {
    if (std::abs(std::abs(z) - 1.0) > kCircleSlack) throw InputError("ray direction must have unit modulus");
    std::vector<Interval> parts;
    collect_ray_section(z, parts);
    return merge_intervals(std::move(parts));
  }

  // I_z as a single interval; throws when it is empty or disconnected.
  Interval ray_interval(cplx z) const {
    auto parts = ray_section(z);
    if (parts.size() != 1) {
      std::ostringstream os;
      os << "ray section at " << z << " is " << (parts.empty() ? "empty" : "not an interval");
      throw DomainError(os.str());
    }
    return parts.front();
  }

  std::string to_string() const {
    return std::visit(
        [](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          std::ostringstream os;
          os.precision(17);
          if constexpr (std::is_same_v<T, Interval>) {
            os << n.to_string();
          } else if constexpr (std::is_same_v<T, Disc>) {
            os << (n.closed ? "closed_disc(" : "disc(") << n.center.real() << (n.center.imag() < 0 ? "" : "+")
               << n.center.imag() << "i," << n.radius << ')';
          } else if constexpr (std::is_same_v<T, Annulus>) {
            os << "annulus" << (n.in_closed ? '[' : '(') << n.r_in << ',' << n.r_out << (n.out_closed ? ']' : ')');
          } else if constexpr (std::is_same_v<T, UnitCircle>) {
            os << "circle";
          } else {
            bool first = true;
            for (const auto& p : *n) {
              if (!first) os << " u ";
              os << p.to_string();
              first = false;
            }
          }
          return os.str();
        },
        node_);
  }

 private:
  using Union = std::shared_ptr<const std::vector<Region>>;
  using Node = std::variant<Interval, Disc, Annulus, UnitCircle, Union>;

  explicit Region(Node node) : node_(std::move(node)) {}

  void collect_real_section(std::vector<Interval>& out) const {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Interval>) {
            out.push_back(n);
          } else if constexpr (std::is_same_v<T, Disc>) {
            double ci = std::abs(n.center.imag());
            if (std::isinf(n.radius)) {
              out.push_back(Interval::real_line());
            } else if (ci < n.radius) {
              double w = std::sqrt((n.radius - ci) * (n.radius + ci));
              double c = n.center.real();
              out.emplace_back(c - w, c + w, n.closed, n.closed);
            } else if (ci == n.radius && n.closed) {
              out.push_back(Interval::point(n.center.real()));
            }
          } else if constexpr (std::is_same_v<T, Annulus>) {
            if (n.r_in == 0.0 && n.in_closed) {
              out.emplace_back(-n.r_out, n.r_out, n.out_closed, n.out_closed);
            } else {
              out.emplace_back(-n.r_out, -n.r_in, n.out_closed, n.in_closed);
              out.emplace_back(n.r_in, n.r_out, n.in_closed, n.out_closed);
            }
          } else if constexpr (std::is_same_v<T, UnitCircle>) {
            out.push_back(Interval::point(-1.0));
            out.push_back(Interval::point(1.0));
          } else {
            for (const auto& p : *n) p.collect_real_section(out);
          }
        },
        node_);
  }

  void collect_modulus_images(std::vector<Interval>& out) const {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Interval>) {
            if (auto p = n.positive_part()) out.push_back(*p);
            if (auto m = n.negative_part()) out.push_back(m->reflected());
            if (n.contains(0.0)) out.push_back(Interval::point(0.0));
          } else if constexpr (std::is_same_v<T, Disc>) {
            if (std::isinf(n.radius)) {
              out.emplace_back(0.0, kInf, true, false);
              return;
            }
            double c = std::abs(n.center);
            double top = c + n.radius;
            if (c > n.radius) {
              out.emplace_back(c - n.radius, top, n.closed, n.closed);
            } else {
              bool has_zero = c < n.radius || n.closed;
              out.emplace_back(0.0, top, has_zero, n.closed);
            }
          } else if constexpr (std::is_same_v<T, Annulus>) {
            out.emplace_back(n.r_in, n.r_out, n.in_closed, n.out_closed);
          } else if constexpr (std::is_same_v<T, UnitCircle>) {
            out.push_back(Interval::point(1.0));
          } else {
            for (const auto& p : *n) p.collect_modulus_images(out);
          }
        },
        node_);
  }

  void collect_ray_section(cplx z, std::vector<Interval>& out) const {
    static const Interval kPositive(0.0, kInf, false, false);
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Interval>) {
            if (z.imag() != 0.0) return;
            if (z.real() > 0.0) {
              if (auto p = n.positive_part()) out.push_back(*p);
            } else if (auto m = n.negative_part()) {
              out.push_back(m->reflected());
            }
          } else if constexpr (std::is_same_v<T, Disc>) {
            if (std::isinf(n.radius)) {
              out.push_back(kPositive);
              return;
            }
            // |a z - c|^2 = a^2 - 2 a Re(conj(z) c) + |c|^2 < r^2
            double p = (std::conj(z) * n.center).real();
            double q = std::norm(n.center) - n.radius * n.radius;
            double disc = p * p - q;
            if (disc < 0.0 || (disc == 0.0 && !n.closed)) return;
            double s = std::sqrt(disc);
            Interval chord(p - s, p + s, n.closed, n.closed);
            if (auto r = chord.intersect(kPositive)) out.push_back(*r);
          } else if constexpr (std::is_same_v<T, Annulus>) {
            Interval radial(n.r_in, n.r_out, n.in_closed, n.out_closed);
            if (auto r = radial.intersect(kPositive)) out.push_back(*r);
          } else if constexpr (std::is_same_v<T, UnitCircle>) {
            out.push_back(Interval::point(1.0));
          } else {
            for (const auto& p : *n) p.collect_ray_section(z, out);
          }
        },
        node_);
  }

  Node node_;
};

// ---------------------------------------------------------------------------
// HermitianMatrix
// ---------------------------------------------------------------------------

// Dense Hermitian matrix stored as its packed upper triangle; the lower
// triangle is the conjugate mirror, so symmetry holds exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n) : n_(n), upper_(n * (n + 1) / 2) {
    if (n == 0) throw InputError("matrix dimension must be at least 1");
  }

  // Builds from f(i, j) evaluated on i <= j. Diagonal values must be real.
  template <typename F>
  static HermitianMatrix from_upper(std::size_t n, F&& f) {
    HermitianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        cplx v = f(i, j);
        if (i == j && v.imag() != 0.0) throw InputError("Hermitian diagonal entries must be real");
        m.upper_[m.index(i, j)] = v;
      }
    }
    return m;
  }

  // Full rows; rejected unless exactly Hermitian.
  static HermitianMatrix from_rows(const std::vector<std::vector<cplx>>& rows) {
    std::size_t n = rows.size();
    for (const auto& r : rows)
      if (r.size() != n) throw InputError("matrix rows must form a square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (rows[i][j] != std::conj(rows[j][i])) {
          std::ostringstream os;
          os << "matrix is not Hermitian at (" << i << ',' << j << ')';
          throw InputError(os.str());
        }
    return from_upper(n, [&](std::size_t i, std::size_t j) { return rows[i][j]; });
  }

  static HermitianMatrix from_real_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<cplx>> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.emplace_back(r.begin(), r.end());
    return from_rows(c);
  }

  static HermitianMatrix identity(std::size_t n) {
    return from_upper(n, [](std::size_t i, std::size_t j) { return cplx(i == j ? 1.0 : 0.0); });
  }
  static HermitianMatrix constant(std::size_t n, double v) {
    return from_upper(n, [v](std::size_t, std::size_t) { return cplx(v); });
  }

  std::size_t dim() const noexcept { return n_; }

  cplx operator()(std::size_t i, std::size_t j) const {
    return i <= j ? upper_[index(i, j)] : std::conj(upper_[index(j, i)]);
  }

  bool is_real() const noexcept {
    return std::all_of(upper_.begin(), upper_.end(), [](const cplx& v) { return v.imag() == 0.0; });
  }

  bool all_finite() const noexcept {
    return std::all_of(upper_.begin(), upper_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

  double trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += upper_[index(i, i)].real();
    return t;
  }

  // P M P^T for the permutation sending row i to perm[i].
  HermitianMatrix permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != n_) throw InputError("permutation size mismatch");
    std::vector<std::size_t> inv(n_);
    for (std::size_t i = 0; i < n_; ++i) inv[perm[i]] = i;
    return from_upper(n_, [&](std::size_t i, std::size_t j) { return (*this)(inv[i], inv[j]); });
  }

  Eigen::MatrixXcd to_eigen() const {
    Eigen::MatrixXcd a(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
    return a;
  }

  Eigen::MatrixXd to_eigen_real() const {
    Eigen::MatrixXd a(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) a(i, j) = (*this)(i, j).real();
    return a;
  }

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n_ - i * (i - 1) / 2 + (j - i); }

  std::size_t n_;
  std::vector<cplx> upper_;
};

// ---------------------------------------------------------------------------
// Cone specification and tolerances
// ---------------------------------------------------------------------------

struct ToleranceProfile {
  double psd_tol = 1e-10;
  double rank_tol = 1e-8;

  void validate() const {
    if (!(psd_tol >= 0.0) || !std::isfinite(psd_tol) || !(rank_tol >= 0.0) || !std::isfinite(rank_tol))
      throw InputError("tolerances must be finite and nonnegative");
  }
};

class ConeSpec {
 public:
  ConeSpec(std::size_t n, std::size_t k, Region domain) : n_(n), k_(k), domain_(std::move(domain)) {
    if (n < 1) throw InputError("cone dimension must be at least 1");
    if (k < 1 || k > n) throw InputError("cone rank bound must satisfy 1 <= k <= n");
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  const Region& domain() const noexcept { return domain_; }

 private:
  std::size_t n_;
  std::size_t k_;
  Region domain_;
};

// ---------------------------------------------------------------------------
// Spectral decisions
// ---------------------------------------------------------------------------

// Eigenvalues in nondecreasing order.
inline std::vector<double> eigenvalues(const HermitianMatrix& m) {
  if (!m.all_finite()) throw InputError("matrix has non-finite entries");
  std::vector<double> out(m.dim());
  if (m.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_eigen_real(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.to_eigen(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double spectral_scale(std::span<const double> eigs) {
  double s = 0.0;
  for (double e : eigs) s = std::max(s, std::abs(e));
  return s;
}

struct PsdReport {
  bool psd;
  double min_eigenvalue;
  double threshold;  // min_eigenvalue must be >= -threshold
};

inline PsdReport psd_from_spectrum(std::span<const double> eigs, const ToleranceProfile& tol) {
  double threshold = tol.psd_tol * std::max(1.0, spectral_scale(eigs));
  double lo = eigs.empty() ? 0.0 : *std::min_element(eigs.begin(), eigs.end());
  return {lo >= -threshold, lo, threshold};
}

inline std::size_t rank_from_spectrum(std::span<const double> eigs, const ToleranceProfile& tol) {
  double threshold = tol.rank_tol * std::max(1.0, spectral_scale(eigs));
  return static_cast<std::size_t>(
      std::count_if(eigs.begin(), eigs.end(), [&](double e) { return std::abs(e) > threshold; }));
}

inline PsdReport is_psd(const HermitianMatrix& m, const ToleranceProfile& tol = {}) {
  auto eigs = eigenvalues(m);
  return psd_from_spectrum(eigs, tol);
}

inline std::size_t numeric_rank(const HermitianMatrix& m, const ToleranceProfile& tol = {}) {
  auto eigs = eigenvalues(m);
  return rank_from_spectrum(eigs, tol);
}

// ---------------------------------------------------------------------------
// Cone membership
// ---------------------------------------------------------------------------

enum class ConeFailure { none, dimension, entry_domain, not_psd, rank_exceeded };

inline const char* to_string(ConeFailure f) {
  switch (f) {
    case ConeFailure::none: return "none";
    case ConeFailure::dimension: return "dimension";
    case ConeFailure::entry_domain: return "entry_domain";
    case ConeFailure::not_psd: return "not_psd";
    case ConeFailure::rank_exceeded: return "rank_exceeded";
  }
  return "unknown";
}

struct MembershipReport {
  bool in_cone = false;
  ConeFailure first_failure = ConeFailure::none;
  std::size_t row = 0;  // offending entry for entry_domain
  std::size_t col = 0;
  double min_eigenvalue = 0.0;
  double psd_threshold = 0.0;
  std::size_t rank = 0;
};

// Entry-domain checks are exact; positivity and rank use `tol`.
inline MembershipReport cone_membership(const HermitianMatrix& m, const ConeSpec& spec,
                                        const ToleranceProfile& tol = {}) {
  MembershipReport r;
  if (m.dim() != spec.n()) {
    r.first_failure = ConeFailure::dimension;
    return r;
  }
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (!spec.domain().contains(m(i, j))) {
        r.first_failure = ConeFailure::entry_domain;
        r.row = i;
        r.col = j;
        return r;
      }
    }
  }
  auto eigs = eigenvalues(m);
  auto psd = psd_from_spectrum(eigs, tol);
  r.min_eigenvalue = psd.min_eigenvalue;
  r.psd_threshold = psd.threshold;
  r.rank = rank_from_spectrum(eigs, tol);
  if (!psd.psd) {
    r.first_failure = ConeFailure::not_psd;
  } else if (r.rank > spec.k()) {
    r.first_failure = ConeFailure::rank_exceeded;
  } else {
    r.in_cone = true;
  }
  return r;
}

// v v^*: exactly Hermitian with real diagonal |v_i|^2.
inline HermitianMatrix rank1_from_vector(std::span<const cplx> v) {
  if (v.empty()) throw InputError("rank-one builder needs a nonempty vector");
  for (const auto& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw InputError("vector has non-finite entries");
  return HermitianMatrix::from_upper(v.size(), [&](std::size_t i, std::size_t j) {
    if (i == j) return cplx(std::norm(v[i]), 0.0);
    return v[i] * std::conj(v[j]);
  });
}

inline HermitianMatrix rank1_from_vector(std::span<const double> v) {
  std::vector<cplx> c(v.begin(), v.end());
  return rank1_from_vector(std::span<const cplx>(c));
}

inline HermitianMatrix rank1_from_vector(std::initializer_list<double> v) {
  std::vector<double> d(v);
  return rank1_from_vector(std::span<const double>(d));
}

}  // namespace rankone
