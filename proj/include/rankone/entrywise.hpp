#pragma once

// Entrywise application f[A] = (f(a_ij)), witness matrices in P_n^1(domain),
// and randomized falsification of rank-one preservation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rankone/cones.hpp"
#include "rankone/errors.hpp"
#include "rankone/powerfam.hpp"

namespace rankone {

// ---------------------------------------------------------------------------
// Candidate functions and entrywise images
// ---------------------------------------------------------------------------

struct CandidateFunction {
  std::function<cplx(cplx)> evaluator;
  Region domain;
  std::string label;
  bool real_valued = true;
  // Optional restriction inside `domain` (tabulated functions); empty means
  // defined everywhere on `domain`.
  std::function<bool(cplx)> support;

  bool defined_at(cplx z) const { return domain.contains(z) && (!support || support(z)); }
  cplx operator()(cplx z) const { return evaluator(z); }
};

inline CandidateFunction make_real_candidate(std::function<double(double)> f, Region domain, std::string label) {
  auto eval = [f = std::move(f), label](cplx z) -> cplx {
    if (z.imag() != 0.0) throw DomainError("real function " + label + " applied to a non-real point");
    return {f(z.real()), 0.0};
  };
  return {std::move(eval), std::move(domain), std::move(label), true, {}};
}

inline CandidateFunction make_complex_candidate(std::function<cplx(cplx)> f, Region domain, std::string label) {
  return {std::move(f), std::move(domain), std::move(label), false, {}};
}

inline CandidateFunction make_member_candidate(const PowerFamilyMember& m, Region domain) {
  return {[m](cplx z) { return eval_member(m, z); }, std::move(domain), m.to_string(), m.is_real_valued(), {}};
}

// Raw n x n image of f applied to every entry; Hermitian symmetry is a
// property to be checked, not assumed.
class EntrywiseImage {
 public:
  EntrywiseImage(std::size_t n, std::vector<cplx> raw) : n_(n), raw_(std::move(raw)) {}

  std::size_t dim() const noexcept { return n_; }
  cplx operator()(std::size_t i, std::size_t j) const { return raw_[i * n_ + j]; }

  // First position (i <= j) where the image is not Hermitian.
  std::optional<std::pair<std::size_t, std::size_t>> asymmetry() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if ((*this)(i, i).imag() != 0.0) return std::pair{i, i};
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(j, i) != std::conj((*this)(i, j))) return std::pair{i, j};
    }
    return std::nullopt;
  }

  bool hermitian() const { return !asymmetry().has_value(); }

  HermitianMatrix matrix() const {
    if (!hermitian()) throw DomainError("entrywise image lost Hermitian symmetry");
    return HermitianMatrix::from_upper(n_, [&](std::size_t i, std::size_t j) { return (*this)(i, j); });
  }

 private:
  std::size_t n_;
  std::vector<cplx> raw_;
};

inline EntrywiseImage apply_entrywise(const CandidateFunction& f, const HermitianMatrix& m) {
  std::size_t n = m.dim();
  std::vector<cplx> raw(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx a = m(i, j);
      if (!f.defined_at(a)) {
        std::ostringstream os;
        os << "entry (" << i << ',' << j << ") = " << a << " is outside the domain of " << f.label;
        throw DomainError(os.str());
      }
      raw[i * n + j] = f(a);
    }
  }
  return {n, std::move(raw)};
}

struct MinorIndex {
  std::size_t r0, r1, c0, c1;
  friend bool operator==(const MinorIndex&, const MinorIndex&) = default;
};

// M[r0][c0] M[r1][c1] - M[r0][c1] M[r1][c0]
template <typename Matrix>
cplx minor2(const Matrix& m, MinorIndex idx) {
  std::size_t n = m.dim();
  if (idx.r0 >= n || idx.r1 >= n || idx.c0 >= n || idx.c1 >= n) throw InputError("minor index out of range");
  if (idx.r0 == idx.r1 || idx.c0 == idx.c1) throw InputError("minor rows and columns must be distinct");
  return m(idx.r0, idx.c0) * m(idx.r1, idx.c1) - m(idx.r0, idx.c1) * m(idx.r1, idx.c0);
}

template <typename Matrix>
cplx minor2(const Matrix& m, std::pair<std::size_t, std::size_t> rows, std::pair<std::size_t, std::size_t> cols) {
  return minor2(m, MinorIndex{rows.first, rows.second, cols.first, cols.second});
}

// ---------------------------------------------------------------------------
// Witness constructions
// ---------------------------------------------------------------------------

using ParamList = std::vector<std::pair<std::string, double>>;

struct Witness {
  std::string construction;
  ParamList params;
  HermitianMatrix matrix;
  // The 2x2 minor whose vanishing the construction is designed to test.
  std::optional<MinorIndex> minor;
};

namespace detail {

inline void require_dim(std::size_t n, std::size_t min, const char* what) {
  if (n < min) {
    std::ostringstream os;
    os << what << " needs n >= " << min;
    throw InputError(os.str());
  }
}

inline std::vector<cplx> ones_with_tail(std::size_t n, std::initializer_list<cplx> tail) {
  std::vector<cplx> v(n, cplx(1.0, 0.0));
  std::size_t k = n - tail.size();
  for (const auto& t : tail) v[k++] = t;
  return v;
}

}  // namespace detail

// u_x u_x^T with u_x = (1, ..., 1, x).
inline HermitianMatrix witness_ones_x(std::size_t n, double x) {
  detail::require_dim(n, 2, "witness_ones_x");
  auto v = detail::ones_with_tail(n, {x});
  return rank1_from_vector(std::span<const cplx>(v));
}

// u u^T with u = (1, ..., 1, x, y).
inline HermitianMatrix witness_ones_xy(std::size_t n, double x, double y) {
  detail::require_dim(n, 3, "witness_ones_xy");
  auto v = detail::ones_with_tail(n, {x, y});
  return rank1_from_vector(std::span<const cplx>(v));
}

// Rows/cols chosen so the image minor is K(x)K(y) - K(1)K(xy).
inline MinorIndex ones_xy_minor(std::size_t n) { return {n - 3, n - 2, n - 1, n - 3}; }

// [[|x|, x], [x, |x|]] padded with zeros.
inline HermitianMatrix witness_neg_block(std::size_t n, double x) {
  detail::require_dim(n, 2, "witness_neg_block");
  if (!(x < 0.0)) throw InputError("witness_neg_block needs x < 0");
  return HermitianMatrix::from_upper(n, [x](std::size_t i, std::size_t j) -> cplx {
    if (i > 1 || j > 1) return 0.0;
    return i == j ? -x : x;
  });
}

// u u^T with u = (1, ..., 1, y/x, x), x < y < 0.
inline HermitianMatrix witness_eps(std::size_t n, double x, double y) {
  detail::require_dim(n, 3, "witness_eps");
  if (!(x < y && y < 0.0)) throw InputError("witness_eps needs x < y < 0");
  auto v = detail::ones_with_tail(n, {y / x, x});
  return rank1_from_vector(std::span<const cplx>(v));
}

// Image minor K(1)K(y) - K(y/x)K(x).
inline MinorIndex eps_minor(std::size_t n) { return {n - 3, n - 1, n - 3, n - 2}; }

// u u^T with u = sqrt(x) (a/x, y/x, 1, ..., 1), written entry by entry:
// a^2/x, ay/x, a | y^2/x, y | x.
inline HermitianMatrix witness_eps_far(std::size_t n, double a, double y, double x) {
  detail::require_dim(n, 3, "witness_eps_far");
  if (!(y < a && a < 0.0 && x > 0.0)) throw InputError("witness_eps_far needs y < a < 0 < x");
  return HermitianMatrix::from_upper(n, [&](std::size_t i, std::size_t j) -> cplx {
    if (i == 0 && j == 0) return a * a / x;
    if (i == 0 && j == 1) return a * y / x;
    if (i == 0) return a;
    if (i == 1 && j == 1) return y * y / x;
    if (i == 1) return y;
    return x;
  });
}

// a (+) 0: a single positive corner entry.
inline HermitianMatrix witness_zero_pad(std::size_t n, double a) {
  detail::require_dim(n, 2, "witness_zero_pad");
  if (!(a > 0.0)) throw InputError("witness_zero_pad needs a > 0");
  return HermitianMatrix::from_upper(n, [a](std::size_t i, std::size_t j) -> cplx {
    return (i == 0 && j == 0) ? a : 0.0;
  });
}

enum class ComplexWitness { conj_pair, modulus_split, circle_pair, scale_circle };

inline const char* to_string(ComplexWitness k) {
  switch (k) {
    case ComplexWitness::conj_pair: return "conj_pair";
    case ComplexWitness::modulus_split: return "modulus_split";
    case ComplexWitness::circle_pair: return "circle_pair";
    case ComplexWitness::scale_circle: return "scale_circle";
  }
  return "unknown";
}

struct ComplexWitnessParams {
  cplx z{1.0, 0.0};
  cplx z2{1.0, 0.0};  // z' for circle_pair
  double x = 1.0;     // scale for scale_circle
};

// Builds u u^* for the four complex constructions:
//   conj_pair     u = sqrt|z| (1, ..., 1, conj(z)/|z|)
//   modulus_split u = |z|^{-1/2} (z, |z|, 0, ..., 0)
//   circle_pair   u = (z, conj(z'), 1, ..., 1)
//   scale_circle  u = (x, z, 1, ..., 1)
// Every entry must lie in `region`.
inline HermitianMatrix witness_complex(ComplexWitness kind, std::size_t n, const ComplexWitnessParams& p,
                                       const Region& region) {
  detail::require_dim(n, 3, "witness_complex");
  HermitianMatrix m(n);
  switch (kind) {
    case ComplexWitness::conj_pair: {
      if (p.z == cplx(0.0, 0.0)) throw InputError("conj_pair needs z != 0");
      double r = std::abs(p.z);
      m = HermitianMatrix::from_upper(n, [&](std::size_t i, std::size_t j) -> cplx {
        if (j == n - 1 && i != n - 1) return p.z;
        return {r, 0.0};
      });
      break;
    }
    case ComplexWitness::modulus_split: {
      if (p.z == cplx(0.0, 0.0)) throw InputError("modulus_split needs z != 0");
      double r = std::abs(p.z);
      m = HermitianMatrix::from_upper(n, [&](std::size_t i, std::size_t j) -> cplx {
        if (i == 0 && j == 1) return p.z;
        if (i == j && i < 2) return {r, 0.0};
        return {0.0, 0.0};
      });
      break;
    }
    case ComplexWitness::circle_pair: {
      std::vector<cplx> v(n, cplx(1.0, 0.0));
      v[0] = p.z;
      v[1] = std::conj(p.z2);
      m = rank1_from_vector(std::span<const cplx>(v));
      break;
    }
    case ComplexWitness::scale_circle: {
      if (!(p.x > 0.0)) throw InputError("scale_circle needs x > 0");
      std::vector<cplx> v(n, cplx(1.0, 0.0));
      v[0] = p.x;
      v[1] = p.z;
      m = rank1_from_vector(std::span<const cplx>(v));
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (!region.contains(m(i, j))) {
        std::ostringstream os;
        os << to_string(kind) << " entry (" << i << ',' << j << ") = " << m(i, j) << " escapes region "
           << region.to_string();
        throw ConstructionError(os.str());
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Parameter grids
// ---------------------------------------------------------------------------

// m points strictly inside (a, b), evenly spaced in log scale.
inline std::vector<double> geometric_grid(double a, double b, std::size_t m) {
  std::vector<double> g;
  if (!(a > 0.0) || !(b > a) || m == 0) return g;
  double la = std::log(a), lb = std::log(b);
  for (std::size_t k = 1; k <= m; ++k)
    g.push_back(std::exp(la + (lb - la) * static_cast<double>(k) / static_cast<double>(m + 1)));
  return g;
}

// Grid sizes visited by the coarse-to-fine search; the last is the full grid.
inline constexpr std::size_t kGridLevels[] = {3, 5, 9, 17, 33};
inline constexpr std::size_t kFullGrid = 33;
// Upper envelope used for unbounded domains.
inline constexpr double kUnboundedCap = 100.0;

namespace detail {

struct RealRanges {
  double hi_eff;   // sup I_+ (capped)
  double lo_pos;   // inf I_+
  double neg_mag;  // |inf I| when I has negatives, else 0
  bool has_zero;
  bool has_neg;
};

inline RealRanges real_ranges(const Interval& iv) {
  RealRanges r{};
  auto pos = iv.positive_part();
  r.hi_eff = pos ? std::min(pos->hi(), kUnboundedCap) : 0.0;
  r.lo_pos = pos ? pos->lo() : 0.0;
  auto neg = iv.negative_part();
  r.has_neg = neg.has_value();
  r.neg_mag = neg ? std::min(-neg->lo(), kUnboundedCap) : 0.0;
  r.has_zero = iv.contains(0.0);
  return r;
}

inline void keep_if_in_cone(std::vector<Witness>& out, Witness w, const ConeSpec& spec) {
  if (w.matrix.dim() != spec.n()) return;
  if (cone_membership(w.matrix, spec).in_cone) out.push_back(std::move(w));
}

}  // namespace detail

// Deterministic witness sweep over the real axis of spec.domain with m grid
// points per parameter. Matrices that leave P_n^1(domain) are dropped.
inline std::vector<Witness> real_witnesses(const ConeSpec& spec, const Interval& iv, std::size_t m) {
  std::vector<Witness> out;
  std::size_t n = spec.n();
  auto rr = detail::real_ranges(iv);
  if (rr.hi_eff <= 1.0) return out;

  double a = std::max(std::sqrt(rr.lo_pos), 1.0 / std::sqrt(rr.hi_eff));
  double b = std::sqrt(rr.hi_eff);
  auto grid = geometric_grid(a, b, m);

  if (n >= 3) {
    for (double x : grid)
      for (double y : grid)
        detail::keep_if_in_cone(out, {"ones_xy", {{"x", x}, {"y", y}}, witness_ones_xy(n, x, y), ones_xy_minor(n)},
                                spec);
  }
  for (double x : grid)
    detail::keep_if_in_cone(out, {"ones_x", {{"x", x}}, witness_ones_x(n, x), MinorIndex{n - 2, n - 1, n - 2, n - 1}},
                            spec);

  if (rr.has_neg) {
    double block_top = std::min(rr.neg_mag, rr.hi_eff);
    double lower = std::min(1.0 / std::sqrt(rr.hi_eff), block_top / 2.0);
    for (double g : geometric_grid(lower, block_top, m))
      detail::keep_if_in_cone(out, {"neg_block", {{"x", -g}}, witness_neg_block(n, -g), MinorIndex{0, 1, 0, 1}}, spec);

    if (n >= 3) {
      double near_top = std::min(rr.neg_mag, std::sqrt(rr.neg_mag));
      double near_lo = std::min(1.0 / std::sqrt(rr.hi_eff), near_top / 2.0);
      auto near = geometric_grid(near_lo, near_top, m);
      for (double gx : near)
        for (double gy : near)
          if (gx > gy)
            detail::keep_if_in_cone(out, {"eps", {{"x", -gx}, {"y", -gy}}, witness_eps(n, -gx, -gy), eps_minor(n)},
                                    spec);

      if (rr.neg_mag > 1.0) {
        auto far = geometric_grid(std::sqrt(rr.neg_mag), rr.neg_mag, m);
        for (double gy : far) {
          double x_lo = std::max(gy, gy * gy / rr.hi_eff);
          for (double ga : near) {
            if (!(ga < gy)) continue;
            for (double x : geometric_grid(x_lo, rr.hi_eff, 3))
              detail::keep_if_in_cone(
                  out, {"eps_far", {{"a", -ga}, {"y", -gy}, {"x", x}}, witness_eps_far(n, -ga, -gy, x), MinorIndex{0, 1, 0, 2}},
                  spec);
          }
        }
      }
    }
  }

  if (rr.has_zero) {
    for (double s : geometric_grid(std::max(rr.lo_pos, 1.0 / rr.hi_eff), rr.hi_eff, m))
      detail::keep_if_in_cone(out, {"zero_pad", {{"a", s}}, witness_zero_pad(n, s), MinorIndex{0, 1, 0, 1}}, spec);
  }
  return out;
}

// Sweep of the four complex constructions over a polar grid of the region.
inline std::vector<Witness> complex_witnesses(const ConeSpec& spec, std::size_t m) {
  std::vector<Witness> out;
  std::size_t n = spec.n();
  if (n < 3) return out;
  const Region& g = spec.domain();

  double hi = 1.0;
  for (const auto& s : g.real_section())
    if (s.hi() > hi) hi = s.hi();
  hi = std::min(hi, kUnboundedCap);

  std::vector<double> angles;
  for (std::size_t k = 0; k < m; ++k)
    angles.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(m));

  std::vector<cplx> circle;
  for (double t : angles) circle.push_back(std::polar(1.0, t));

  std::vector<double> radii = geometric_grid(1.0 / hi, hi, m);
  radii.push_back(1.0);

  auto try_add = [&](ComplexWitness kind, const ComplexWitnessParams& p, ParamList params) {
    try {
      auto mat = witness_complex(kind, n, p, g);
      detail::keep_if_in_cone(out, {to_string(kind), std::move(params), std::move(mat), std::nullopt}, spec);
    } catch (const ConstructionError&) {
    }
  };

  std::vector<cplx> points;
  for (double r : radii)
    for (double t : angles)
      if (cplx z = std::polar(r, t); g.contains(z)) points.push_back(z);
  for (auto kind : {ComplexWitness::conj_pair, ComplexWitness::modulus_split}) {
    for (const cplx& z : points) {
      ComplexWitnessParams p;
      p.z = z;
      try_add(kind, p, {{"z_re", z.real()}, {"z_im", z.imag()}});
    }
  }
  for (const cplx& z : circle) {
    for (const cplx& z2 : circle) {
      ComplexWitnessParams p;
      p.z = z;
      p.z2 = z2;
      try_add(ComplexWitness::circle_pair, p,
              {{"z_re", z.real()}, {"z_im", z.imag()}, {"z2_re", z2.real()}, {"z2_im", z2.imag()}});
    }
  }
  for (const cplx& z : circle) {
    for (double x : geometric_grid(1.0 / std::sqrt(hi), std::sqrt(hi), m)) {
      ComplexWitnessParams p;
      p.z = z;
      p.x = x;
      try_add(ComplexWitness::scale_circle, p, {{"x", x}, {"z_re", z.real()}, {"z_im", z.imag()}});
    }
  }
  return out;
}

// Full deterministic sweep in priority order: the multiplicativity
// constructions first, then sign and origin probes, then complex ones.
inline std::vector<Witness> witness_sweep(const ConeSpec& spec, std::size_t m) {
  std::vector<Witness> out;
  if (auto iv = spec.domain().real_interval()) out = real_witnesses(spec, *iv, m);
  if (!spec.domain().is_real()) {
    auto c = complex_witnesses(spec, m);
    out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random rank-one sampling
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator for trial `index` of a run seeded with `seed`.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 1)));
}

inline constexpr int kSampleAttempts = 2000;
// Lower end of sampled products when the domain reaches down to 0.
inline constexpr double kSampleFloor = 1e-2;

namespace detail {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

inline bool entries_in(const HermitianMatrix& m, const Region& g) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      if (!g.contains(m(i, j))) return false;
  return true;
}

struct RealSampler {
  double lo;       // smallest product magnitude
  double hi;       // largest product magnitude, all-positive vectors
  double mixed_hi; // largest product magnitude, sign-mixed vectors (0 = none)
  bool zeros;
};

inline std::optional<RealSampler> real_sampler(const Interval& iv) {
  auto pos = iv.positive_part();
  if (!pos) return std::nullopt;
  RealSampler s{};
  s.hi = std::min(pos->hi(), kUnboundedCap);
  s.lo = pos->lo() > 0.0 ? pos->lo() : std::min(kSampleFloor, s.hi / 4.0);
  if (auto neg = iv.negative_part()) s.mixed_hi = std::min(s.hi, -neg->lo());
  if (s.mixed_hi <= s.lo) s.mixed_hi = 0.0;
  s.zeros = iv.contains(0.0);
  return s;
}

inline std::vector<cplx> draw_real_vector(std::mt19937_64& rng, std::size_t n, const RealSampler& s) {
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution zero_draw(0.1);
  bool mixed = s.mixed_hi > 0.0 && coin(rng);
  double top = mixed ? s.mixed_hi : s.hi;
  std::vector<cplx> v(n);
  for (auto& x : v) {
    double mag = log_uniform(rng, std::sqrt(s.lo), std::sqrt(top));
    double sign = (mixed && coin(rng)) ? -1.0 : 1.0;
    x = sign * mag;
    if (s.zeros && zero_draw(rng)) x = 0.0;
  }
  return v;
}

}  // namespace detail

// Random v v^* in P_n^1(domain). Real intervals draw magnitudes log-uniformly
// with random signs when the negative part allows; complex regions mix
// real, unit-modulus and general polar vectors. Rejection sampled.
inline HermitianMatrix sample_rank1(const ConeSpec& spec, std::mt19937_64& rng) {
  if (spec.k() != 1) throw InputError("sample_rank1 needs a rank-one cone");
  const Region& g = spec.domain();
  std::size_t n = spec.n();

  std::optional<detail::RealSampler> real;
  if (auto iv = g.real_interval()) real = detail::real_sampler(*iv);

  if (g.is_real()) {
    if (!real) {
      if (g.contains(0.0)) return HermitianMatrix(n);
      throw ConstructionError("domain " + g.to_string() + " admits no rank-one matrix with positive diagonal");
    }
    for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
      auto v = detail::draw_real_vector(rng, n, *real);
      auto m = rank1_from_vector(std::span<const cplx>(v));
      if (detail::entries_in(m, g)) return m;
    }
    throw ConstructionError("rejection sampling exhausted for domain " + g.to_string());
  }

  double hi = 1.0;
  for (const auto& s : g.real_section())
    if (s.hi() > hi) hi = s.hi();
  hi = std::min(hi, kUnboundedCap);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> mode_pick(0, 2);
  for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
    int mode = mode_pick(rng);
    std::vector<cplx> v(n);
    if (mode == 0) {
      if (!real) continue;
      v = detail::draw_real_vector(rng, n, *real);
    } else if (mode == 1) {
      for (auto& x : v) x = std::polar(1.0, phase(rng));
    } else {
      for (auto& x : v) x = std::polar(detail::log_uniform(rng, kSampleFloor, std::sqrt(hi)), phase(rng));
    }
    auto m = rank1_from_vector(std::span<const cplx>(v));
    if (detail::entries_in(m, g)) return m;
  }
  throw ConstructionError("rejection sampling exhausted for region " + g.to_string());
}

// ---------------------------------------------------------------------------
// Failure observables and certificates
// ---------------------------------------------------------------------------

struct NegativeEigenvalue {
  double eigenvalue;
  double threshold;
};

struct MinorViolation {
  MinorIndex index;
  cplx value;
};

// Rank bound k >= 2 exceeded; no single 2x2 minor witnesses it.
struct RankExcess {
  std::size_t rank;
  std::size_t bound;
};

struct HermitianLoss {
  std::size_t row, col;
  cplx upper, lower;
};

struct NonFiniteEntry {
  std::size_t row, col;
};

using FailureObservable = std::variant<NegativeEigenvalue, MinorViolation, RankExcess, HermitianLoss, NonFiniteEntry>;

inline const char* failure_kind(const FailureObservable& f) {
  static constexpr const char* names[] = {"negative_eigenvalue", "minor_violation", "rank_excess", "hermitian_loss",
                                          "non_finite_entry"};
  return names[f.index()];
}

struct WitnessCertificate {
  HermitianMatrix matrix;
  std::string construction;  // witness tag, or "random"
  ParamList params;          // construction parameters, or {"trial", index}
  FailureObservable failure;
  std::size_t out_k = 1;
  ToleranceProfile tol;
};

struct ImageFailure {
  FailureObservable failure;
  double severity;  // how far past the tolerance, >= 1 for real failures
};

// Tests f[M] against P_n^{out_k}(C) with no entry restriction.
inline std::optional<ImageFailure> image_failure(const CandidateFunction& f, const HermitianMatrix& m,
                                                 std::size_t out_k, const ToleranceProfile& tol,
                                                 std::optional<MinorIndex> preferred = std::nullopt) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto img = apply_entrywise(f, m);
  std::size_t n = img.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(img(i, j).real()) || !std::isfinite(img(i, j).imag()))
        return ImageFailure{NonFiniteEntry{i, j}, inf};
  if (auto bad = img.asymmetry()) {
    auto [i, j] = *bad;
    return ImageFailure{HermitianLoss{i, j, img(i, j), img(j, i)}, inf};
  }
  auto h = img.matrix();
  auto eigs = eigenvalues(h);
  auto psd = psd_from_spectrum(eigs, tol);
  if (!psd.psd) {
    double sev = psd.threshold > 0.0 ? -psd.min_eigenvalue / psd.threshold : inf;
    return ImageFailure{NegativeEigenvalue{psd.min_eigenvalue, psd.threshold}, sev};
  }
  std::size_t rank = rank_from_spectrum(eigs, tol);
  if (rank <= out_k) return std::nullopt;

  std::vector<double> mags;
  for (double e : eigs) mags.push_back(std::abs(e));
  std::sort(mags.rbegin(), mags.rend());
  double rank_threshold = tol.rank_tol * std::max(1.0, spectral_scale(eigs));
  double sev = rank_threshold > 0.0 ? mags[out_k] / rank_threshold : inf;
  if (out_k != 1) return ImageFailure{RankExcess{rank, out_k}, sev};

  MinorIndex best{0, 1, 0, 1};
  double best_mag = -1.0;
  for (std::size_t r0 = 0; r0 < n; ++r0)
    for (std::size_t r1 = r0 + 1; r1 < n; ++r1)
      for (std::size_t c0 = 0; c0 < n; ++c0)
        for (std::size_t c1 = c0 + 1; c1 < n; ++c1) {
          double mag = std::abs(minor2(h, MinorIndex{r0, r1, c0, c1}));
          if (mag > best_mag) {
            best_mag = mag;
            best = {r0, r1, c0, c1};
          }
        }
  if (preferred && std::abs(minor2(h, *preferred)) > 1e-6 * best_mag) best = *preferred;
  return ImageFailure{MinorViolation{best, minor2(h, best)}, sev};
}

// Re-applies the candidate and confirms the recorded failure reproduces.
inline bool recheck(const WitnessCertificate& cert, const CandidateFunction& f, const ConeSpec& in_spec) {
  if (!cone_membership(cert.matrix, in_spec, cert.tol).in_cone) return false;
  std::optional<MinorIndex> pref;
  if (auto* mv = std::get_if<MinorViolation>(&cert.failure)) pref = mv->index;
  auto again = image_failure(f, cert.matrix, cert.out_k, cert.tol, pref);
  if (!again || again->failure.index() != cert.failure.index()) return false;
  auto close = [](cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  return std::visit(
      [&](const auto& rec) -> bool {
        using T = std::decay_t<decltype(rec)>;
        const auto& now = std::get<T>(again->failure);
        if constexpr (std::is_same_v<T, NegativeEigenvalue>) {
          return close(now.eigenvalue, rec.eigenvalue);
        } else if constexpr (std::is_same_v<T, MinorViolation>) {
          return now.index == rec.index && close(now.value, rec.value);
        } else if constexpr (std::is_same_v<T, RankExcess>) {
          return now.rank == rec.rank;
        } else if constexpr (std::is_same_v<T, HermitianLoss>) {
          return now.row == rec.row && now.col == rec.col;
        } else {
          return now.row == rec.row && now.col == rec.col;
        }
      },
      cert.failure);
}

// ---------------------------------------------------------------------------
// Preserver checks
// ---------------------------------------------------------------------------

enum class VerdictStatus { no_violation_found, violation };

inline const char* to_string(VerdictStatus s) {
  return s == VerdictStatus::violation ? "violation" : "no_violation_found";
}

struct PreserverVerdict {
  VerdictStatus status = VerdictStatus::no_violation_found;
  std::optional<WitnessCertificate> certificate;
  std::size_t trials = 0;             // random matrices tested
  std::size_t witnesses = 0;          // deterministic constructions tested
  std::size_t skipped = 0;            // matrices outside the candidate's support
  std::uint64_t seed = 0;
  std::vector<std::string> notes;     // hypotheses of the classification not met
};

namespace detail {

inline const Interval& preserver_axis(const ConeSpec& spec, std::optional<Interval>& holder) {
  holder = spec.domain().real_interval();
  if (!holder || holder->degenerate() || !holder->contains_interior(1.0))
    throw InputError("preserver checks need a domain whose real part is an interval with 1 as an interior point");
  return *holder;
}

inline std::vector<std::string> hypothesis_notes(const ConeSpec& spec, const Interval& axis) {
  std::vector<std::string> notes;
  if (spec.n() < 3) notes.push_back("n = 2: only positivity and rank are tested; the n >= 3 classification does not apply");
  auto pos = axis.positive_part();
  if (pos && (pos->hi_closed() || pos->lo_closed()))
    notes.push_back("positive part of the domain is not open; extra preservers such as indicator functions exist");
  if (axis.contains(-axis.hi()))
    notes.push_back("domain contains -sup; entries there never occur in rank-one matrices");
  if (!spec.domain().is_real()) {
    if (!spec.domain().closed_under_conjugation()) notes.push_back("region is not closed under conjugation");
    if (!spec.domain().closed_under_modulus()) notes.push_back("region is not closed under modulus");
  }
  return notes;
}

inline bool in_support(const CandidateFunction& f, const HermitianMatrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      if (!f.defined_at(m(i, j))) return false;
  return true;
}

}  // namespace detail

// Randomized falsification of "f[A] in P_n^{out_k} for all A in P_n^1(domain)".
// Witness i and random trial i are checked alternately; the first failure
// in that order is returned.
inline PreserverVerdict check_preserver(const CandidateFunction& f, const ConeSpec& in_spec, std::size_t out_k,
                                        std::size_t trials, std::uint64_t seed, const ToleranceProfile& tol = {}) {
  tol.validate();
  if (in_spec.k() != 1) throw InputError("check_preserver needs a rank-one input cone");
  if (out_k < 1 || out_k > in_spec.n()) throw InputError("output rank bound must satisfy 1 <= k <= n");
  std::optional<Interval> axis_holder;
  const Interval& axis = detail::preserver_axis(in_spec, axis_holder);

  PreserverVerdict v;
  v.seed = seed;
  v.notes = detail::hypothesis_notes(in_spec, axis);
  auto sweep = witness_sweep(in_spec, kFullGrid);

  auto examine = [&](const HermitianMatrix& m, std::string construction, ParamList params,
                     std::optional<MinorIndex> pref) -> bool {
    if (!detail::in_support(f, m)) {
      ++v.skipped;
      return false;
    }
    auto fail = image_failure(f, m, out_k, tol, pref);
    if (!fail) return false;
    v.status = VerdictStatus::violation;
    v.certificate = WitnessCertificate{m, std::move(construction), std::move(params), fail->failure, out_k, tol};
    return true;
  };

  std::size_t rounds = std::max(sweep.size(), trials);
  for (std::size_t i = 0; i < rounds; ++i) {
    if (i < sweep.size()) {
      ++v.witnesses;
      const auto& w = sweep[i];
      if (examine(w.matrix, w.construction, w.params, w.minor)) return v;
    }
    if (i < trials) {
      ++v.trials;
      auto rng = trial_rng(seed, i);
      auto m = sample_rank1(in_spec, rng);
      if (examine(m, "random", {{"trial", static_cast<double>(i)}}, std::nullopt)) return v;
    }
  }
  return v;
}

// Certificate-first search: coarse-to-fine witness grids (strongest failure
// of the first failing construction at the first failing level), then
// `budget` random trials.
inline std::optional<WitnessCertificate> find_violation(const CandidateFunction& f, const ConeSpec& in_spec,
                                                        std::size_t budget, std::uint64_t seed,
                                                        const ToleranceProfile& tol = {}, std::size_t out_k = 1) {
  tol.validate();
  if (in_spec.k() != 1) throw InputError("find_violation needs a rank-one input cone");
  std::optional<Interval> axis_holder;
  detail::preserver_axis(in_spec, axis_holder);

  for (std::size_t m : kGridLevels) {
    auto sweep = witness_sweep(in_spec, m);
    std::optional<WitnessCertificate> best;
    double best_sev = 0.0;
    for (const auto& w : sweep) {
      if (best && w.construction != best->construction) break;
      if (!detail::in_support(f, w.matrix)) continue;
      auto fail = image_failure(f, w.matrix, out_k, tol, w.minor);
      if (fail && (!best || fail->severity > best_sev)) {
        best_sev = fail->severity;
        best = WitnessCertificate{w.matrix, w.construction, w.params, fail->failure, out_k, tol};
      }
    }
    if (best) return best;
  }
  for (std::size_t i = 0; i < budget; ++i) {
    auto rng = trial_rng(seed, i);
    auto m = sample_rank1(in_spec, rng);
    if (!detail::in_support(f, m)) continue;
    if (auto fail = image_failure(f, m, out_k, tol))
      return WitnessCertificate{m, "random", {{"trial", static_cast<double>(i)}}, fail->failure, out_k, tol};
  }
  return std::nullopt;
}

}  // namespace rankone
