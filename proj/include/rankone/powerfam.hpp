#pragma once

// The classified power families:
//   phi_a(x)  = |x|^a,            phi_a(0) = 0
//   psi_a(x)  = sgn(x) |x|^a,     psi_a(0) = 0
//   Psi_ab(r e^{it}) = r^a e^{ibt}, t in (-pi, pi], b integer, Psi_ab(0) = 0
// and the multiples c * (family) plus the constants.

#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "rankone/cones.hpp"
#include "rankone/errors.hpp"
#include "rankone/numeric_text.hpp"

namespace rankone {

enum class Family { zero, constant, phi, psi, complex_power };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::zero: return "zero";
    case Family::constant: return "constant";
    case Family::phi: return "phi";
    case Family::psi: return "psi";
    case Family::complex_power: return "complex_power";
  }
  return "unknown";
}

inline double eval_phi(double alpha, double x) {
  if (!std::isfinite(x)) throw InputError("phi evaluated at a non-finite point");
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), alpha);
}

inline double eval_psi(double alpha, double x) {
  if (!std::isfinite(x)) throw InputError("psi evaluated at a non-finite point");
  if (x == 0.0) return 0.0;
  double m = std::pow(std::abs(x), alpha);
  return x < 0.0 ? -m : m;
}

// On the real axis the phase factor is exactly +1 or (-1)^beta; negative
// reals take the branch t = pi regardless of the sign of their zero
// imaginary part.
inline cplx eval_cpow(double alpha, long beta, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw InputError("complex power evaluated at a non-finite point");
  if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
  if (z.imag() == 0.0) {
    double m = std::pow(std::abs(z.real()), alpha);
    if (z.real() > 0.0 || beta % 2 == 0) return {m, 0.0};
    return {-m, 0.0};
  }
  double r = std::abs(z);
  double theta = std::atan2(z.imag(), z.real());
  return std::polar(std::pow(r, alpha), static_cast<double>(beta) * theta);
}

class PowerFamilyMember {
 public:
  static PowerFamilyMember zero() { return PowerFamilyMember(Family::zero, 0.0, 0.0, 0); }

  static PowerFamilyMember constant(double c) {
    if (!std::isfinite(c) || c == 0.0) throw InputError("constant member needs a finite nonzero value");
    return PowerFamilyMember(Family::constant, c, 0.0, 0);
  }

  static PowerFamilyMember phi(double c, double alpha) { return scaled(Family::phi, c, alpha, 0); }
  static PowerFamilyMember psi(double c, double alpha) { return scaled(Family::psi, c, alpha, 0); }

  static PowerFamilyMember complex_power(double c, double alpha, long beta) {
    if (!(c > 0.0)) throw InputError("complex power multiplier must be positive");
    return scaled(Family::complex_power, c, alpha, beta);
  }

  Family family() const noexcept { return family_; }
  double c() const noexcept { return c_; }
  double alpha() const noexcept { return alpha_; }
  long beta() const noexcept { return beta_; }

  bool is_real_valued() const noexcept { return family_ != Family::complex_power; }

  // CLI syntax: zero | const:c | phi:c:a | psi:c:a | cpow:c:a:b
  std::string to_string() const {
    switch (family_) {
      case Family::zero: return "zero";
      case Family::constant: return "const:" + format_double(c_);
      case Family::phi: return "phi:" + format_double(c_) + ":" + format_double(alpha_);
      case Family::psi: return "psi:" + format_double(c_) + ":" + format_double(alpha_);
      case Family::complex_power:
        return "cpow:" + format_double(c_) + ":" + format_double(alpha_) + ":" + std::to_string(beta_);
    }
    return "?";
  }

  static PowerFamilyMember parse(std::string_view text) {
    auto parts = split(trim(text), ':');
    auto want = [&](std::size_t n) {
      if (parts.size() != n) throw InputError("malformed member '" + std::string(text) + "'");
    };
    std::string_view tag = parts[0];
    if (tag == "zero") {
      want(1);
      return zero();
    }
    if (tag == "const") {
      want(2);
      return constant(parse_double(parts[1]));
    }
    if (tag == "phi") {
      want(3);
      return phi(parse_double(parts[1]), parse_double(parts[2]));
    }
    if (tag == "psi") {
      want(3);
      return psi(parse_double(parts[1]), parse_double(parts[2]));
    }
    if (tag == "cpow") {
      want(4);
      return complex_power(parse_double(parts[1]), parse_double(parts[2]), parse_integer(parts[3]));
    }
    throw InputError("unknown member tag '" + std::string(tag) + "'");
  }

  friend bool operator==(const PowerFamilyMember&, const PowerFamilyMember&) = default;

 private:
  PowerFamilyMember(Family f, double c, double alpha, long beta) : family_(f), c_(c), alpha_(alpha), beta_(beta) {}

  static PowerFamilyMember scaled(Family f, double c, double alpha, long beta) {
    if (!std::isfinite(c) || c == 0.0) throw InputError("member multiplier must be finite and nonzero");
    if (!std::isfinite(alpha)) throw InputError("member exponent must be finite");
    return PowerFamilyMember(f, c, alpha, beta);
  }

  Family family_;
  double c_;
  double alpha_;
  long beta_;
};

inline cplx eval_member(const PowerFamilyMember& m, cplx z) {
  if ((m.family() == Family::phi || m.family() == Family::psi) && z.imag() != 0.0)
    throw DomainError("real-line member " + m.to_string() + " applied to a non-real point");
  switch (m.family()) {
    case Family::zero: return {0.0, 0.0};
    case Family::constant: return {m.c(), 0.0};
    case Family::phi: return {m.c() * eval_phi(m.alpha(), z.real()), 0.0};
    case Family::psi: return {m.c() * eval_psi(m.alpha(), z.real()), 0.0};
    case Family::complex_power: return m.c() * eval_cpow(m.alpha(), m.beta(), z);
  }
  return {};
}

inline double eval_member(const PowerFamilyMember& m, double x) { return eval_member(m, cplx(x, 0.0)).real(); }

// Psi_{a,b} on the real line is phi_a for even b and psi_a for odd b.
inline PowerFamilyMember restrict_to_reals(const PowerFamilyMember& m) {
  if (m.family() != Family::complex_power) throw InputError("restrict_to_reals needs a complex power member");
  return m.beta() % 2 == 0 ? PowerFamilyMember::phi(m.c(), m.alpha()) : PowerFamilyMember::psi(m.c(), m.alpha());
}

}  // namespace rankone
