#ifndef KASHAEV_DILOG_HPP
#define KASHAEV_DILOG_HPP

#include <cmath>
#include <complex>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

#include "errors.hpp"

namespace kashaev {

using cd = std::complex<double>;

struct BranchedValue {
  cd value;
  bool on_cut = false;  // real argument > 1; value is the limit from below
};

namespace detail {

// Li2(z) = sum_n B_n u^{n+1}/(n+1)!, u = -log(1-z); fine for |u| < ~1.5
inline cd li2_bernoulli(cd z) {
  const cd u = -std::log(1.0 - z);
  const cd u2 = u * u;
  cd sum = u - 0.25 * u2;
  cd pw = u;  // u^{2k+1}/(2k+1)!
  double fact = 1.0;
  for (int k = 1; k <= 22; ++k) {
    pw *= u2;
    fact *= (2.0 * k) * (2.0 * k + 1.0);
    cd t = boost::math::bernoulli_b2n<double>(k) / fact * pw;
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// |z| <= 1
inline cd li2_disk(cd z) {
  constexpr double pi2_6 = boost::math::constants::pi_sqr<double>() / 6;
  if (z == 0.0) return 0.0;
  if (z.real() > 0.5) {
    if (z == 1.0) return pi2_6;
    return pi2_6 - std::log(z) * std::log(1.0 - z) - li2_bernoulli(1.0 - z);
  }
  return li2_bernoulli(z);
}

}  // namespace detail

inline BranchedValue li2(cd z) {
  constexpr double pi = boost::math::constants::pi<double>();
  constexpr double pi2_6 = pi * pi / 6;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw domain_error("li2: non-finite argument");
  if (std::abs(z) <= 1.0) return {detail::li2_disk(z), false};
  if (z.imag() == 0.0 && z.real() > 1.0) {
    // the sign of a zero imaginary part must not pick the side of the cut
    const double x = z.real(), lx = std::log(x);
    double re = pi * pi / 3 - 0.5 * lx * lx - detail::li2_disk(1.0 / x).real();
    return {cd(re, -pi * lx), true};
  }
  const cd l = std::log(-z);
  return {-pi2_6 - 0.5 * l * l - detail::li2_disk(1.0 / z), false};
}

struct QuadratureOptions {
  double tol = 1e-12;  // relative, per real component
  int max_depth = 15;
};

namespace detail {

// Real and imaginary parts integrated separately; boost quadrature is real-valued here.
template <class F>
cd integrate_finite(F f, double a, double b, const QuadratureOptions& opt, double* err) {
  using boost::math::quadrature::gauss_kronrod;
  double e1 = 0, e2 = 0;
  double re = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).real(); }, a, b,
                                                  opt.max_depth, opt.tol, &e1);
  double im = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).imag(); }, a, b,
                                                  opt.max_depth, opt.tol, &e2);
  *err = std::hypot(e1, e2);
  return {re, im};
}

template <class F>
cd integrate_tail(F f, double a, const QuadratureOptions& opt, double* err) {
  boost::math::quadrature::exp_sinh<double> q;
  double e1 = 0, e2 = 0, l1 = 0, l2 = 0;
  double re = q.integrate([&](double x) { return f(x).real(); }, a,
                          std::numeric_limits<double>::infinity(), opt.tol, &e1, &l1);
  double im = q.integrate([&](double x) { return f(x).imag(); }, a,
                          std::numeric_limits<double>::infinity(), opt.tol, &e2, &l2);
  *err = std::hypot(e1, e2);
  return {re, im};
}

}  // namespace detail

// log S_gamma(p) = (1/4) int e^{px} / (x sinh(pi x) sinh(gamma x)) dx, contour
// passing above x = 0. The pole's Laurent part (x^-3, x^-2, x^-1 terms) is
// integrated in closed form on [-1, 1]; the rest is folded onto x > 0.
inline cd log_quantum_dilog_S(double gamma, cd p, const QuadratureOptions& opt = {}) {
  constexpr double pi = boost::math::constants::pi<double>();
  if (!(gamma > 0 && gamma < pi))
    throw domain_error("quantum_dilog_S: gamma must lie in (0, pi)");
  if (!(std::abs(p.real()) < pi + gamma))
    throw domain_error("quantum_dilog_S: |Re p| must be < pi + gamma");

  const double a = 1.0;
  const double pg = pi * gamma;
  const cd P = p * p / 6.0, Q = p * p * p * p / 120.0;
  const double A = (pi * pi + gamma * gamma) / 6;
  const double B = (std::pow(pi, 4) + std::pow(gamma, 4)) / 120 + pi * pi * gamma * gamma / 36;
  const cd h0 = 2.0 * p * (P - A) / pg;
  const cd h2 = 2.0 * p * (Q - P * A + A * A - B) / pg;

  // f(x) + f(-x) minus the even part of the Laurent expansion
  auto inner = [&](double x) -> cd {
    if (x < 1e-3) return h0 + h2 * x * x;
    return 2.0 * std::sinh(p * x) / (x * std::sinh(pi * x) * std::sinh(gamma * x)) -
           2.0 * p / (pg * x * x);
  };
  auto tail = [&](double x) -> cd {
    double den = -std::expm1(-2 * pi * x) * -std::expm1(-2 * gamma * x) * x;
    return 4.0 * (std::exp((p - pi - gamma) * x) - std::exp((-p - pi - gamma) * x)) / den;
  };

  double e1 = 0, e2 = 0;
  cd I = detail::integrate_finite(inner, 0.0, a, opt, &e1);
  I += detail::integrate_tail(tail, a, opt, &e2);
  const cd c1 = p * p / 2.0 - A;
  I += (-2.0 * p / a - cd(0, pi) * c1) / pg;

  if (!std::isfinite(I.real()) || !std::isfinite(I.imag()) ||
      e1 + e2 > 1e-6 * (1 + std::abs(I)))
    throw convergence_error("quantum_dilog_S: quadrature did not converge (gamma=" +
                            std::to_string(gamma) + ", p=" + std::to_string(p.real()) +
                            (p.imag() < 0 ? "" : "+") + std::to_string(p.imag()) +
                            "i, error estimate " + std::to_string(e1 + e2) + ")");
  return I / 4.0;
}

inline cd quantum_dilog_S(double gamma, cd p, const QuadratureOptions& opt = {}) {
  return std::exp(log_quantum_dilog_S(gamma, p, opt));
}

// f(p) = S(gamma - pi) / S(p)
inline cd f_gamma(double gamma, cd p, const QuadratureOptions& opt = {}) {
  constexpr double pi = boost::math::constants::pi<double>();
  return std::exp(log_quantum_dilog_S(gamma, gamma - pi, opt) -
                  log_quantum_dilog_S(gamma, p, opt));
}

// fbar(p) = S(-p) / S(pi - gamma)
inline cd f_bar_gamma(double gamma, cd p, const QuadratureOptions& opt = {}) {
  constexpr double pi = boost::math::constants::pi<double>();
  return std::exp(log_quantum_dilog_S(gamma, -p, opt) -
                  log_quantum_dilog_S(gamma, pi - gamma, opt));
}

}  // namespace kashaev

#endif
