#ifndef KASHAEV_BACKEND_HPP
#define KASHAEV_BACKEND_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "errors.hpp"

namespace kashaev {

// Arithmetic contract. Every generic routine takes one of these as its
// template parameter and only touches numbers through real/complex/the
// static helpers below.
struct DoubleBackend {
  using real = double;
  using complex = std::complex<double>;
  static constexpr std::string_view name = "double";

  static real pi() { return boost::math::constants::pi<double>(); }
  static real eps() { return std::numeric_limits<double>::epsilon(); }
  static complex make(const real& re, const real& im) { return {re, im}; }
  static real re(const complex& z) { return z.real(); }
  static real im(const complex& z) { return z.imag(); }
  static double to_double(const real& x) { return x; }
  static real from_string(const std::string& s) { return std::stod(s); }
  static std::string to_string(const real& x) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << x;
    return os.str();
  }
};

struct ExtendedBackend {
  using real = boost::multiprecision::number<
      boost::multiprecision::cpp_bin_float<64>, boost::multiprecision::et_off>;
  using complex = boost::multiprecision::number<
      boost::multiprecision::complex_adaptor<
          boost::multiprecision::cpp_bin_float<64>>,
      boost::multiprecision::et_off>;
  static constexpr std::string_view name = "extended";

  static real pi() { return boost::math::constants::pi<real>(); }
  static real eps() { return std::numeric_limits<real>::epsilon(); }
  static complex make(const real& re, const real& im) { return complex(re, im); }
  static real re(const complex& z) { return z.real(); }
  static real im(const complex& z) { return z.imag(); }
  static double to_double(const real& x) { return x.convert_to<double>(); }
  static real from_string(const std::string& s) { return real(s); }
  static std::string to_string(const real& x) {
    return x.str(std::numeric_limits<real>::max_digits10,
                 std::ios_base::scientific);
  }
};

template <class B>
typename B::complex unit_root(long long num, long long den) {
  // exp(2 pi i num/den) with the angle reduced exactly before the trig call
  long long r = num % den;
  if (r < 0) r += den;
  using std::cos;
  using std::sin;
  typename B::real t = 2 * B::pi() * typename B::real(r) / typename B::real(den);
  return B::make(cos(t), sin(t));
}

template <class B>
bool is_finite(const typename B::complex& z) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(B::re(z)) && isfinite(B::im(z));
}

template <class B>
const typename B::complex& require_finite(const typename B::complex& z,
                                          const char* what) {
  if (!is_finite<B>(z))
    throw range_error(std::string(what) + ": value outside the " +
                      std::string(B::name) + " range");
  return z;
}

// Neumaier summation, applied to real and imaginary parts separately.
template <class B>
class Accumulator {
 public:
  void add(const typename B::complex& z) {
    step(sum_re_, c_re_, B::re(z));
    step(sum_im_, c_im_, B::im(z));
  }
  typename B::complex value() const {
    return B::make(sum_re_ + c_re_, sum_im_ + c_im_);
  }

 private:
  using real = typename B::real;
  static void step(real& sum, real& c, const real& x) {
    using std::abs;
    real t = sum + x;
    if (abs(sum) >= abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  real sum_re_{0}, sum_im_{0}, c_re_{0}, c_im_{0};
};

}  // namespace kashaev

#endif
