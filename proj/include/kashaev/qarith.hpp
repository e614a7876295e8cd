#ifndef KASHAEV_QARITH_HPP
#define KASHAEV_QARITH_HPP

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "backend.hpp"

namespace kashaev {

inline constexpr int kMaxRootOrder = 8192;

// s = exp(pi i/N), q = s^2 and the tables every sum reads from.
// Immutable after construction.
template <class B>
class RootOfUnityContext {
 public:
  using real = typename B::real;
  using complex = typename B::complex;

  explicit RootOfUnityContext(int N) : N_(N) {
    if (N < 1 || N > kMaxRootOrder)
      throw invalid_argument("N must lie in [1, " +
                             std::to_string(kMaxRootOrder) + "], got " +
                             std::to_string(N));
    half_.resize(4 * N);
    for (int e = 0; e < 4 * N; ++e) half_[e] = unit_root<B>(e, 4 * N);
    s_ = half_[2 % (4 * N)];
    q_ = half_[4 % (4 * N)];

    poch_.assign(N, complex(1));
    poch_bar_.assign(N, complex(1));
    qfact_.assign(N, complex(1));
    for (int k = 1; k < N; ++k) {
      complex qk = q_power(k);
      complex one(1);
      poch_[k] = poch_[k - 1] * (one - qk);
      poch_bar_[k] = poch_bar_[k - 1] * (one - conj(qk));
      // s^k - s^{-k} = 2i sin(pi k/N)
      complex sk = s_power(k);
      qfact_[k] = qfact_[k - 1] * (sk - conj(sk));
    }
  }

  int N() const { return N_; }
  const complex& s() const { return s_; }
  const complex& q() const { return q_; }

  // s^{e/2}: the R-matrix exponents are half-integers for even N
  const complex& s_half_power(long long e) const { return half_[mod(e, 4LL * N_)]; }
  const complex& s_power(long long e) const { return half_[2 * mod(e, 2LL * N_)]; }
  const complex& q_power(long long e) const { return half_[4 * mod(e, N_)]; }

  const complex& poch(int k) const { return poch_[k]; }
  const complex& poch_bar(int k) const { return poch_bar_[k]; }
  const complex& qfact(int n) const { return qfact_[n]; }

  const std::vector<complex>& poch_table() const { return poch_; }
  const std::vector<complex>& poch_bar_table() const { return poch_bar_; }

 private:
  static long long mod(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
  }

  int N_;
  complex s_, q_;
  std::vector<complex> half_;  // exp(pi i e/(2N)), e = 0..4N-1
  std::vector<complex> poch_, poch_bar_, qfact_;
};

template <class B>
RootOfUnityContext<B> make_context(int N) {
  return RootOfUnityContext<B>(N);
}

template <class B>
typename B::complex pochhammer(const RootOfUnityContext<B>& ctx, int k) {
  if (k < 0 || k >= ctx.N())
    throw invalid_argument("pochhammer index " + std::to_string(k) +
                           " outside [0, N-1]");
  return ctx.poch(k);
}

template <class B>
typename B::complex pochhammer_bar(const RootOfUnityContext<B>& ctx, int k) {
  if (k < 0 || k >= ctx.N())
    throw invalid_argument("pochhammer_bar index " + std::to_string(k) +
                           " outside [0, N-1]");
  return ctx.poch_bar(k);
}

// (n)! = prod_{j=1}^n (s^j - s^{-j})
template <class B>
typename B::complex qfactorial_s(const RootOfUnityContext<B>& ctx, int n) {
  if (n < 0 || n >= ctx.N())
    throw invalid_argument("qfactorial_s index " + std::to_string(n) +
                           " outside [0, N-1]");
  return ctx.qfact(n);
}

// |LHS - RHS| for
//   sum_{i=0}^{N-1} (-1)^i s^{beta i} [alpha, i] = prod_{j=1}^{alpha} (1 - s^{beta+alpha+1-2j})
// with the symmetric Gaussian binomial built from (n)!.
template <class B>
typename B::real verify_qbinomial_identity(const RootOfUnityContext<B>& ctx,
                                           int alpha, long long beta) {
  const int N = ctx.N();
  if (alpha < 0 || alpha >= N)
    throw invalid_argument("alpha " + std::to_string(alpha) +
                           " outside [0, N-1]");
  using complex = typename B::complex;
  complex lhs(0);
  for (int i = 0; i <= alpha; ++i) {
    complex binom = ctx.qfact(alpha) / (ctx.qfact(i) * ctx.qfact(alpha - i));
    complex term = ctx.s_power(beta * i) * binom;
    lhs += (i % 2 ? -term : term);
  }
  complex rhs(1);
  for (int j = 1; j <= alpha; ++j)
    rhs *= complex(1) - ctx.s_power(beta + alpha + 1 - 2LL * j);
  using std::abs;
  return abs(lhs - rhs);
}

template <class B>
typename B::complex qbinomial_rhs(const RootOfUnityContext<B>& ctx, int alpha,
                                  long long beta) {
  typename B::complex rhs(1);
  for (int j = 1; j <= alpha; ++j)
    rhs *= typename B::complex(1) - ctx.s_power(beta + alpha + 1 - 2LL * j);
  return rhs;
}

}  // namespace kashaev

#endif
