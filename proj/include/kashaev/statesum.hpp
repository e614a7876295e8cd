#ifndef KASHAEV_STATESUM_HPP
#define KASHAEV_STATESUM_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "links.hpp"
#include "qarith.hpp"
#include "tangle.hpp"

namespace kashaev {

// sum of |terms| over |sum|; lost digits ~ log10(condition)
struct SumStats {
  double condition = 1.0;
};

namespace detail {

template <class B>
double dabs(const typename B::complex& z) {
  using std::abs;
  return B::to_double(abs(z));
}

template <class B>
void record(SumStats* st, double mass, const typename B::complex& total) {
  if (!st) return;
  double t = dabs<B>(total);
  st->condition = t > 0 ? std::max(1.0, mass / t) : INFINITY;
}

template <class B>
typename B::complex finish(const typename B::complex& v, const char* what) {
  return require_finite<B>(v, what);
}

}  // namespace detail

// Triple sum over k <= i, j of
//   (q)_i (q)_j (q)_{N-1-k}^2 / ((q)_k^2 (q)_{N-1-i} (q)_{N-1-j} (q)_{i-k} (q)_{j-k}) q^{-k(i+j+1)}.
// The summand is A_k b_{ik} b_{jk}, so it is evaluated as sum_k A_k B_k^2.
template <class B>
typename B::complex jones_whitehead(const RootOfUnityContext<B>& ctx,
                                    SumStats* st = nullptr) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  double mass = 0;
  for (int k = 0; k < N; ++k) {
    Accumulator<B> inner;
    double inner_mass = 0;
    for (int i = k; i < N; ++i) {
      complex b = ctx.poch(i) / (ctx.poch(N - 1 - i) * ctx.poch(i - k)) *
                  ctx.q_power(-1LL * k * i);
      inner.add(b);
      inner_mass += detail::dabs<B>(b);
    }
    complex r = ctx.poch(N - 1 - k) / ctx.poch(k);
    complex a = r * r * ctx.q_power(-k);
    complex bk = inner.value();
    total.add(a * bk * bk);
    mass += detail::dabs<B>(a) * inner_mass * inner_mass;
  }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_whitehead");
}

template <class B>
typename B::complex jones_whitehead_direct(const RootOfUnityContext<B>& ctx) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k <= std::min(i, j); ++k) {
        complex r = ctx.poch(N - 1 - k) / ctx.poch(k);
        total.add(ctx.poch(i) * ctx.poch(j) * r * r /
                  (ctx.poch(N - 1 - i) * ctx.poch(N - 1 - j) * ctx.poch(i - k) *
                   ctx.poch(j - k)) *
                  ctx.q_power(-1LL * k * (i + j + 1)));
      }
  return detail::finish<B>(total.value(), "jones_whitehead_direct");
}

namespace detail {

// sum_k c_k (sum_{i>=k} (qbar)_i^2/(qbar)_{i-k})^2
template <class B, class Outer>
typename B::complex whitehead_rewritten(const RootOfUnityContext<B>& ctx,
                                        Outer outer, SumStats* st) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  double mass = 0;
  for (int k = 0; k < N; ++k) {
    Accumulator<B> inner;
    double inner_mass = 0;
    for (int i = k; i < N; ++i) {
      complex b = ctx.poch_bar(i) * ctx.poch_bar(i) / ctx.poch_bar(i - k);
      inner.add(b);
      inner_mass += dabs<B>(b);
    }
    complex c = outer(k);
    complex bk = inner.value();
    total.add(c * bk * bk);
    mass += dabs<B>(c) * inner_mass * inner_mass;
  }
  complex v = total.value();
  record<B>(st, mass, v);
  return v;
}

}  // namespace detail

// sum_{k<=i,j} {(qbar)_i (qbar)_j}^2 / ((q)_k^4 (qbar)_{i-k} (qbar)_{j-k}) q^k,
// the same number as jones_whitehead written in conjugate Pochhammers.
template <class B>
typename B::complex jones_whitehead_alt(const RootOfUnityContext<B>& ctx,
                                        SumStats* st = nullptr) {
  auto v = detail::whitehead_rewritten(
      ctx,
      [&](int k) {
        auto p2 = ctx.poch(k) * ctx.poch(k);
        return ctx.q_power(k) / (p2 * p2);
      },
      st);
  return detail::finish<B>(v, "jones_whitehead_alt");
}

template <class B>
typename B::complex jones_whitehead_alt_direct(const RootOfUnityContext<B>& ctx) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k <= std::min(i, j); ++k) {
        complex num = ctx.poch_bar(i) * ctx.poch_bar(j);
        complex p2 = ctx.poch(k) * ctx.poch(k);
        total.add(num * num / (p2 * p2 * ctx.poch_bar(i - k) * ctx.poch_bar(j - k)) *
                  ctx.q_power(k));
      }
  return detail::finish<B>(total.value(), "jones_whitehead_alt_direct");
}

// The rewritten sum as usually displayed: no q^k in the summand and a global
// q^{-(N-1)N/2} = (-1)^{N-1}. It is not equal to jones_whitehead (N=2 gives
// -10 against 8) but it is the sequence behind the published Whitehead table.
template <class B>
typename B::complex whitehead_printed_sum(const RootOfUnityContext<B>& ctx,
                                          SumStats* st = nullptr) {
  auto v = detail::whitehead_rewritten(
      ctx,
      [&](int k) {
        auto p2 = ctx.poch(k) * ctx.poch(k);
        return typename B::complex(1) / (p2 * p2);
      },
      st);
  const long long N = ctx.N();
  // (N-1)N/2 reduced mod N before the lookup
  v *= ctx.q_power(-((N - 1) * N / 2));
  return detail::finish<B>(v, "whitehead_printed_sum");
}

// sum_{k+l+m<=N-1} |(q)_{k+l+m}/((q)_l (q)_m)|^2 (q)_{k+l} (qbar)_{m+k} q^{(m-l)(k+1)}
template <class B>
typename B::complex jones_6_3(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  using complex = typename B::complex;
  using std::norm;
  const int N = ctx.N();
  Accumulator<B> total;
  double mass = 0;
  for (int k = 0; k < N; ++k)
    for (int l = 0; k + l < N; ++l)
      for (int m = 0; k + l + m < N; ++m) {
        complex r = ctx.poch(k + l + m) / (ctx.poch(l) * ctx.poch(m));
        complex t = r * conj(r) * ctx.poch(k + l) * ctx.poch_bar(m + k) *
                    ctx.q_power(1LL * (m - l) * (k + 1));
        total.add(t);
        mass += detail::dabs<B>(t);
      }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_6_3");
}

// Five-index sum over l, m1, m2, n1, n2 with m1+n1, m2+n2, m1+m2 <= l of
//   |(q)_{l-m1} (q)_l (q)_{l-m2} / ((q)_{m1} (q)_{m2} (q)_{n1} (q)_{n2})|^2
//   (qbar)_{l-n1} (q)_{l-n2} / ((q)_{l-m1-n1} (qbar)_{l-m2-n2})
//   q^{(m2-m1)(l-m1-m2) + (n2-n1)(l-n1-n2) + m2-m1 + n2-n1}.
// The n-part of the exponent is (l n2 - n2^2 + n2) + (-l n1 + n1^2 - n1), so
// the n1 and n2 sums factor out and the cost drops to O(N^3).
template <class B>
typename B::complex jones_8_9(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  using complex = typename B::complex;
  const int N = ctx.N();
  auto sq = [](const complex& z) { return z * conj(z); };
  std::vector<complex> g1(N * N, complex(0)), g2(N * N, complex(0));
  std::vector<double> g1m(N * N, 0), g2m(N * N, 0);
  for (int l = 0; l < N; ++l)
    for (int m = 0; m <= l; ++m) {
      Accumulator<B> a1, a2;
      for (int n = 0; n <= l - m; ++n) {
        complex inv = complex(1) / sq(ctx.poch(n));
        complex t1 = inv * ctx.poch_bar(l - n) / ctx.poch(l - m - n) *
                     ctx.q_power(-1LL * l * n + 1LL * n * n - n);
        complex t2 = inv * ctx.poch(l - n) / ctx.poch_bar(l - m - n) *
                     ctx.q_power(1LL * l * n - 1LL * n * n + n);
        a1.add(t1);
        a2.add(t2);
        g1m[l * N + m] += detail::dabs<B>(t1);
        g2m[l * N + m] += detail::dabs<B>(t2);
      }
      g1[l * N + m] = a1.value();
      g2[l * N + m] = a2.value();
    }
  Accumulator<B> total;
  double mass = 0;
  for (int l = 0; l < N; ++l)
    for (int m1 = 0; m1 <= l; ++m1)
      for (int m2 = 0; m1 + m2 <= l; ++m2) {
        complex r = ctx.poch(l - m1) * ctx.poch(l) * ctx.poch(l - m2) /
                    (ctx.poch(m1) * ctx.poch(m2));
        complex w = sq(r) * ctx.q_power(1LL * (m2 - m1) * (l - m1 - m2) + m2 - m1);
        total.add(w * g1[l * N + m1] * g2[l * N + m2]);
        mass += detail::dabs<B>(w) * g1m[l * N + m1] * g2m[l * N + m2];
      }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_8_9");
}

template <class B>
typename B::complex jones_8_9_direct(const RootOfUnityContext<B>& ctx) {
  using complex = typename B::complex;
  const int N = ctx.N();
  auto sq = [](const complex& z) { return z * conj(z); };
  Accumulator<B> total;
  for (int l = 0; l < N; ++l)
    for (int m1 = 0; m1 <= l; ++m1)
      for (int m2 = 0; m1 + m2 <= l; ++m2)
        for (int n1 = 0; m1 + n1 <= l; ++n1)
          for (int n2 = 0; m2 + n2 <= l; ++n2) {
            complex r = ctx.poch(l - m1) * ctx.poch(l) * ctx.poch(l - m2) /
                        (ctx.poch(m1) * ctx.poch(m2) * ctx.poch(n1) * ctx.poch(n2));
            long long e = 1LL * (m2 - m1) * (l - m1 - m2) +
                          1LL * (n2 - n1) * (l - n1 - n2) + m2 - m1 + n2 - n1;
            total.add(sq(r) * ctx.poch_bar(l - n1) * ctx.poch(l - n2) /
                      (ctx.poch(l - m1 - n1) * ctx.poch_bar(l - m2 - n2)) *
                      ctx.q_power(e));
          }
  return detail::finish<B>(total.value(), "jones_8_9_direct");
}

// Sum over j, l <= k <= i+l <= j+m, j <= i of
//   {(qbar)_i (q)_k (qbar)_m}^2 / ({(qbar)_j (q)_l}^2 (q)_{k-l} (qbar)_{i-k+l}
//     (qbar)_{j+m-i-l} (q)_{i-j} (q)_{k-j}) q^{k+m+im+km-il}.
// m enters only through d = i+l-j and q^{m(1+i+k)}; that inner sum is tabulated.
template <class B>
typename B::complex jones_8_20(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  using complex = typename B::complex;
  const int N = ctx.N();
  std::vector<complex> T(N * N, complex(0));
  std::vector<double> Tm(N * N, 0);
  for (int d = 0; d < N; ++d)
    for (int c = 0; c < N; ++c) {
      Accumulator<B> acc;
      for (int m = d; m < N; ++m) {
        complex t = ctx.poch_bar(m) * ctx.poch_bar(m) / ctx.poch_bar(m - d) *
                    ctx.q_power(1LL * m * c);
        acc.add(t);
        Tm[d * N + c] += detail::dabs<B>(t);
      }
      T[d * N + c] = acc.value();
    }
  Accumulator<B> total;
  double mass = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = j; k < N; ++k)
        for (int l = std::max(0, k - i); l <= k; ++l) {
          const int d = i + l - j;
          if (d >= N) continue;
          complex num = ctx.poch_bar(i) * ctx.poch(k);
          complex den = ctx.poch_bar(j) * ctx.poch(l);
          complex w = num * num /
                      (den * den * ctx.poch(k - l) * ctx.poch_bar(i - k + l) *
                       ctx.poch(i - j) * ctx.poch(k - j)) *
                      ctx.q_power(k - 1LL * i * l);
          const int c = static_cast<int>((1LL + i + k) % N);
          total.add(w * T[d * N + c]);
          mass += detail::dabs<B>(w) * Tm[d * N + c];
        }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_8_20");
}

template <class B>
typename B::complex jones_8_20_direct(const RootOfUnityContext<B>& ctx) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = j; k < N; ++k)
        for (int l = 0; l <= k; ++l)
          for (int m = 0; m < N; ++m) {
            if (!(k <= i + l && i + l <= j + m)) continue;
            complex num = ctx.poch_bar(i) * ctx.poch(k) * ctx.poch_bar(m);
            complex den = ctx.poch_bar(j) * ctx.poch(l);
            total.add(num * num /
                      (den * den * ctx.poch(k - l) * ctx.poch_bar(i - k + l) *
                       ctx.poch_bar(j + m - i - l) * ctx.poch(i - j) * ctx.poch(k - j)) *
                      ctx.q_power(k + m + 1LL * i * m + 1LL * k * m - 1LL * i * l));
          }
  return detail::finish<B>(total.value(), "jones_8_20_direct");
}

// Derived by reduction, checked against the tangle evaluator:
//   4_1: sum_k |(q)_k|^2
template <class B>
typename B::complex jones_4_1(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  Accumulator<B> total;
  double mass = 0;
  for (int k = 0; k < ctx.N(); ++k) {
    auto t = ctx.poch(k) * ctx.poch_bar(k);
    total.add(t);
    mass += detail::dabs<B>(t);
  }
  auto v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_4_1");
}

//   5_2: sum_{k<=l} (qbar)_l^2 / (qbar)_{l-k} q^{k(l+1)}
template <class B>
typename B::complex jones_5_2(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  double mass = 0;
  for (int l = 0; l < N; ++l) {
    Accumulator<B> inner;
    double inner_mass = 0;
    for (int k = 0; k <= l; ++k) {
      complex t = ctx.q_power(1LL * k * (l + 1)) / ctx.poch_bar(l - k);
      inner.add(t);
      inner_mass += detail::dabs<B>(t);
    }
    complex a = ctx.poch_bar(l) * ctx.poch_bar(l);
    total.add(a * inner.value());
    mass += detail::dabs<B>(a) * inner_mass;
  }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_5_2");
}

//   6_1: sum_{k<=n} (q)_n (qbar)_n^2 / ((qbar)_k (qbar)_{n-k}) q^{-k(k+1)}
template <class B>
typename B::complex jones_6_1(const RootOfUnityContext<B>& ctx, SumStats* st = nullptr) {
  using complex = typename B::complex;
  const int N = ctx.N();
  Accumulator<B> total;
  double mass = 0;
  for (int n = 0; n < N; ++n) {
    complex a = ctx.poch(n) * ctx.poch_bar(n) * ctx.poch_bar(n);
    for (int k = 0; k <= n; ++k) {
      complex t = a / (ctx.poch_bar(k) * ctx.poch_bar(n - k)) *
                  ctx.q_power(-1LL * k * (k + 1));
      total.add(t);
      mass += detail::dabs<B>(t);
    }
  }
  complex v = total.value();
  detail::record<B>(st, mass, v);
  return detail::finish<B>(v, "jones_6_1");
}

enum class Method { ClosedForm, TangleOracle };
enum class WhiteheadFormula { Triple, Rewritten, Printed };

inline std::string_view to_string(Method m) {
  return m == Method::ClosedForm ? "closed_form" : "tangle_oracle";
}

inline std::string_view to_string(WhiteheadFormula f) {
  switch (f) {
    case WhiteheadFormula::Triple: return "triple";
    case WhiteheadFormula::Rewritten: return "alt";
    case WhiteheadFormula::Printed: return "printed";
  }
  return "?";
}

inline WhiteheadFormula parse_whitehead_formula(std::string_view s) {
  for (auto f : {WhiteheadFormula::Triple, WhiteheadFormula::Rewritten, WhiteheadFormula::Printed})
    if (to_string(f) == s) return f;
  throw invalid_argument("unknown Whitehead formula '" + std::string(s) +
                         "' (expected triple, alt, printed)");
}

struct StateSumOptions {
  // largest N each closed form accepts
  int max_n_whitehead = 300;
  int max_n_6_3 = 300;
  int max_n_8_9 = 60;
  int max_n_8_20 = 60;
  int max_n_small = 4000;  // 4_1, 5_2, 6_1
  bool use_oracle = false;
  TangleOptions tangle;
  WhiteheadFormula whitehead = WhiteheadFormula::Triple;
};

template <class B>
struct InvariantValue {
  LinkId link;
  int N = 0;
  typename B::complex value;
  Method method = Method::ClosedForm;
  bool implementer_derived = false;
  double condition = 1.0;
  std::string formula_version;
  static constexpr std::string_view backend = B::name;
};

inline std::string formula_version(LinkId link, const StateSumOptions& opt) {
  std::string v(to_string(link));
  if (opt.use_oracle) return v + "/tangle-1";
  if (link == LinkId::Whitehead) v += "/" + std::string(to_string(opt.whitehead));
  return v + "/sum-1";
}

template <class B>
InvariantValue<B> jones_generic(const RootOfUnityContext<B>& ctx, LinkId link,
                                const StateSumOptions& opt = {}) {
  InvariantValue<B> out;
  out.link = link;
  out.N = ctx.N();
  out.implementer_derived = !published_closed_form(link);
  out.formula_version = formula_version(link, opt);
  if (opt.use_oracle) {
    out.method = Method::TangleOracle;
    out.value = evaluate_builtin(ctx, link, opt.tangle);
    return out;
  }
  auto budget = [&](int cap) {
    if (ctx.N() > cap)
      throw resource_error("N=" + std::to_string(ctx.N()) + " above the configured bound " +
                           std::to_string(cap) + " for " + std::string(to_string(link)));
  };
  SumStats st;
  switch (link) {
    case LinkId::Whitehead:
      budget(opt.max_n_whitehead);
      switch (opt.whitehead) {
        case WhiteheadFormula::Triple: out.value = jones_whitehead(ctx, &st); break;
        case WhiteheadFormula::Rewritten: out.value = jones_whitehead_alt(ctx, &st); break;
        case WhiteheadFormula::Printed: out.value = whitehead_printed_sum(ctx, &st); break;
      }
      break;
    case LinkId::K6_3: budget(opt.max_n_6_3); out.value = jones_6_3(ctx, &st); break;
    case LinkId::K8_9: budget(opt.max_n_8_9); out.value = jones_8_9(ctx, &st); break;
    case LinkId::K8_20: budget(opt.max_n_8_20); out.value = jones_8_20(ctx, &st); break;
    case LinkId::K4_1: budget(opt.max_n_small); out.value = jones_4_1(ctx, &st); break;
    case LinkId::K5_2: budget(opt.max_n_small); out.value = jones_5_2(ctx, &st); break;
    case LinkId::K6_1: budget(opt.max_n_small); out.value = jones_6_1(ctx, &st); break;
  }
  out.condition = st.condition;
  return out;
}

// digits left after cancellation, from the backend epsilon and the condition
template <class B>
double estimated_digits(const InvariantValue<B>& v) {
  double eps = B::to_double(B::eps());
  return -std::log10(eps * v.condition);
}

// One JSON document per (link, backend):
//   {"link":..., "backend":..., "entries":[{"N", "re", "im", "formula_version"}]}
// re/im are decimal strings at full backend precision.
class InvariantCache {
 public:
  explicit InvariantCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  // empty cache when neither the argument nor KASHAEV_CACHE_DIR names a directory
  static std::optional<InvariantCache> from_config(const std::string& cli_dir) {
    std::string d = cli_dir;
    if (d.empty())
      if (const char* env = std::getenv("KASHAEV_CACHE_DIR")) d = env;
    if (d.empty()) return std::nullopt;
    return InvariantCache(d);
  }

  bool usable() const {
    std::error_code ec;
    return std::filesystem::is_directory(dir_, ec);
  }

  template <class B>
  std::optional<typename B::complex> get(LinkId link, int N, const std::string& version) const {
    std::lock_guard<std::mutex> lock(mutex());
    if (!usable()) return std::nullopt;
    auto doc = load(file<B>(link));
    if (!doc) return std::nullopt;
    for (auto& e : (*doc)["entries"]) {
      if (e.value("N", -1) == N && e.value("formula_version", "") == version) {
        try {
          const std::string re = e.at("re"), im = e.at("im");
          return B::make(B::from_string(re), B::from_string(im));
        } catch (const std::exception& ex) {
          warn(file<B>(link), ex.what());
          return std::nullopt;
        }
      }
    }
    return std::nullopt;
  }

  template <class B>
  void put(LinkId link, int N, const std::string& version, const typename B::complex& v) const {
    std::lock_guard<std::mutex> lock(mutex());
    if (!usable()) return;
    auto path = file<B>(link);
    auto doc = load(path);
    if (!doc) doc = nlohmann::json{{"link", to_string(link)}, {"backend", B::name},
                                   {"entries", nlohmann::json::array()}};
    auto& entries = (*doc)["entries"];
    nlohmann::json entry{{"N", N},
                         {"re", B::to_string(B::re(v))},
                         {"im", B::to_string(B::im(v))},
                         {"formula_version", version}};
    bool replaced = false;
    for (auto& e : entries)
      if (e.value("N", -1) == N && e.value("formula_version", "") == version) {
        e = entry;
        replaced = true;
      }
    if (!replaced) entries.push_back(entry);
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream f(tmp);
      f << doc->dump(1) << "\n";
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
  }

  template <class B>
  std::filesystem::path file(LinkId link) const {
    return dir_ / (std::string(to_string(link)) + "." + std::string(B::name) + ".json");
  }

 private:
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  static void warn(const std::filesystem::path& p, const std::string& why) {
    std::cerr << "warning: ignoring cache file " << p << ": " << why << "\n";
  }
  static std::optional<nlohmann::json> load(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) return std::nullopt;
    try {
      auto doc = nlohmann::json::parse(f);
      if (!doc.contains("entries") || !doc["entries"].is_array())
        throw std::runtime_error("missing entries array");
      return doc;
    } catch (const std::exception& ex) {
      warn(p, ex.what());
      return std::nullopt;
    }
  }

  std::filesystem::path dir_;
};

template <class B>
InvariantValue<B> jones_cached(int N, LinkId link, const StateSumOptions& opt,
                               const InvariantCache* cache) {
  if (cache) {
    auto version = formula_version(link, opt);
    if (auto hit = cache->get<B>(link, N, version)) {
      InvariantValue<B> out;
      out.link = link;
      out.N = N;
      out.value = *hit;
      out.method = opt.use_oracle ? Method::TangleOracle : Method::ClosedForm;
      out.implementer_derived = !published_closed_form(link);
      out.formula_version = version;
      out.condition = 0;  // unknown for cached values
      return out;
    }
  }
  auto ctx = make_context<B>(N);
  auto v = jones_generic(ctx, link, opt);
  if (cache) cache->put<B>(link, N, v.formula_version, v.value);
  return v;
}

}  // namespace kashaev

#endif
