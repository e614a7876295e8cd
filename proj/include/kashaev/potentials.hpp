#ifndef KASHAEV_POTENTIALS_HPP
#define KASHAEV_POTENTIALS_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "dilog.hpp"
#include "errors.hpp"
#include "links.hpp"

namespace kashaev {

// nullopt marks a coordinate at infinity
using Coord = std::optional<cd>;
using PotentialPoint = std::vector<Coord>;
inline constexpr std::nullopt_t at_infinity = std::nullopt;

// c * Li2(prod x_i^{e_i})
struct Li2Term {
  int c;
  std::vector<int> e;
};

// c * Log(prod x^a) * Log(prod x^b)
struct LogTerm {
  int c;
  std::vector<int> a, b;
};

struct Potential {
  LinkId link;
  std::vector<std::string> vars;
  std::vector<Li2Term> li2;
  std::vector<LogTerm> logs;
  cd constant = 0;
  std::size_t dim() const { return vars.size(); }
};

namespace detail {
inline double pi2() { return boost::math::constants::pi_sqr<double>(); }
}

// Li2(zuv) - Li2(1/(zuv)) + Li2(zv) - Li2(1/(zu)) - Li2(u) + Li2(1/u)
//   - Li2(v) + Li2(1/v) - Log z Log(u/v)
inline Potential potential_6_3() {
  return {LinkId::K6_3,
          {"z", "u", "v"},
          {{1, {1, 1, 1}}, {-1, {-1, -1, -1}}, {1, {1, 0, 1}}, {-1, {-1, -1, 0}},
           {-1, {0, 1, 0}}, {1, {0, -1, 0}}, {-1, {0, 0, 1}}, {1, {0, 0, -1}}},
          {{-1, {1, 0, 0}, {0, 1, -1}}},
          0};
}

// Li2(xy) - Li2(1/(xy)) + Li2(xz) - Li2(1/(xz)) + Li2(xu) - Li2(1/(xv))
//   + sum_{w in x,y,z,u,v} (Li2(w) - Li2(1/w)) - Li2(xzv) + Li2(1/(xyu))
//   + Log(y/z) Log(xyz) + Log(u/v) Log(xuv)
inline Potential potential_8_9() {
  return {LinkId::K8_9,
          {"x", "y", "z", "u", "v"},
          {{1, {1, 1, 0, 0, 0}},   {-1, {-1, -1, 0, 0, 0}}, {1, {1, 0, 1, 0, 0}},
           {-1, {-1, 0, -1, 0, 0}}, {1, {1, 0, 0, 1, 0}},   {-1, {-1, 0, 0, 0, -1}},
           {1, {1, 0, 0, 0, 0}},   {-1, {-1, 0, 0, 0, 0}}, {1, {0, 1, 0, 0, 0}},
           {-1, {0, -1, 0, 0, 0}}, {1, {0, 0, 1, 0, 0}},   {-1, {0, 0, -1, 0, 0}},
           {1, {0, 0, 0, 1, 0}},   {-1, {0, 0, 0, -1, 0}}, {1, {0, 0, 0, 0, 1}},
           {-1, {0, 0, 0, 0, -1}}, {-1, {1, 0, 1, 0, 1}},  {1, {-1, -1, 0, -1, 0}}},
          {{1, {0, 1, -1, 0, 0}, {1, 1, 1, 0, 0}}, {1, {0, 0, 0, 1, -1}, {1, 0, 0, 1, 1}}},
          0};
}

// -2Li2(x) + 2Li2(1/y) + 2Li2(z) - 2Li2(1/u) - 2Li2(1/v) - Li2(1/(xy)) - Li2(z/y)
//   - Li2(zu) + Li2(xzu) + Li2(1/(xyuv)) + Log x Log u + Log x Log v - Log z Log v + pi^2/2
inline Potential potential_8_20() {
  return {LinkId::K8_20,
          {"x", "y", "z", "u", "v"},
          {{-2, {1, 0, 0, 0, 0}},
           {2, {0, -1, 0, 0, 0}},
           {2, {0, 0, 1, 0, 0}},
           {-2, {0, 0, 0, -1, 0}},
           {-2, {0, 0, 0, 0, -1}},
           {-1, {-1, -1, 0, 0, 0}},
           {-1, {0, -1, 1, 0, 0}},
           {-1, {0, 0, 1, 1, 0}},
           {1, {1, 0, 1, 1, 0}},
           {1, {-1, -1, 0, -1, -1}}},
          {{1, {1, 0, 0, 0, 0}, {0, 0, 0, 1, 0}},
           {1, {1, 0, 0, 0, 0}, {0, 0, 0, 0, 1}},
           {-1, {0, 0, 1, 0, 0}, {0, 0, 0, 0, 1}}},
          detail::pi2() / 2};
}

// -2Li2(1/x) - 2Li2(1/y) - 4Li2(z) + Li2(z/x) + Li2(z/y) + pi^2
inline Potential potential_whitehead() {
  return {LinkId::Whitehead,
          {"x", "y", "z"},
          {{-2, {-1, 0, 0}}, {-2, {0, -1, 0}}, {-4, {0, 0, 1}}, {1, {-1, 0, 1}}, {1, {0, -1, 1}}},
          {},
          detail::pi2()};
}

// Derived from the 5_2 sum with x ~ q^{-l}, y ~ q^k:
// -2Li2(1/x) + Li2(y/x) - Log x Log y + pi^2/6
inline Potential potential_5_2() {
  return {LinkId::K5_2,
          {"x", "y"},
          {{-2, {-1, 0}}, {1, {-1, 1}}},
          {{-1, {1, 0}, {0, 1}}},
          detail::pi2() / 6};
}

inline bool has_potential(LinkId link) {
  return link == LinkId::K6_3 || link == LinkId::K8_9 || link == LinkId::K8_20 ||
         link == LinkId::Whitehead || link == LinkId::K5_2;
}

inline Potential potential_for(LinkId link) {
  switch (link) {
    case LinkId::K6_3: return potential_6_3();
    case LinkId::K8_9: return potential_8_9();
    case LinkId::K8_20: return potential_8_20();
    case LinkId::Whitehead: return potential_whitehead();
    case LinkId::K5_2: return potential_5_2();
    default: break;
  }
  throw not_found_error("no potential registered for " + std::string(to_string(link)));
}

inline cd monomial(const std::vector<cd>& x, const std::vector<int>& e) {
  cd r = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (e[i]) r *= std::pow(x[i], e[i]);
  return r;
}

// Potential in the finite variables of a point, with the infinite ones sent to
// infinity: Li2 terms whose monomial carries a negative power of an infinite
// variable tend to Li2(0) = 0 and are dropped.
struct ReducedPotential {
  Potential potential;
  std::vector<std::size_t> finite_index;  // reduced variable -> original slot
};

inline ReducedPotential reduce(const Potential& V, const PotentialPoint& pt) {
  if (pt.size() != V.dim())
    throw invalid_argument("point has " + std::to_string(pt.size()) + " coordinates, " +
                           std::string(to_string(V.link)) + " potential needs " +
                           std::to_string(V.dim()));
  ReducedPotential r;
  r.potential.link = V.link;
  r.potential.constant = V.constant;
  for (std::size_t i = 0; i < pt.size(); ++i)
    if (pt[i]) {
      r.finite_index.push_back(i);
      r.potential.vars.push_back(V.vars[i]);
    }
  auto project = [&](const std::vector<int>& e) {
    std::vector<int> out;
    for (auto i : r.finite_index) out.push_back(e[i]);
    return out;
  };
  for (const auto& t : V.li2) {
    bool neg = false;
    for (std::size_t i = 0; i < pt.size(); ++i) {
      if (pt[i] || t.e[i] == 0) continue;
      if (t.e[i] > 0)
        throw domain_error("Li2 term of the " + std::string(to_string(V.link)) +
                           " potential has no finite limit as " + V.vars[i] + " -> infinity");
      neg = true;
    }
    if (neg) continue;
    r.potential.li2.push_back({t.c, project(t.e)});
  }
  for (const auto& t : V.logs) {
    for (std::size_t i = 0; i < pt.size(); ++i)
      if (!pt[i] && (t.a[i] || t.b[i]))
        throw domain_error("log term diverges with " + V.vars[i] + " at infinity");
    r.potential.logs.push_back({t.c, project(t.a), project(t.b)});
  }
  return r;
}

inline std::vector<cd> finite_coords(const ReducedPotential& r, const PotentialPoint& pt) {
  std::vector<cd> x;
  for (std::size_t k = 0; k < r.finite_index.size(); ++k) {
    const auto i = r.finite_index[k];
    if (*pt[i] == 0.0) throw domain_error("coordinate " + r.potential.vars[k] + " is zero");
    x.push_back(*pt[i]);
  }
  return x;
}

inline PotentialPoint embed(const ReducedPotential& r, const std::vector<cd>& x,
                            std::size_t dim) {
  PotentialPoint pt(dim, at_infinity);
  for (std::size_t k = 0; k < x.size(); ++k) pt[r.finite_index[k]] = x[k];
  return pt;
}

// x_i dV/dx_i, principal branches
inline std::vector<cd> log_gradient(const Potential& V, const std::vector<cd>& x) {
  std::vector<cd> g(x.size(), 0.0);
  for (const auto& t : V.li2) {
    cd w = monomial(x, t.e);
    if (w == 1.0) throw domain_error("gradient undefined: Li2 argument equals 1");
    cd l = std::log(1.0 - w);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (t.e[i]) g[i] -= double(t.c * t.e[i]) * l;
  }
  for (const auto& t : V.logs) {
    cd A = std::log(monomial(x, t.a)), B = std::log(monomial(x, t.b));
    for (std::size_t i = 0; i < x.size(); ++i)
      g[i] += double(t.c) * (double(t.a[i]) * B + double(t.b[i]) * A);
  }
  return g;
}

inline std::vector<cd> gradient(const Potential& V, const std::vector<cd>& x) {
  auto g = log_gradient(V, x);
  for (std::size_t i = 0; i < x.size(); ++i) g[i] /= x[i];
  return g;
}

inline cd evaluate_principal(const Potential& V, const std::vector<cd>& x) {
  cd v = V.constant;
  for (const auto& t : V.li2) v += double(t.c) * li2(monomial(x, t.e)).value;
  for (const auto& t : V.logs)
    v += double(t.c) * std::log(monomial(x, t.a)) * std::log(monomial(x, t.b));
  return v;
}

// exp(x_i dV/dx_i) written without logarithms:
//   prod (1-w)^{-c e_i} * prod m_b^{c a_i} m_a^{c b_i},
// split into numerator/denominator by exponent sign.
struct ClearedEquation {
  cd num, den;
};

inline std::vector<ClearedEquation> cleared_system(const Potential& V, const std::vector<cd>& x) {
  const std::size_t n = x.size();
  std::vector<ClearedEquation> eq(n, {1.0, 1.0});
  auto mul = [&](std::size_t i, cd f, int p) {
    if (p > 0) eq[i].num *= std::pow(f, p);
    if (p < 0) eq[i].den *= std::pow(f, -p);
  };
  for (const auto& t : V.li2) {
    cd f = 1.0 - monomial(x, t.e);
    for (std::size_t i = 0; i < n; ++i) mul(i, f, -t.c * t.e[i]);
  }
  for (const auto& t : V.logs) {
    cd ma = monomial(x, t.a), mb = monomial(x, t.b);
    for (std::size_t i = 0; i < n; ++i) {
      mul(i, mb, t.c * t.a[i]);
      mul(i, ma, t.c * t.b[i]);
    }
  }
  return eq;
}

// d log(num_i)/dx_j and d log(den_i)/dx_j
inline void cleared_log_jacobian(const Potential& V, const std::vector<cd>& x,
                                 std::vector<std::vector<cd>>& dnum,
                                 std::vector<std::vector<cd>>& dden) {
  const std::size_t n = x.size();
  dnum.assign(n, std::vector<cd>(n, 0.0));
  dden.assign(n, std::vector<cd>(n, 0.0));
  auto add = [&](std::size_t i, int p, const std::vector<cd>& dlog) {
    auto& row = p > 0 ? dnum[i] : dden[i];
    double ap = std::abs(p);
    for (std::size_t j = 0; j < n; ++j) row[j] += ap * dlog[j];
  };
  std::vector<cd> dlog(n);
  for (const auto& t : V.li2) {
    cd w = monomial(x, t.e);
    for (std::size_t j = 0; j < n; ++j) dlog[j] = -double(t.e[j]) * w / (x[j] * (1.0 - w));
    for (std::size_t i = 0; i < n; ++i)
      if (int p = -t.c * t.e[i]) add(i, p, dlog);
  }
  std::vector<cd> da(n), db(n);
  for (const auto& t : V.logs) {
    for (std::size_t j = 0; j < n; ++j) {
      da[j] = double(t.a[j]) / x[j];
      db[j] = double(t.b[j]) / x[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (int p = t.c * t.a[i]) add(i, p, db);
      if (int p = t.c * t.b[i]) add(i, p, da);
    }
  }
}

// max_i |exp(x_i dV/dx_i) - 1| via the cleared form
inline double stationary_residual(const Potential& V, const std::vector<cd>& x) {
  double r = 0;
  for (const auto& e : cleared_system(V, x)) {
    if (e.den == 0.0) return INFINITY;
    r = std::max(r, std::abs(e.num / e.den - 1.0));
  }
  return r;
}

inline double stationary_residual(const Potential& V, const PotentialPoint& pt) {
  auto r = reduce(V, pt);
  return stationary_residual(r.potential, finite_coords(r, pt));
}

// Re V reduced into (-pi^2/2, pi^2/2]
inline double reduce_cs(double re) {
  const double p2 = detail::pi2();
  double r = std::remainder(re, p2);
  if (r <= -p2 / 2) r += p2;
  return r;
}

struct PotentialValue {
  cd V;            // branch-normalized value, see evaluate()
  cd V_principal;  // all Li2 and Log on principal branches
  double vol_pred = 0;
  double cs_pred = 0;
};

// The principal value at a stationary point depends on which log branches the
// stationary equations hold on. V - sum_i (x_i dV/dx_i) Log x_i does not: a
// branch change in any Li2 or Log moves it by a multiple of 4 pi^2 only.
inline PotentialValue evaluate(const Potential& V, const PotentialPoint& pt) {
  auto r = reduce(V, pt);
  auto x = finite_coords(r, pt);
  PotentialValue out;
  out.V_principal = evaluate_principal(r.potential, x);
  out.V = out.V_principal;
  bool any = false;
  for (const auto& xi : x) any |= std::log(xi) != 0.0;
  if (any) {
    auto g = log_gradient(r.potential, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      cd l = std::log(x[i]);
      if (l != 0.0) out.V -= g[i] * l;
    }
  }
  out.vol_pred = -out.V.imag();
  out.cs_pred = reduce_cs(out.V.real());
  return out;
}

inline PotentialValue V_63(cd z, cd u, cd v) { return evaluate(potential_6_3(), {z, u, v}); }
inline PotentialValue V_89(cd x, cd y, cd z, cd u, cd v) {
  return evaluate(potential_8_9(), {x, y, z, u, v});
}
inline PotentialValue V_820(Coord x, Coord y, Coord z, Coord u, Coord v) {
  return evaluate(potential_8_20(), {x, y, z, u, v});
}
inline PotentialValue V_whitehead(Coord x, Coord y, Coord z) {
  return evaluate(potential_whitehead(), {x, y, z});
}

// true when some Li2 argument is within margin of [1, inf) or some log
// argument within margin of (-inf, 0]
inline bool near_branch_locus(const Potential& V, const std::vector<cd>& x, double margin) {
  for (const auto& t : V.li2) {
    cd w = monomial(x, t.e);
    if (std::abs(w - 1.0) < margin) return true;
    if (w.real() > 1 && std::abs(w.imag()) < margin) return true;
  }
  for (const auto& t : V.logs)
    for (cd m : {monomial(x, t.a), monomial(x, t.b)})
      if (std::abs(m) < margin || (m.real() < 0 && std::abs(m.imag()) < margin)) return true;
  for (cd xi : x)
    if (xi.real() < 0 && std::abs(xi.imag()) < margin) return true;
  return false;
}

}  // namespace kashaev

#endif
