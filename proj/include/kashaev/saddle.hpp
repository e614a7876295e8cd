#ifndef KASHAEV_SADDLE_HPP
#define KASHAEV_SADDLE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "potentials.hpp"
#include "reference.hpp"

namespace kashaev {

struct SaddleOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int max_halvings = 30;
  bool grid_fallback = true;
};

struct NewtonOutcome {
  std::vector<cd> x;
  double residual = INFINITY;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline bool usable(const std::vector<cd>& x) {
  for (cd v : x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == 0.0) return false;
  return true;
}

inline double cleared_norm(const Potential& V, const std::vector<cd>& x) {
  if (!usable(x)) return INFINITY;
  double s = 0;
  for (const auto& e : cleared_system(V, x)) s += std::norm(e.num - e.den);
  return std::isfinite(s) ? std::sqrt(s) : INFINITY;
}

}  // namespace detail

// Damped Newton on num_i - den_i = 0 (the cleared stationary equations).
inline NewtonOutcome newton_cleared(const Potential& V, std::vector<cd> x,
                                    const SaddleOptions& opt = {}) {
  const std::size_t n = x.size();
  NewtonOutcome out;
  if (!detail::usable(x)) return out;
  double fnorm = detail::cleared_norm(V, x);
  std::vector<std::vector<cd>> dnum, dden;
  for (int it = 0; it < opt.max_iter; ++it) {
    out.residual = stationary_residual(V, x);
    if (out.residual <= opt.tol) {
      out.converged = true;
      break;
    }
    auto eq = cleared_system(V, x);
    cleared_log_jacobian(V, x, dnum, dden);
    Eigen::MatrixXcd J(n, n);
    Eigen::VectorXcd F(n);
    for (std::size_t i = 0; i < n; ++i) {
      F(i) = eq[i].num - eq[i].den;
      for (std::size_t j = 0; j < n; ++j) J(i, j) = eq[i].num * dnum[i][j] - eq[i].den * dden[i][j];
    }
    Eigen::VectorXcd step = J.partialPivLu().solve(-F);
    if (!step.allFinite()) break;
    double lambda = 1;
    bool accepted = false;
    std::vector<cd> trial(n);
    for (int h = 0; h <= opt.max_halvings; ++h, lambda /= 2) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * step(i);
      double tn = detail::cleared_norm(V, trial);
      if (tn < fnorm) {
        fnorm = tn;
        accepted = true;
        break;
      }
    }
    out.iterations = it + 1;
    if (!accepted) break;
    x = trial;
  }
  out.residual = detail::usable(x) ? stationary_residual(V, x) : INFINITY;
  // stalls just above tol are the rounding floor of the cleared system
  out.converged = out.residual <= 100 * opt.tol;
  out.x = x;
  return out;
}

struct ConstraintVerdict {
  std::string description;
  bool ok;
};

inline double arg_principal(cd z) { return std::arg(z); }  // (-pi, pi]

inline double arg_positive(cd z) {  // [0, 2pi)
  double a = std::arg(z);
  return a < 0 ? a + 2 * boost::math::constants::pi<double>() : a;
}

// Range conditions of the summations; args principal unless stated.
inline std::vector<ConstraintVerdict> check_constraints(LinkId link, const PotentialPoint& p) {
  const double two_pi = 2 * boost::math::constants::pi<double>();
  auto fin = [&](std::size_t i) { return p.at(i).has_value(); };
  auto a = [&](std::size_t i) { return arg_principal(*p[i]); };
  std::vector<ConstraintVerdict> out;
  switch (link) {
    case LinkId::K6_3:
      out.push_back({"arg z + arg u + arg v <= 2pi",
                     fin(0) && fin(1) && fin(2) && a(0) + a(1) + a(2) <= two_pi});
      break;
    case LinkId::K8_9:
      out.push_back({"arg x + arg y + arg u <= 2pi",
                     fin(0) && fin(1) && fin(3) && a(0) + a(1) + a(3) <= two_pi});
      out.push_back({"arg x + arg z + arg v <= 2pi",
                     fin(0) && fin(2) && fin(4) && a(0) + a(2) + a(4) <= two_pi});
      out.push_back({"arg x + arg u + arg v <= 2pi",
                     fin(0) && fin(3) && fin(4) && a(0) + a(3) + a(4) <= two_pi});
      break;
    case LinkId::K8_20: {
      bool ok = fin(0) && fin(2) && fin(3);
      double ainv_u = ok ? arg_positive(1.0 / *p[3]) : 0;
      double az = ok ? arg_positive(*p[2]) : 0;
      double ainv_x = ok ? arg_positive(1.0 / *p[0]) : 0;
      out.push_back({"arg(1/u) <= arg z (args in [0, 2pi))", ok && ainv_u <= az});
      out.push_back({"arg z <= arg(1/x) + arg(1/u) (args in [0, 2pi))",
                     ok && az <= ainv_x + ainv_u});
      break;
    }
    default:
      break;
  }
  return out;
}

struct SaddleResult {
  LinkId link;
  PotentialPoint point;
  cd V;
  cd V_principal;
  double vol_pred = 0;
  double cs_pred = 0;
  double residual = INFINITY;
  std::vector<ConstraintVerdict> constraints;
  bool im_negative = false;
  int iterations = 0;
  std::string seed;  // "primary" or "grid"

  bool constraints_ok() const {
    return std::all_of(constraints.begin(), constraints.end(),
                       [](const auto& c) { return c.ok; });
  }
  bool passes_filter() const { return im_negative && vol_pred > 0 && constraints_ok(); }
};

inline SaddleResult describe_point(LinkId link, const PotentialPoint& p) {
  auto V = potential_for(link);
  auto val = evaluate(V, p);
  SaddleResult r;
  r.link = link;
  r.point = p;
  r.V = val.V;
  r.V_principal = val.V_principal;
  r.vol_pred = val.vol_pred;
  r.cs_pred = val.cs_pred;
  r.residual = stationary_residual(V, p);
  r.constraints = check_constraints(link, p);
  r.im_negative = val.V.imag() < 0;
  return r;
}

struct StationaryPointEntry {
  LinkId link;
  PotentialPoint point;
  std::vector<int> digits;  // significant digits printed, per coordinate
  std::string source;
};

namespace detail {

inline int significant_digits(const std::string& s) {
  int n = 0;
  bool leading = true;
  for (char c : s) {
    if (c == 'e' || c == 'E') break;
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++n;
  }
  return n;
}

}  // namespace detail

inline std::map<LinkId, StationaryPointEntry> load_stationary_points(
    const std::filesystem::path& file) {
  auto doc = read_json(file);
  std::map<LinkId, StationaryPointEntry> out;
  try {
    for (const auto& e : doc.at("points")) {
      StationaryPointEntry s;
      s.link = parse_link(e.at("link").get<std::string>());
      for (const auto& c : e.at("coords")) {
        if (c.is_string() && c.get<std::string>() == "inf") {
          s.point.push_back(at_infinity);
          s.digits.push_back(0);
          continue;
        }
        const std::string re = c.at(0), im = c.at(1);
        s.point.push_back(cd(std::stod(re), std::stod(im)));
        s.digits.push_back(
            std::max(detail::significant_digits(re), detail::significant_digits(im)));
      }
      s.source = e.value("source", "");
      if (s.point.size() != potential_for(s.link).dim())
        throw validation_error(file.string() + ": wrong coordinate count for " +
                               std::string(to_string(s.link)));
      out[s.link] = s;
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(file.string() + ": " + e.what());
  }
  return out;
}

inline std::map<LinkId, StationaryPointEntry> stationary_points(const std::string& dir = {}) {
  return load_stationary_points(data_dir(dir) / "stationary_points.json");
}

// |got - printed| <= 10^{1-d} |printed| per coordinate, d the printed significant digits
inline bool matches_printed(const PotentialPoint& got, const StationaryPointEntry& printed) {
  if (got.size() != printed.point.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].has_value() != printed.point[i].has_value()) return false;
    if (!got[i]) continue;
    double tol = std::pow(10.0, 1 - printed.digits[i]) * std::abs(*printed.point[i]);
    if (std::abs(*got[i] - *printed.point[i]) > tol) return false;
  }
  return true;
}

namespace detail {

inline std::vector<std::vector<cd>> grid_seeds(std::size_t n) {
  const double pi = boost::math::constants::pi<double>();
  std::vector<cd> axis;
  for (double r : {0.5, 1.0, 2.0})
    for (double ph : {pi / 3, -pi / 3, pi}) axis.push_back(std::polar(r, ph));
  std::vector<std::vector<cd>> out{{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<cd>> next;
    for (const auto& s : out)
      for (cd a : axis) {
        auto t = s;
        t.push_back(a);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

inline bool lex_less(const PotentialPoint& a, const PotentialPoint& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].has_value() != b[i].has_value()) return !a[i].has_value();
    if (!a[i]) continue;
    if (a[i]->real() != b[i]->real()) return a[i]->real() < b[i]->real();
    if (a[i]->imag() != b[i]->imag()) return a[i]->imag() < b[i]->imag();
  }
  return false;
}

inline double point_distance(const PotentialPoint& a, const PotentialPoint& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].has_value() != b[i].has_value()) return INFINITY;
    if (a[i]) d = std::max(d, std::abs(*a[i] - *b[i]));
  }
  return d;
}

}  // namespace detail

// Newton from each seed on the reduced system of its infinity pattern; the
// primary seeds are tried first and the grid only if none of them survives the
// filter (Im V < 0, vol > 0, range conditions).
inline SaddleResult solve_saddle(LinkId link, const std::vector<PotentialPoint>& seeds,
                                 const SaddleOptions& opt = {}) {
  const auto V = potential_for(link);
  std::vector<SaddleResult> found;
  auto run = [&](const ReducedPotential& r, const std::vector<cd>& x0, const char* tag) {
    auto res = newton_cleared(r.potential, x0, opt);
    if (!res.converged) return;
    auto p = embed(r, res.x, V.dim());
    for (const auto& f : found)
      if (detail::point_distance(f.point, p) < 1e-8) return;
    SaddleResult s;
    try {
      s = describe_point(link, p);
    } catch (const std::exception&) {
      return;
    }
    s.iterations = res.iterations;
    s.seed = tag;
    found.push_back(s);
  };
  auto pick = [&]() -> const SaddleResult* {
    const SaddleResult* best = nullptr;
    for (const auto& f : found) {
      if (!f.passes_filter()) continue;
      if (!best || f.residual < best->residual ||
          (f.residual == best->residual && detail::lex_less(f.point, best->point)))
        best = &f;
    }
    return best;
  };

  std::vector<PotentialPoint> patterns;
  for (const auto& s : seeds) {
    auto r = reduce(V, s);
    run(r, finite_coords(r, s), "primary");
    PotentialPoint pat(V.dim());
    for (std::size_t i = 0; i < s.size(); ++i)
      pat[i] = s[i] ? Coord(cd(1)) : at_infinity;
    patterns.push_back(pat);
  }
  if (auto* b = pick()) return *b;

  if (opt.grid_fallback) {
    if (patterns.empty()) patterns.push_back(PotentialPoint(V.dim(), cd(1)));
    for (const auto& pat : patterns) {
      auto r = reduce(V, pat);
      for (const auto& x0 : detail::grid_seeds(r.potential.dim())) run(r, x0, "grid");
    }
    if (auto* b = pick()) return *b;
  }

  std::ostringstream msg;
  msg << "no stationary point of the " << to_string(link)
      << " potential passes the filter; roots found: " << found.size();
  for (const auto& f : found)
    msg << "\n  V = " << f.V.real() << (f.V.imag() < 0 ? " - " : " + ") << std::abs(f.V.imag())
        << "i, residual " << f.residual << (f.constraints_ok() ? "" : ", range conditions fail");
  throw not_found_error(msg.str());
}

struct ObservationVerdict {
  double vol_digits = 0;
  double cs_digits = 0;
  double vol_diff = 0;
  double cs_diff = 0;  // mod pi^2, nearest representative
  bool confirmed = false;
};

inline ObservationVerdict verify_observation(const SaddleResult& r, const ReferenceEntry& ref,
                                             double required_digits = 6) {
  if (r.link != ref.link) throw invalid_argument("reference entry is for another link");
  ObservationVerdict v;
  v.vol_diff = r.vol_pred - ref.vol;
  v.cs_diff = cs_distance(r.cs_pred, ref.CS);
  v.vol_digits = agreement_digits(v.vol_diff, ref.vol);
  v.cs_digits = agreement_digits(v.cs_diff, ref.CS);
  v.confirmed = v.vol_digits >= required_digits && v.cs_digits >= required_digits;
  return v;
}

}  // namespace kashaev

#endif
