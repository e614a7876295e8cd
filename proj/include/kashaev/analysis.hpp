#ifndef KASHAEV_ANALYSIS_HPP
#define KASHAEV_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "potentials.hpp"
#include "reference.hpp"
#include "saddle.hpp"
#include "statesum.hpp"

namespace kashaev {

// ell = 2 pi Log(J_{N+1}/J_N), principal Log
template <class B>
struct SequencePoint {
  int N;
  typename B::complex ell;
};

// Invariants for every N and N+1 are computed once each, spread over
// `threads` workers; the values do not depend on the split.
template <class B>
std::vector<SequencePoint<B>> build_sequence(LinkId link, const std::vector<int>& Ns,
                                             const StateSumOptions& opt = {},
                                             const InvariantCache* cache = nullptr,
                                             unsigned threads = 1) {
  std::set<int> need;
  for (int N : Ns) {
    if (N < 1) throw invalid_argument("sequence N must be >= 1");
    need.insert(N);
    need.insert(N + 1);
  }
  std::vector<int> order(need.begin(), need.end());
  // largest first so the long sums start early
  std::sort(order.rbegin(), order.rend());
  std::map<int, typename B::complex> J;
  threads = std::max(1u, std::min<unsigned>(threads, order.size()));
  std::vector<std::future<std::vector<std::pair<int, typename B::complex>>>> work;
  for (unsigned t = 0; t < threads; ++t)
    work.push_back(std::async(std::launch::async, [&, t] {
      std::vector<std::pair<int, typename B::complex>> out;
      for (std::size_t i = t; i < order.size(); i += threads)
        out.emplace_back(order[i], jones_cached<B>(order[i], link, opt, cache).value);
      return out;
    }));
  for (auto& w : work)
    for (auto& [n, v] : w.get()) J[n] = v;

  std::vector<SequencePoint<B>> seq;
  for (int N : Ns) {
    const auto& a = J.at(N);
    const auto& b = J.at(N + 1);
    if (a == typename B::complex(0) || b == typename B::complex(0))
      throw validation_error("J_N vanishes for " + std::string(to_string(link)) + " at N=" +
                             std::to_string(a == typename B::complex(0) ? N : N + 1));
    using std::log;
    seq.push_back({N, 2 * B::pi() * log(b / a)});
  }
  return seq;
}

struct FitOptions {
  int order = 2;                // a + b/N + ... + c/N^order
  std::vector<double> weights;  // empty: unweighted
};

struct FitResult {
  std::vector<cd> coeffs;  // coefficient of N^{-k}
  cd limit;
  double cs_top = 0;
  double residual_rms = 0;
  int points_used = 0;
  int order = 2;
  cd a() const { return coeffs.at(0); }
  cd b() const { return coeffs.size() > 1 ? coeffs[1] : cd(0); }
  cd c() const { return coeffs.size() > 2 ? coeffs[2] : cd(0); }
};

// Im(limit) mod pi^2 into (-pi^2/2, pi^2/2]
inline double cs_top(const FitResult& f) { return reduce_cs(f.limit.imag()); }

// least squares for ell_N ~ sum_k c_k N^{-k}; real and imaginary parts share one complex solve
inline FitResult fit_sequence(const std::vector<std::pair<int, cd>>& pts, const FitOptions& opt = {}) {
  const int m = int(pts.size()), p = opt.order + 1;
  if (opt.order < 0) throw invalid_argument("fit order must be >= 0");
  std::set<int> distinct;
  for (const auto& [N, v] : pts) {
    if (N <= 0) throw invalid_argument("fit needs positive N");
    distinct.insert(N);
  }
  if (int(distinct.size()) < p)
    throw invalid_argument("rank-deficient fit: " + std::to_string(distinct.size()) +
                           " distinct N for " + std::to_string(p) + " coefficients");
  if (!opt.weights.empty() && int(opt.weights.size()) != m)
    throw invalid_argument("fit weights must match the number of points");
  Eigen::MatrixXcd A(m, p);
  Eigen::VectorXcd y(m);
  for (int i = 0; i < m; ++i) {
    double w = opt.weights.empty() ? 1.0 : std::sqrt(opt.weights[i]);
    for (int k = 0; k < p; ++k) A(i, k) = w * std::pow(double(pts[i].first), -k);
    y(i) = w * pts[i].second;
  }
  Eigen::VectorXcd x = A.colPivHouseholderQr().solve(y);
  FitResult f;
  f.order = opt.order;
  for (int k = 0; k < p; ++k) f.coeffs.push_back(x(k));
  f.limit = f.coeffs[0];
  f.cs_top = cs_top(f);
  double ss = 0;
  for (int i = 0; i < m; ++i) {
    cd model = 0;
    for (int k = 0; k < p; ++k) model += f.coeffs[k] * std::pow(double(pts[i].first), -k);
    ss += std::norm(model - pts[i].second);
  }
  f.residual_rms = std::sqrt(ss / m);
  f.points_used = m;
  return f;
}

template <class B>
std::vector<std::pair<int, cd>> to_double_points(const std::vector<SequencePoint<B>>& s) {
  std::vector<std::pair<int, cd>> out;
  for (const auto& p : s) out.emplace_back(p.N, cd(B::to_double(B::re(p.ell)), B::to_double(B::im(p.ell))));
  return out;
}

struct CompareReport {
  LinkId link;
  double vol_diff = 0;
  double cs_diff = 0;  // mod pi^2, nearest representative
  double vol_digits = 0;
  double cs_digits = 0;
  bool pass = false;
  std::string verdict;
};

// fitted limit a ~ vol + i CS
inline CompareReport compare(LinkId link, const FitResult& f, const ReferenceEntry& ref,
                             double tol = 2e-3) {
  CompareReport r;
  r.link = link;
  r.vol_diff = f.limit.real() - ref.vol;
  r.cs_diff = cs_distance(f.limit.imag(), ref.CS);
  r.vol_digits = agreement_digits(r.vol_diff, ref.vol);
  r.cs_digits = agreement_digits(r.cs_diff, ref.CS);
  r.pass = std::abs(r.vol_diff) <= tol && r.cs_diff <= tol;
  std::ostringstream os;
  os << (r.pass ? "agrees" : "disagrees") << " within " << tol;
  r.verdict = os.str();
  return r;
}

inline CompareReport compare(const SaddleResult& s, const ReferenceEntry& ref,
                             double required_digits = 6) {
  auto v = verify_observation(s, ref, required_digits);
  CompareReport r;
  r.link = s.link;
  r.vol_diff = v.vol_diff;
  r.cs_diff = v.cs_diff;
  r.vol_digits = v.vol_digits;
  r.cs_digits = v.cs_digits;
  r.pass = v.confirmed;
  r.verdict = v.confirmed ? "confirmed" : "not confirmed";
  return r;
}

// rows of "N,re,im"; values kept as text so extended precision survives
struct CsvRow {
  int N;
  std::string re, im;
};

inline std::vector<CsvRow> read_sequence_csv(std::istream& in, const std::string& name = "csv") {
  std::vector<CsvRow> rows;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "N,re,im")
        throw validation_error(name + ": expected header N,re,im, got '" + line + "'");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string n, re, im, extra;
    if (!std::getline(ss, n, ',') || !std::getline(ss, re, ',') || !std::getline(ss, im, ',') ||
        std::getline(ss, extra, ','))
      throw validation_error(name + ":" + std::to_string(lineno) + ": expected 3 fields");
    try {
      std::size_t used = 0;
      int N = std::stoi(n, &used);
      if (used != n.size()) throw std::invalid_argument(n);
      (void)std::stod(re);
      (void)std::stod(im);
      rows.push_back({N, re, im});
    } catch (const std::exception&) {
      throw validation_error(name + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
    }
  }
  if (!header) throw validation_error(name + ": empty file");
  return rows;
}

inline std::vector<CsvRow> read_sequence_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw not_found_error("cannot open " + p.string());
  return read_sequence_csv(f, p.string());
}

inline std::vector<std::pair<int, cd>> to_points(const std::vector<CsvRow>& rows) {
  std::vector<std::pair<int, cd>> out;
  for (const auto& r : rows) out.emplace_back(r.N, cd(std::stod(r.re), std::stod(r.im)));
  return out;
}

template <class B>
void write_sequence_csv(std::ostream& os, const std::vector<SequencePoint<B>>& s) {
  os << "N,re,im\n";
  for (const auto& p : s)
    os << p.N << "," << B::to_string(B::re(p.ell)) << "," << B::to_string(B::im(p.ell)) << "\n";
}

// Agreement in significant digits per component between a computed point and
// a published row. With period_pi2 = k > 0, Im is compared modulo k pi^2.
struct RowAgreement {
  double re_digits = 0;
  double im_digits = 0;
  double min() const { return std::min(re_digits, im_digits); }
};

template <class B>
RowAgreement row_agreement(const SequencePoint<B>& p, const CsvRow& row, int period_pi2 = 0) {
  if (p.N != row.N) throw invalid_argument("row N mismatch");
  using real = typename B::real;
  auto digits = [](const real& diff, const real& ref) {
    using std::abs;
    double d = B::to_double(abs(diff)), r = B::to_double(abs(ref));
    if (d == 0) return 40.0;
    return -std::log10(d / std::max(r, 1e-300));
  };
  const real re = B::from_string(row.re), im = B::from_string(row.im);
  real dre = B::re(p.ell) - re;
  real dim = B::im(p.ell) - im;
  if (period_pi2 > 0) {
    using std::floor;
    const real P = B::pi() * B::pi() * real(period_pi2);
    dim -= P * floor(dim / P + real(0.5));
  }
  return {digits(dre, re), digits(dim, im)};
}

inline nlohmann::json fit_report_json(const std::string& label, const FitResult& f) {
  auto c = [](cd z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; };
  nlohmann::json j{{"link", label},
                   {"model", f.order == 2 ? std::string("a+b/N+c/N^2")
                                          : "sum_k c_k/N^k, k<=" + std::to_string(f.order)},
                   {"a", c(f.a())},
                   {"b", c(f.b())},
                   {"c", c(f.c())},
                   {"cs_top", f.cs_top},
                   {"residual_rms", f.residual_rms},
                   {"points_used", f.points_used}};
  if (f.order > 2) {
    nlohmann::json all = nlohmann::json::array();
    for (cd z : f.coeffs) all.push_back(c(z));
    j["coefficients"] = all;
  }
  return j;
}

}  // namespace kashaev

#endif
