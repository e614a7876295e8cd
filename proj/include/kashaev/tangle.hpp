#ifndef KASHAEV_TANGLE_HPP
#define KASHAEV_TANGLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "links.hpp"
#include "qarith.hpp"

namespace kashaev {

enum class CrossingSign { Positive, Negative };

template <class B>
typename B::complex r_matrix_entry(const RootOfUnityContext<B>& ctx,
                                   CrossingSign sign, int i, int j, int k,
                                   int l) {
  using complex = typename B::complex;
  const int N = ctx.N();
  for (int v : {i, j, k, l})
    if (v < 0 || v >= N)
      throw invalid_argument("R-matrix index " + std::to_string(v) +
                             " outside [0, N-1]");
  const long long a = 2LL * i - (N - 1), b = 2LL * j - (N - 1);
  if (sign == CrossingSign::Positive) {
    const int n = l - i;
    if (n < 0 || k != j - n || n > std::min(N - 1 - i, j)) return complex(0);
    complex w = ctx.qfact(i + n) * ctx.qfact(N - 1 + n - j) /
                (ctx.qfact(i) * ctx.qfact(N - 1 - j) * ctx.qfact(n));
    // twice the exponent of s
    long long e = a * b - 2LL * n * (i - j) - 1LL * n * (n + 1);
    return w * ctx.s_half_power(e);
  }
  const int n = i - l;
  if (n < 0 || k != j + n || n > std::min(N - 1 - j, i)) return complex(0);
  complex w = ctx.qfact(j + n) * ctx.qfact(N - 1 + n - i) /
              (ctx.qfact(j) * ctx.qfact(N - 1 - i) * ctx.qfact(n));
  if (n % 2) w = -w;
  long long e = -a * b - 2LL * n * (i - j) + 1LL * n * (n + 1);
  return w * ctx.s_half_power(e);
}

struct TangleEvent {
  enum class Kind { CrossPos, CrossNeg, Cup, Cap };
  Kind kind;
  int pos;  // left strand of the pair, 0-based
  bool operator==(const TangleEvent&) const = default;
};

// Morse presentation of a (1,1)-tangle, read bottom to top. The open
// strand enters at position 0 of the bottom level and leaves at position 0
// of the top level; it is oriented upward.
struct TangleDiagram {
  std::vector<TangleEvent> events;
  std::string note;

  int max_width() const { return check().second; }
  int writhe() const {
    int w = 0;
    for (auto& e : events)
      if (e.kind == TangleEvent::Kind::CrossPos) ++w;
      else if (e.kind == TangleEvent::Kind::CrossNeg) --w;
    return w;
  }

  // width after each event; throws validation_error on inconsistency
  std::pair<std::vector<int>, int> check() const {
    std::vector<int> widths;
    int w = 1, wmax = 1;
    for (std::size_t t = 0; t < events.size(); ++t) {
      const auto& e = events[t];
      auto fail = [&](const std::string& why) {
        throw validation_error("event " + std::to_string(t + 1) + ": " + why);
      };
      switch (e.kind) {
        case TangleEvent::Kind::Cup:
          if (e.pos < 0 || e.pos > w) fail("cup position outside 0.." + std::to_string(w));
          w += 2;
          break;
        case TangleEvent::Kind::Cap:
          if (e.pos < 0 || e.pos + 1 >= w) fail("cap needs strands p, p+1 below it");
          w -= 2;
          break;
        default:
          if (e.pos < 0 || e.pos + 1 >= w) fail("crossing needs strands p, p+1");
      }
      widths.push_back(w);
      wmax = std::max(wmax, w);
    }
    if (w != 1) throw validation_error("diagram must end with exactly one strand");
    return {widths, wmax};
  }

  // +1 / -1 per strand slot, level 0 = bottom; levels[t+1] follows event t
  std::vector<std::vector<int>> orientations() const;
};

namespace detail {

struct SlotRef {
  int level = -1, pos = -1;  // level -1: tangle end
  bool operator==(const SlotRef&) const = default;
};

}  // namespace detail

inline std::vector<std::vector<int>> TangleDiagram::orientations() const {
  using detail::SlotRef;
  auto [widths, wmax] = check();
  (void)wmax;
  const int L = static_cast<int>(events.size());
  std::vector<int> width(L + 1);
  width[0] = 1;
  for (int t = 0; t < L; ++t) width[t + 1] = widths[t];

  // every slot has one link upward and one downward; a cup joins two
  // slots through their lower ends, a cap through their upper ends
  std::vector<std::vector<SlotRef>> up(L + 1), down(L + 1);
  for (int t = 0; t <= L; ++t) {
    up[t].resize(width[t]);
    down[t].resize(width[t]);
  }
  for (int t = 0; t < L; ++t) {
    const auto& e = events[t];
    const int w = width[t];
    for (int p = 0; p < w; ++p) {
      int to;
      switch (e.kind) {
        case TangleEvent::Kind::Cup:
          to = p < e.pos ? p : p + 2;
          break;
        case TangleEvent::Kind::Cap:
          if (p == e.pos || p == e.pos + 1) {
            up[t][p] = {t, p == e.pos ? p + 1 : p - 1};
            continue;
          }
          to = p < e.pos ? p : p - 2;
          break;
        default:
          to = p == e.pos ? p + 1 : p == e.pos + 1 ? p - 1 : p;
      }
      up[t][p] = {t + 1, to};
      down[t + 1][to] = {t, p};
    }
    if (e.kind == TangleEvent::Kind::Cup) {
      down[t + 1][e.pos] = {t + 1, e.pos + 1};
      down[t + 1][e.pos + 1] = {t + 1, e.pos};
    }
  }
  down[0][0] = {};
  up[L][0] = {};

  std::vector<std::vector<int>> ori(L + 1);
  for (int t = 0; t <= L; ++t) ori[t].assign(width[t], 0);

  // walk a component; from_below says which end of `cur` we entered by
  auto walk = [&](SlotRef cur, bool from_below) {
    while (cur.level >= 0 && ori[cur.level][cur.pos] == 0) {
      ori[cur.level][cur.pos] = from_below ? 1 : -1;
      SlotRef next = from_below ? up[cur.level][cur.pos] : down[cur.level][cur.pos];
      if (next.level < 0) break;
      if (from_below)
        from_below = next.level != cur.level;  // same level: over a cap
      else
        from_below = next.level == cur.level;  // same level: around a cup
      cur = next;
    }
  };
  walk({0, 0}, true);
  if (ori[L][0] != 1) throw validation_error("open strand does not reach the top end");
  for (int t = 0; t <= L; ++t)
    for (int p = 0; p < width[t]; ++p)
      if (ori[t][p] == 0) walk({t, p}, true);
  return ori;
}

inline std::string format_diagram(const TangleDiagram& d) {
  std::ostringstream os;
  if (!d.note.empty()) {
    std::istringstream in(d.note);
    for (std::string line; std::getline(in, line);) os << "# " << line << "\n";
  }
  for (auto& e : d.events) {
    switch (e.kind) {
      case TangleEvent::Kind::CrossPos: os << "X+ "; break;
      case TangleEvent::Kind::CrossNeg: os << "X- "; break;
      case TangleEvent::Kind::Cup: os << "CUP "; break;
      case TangleEvent::Kind::Cap: os << "CAP "; break;
    }
    os << e.pos << "\n";
  }
  return os.str();
}

inline TangleDiagram parse_diagram(const std::string& text) {
  TangleDiagram d;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::string c = line.substr(hash + 1);
      if (!c.empty() && c[0] == ' ') c.erase(0, 1);
      if (hash == line.find_first_not_of(" \t")) {
        if (!d.note.empty()) d.note += "\n";
        d.note += c;
      }
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    int p;
    std::string extra;
    if (!(ls >> p) || (ls >> extra))
      throw validation_error("line " + std::to_string(lineno) +
                             ": expected '<op> <position>'");
    TangleEvent::Kind k;
    if (op == "X+") k = TangleEvent::Kind::CrossPos;
    else if (op == "X-") k = TangleEvent::Kind::CrossNeg;
    else if (op == "CUP") k = TangleEvent::Kind::Cup;
    else if (op == "CAP") k = TangleEvent::Kind::Cap;
    else
      throw validation_error("line " + std::to_string(lineno) + ": unknown event '" + op + "'");
    d.events.push_back({k, p});
  }
  d.check();
  return d;
}

inline TangleDiagram read_diagram_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw invalid_argument("cannot open diagram file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_diagram(ss.str());
}

// Closure of an n-strand braid on the right. Strand 0 is the open strand;
// the other closing arcs run downward. Letters are +-(i+1) for sigma_i^{+-1}.
inline TangleDiagram braid_closure(const std::vector<int>& word, int strands) {
  TangleDiagram d;
  for (int m = 1; m < strands; ++m) d.events.push_back({TangleEvent::Kind::Cup, m});
  for (int g : word) {
    int p = std::abs(g) - 1;
    if (g == 0 || p + 1 >= strands) throw invalid_argument("bad braid letter");
    d.events.push_back({g > 0 ? TangleEvent::Kind::CrossPos : TangleEvent::Kind::CrossNeg, p});
  }
  for (int m = strands - 1; m >= 1; --m) d.events.push_back({TangleEvent::Kind::Cap, m});
  return d;
}

struct TangleOptions {
  double cost_budget = 1e9;
  bool reverse_sweep = false;  // contract top-down instead of bottom-up
  bool framing_correction = true;
};

namespace detail {

template <class B>
struct CrossingTables {
  struct Entry {
    int a, b;
    typename B::complex w;
  };
  // [sign][orientation up=0/down=1][i*N+j] -> (k,l,w), and the transpose
  std::vector<std::vector<Entry>> fwd[2][2], bwd[2][2];

  explicit CrossingTables(const RootOfUnityContext<B>& ctx) {
    const int N = ctx.N();
    for (int sg = 0; sg < 2; ++sg)
      for (int o = 0; o < 2; ++o) {
        fwd[sg][o].assign(N * N, {});
        bwd[sg][o].assign(N * N, {});
      }
    for (int sg = 0; sg < 2; ++sg) {
      auto sign = sg == 0 ? CrossingSign::Positive : CrossingSign::Negative;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) {
              // upward strands: bottom (i,j) -> top (k,l)
              auto w = r_matrix_entry(ctx, sign, i, j, k, l);
              if (B::re(w) != 0 || B::im(w) != 0) {
                fwd[sg][0][i * N + j].push_back({k, l, w});
                bwd[sg][0][k * N + l].push_back({i, j, w});
              }
              // downward strands: the same crossing turned by 180 degrees
              auto v = r_matrix_entry(ctx, sign, l, k, j, i);
              if (B::re(v) != 0 || B::im(v) != 0) {
                fwd[sg][1][i * N + j].push_back({k, l, v});
                bwd[sg][1][k * N + l].push_back({i, j, v});
              }
            }
    }
  }
};

}  // namespace detail

inline double tangle_cost_estimate(int N, const TangleDiagram& d) {
  return std::pow(double(N), d.max_width() + 1) * std::max<std::size_t>(1, d.events.size());
}

// Sum over labelings with both ends labeled 0, as a transfer matrix over
// the N^w labelings of each level.
template <class B>
typename B::complex evaluate_tangle(const RootOfUnityContext<B>& ctx,
                                    const TangleDiagram& d,
                                    const TangleOptions& opt = {}) {
  using complex = typename B::complex;
  const int N = ctx.N();
  auto ori = d.orientations();
  const double cost = tangle_cost_estimate(N, d);
  if (cost > opt.cost_budget) {
    std::ostringstream os;
    os << "tangle contraction needs ~" << cost << " weight products (N=" << N
       << ", width " << d.max_width() << "), budget " << opt.cost_budget;
    throw resource_error(os.str());
  }
  for (std::size_t t = 0; t < d.events.size(); ++t) {
    const auto& e = d.events[t];
    if ((e.kind == TangleEvent::Kind::CrossPos || e.kind == TangleEvent::Kind::CrossNeg) &&
        ori[t][e.pos] != ori[t][e.pos + 1])
      throw validation_error("event " + std::to_string(t + 1) +
                             ": crossing of oppositely oriented strands; rotate it with a cup and cap");
  }

  detail::CrossingTables<B> tables(ctx);
  std::vector<long long> pw(d.max_width() + 2, 1);
  for (std::size_t p = 1; p < pw.size(); ++p) pw[p] = pw[p - 1] * N;

  // leftward extrema carry -s^{2x+1} (cup) and -s^{-2x-1} (cap)
  auto cup_weight = [&](std::size_t t, int x) -> complex {
    if (ori[t + 1][d.events[t].pos] == 1) return -ctx.s_power(2LL * x + 1);
    return complex(1);
  };
  auto cap_weight = [&](std::size_t t, int x) -> complex {
    if (ori[t][d.events[t].pos] == -1) return -ctx.s_power(-2LL * x - 1);
    return complex(1);
  };
  auto is_zero = [](const complex& z) { return B::re(z) == 0 && B::im(z) == 0; };

  std::vector<complex> state(1, complex(1)), next;
  const int L = static_cast<int>(d.events.size());
  auto width_at = [&](int t) { return static_cast<int>(ori[t].size()); };

  if (!opt.reverse_sweep) {
    for (int t = 0; t < L; ++t) {
      const auto& e = d.events[t];
      const int p = e.pos;
      next.assign(pw[width_at(t + 1)], complex(0));
      for (long long idx = 0; idx < static_cast<long long>(state.size()); ++idx) {
        const complex& a = state[idx];
        if (is_zero(a)) continue;
        if (e.kind == TangleEvent::Kind::Cup) {
          long long lo = idx % pw[p], hi = idx / pw[p];
          for (int x = 0; x < N; ++x)
            next[lo + x * pw[p] + x * pw[p + 1] + hi * pw[p + 2]] += a * cup_weight(t, x);
        } else if (e.kind == TangleEvent::Kind::Cap) {
          int x = (idx / pw[p]) % N, y = (idx / pw[p + 1]) % N;
          if (x != y) continue;
          next[idx % pw[p] + (idx / pw[p + 2]) * pw[p]] += a * cap_weight(t, x);
        } else {
          int sg = e.kind == TangleEvent::Kind::CrossPos ? 0 : 1;
          int o = ori[t][p] == 1 ? 0 : 1;
          int i = (idx / pw[p]) % N, j = (idx / pw[p + 1]) % N;
          long long base = idx - i * pw[p] - j * pw[p + 1];
          for (auto& en : tables.fwd[sg][o][i * N + j])
            next[base + en.a * pw[p] + en.b * pw[p + 1]] += a * en.w;
        }
      }
      state.swap(next);
    }
  } else {
    for (int t = L - 1; t >= 0; --t) {
      const auto& e = d.events[t];
      const int p = e.pos;
      next.assign(pw[width_at(t)], complex(0));
      for (long long idx = 0; idx < static_cast<long long>(state.size()); ++idx) {
        const complex& a = state[idx];
        if (is_zero(a)) continue;
        if (e.kind == TangleEvent::Kind::Cup) {
          int x = (idx / pw[p]) % N, y = (idx / pw[p + 1]) % N;
          if (x != y) continue;
          next[idx % pw[p] + (idx / pw[p + 2]) * pw[p]] += a * cup_weight(t, x);
        } else if (e.kind == TangleEvent::Kind::Cap) {
          long long lo = idx % pw[p], hi = idx / pw[p];
          for (int x = 0; x < N; ++x)
            next[lo + x * pw[p] + x * pw[p + 1] + hi * pw[p + 2]] += a * cap_weight(t, x);
        } else {
          int sg = e.kind == TangleEvent::Kind::CrossPos ? 0 : 1;
          int o = ori[t][p] == 1 ? 0 : 1;
          int k = (idx / pw[p]) % N, l = (idx / pw[p + 1]) % N;
          long long base = idx - k * pw[p] - l * pw[p + 1];
          for (auto& en : tables.bwd[sg][o][k * N + l])
            next[base + en.a * pw[p] + en.b * pw[p + 1]] += a * en.w;
        }
      }
      state.swap(next);
    }
  }

  complex v = state[0];
  if (opt.framing_correction) {
    // twist eigenvalue s^{(N^2-1)/2} per unit of writhe; half-integer
    // exponent for even N, hence the doubled-exponent table
    long long e2 = -(1LL * N * N - 1) * d.writhe();
    v *= ctx.s_half_power(e2);
  }
  return require_finite<B>(v, "evaluate_tangle");
}

// A shipped diagram plus the unit factor (-1)^negate s^s_exponent that maps
// its framing-free evaluation onto the normalization of the closed-form sum.
struct BuiltinDiagram {
  TangleDiagram diagram;
  bool negate = false;
  int s_exponent = 0;

  template <class B>
  typename B::complex convention_factor(const RootOfUnityContext<B>& ctx) const {
    typename B::complex f = ctx.s_power(s_exponent);
    return negate ? -f : f;
  }
};

inline BuiltinDiagram builtin_diagram(LinkId link) {
  BuiltinDiagram b;
  switch (link) {
    case LinkId::K4_1:
      b.diagram = braid_closure({1, -2, 1, -2}, 3);
      b.diagram.note = "4_1: closure of s1 s2^-1 s1 s2^-1";
      break;
    case LinkId::K5_2:
      // mirror of s1^3 s2 s1^-1 s2; the sum matches q * J of this diagram
      b.diagram = braid_closure({-1, -1, -1, -2, 1, -2}, 3);
      b.diagram.note = "5_2 (mirror): closure of s1^-3 s2^-1 s1 s2^-1";
      b.s_exponent = 2;
      break;
    case LinkId::K6_1:
      b.diagram = braid_closure({1, 1, 2, -1, -3, 2, -3}, 4);
      b.diagram.note = "6_1: closure of s1^2 s2 s1^-1 s3^-1 s2 s3^-1";
      break;
    case LinkId::K6_3:
      b.diagram = braid_closure({1, 1, -2, 1, -2, -2}, 3);
      b.diagram.note = "6_3: closure of s1^2 s2^-1 s1 s2^-2";
      break;
    case LinkId::K8_9:
      b.diagram = braid_closure({1, 1, 1, -2, 1, -2, -2, -2}, 3);
      b.diagram.note = "8_9: closure of s1^3 s2^-1 s1 s2^-3";
      break;
    case LinkId::K8_20:
      b.diagram = braid_closure({1, 1, 1, -2, -1, -1, -1, -2}, 3);
      b.diagram.note = "8_20: closure of s1^3 s2^-1 s1^-3 s2^-1";
      break;
    case LinkId::Whitehead:
      // mirror of s1^2 s2^-1 s1 s2^-1; the triple sum equals -s * J of it
      b.diagram = braid_closure({-1, -1, 2, -1, 2}, 3);
      b.diagram.note = "Whitehead link (mirror): closure of s1^-2 s2 s1^-1 s2";
      b.negate = true;
      b.s_exponent = 1;
      break;
  }
  return b;
}

template <class B>
typename B::complex evaluate_builtin(const RootOfUnityContext<B>& ctx, LinkId link,
                                     const TangleOptions& opt = {}) {
  auto b = builtin_diagram(link);
  return b.convention_factor(ctx) * evaluate_tangle(ctx, b.diagram, opt);
}

}  // namespace kashaev

#endif
