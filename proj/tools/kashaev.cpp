// Command-line front end: invariant, sequence, saddle, fit, verify-all.
// Exit codes: 0 success, 2 input or evaluation error, 3 no admissible saddle.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <kashaev/analysis.hpp>
#include <kashaev/backend.hpp>
#include <kashaev/saddle.hpp>
#include <kashaev/statesum.hpp>
#include <kashaev/tangle.hpp>

using namespace kashaev;
using json = nlohmann::json;

namespace {

struct SaddleNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  bool json = false;
  std::string backend = "double";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string cache_dir;
  double cost_budget = 1e9;
  int max_n = 0;  // 0: per-link defaults
  std::string data_dir;
  std::string formula = "triple";

  StateSumOptions statesum() const {
    StateSumOptions o;
    o.tangle.cost_budget = cost_budget;
    o.whitehead = parse_whitehead_formula(formula);
    if (max_n > 0) o.max_n_whitehead = o.max_n_6_3 = o.max_n_8_9 = o.max_n_8_20 = o.max_n_small = max_n;
    return o;
  }
  std::optional<InvariantCache> cache() const { return InvariantCache::from_config(cache_dir); }
};

std::string complex_text(const std::string& re, const std::string& im) {
  std::string sign = !im.empty() && im[0] == '-' ? "" : "+";
  return re + sign + im + "i";
}

std::string fmt(double x, int prec = 10) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

template <class B>
int run_invariant(const Config& cfg, std::optional<LinkId> link, int N, bool oracle,
                  const std::string& diagram_file) {
  auto ctx = make_context<B>(N);
  json out;
  std::string value_re, value_im;
  if (!diagram_file.empty()) {
    auto d = read_diagram_file(diagram_file);
    TangleOptions t;
    t.cost_budget = cfg.cost_budget;
    auto v = evaluate_tangle(ctx, d, t);
    value_re = B::to_string(B::re(v));
    value_im = B::to_string(B::im(v));
    out = {{"diagram", diagram_file}, {"N", N}, {"re", value_re}, {"im", value_im},
           {"backend", B::name}, {"method", "tangle_oracle"}};
  } else {
    auto opt = cfg.statesum();
    auto cache = cfg.cache();
    auto v = jones_cached<B>(N, *link, opt, cache ? &*cache : nullptr);
    value_re = B::to_string(B::re(v.value));
    value_im = B::to_string(B::im(v.value));
    out = {{"link", to_string(*link)},
           {"N", N},
           {"re", value_re},
           {"im", value_im},
           {"backend", B::name},
           {"method", to_string(v.method)},
           {"formula_version", v.formula_version},
           {"implementer_derived", v.implementer_derived}};
    if (v.condition > 0)
      out["est_digits"] = estimated_digits(v);
    else
      out["est_digits"] = nullptr;
    if (oracle) {
      auto o = opt;
      o.use_oracle = true;
      auto w = jones_generic(ctx, *link, o);
      using std::abs;
      double rel = B::to_double(abs(w.value - v.value)) /
                   (1 + B::to_double(abs(v.value)));
      out["oracle"] = {{"re", B::to_string(B::re(w.value))},
                       {"im", B::to_string(B::im(w.value))},
                       {"relative_difference", rel}};
    }
  }
  if (cfg.json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << (out.contains("link") ? out["link"].get<std::string>() : diagram_file)
            << " N=" << N << "\n  value   " << complex_text(value_re, value_im)
            << "\n  method  " << out["method"].get<std::string>() << "\n  backend " << B::name
            << "\n";
  if (out.contains("formula_version"))
    std::cout << "  formula " << out["formula_version"].get<std::string>()
              << (out["implementer_derived"].get<bool>() ? " (implementer-derived)" : "") << "\n";
  if (out.contains("est_digits") && !out["est_digits"].is_null())
    std::cout << "  est. digits " << fmt(out["est_digits"].get<double>(), 3) << "\n";
  if (out.contains("oracle"))
    std::cout << "  oracle  "
              << complex_text(out["oracle"]["re"].get<std::string>(),
                              out["oracle"]["im"].get<std::string>())
              << "\n  relative difference " << out["oracle"]["relative_difference"].get<double>()
              << "\n";
  return 0;
}

template <class B>
int run_sequence(const Config& cfg, LinkId link, const std::vector<int>& Ns) {
  auto cache = cfg.cache();
  auto seq = build_sequence<B>(link, Ns, cfg.statesum(), cache ? &*cache : nullptr, cfg.threads);
  if (cfg.json) {
    json arr = json::array();
    for (const auto& p : seq)
      arr.push_back({{"N", p.N}, {"re", B::to_string(B::re(p.ell))}, {"im", B::to_string(B::im(p.ell))}});
    std::cout << arr.dump(2) << "\n";
  } else {
    write_sequence_csv(std::cout, seq);
  }
  return 0;
}

std::vector<int> range_ns(int from, int to, int step) {
  if (step <= 0) throw kashaev::invalid_argument("--step must be positive");
  std::vector<int> ns;
  for (int n = from; n <= to; n += step) ns.push_back(n);
  return ns;
}

json point_json(const PotentialPoint& p, const Potential& V) {
  json j = json::object();
  for (std::size_t i = 0; i < p.size(); ++i)
    j[V.vars[i]] = p[i] ? json{{"re", p[i]->real()}, {"im", p[i]->imag()}} : json("inf");
  return j;
}

SaddleResult saddle_for(LinkId link, const Config& cfg) {
  if (!has_potential(link))
    throw kashaev::invalid_argument("no potential function for " + std::string(to_string(link)));
  auto pts = stationary_points(cfg.data_dir);
  std::vector<PotentialPoint> seeds;
  if (auto it = pts.find(link); it != pts.end()) seeds.push_back(it->second.point);
  try {
    return solve_saddle(link, seeds);
  } catch (const not_found_error& e) {
    throw SaddleNotFound(e.what());
  }
}

int run_saddle(const Config& cfg, LinkId link, const std::string& reference_file) {
  auto r = saddle_for(link, cfg);
  auto V = potential_for(link);
  std::optional<ObservationVerdict> verdict;
  auto table = reference_file.empty() ? reference_table(cfg.data_dir)
                                      : load_reference_table(reference_file);
  for (const auto& e : table)
    if (e.link == link) verdict = verify_observation(r, e);
  if (cfg.json) {
    json c = json::array();
    for (const auto& k : r.constraints) c.push_back({{"condition", k.description}, {"ok", k.ok}});
    json j{{"link", to_string(link)},
           {"point", point_json(r.point, V)},
           {"V", {{"re", r.V.real()}, {"im", r.V.imag()}}},
           {"V_principal", {{"re", r.V_principal.real()}, {"im", r.V_principal.imag()}}},
           {"vol_pred", r.vol_pred},
           {"cs_pred", r.cs_pred},
           {"residual", r.residual},
           {"constraints", c},
           {"im_negative", r.im_negative},
           {"iterations", r.iterations},
           {"seed", r.seed}};
    if (verdict)
      j["reference"] = {{"vol_digits", verdict->vol_digits},
                        {"cs_digits", verdict->cs_digits},
                        {"confirmed", verdict->confirmed}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << to_string(link) << " stationary point\n";
  for (std::size_t i = 0; i < r.point.size(); ++i) {
    std::cout << "  " << V.vars[i] << " = ";
    if (r.point[i])
      std::cout << fmt(r.point[i]->real(), 12) << (r.point[i]->imag() < 0 ? " - " : " + ")
                << fmt(std::abs(r.point[i]->imag()), 12) << "i\n";
    else
      std::cout << "inf\n";
  }
  std::cout << "  V        " << fmt(r.V.real(), 12) << (r.V.imag() < 0 ? " - " : " + ")
            << fmt(std::abs(r.V.imag()), 12) << "i\n"
            << "  vol_pred " << fmt(r.vol_pred, 10) << "\n"
            << "  cs_pred  " << fmt(r.cs_pred, 10) << "  (-cs_pred/2pi^2 = "
            << fmt(-r.cs_pred / (2 * detail::pi2()), 8) << ")\n"
            << "  residual " << r.residual << " after " << r.iterations << " iterations ("
            << r.seed << " seed)\n";
  for (const auto& k : r.constraints)
    std::cout << "  " << (k.ok ? "ok   " : "FAIL ") << k.description << "\n";
  if (verdict)
    std::cout << "  reference: vol " << fmt(verdict->vol_digits, 3) << " digits, CS "
              << fmt(verdict->cs_digits, 3) << " digits -> "
              << (verdict->confirmed ? "confirmed" : "not confirmed") << "\n";
  return 0;
}

int run_fit(const Config& cfg, std::optional<LinkId> link, const std::string& csv,
            std::vector<int> ns, int order, const std::string& reference_file) {
  std::vector<std::pair<int, cd>> pts;
  std::string label;
  if (!csv.empty()) {
    pts = to_points(read_sequence_csv(std::filesystem::path(csv)));
    label = link ? std::string(to_string(*link)) : csv;
  } else {
    if (!link) throw kashaev::invalid_argument("fit needs a link or --csv");
    if (ns.empty()) throw kashaev::invalid_argument("fit needs --ns or --csv");
    label = to_string(*link);
    auto cache = cfg.cache();
    if (cfg.backend == "extended")
      pts = to_double_points(build_sequence<ExtendedBackend>(*link, ns, cfg.statesum(),
                                                             cache ? &*cache : nullptr, cfg.threads));
    else
      pts = to_double_points(build_sequence<DoubleBackend>(*link, ns, cfg.statesum(),
                                                           cache ? &*cache : nullptr, cfg.threads));
  }
  FitOptions fo;
  fo.order = order;
  auto f = fit_sequence(pts, fo);
  std::optional<CompareReport> cmp;
  if (link) {
    auto table = reference_file.empty() ? reference_table(cfg.data_dir)
                                        : load_reference_table(reference_file);
    for (const auto& e : table)
      if (e.link == *link) cmp = compare(*link, f, e);
  }
  if (cfg.json) {
    auto j = fit_report_json(label, f);
    if (cmp)
      j["reference"] = {{"vol_diff", cmp->vol_diff}, {"cs_diff", cmp->cs_diff}, {"pass", cmp->pass}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  auto c = [](cd z) {
    return fmt(z.real(), 10) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag()), 10) + "i";
  };
  std::cout << label << " fit a + b/N + c/N^2 over " << f.points_used << " points\n"
            << "  a (limit) " << c(f.a()) << "\n  b         " << c(f.b()) << "\n  c         "
            << c(f.c()) << "\n  cs_top    " << fmt(f.cs_top, 10) << "\n  rms       "
            << f.residual_rms << "\n";
  if (cmp)
    std::cout << "  reference: |dvol| " << std::abs(cmp->vol_diff) << ", |dCS| " << cmp->cs_diff
              << " -> " << cmp->verdict << "\n";
  return 0;
}

const std::vector<int> kNs52 = {40, 50, 60, 70, 80, 100, 120, 150, 200, 250};
const std::vector<int> kNsWhitehead = {40, 50, 60, 70, 80, 100, 120, 150};

int run_verify_all(const Config& cfg, const std::string& reference_file) {
  auto table = reference_file.empty() ? reference_table(cfg.data_dir)
                                      : load_reference_table(reference_file);
  json rows = json::array();
  bool all = true;
  auto record = [&](const std::string& check, LinkId link, bool pass, json detail) {
    all &= pass;
    detail["check"] = check;
    detail["link"] = to_string(link);
    detail["pass"] = pass;
    rows.push_back(detail);
  };
  for (LinkId link : {LinkId::K6_3, LinkId::K8_9, LinkId::K8_20, LinkId::Whitehead, LinkId::K5_2}) {
    try {
      auto r = saddle_for(link, cfg);
      auto v = verify_observation(r, lookup(table, link));
      record("saddle", link, v.confirmed,
             {{"vol_pred", r.vol_pred}, {"cs_pred", r.cs_pred}, {"vol_digits", v.vol_digits},
              {"cs_digits", v.cs_digits}});
    } catch (const std::exception& e) {
      record("saddle", link, false, {{"error", e.what()}});
    }
  }
  auto cache = cfg.cache();
  StateSumOptions opt = cfg.statesum();
  opt.whitehead = WhiteheadFormula::Triple;
  for (auto [link, ns] : {std::pair{LinkId::K5_2, kNs52}, std::pair{LinkId::Whitehead, kNsWhitehead}}) {
    try {
      auto seq = build_sequence<ExtendedBackend>(link, ns, opt, cache ? &*cache : nullptr, cfg.threads);
      auto f = fit_sequence(to_double_points(seq));
      auto c = compare(link, f, lookup(table, link));
      record("fit", link, c.pass,
             {{"limit", {{"re", f.limit.real()}, {"im", f.limit.imag()}}},
              {"cs_top", f.cs_top}, {"vol_diff", c.vol_diff}, {"cs_diff", c.cs_diff}});
    } catch (const std::exception& e) {
      record("fit", link, false, {{"error", e.what()}});
    }
  }
  if (cfg.json) {
    std::cout << rows.dump(2) << "\n";
  } else {
    for (const auto& r : rows) {
      std::cout << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["check"].get<std::string>()
                << " " << r["link"].get<std::string>();
      if (r.contains("error"))
        std::cout << "  error: " << r["error"].get<std::string>();
      else if (r["check"] == "saddle")
        std::cout << "  vol " << fmt(r["vol_pred"].get<double>(), 9) << " ("
                  << fmt(r["vol_digits"].get<double>(), 3) << " digits), CS "
                  << fmt(r["cs_pred"].get<double>(), 9) << " ("
                  << fmt(r["cs_digits"].get<double>(), 3) << " digits)";
      else
        std::cout << "  limit " << fmt(r["limit"]["re"].get<double>(), 7) << " "
                  << fmt(r["limit"]["im"].get<double>(), 7) << "i, |dvol| "
                  << fmt(std::abs(r["vol_diff"].get<double>()), 3) << ", |dCS| "
                  << fmt(r["cs_diff"].get<double>(), 3);
      std::cout << "\n";
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kashaev invariants, potentials and their asymptotics"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", cfg.json, "machine-readable output");
    sub->add_option("--backend", cfg.backend, "arithmetic backend")
        ->check(CLI::IsMember({"double", "extended"}));
    sub->add_option("--threads", cfg.threads, "worker threads (1 = reference path)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cache-dir", cfg.cache_dir, "invariant cache directory (overrides KASHAEV_CACHE_DIR)");
    sub->add_option("--cost-budget", cfg.cost_budget, "tangle contraction budget (weight multiplications)");
    sub->add_option("--max-n", cfg.max_n, "override the largest N accepted by the closed-form sums");
    sub->add_option("--data-dir", cfg.data_dir, "data directory (overrides KASHAEV_DATA_DIR)");
    sub->add_option("--formula", cfg.formula, "Whitehead sum: triple, alt or printed")
        ->check(CLI::IsMember({"triple", "alt", "printed"}));
  };

  std::string link_name, diagram, csv, reference;
  int n = 0, from = 0, to = -1, step = 1, order = 2;
  bool oracle = false;
  std::vector<int> ns;

  auto* inv = app.add_subcommand("invariant", "J_N of a link or of a diagram file");
  common(inv);
  inv->add_option("link", link_name, "4_1, 5_2, 6_1, 6_3, 8_9, 8_20, whitehead");
  inv->add_option("--n,-N", n, "color N")->required()->check(CLI::PositiveNumber);
  inv->add_flag("--oracle", oracle, "also evaluate the tangle contraction and compare");
  inv->add_option("--diagram", diagram, "evaluate a diagram file instead of a builtin link");

  auto* seq = app.add_subcommand("sequence", "2 pi Log(J_{N+1}/J_N) as CSV");
  common(seq);
  seq->add_option("link", link_name)->required();
  seq->add_option("--from", from);
  seq->add_option("--to", to);
  seq->add_option("--step", step);
  seq->add_option("--ns", ns, "explicit list of N")->delimiter(',');

  auto* sad = app.add_subcommand("saddle", "geometric stationary point of the potential");
  common(sad);
  sad->add_option("link", link_name)->required();
  sad->add_option("--reference", reference, "reference table file");

  auto* fit = app.add_subcommand("fit", "quadratic fit in 1/N of a sequence");
  common(fit);
  fit->add_option("link", link_name);
  fit->add_option("--csv", csv, "read N,re,im rows instead of computing");
  fit->add_option("--ns", ns, "N values to compute")->delimiter(',');
  fit->add_option("--order", order, "highest power of 1/N")->check(CLI::NonNegativeNumber);
  fit->add_option("--reference", reference, "reference table file");

  auto* all = app.add_subcommand("verify-all", "saddle and fit checks against the reference table");
  common(all);
  all->add_option("--reference", reference, "reference table file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::optional<LinkId> link;
    if (!link_name.empty()) link = parse_link(link_name);
    const bool ext = cfg.backend == "extended";
    if (*inv) {
      if (!link && diagram.empty()) throw kashaev::invalid_argument("invariant needs a link or --diagram");
      return ext ? run_invariant<ExtendedBackend>(cfg, link, n, oracle, diagram)
                 : run_invariant<DoubleBackend>(cfg, link, n, oracle, diagram);
    }
    if (*seq) {
      auto list = ns.empty() ? range_ns(from, to, step) : ns;
      return ext ? run_sequence<ExtendedBackend>(cfg, *link, list)
                 : run_sequence<DoubleBackend>(cfg, *link, list);
    }
    if (*sad) return run_saddle(cfg, *link, reference);
    if (*fit) return run_fit(cfg, link, csv, ns, order, reference);
    if (*all) return run_verify_all(cfg, reference);
  } catch (const SaddleNotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
