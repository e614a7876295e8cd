#ifndef KASHAEV_REFERENCE_HPP
#define KASHAEV_REFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "links.hpp"
#include "potentials.hpp"

#ifndef KASHAEV_DEFAULT_DATA_DIR
#define KASHAEV_DEFAULT_DATA_DIR "data"
#endif

namespace kashaev {

// explicit argument, then KASHAEV_DATA_DIR, then the directory baked in at build time
inline std::filesystem::path data_dir(const std::string& override_dir = {}) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("KASHAEV_DATA_DIR"); env && *env) return env;
  return KASHAEV_DEFAULT_DATA_DIR;
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw not_found_error("cannot open " + p.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(p.string() + ": " + e.what());
  }
}

// CS uses the normalization CS = -2 pi^2 cs. Entries whose printed quantity is
// cs itself keep it in `cs`; the loader checks the two agree mod pi^2.
struct ReferenceEntry {
  LinkId link;
  double vol = 0;
  double CS = 0;
  std::optional<double> cs;
  std::string source;
};

inline std::vector<ReferenceEntry> load_reference_table(const std::filesystem::path& file) {
  auto doc = read_json(file);
  std::vector<ReferenceEntry> out;
  try {
    for (const auto& e : doc.at("entries")) {
      ReferenceEntry r;
      r.link = parse_link(e.at("link").get<std::string>());
      r.vol = e.at("vol").get<double>();
      r.CS = e.at("CS").get<double>();
      if (e.contains("cs") && !e["cs"].is_null()) r.cs = e["cs"].get<double>();
      r.source = e.value("source", "");
      if (r.cs) {
        double implied = -2 * detail::pi2() * *r.cs;
        if (std::abs(std::remainder(implied - r.CS, detail::pi2())) > 1e-9)
          throw validation_error(file.string() + ": " + std::string(to_string(r.link)) +
                                 " has CS inconsistent with -2 pi^2 cs");
      }
      out.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(file.string() + ": " + e.what());
  }
  return out;
}

inline std::vector<ReferenceEntry> reference_table(const std::string& dir = {}) {
  return load_reference_table(data_dir(dir) / "reference.json");
}

inline const ReferenceEntry& lookup(const std::vector<ReferenceEntry>& table, LinkId link) {
  for (const auto& e : table)
    if (e.link == link) return e;
  throw not_found_error("no reference entry for " + std::string(to_string(link)));
}

// distance between a and b taken mod pi^2 (nearest representative)
inline double cs_distance(double a, double b) {
  return std::abs(std::remainder(a - b, detail::pi2()));
}

inline double agreement_digits(double diff, double ref) {
  diff = std::abs(diff);
  double scale = std::max(std::abs(ref), 1.0);
  if (diff == 0) return 16;
  return std::min(16.0, -std::log10(diff / scale));
}

}  // namespace kashaev

#endif
