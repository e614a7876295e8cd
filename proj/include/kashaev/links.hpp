#ifndef KASHAEV_LINKS_HPP
#define KASHAEV_LINKS_HPP

#include <array>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace kashaev {

enum class LinkId { K4_1, K5_2, K6_1, K6_3, K8_9, K8_20, Whitehead };

inline constexpr std::array<LinkId, 7> kAllLinks = {
    LinkId::K4_1, LinkId::K5_2, LinkId::K6_1, LinkId::K6_3,
    LinkId::K8_9, LinkId::K8_20, LinkId::Whitehead};

inline std::string_view to_string(LinkId id) {
  switch (id) {
    case LinkId::K4_1: return "4_1";
    case LinkId::K5_2: return "5_2";
    case LinkId::K6_1: return "6_1";
    case LinkId::K6_3: return "6_3";
    case LinkId::K8_9: return "8_9";
    case LinkId::K8_20: return "8_20";
    case LinkId::Whitehead: return "whitehead";
  }
  return "?";
}

inline LinkId parse_link(std::string_view s) {
  for (LinkId id : kAllLinks)
    if (to_string(id) == s) return id;
  throw invalid_argument("unknown link '" + std::string(s) +
                         "' (expected 4_1, 5_2, 6_1, 6_3, 8_9, 8_20, whitehead)");
}

// False for 4_1, 5_2 and 6_1: their sums were derived here by reduction and
// are trusted only through agreement with the tangle evaluator.
inline bool published_closed_form(LinkId id) {
  return id == LinkId::K6_3 || id == LinkId::K8_9 || id == LinkId::K8_20 ||
         id == LinkId::Whitehead;
}

}  // namespace kashaev

#endif
