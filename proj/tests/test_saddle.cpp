#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include <kashaev/saddle.hpp>

using namespace kashaev;

namespace {

const double kPi2 = M_PI * M_PI;

struct Expect {
  LinkId link;
  double vol;
  double vol_tol;
};

const std::vector<Expect> kCases{{LinkId::K6_3, 5.693021, 1e-5},
                                 {LinkId::K8_9, 7.5881802, 1e-5},
                                 {LinkId::K8_20, 4.1249032, 1e-5},
                                 {LinkId::Whitehead, 3.663862, 1e-5},
                                 {LinkId::K5_2, 2.8281220, 1e-6}};

SaddleResult solve_from_data(LinkId l) {
  auto pts = stationary_points();
  SaddleOptions opt;
  opt.grid_fallback = false;
  return solve_saddle(l, {pts.at(l).point}, opt);
}

PotentialPoint conj(const PotentialPoint& p) {
  PotentialPoint q;
  for (auto& c : p) q.push_back(c ? Coord(std::conj(*c)) : at_infinity);
  return q;
}

std::filesystem::path temp_file(const std::string& name) {
  std::random_device rd;
  return std::filesystem::temp_directory_path() / (std::to_string(rd()) + "-" + name);
}

}  // namespace

TEST(Saddle, DataFileLoads) {
  auto pts = stationary_points();
  EXPECT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts.at(LinkId::K8_9).digits, (std::vector<int>{10, 10, 10, 10, 10}));
  EXPECT_FALSE(pts.at(LinkId::K8_20).point[1].has_value());
  EXPECT_EQ(pts.at(LinkId::K6_3).digits[1], 6);
}

TEST(Saddle, SignificantDigits) {
  EXPECT_EQ(detail::significant_digits("0.204323"), 6);
  EXPECT_EQ(detail::significant_digits("-0.02180673815"), 10);
  EXPECT_EQ(detail::significant_digits("1"), 1);
  EXPECT_EQ(detail::significant_digits("1.5e-3"), 2);
}

TEST(Saddle, ValuesPerLink) {
  for (const auto& c : kCases) {
    auto r = solve_from_data(c.link);
    EXPECT_NEAR(r.vol_pred, c.vol, c.vol_tol) << to_string(c.link);
    EXPECT_LE(r.residual, 100 * SaddleOptions{}.tol) << to_string(c.link);
    EXPECT_TRUE(r.passes_filter()) << to_string(c.link);
    EXPECT_EQ(r.seed, "primary");
    EXPECT_DOUBLE_EQ(r.vol_pred, -r.V.imag());
    EXPECT_EQ(r.im_negative, r.V.imag() < 0);
  }
}

TEST(Saddle, ChernSimonsPerLink) {
  EXPECT_LE(std::abs(solve_from_data(LinkId::K6_3).V.real()), 1e-5);
  EXPECT_LE(std::abs(solve_from_data(LinkId::K8_9).V.real()), 1e-5);
  auto r820 = solve_from_data(LinkId::K8_20);
  EXPECT_NEAR(-(r820.V.real() + kPi2) / (2 * kPi2), 0.1033634, 1e-5);
  auto wh = solve_from_data(LinkId::Whitehead);
  EXPECT_NEAR(-wh.V.real() / (2 * kPi2), -0.125, 1e-7);
  EXPECT_NEAR(wh.cs_pred, kPi2 / 4, 1e-12);
}

TEST(Saddle, CoordinatesMatchPrintedDigits) {
  auto pts = stationary_points();
  for (const auto& c : kCases) {
    auto r = solve_from_data(c.link);
    EXPECT_TRUE(matches_printed(r.point, pts.at(c.link))) << to_string(c.link);
  }
}

TEST(Saddle, PolishingIsIdempotent) {
  for (const auto& c : kCases) {
    auto r = solve_from_data(c.link);
    SaddleOptions opt;
    opt.grid_fallback = false;
    auto again = solve_saddle(c.link, {r.point}, opt);
    EXPECT_LE(detail::point_distance(r.point, again.point), 1e-12) << to_string(c.link);
  }
}

TEST(Saddle, RangeConditionsAtPublishedPoints) {
  auto pts = stationary_points();
  for (LinkId l : {LinkId::K6_3, LinkId::K8_9, LinkId::K8_20}) {
    auto v = check_constraints(l, pts.at(l).point);
    EXPECT_FALSE(v.empty());
    for (const auto& c : v) EXPECT_TRUE(c.ok) << to_string(l) << ": " << c.description;
  }
}

TEST(Saddle, FilterRejectsConjugateRoot) {
  auto r = solve_from_data(LinkId::K6_3);
  auto bad = describe_point(LinkId::K6_3, conj(r.point));
  EXPECT_LE(bad.residual, 1e-10);  // still stationary
  EXPECT_FALSE(bad.im_negative);
  EXPECT_FALSE(bad.passes_filter());
  SaddleOptions opt;
  opt.grid_fallback = false;
  EXPECT_THROW(solve_saddle(LinkId::K6_3, {conj(r.point)}, opt), not_found_error);
  try {
    solve_saddle(LinkId::K6_3, {conj(r.point)}, opt);
  } catch (const not_found_error& e) {
    EXPECT_NE(std::string(e.what()).find("roots found: 1"), std::string::npos) << e.what();
  }
}

TEST(Saddle, ObservationConfirmedAgainstTable) {
  auto table = reference_table();
  for (const auto& c : kCases) {
    auto v = verify_observation(solve_from_data(c.link), lookup(table, c.link));
    EXPECT_TRUE(v.confirmed) << to_string(c.link) << " vol digits " << v.vol_digits
                             << " cs digits " << v.cs_digits;
  }
}

TEST(Saddle, CorruptedReferenceIsRejected) {
  auto table = reference_table();
  for (const auto& c : kCases) {
    auto r = solve_from_data(c.link);
    for (int which = 0; which < 2; ++which) {
      auto ref = lookup(table, c.link);
      (which ? ref.CS : ref.vol) += 1e-4;
      EXPECT_FALSE(verify_observation(r, ref).confirmed) << to_string(c.link) << " " << which;
    }
  }
}

TEST(Saddle, WrongLinkReference) {
  auto table = reference_table();
  EXPECT_THROW(verify_observation(solve_from_data(LinkId::K6_3), lookup(table, LinkId::K8_9)),
               kashaev::invalid_argument);
}

TEST(Reference, LoaderChecksCsConsistency) {
  auto p = temp_file("ref.json");
  {
    std::ofstream f(p);
    f << R"({"entries":[{"link":"8_20","vol":4.1249032,"CS":-2.04,"cs":0.1033634}]})";
  }
  EXPECT_THROW(load_reference_table(p), validation_error);
  {
    std::ofstream f(p);
    f << R"({"entries":[{"link":"8_20","vol":4.1249032,"CS":-2.0403117351031193,"cs":0.1033634}]})";
  }
  EXPECT_EQ(load_reference_table(p).size(), 1u);
  {
    std::ofstream f(p);
    f << "{";
  }
  EXPECT_THROW(load_reference_table(p), validation_error);
  std::filesystem::remove(p);
  EXPECT_THROW(load_reference_table(p), not_found_error);
}

TEST(Reference, ShippedTable) {
  auto t = reference_table();
  EXPECT_EQ(t.size(), 5u);
  EXPECT_NEAR(lookup(t, LinkId::Whitehead).CS, kPi2 / 4, 1e-12);
  EXPECT_THROW(lookup(t, LinkId::K4_1), not_found_error);
  EXPECT_NEAR(cs_distance(kPi2 + 0.1, 0.1), 0, 1e-14);
  EXPECT_NEAR(cs_distance(0.49 * kPi2, -0.49 * kPi2), 0.02 * kPi2, 1e-12);
}
