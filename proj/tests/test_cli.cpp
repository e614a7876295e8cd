#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <kashaev/reference.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(KASHAEV_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& f) { return (kashaev::data_dir() / f).string(); }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("kashaev-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("invariant whitehead").code, 2);         // missing --n
  EXPECT_EQ(run("invariant 9_42 --n 3").code, 2);        // unknown link
  EXPECT_EQ(run("invariant 6_3 --n 0").code, 2);
  EXPECT_EQ(run("invariant whitehead --n 3 --formula eq7").code, 2);
  EXPECT_EQ(run("saddle 4_1").code, 2);                  // no potential
  EXPECT_EQ(run("fit --csv /nonexistent.csv").code, 2);
}

TEST(Cli, InvariantNOne) {
  auto r = run("invariant whitehead --n 1 --json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(std::stod(j["re"].get<std::string>()), 1.0);
  EXPECT_EQ(std::stod(j["im"].get<std::string>()), 0.0);
  EXPECT_EQ(j["formula_version"], "whitehead/triple/sum-1");
  EXPECT_EQ(j["backend"], "double");
}

TEST(Cli, InvariantWithOracle) {
  auto r = run("invariant 5_2 --n 5 --oracle --json --backend extended");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["implementer_derived"].get<bool>());
  EXPECT_LE(j["oracle"]["relative_difference"].get<double>(), 1e-10);
  EXPECT_EQ(j["backend"], "extended");
}

TEST(Cli, ResourceBounds) {
  EXPECT_EQ(run("invariant 8_20 --n 8 --max-n 5").code, 2);
  EXPECT_EQ(run("invariant 6_3 --n 6 --oracle --cost-budget 10").code, 2);
}

TEST(Cli, DiagramFile) {
  auto r = run("invariant --diagram " + data("diagrams/unknot.txt") + " --n 4 --json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(std::stod(j["re"].get<std::string>()), 1.0, 1e-12);
  EXPECT_EQ(run("invariant --diagram /nonexistent.txt --n 4").code, 2);
}

TEST(Cli, EmptySequence) {
  auto r = run("sequence 5_2 --from 10 --to 5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "N,re,im\n");
}

TEST(Cli, DeterministicAcrossThreads) {
  auto a = run("sequence 5_2 --ns 10,20,30,40 --backend extended --threads 1");
  auto b = run("sequence 5_2 --ns 10,20,30,40 --backend extended --threads 4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run("saddle 8_20 --json").out, run("saddle 8_20 --json").out);
}

TEST(Cli, CacheDirectory) {
  TempDir tmp;
  auto first = run("invariant 6_3 --n 12 --json --backend extended --cache-dir " + tmp.path.string());
  ASSERT_EQ(first.code, 0);
  EXPECT_TRUE(fs::exists(tmp.path / "6_3.extended.json"));
  auto second = run("invariant 6_3 --n 12 --json --backend extended --cache-dir " + tmp.path.string());
  auto a = nlohmann::json::parse(first.out), b = nlohmann::json::parse(second.out);
  EXPECT_EQ(a["re"], b["re"]);
  EXPECT_EQ(a["im"], b["im"]);
  EXPECT_TRUE(b["est_digits"].is_null());
  // missing directory: no writes, still succeeds
  EXPECT_EQ(run("invariant 6_3 --n 4 --cache-dir " + (tmp.path / "absent").string()).code, 0);
  EXPECT_FALSE(fs::exists(tmp.path / "absent"));
}

TEST(Cli, Saddle) {
  auto r = run("saddle whitehead --json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["point"]["x"], "inf");
  EXPECT_NEAR(j["vol_pred"].get<double>(), 3.663862, 1e-6);
  EXPECT_TRUE(j["reference"]["confirmed"].get<bool>());
}

TEST(Cli, FitFromCsv) {
  auto r = run("fit 5_2 --csv " + data("knot_5_2_sequence.csv") + " --json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["reference"]["pass"].get<bool>());
  EXPECT_NEAR(j["cs_top"].get<double>(), -3.02412837, 2e-3);
}

TEST(Cli, VerifyAllAndCorruptedReference) {
  TempDir tmp;
  const std::string cache = " --cache-dir " + tmp.path.string();
  auto ok = run("verify-all --json" + cache);
  EXPECT_EQ(ok.code, 0) << ok.out;

  auto doc = kashaev::read_json(kashaev::data_dir() / "reference.json");
  for (auto& e : doc["entries"]) {
    if (e["link"] != "8_9") continue;
    e["vol"] = e["vol"].get<double>() + 1e-4;
  }
  auto bad = tmp.path / "bad_reference.json";
  std::ofstream(bad) << doc.dump(1);
  auto r = run("verify-all --reference " + bad.string() + cache);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL saddle 8_9"), std::string::npos) << r.out;
}
