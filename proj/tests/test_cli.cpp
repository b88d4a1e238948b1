#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mahler/cli.hpp"

namespace fs = std::filesystem;
using mahler::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mahler");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mahler::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(MAHLER_DATA_DIR) + "/" + name; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("mahler_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, ProductOfTheCube) {
  auto r = run_cli({"product", "--in", data("cube3.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"volume\":\"8\",\"polar_volume\":\"4/3\",\"product\":\"32/3\"}\n");
}

TEST(Cli, ProductFloatBackend) {
  auto r = run_cli({"product", "--in", data("cube3.json"), "--backend", "float"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_NEAR(j["product"].get<double>(), 32.0 / 3.0, 1e-9);
}

TEST(Cli, VolumeFromHalfspaces) {
  auto r = run_cli({"volume", "--in", data("cross3_halfspaces.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["volume"], "4/3");
}

TEST(Cli, PolarThenProductRoundTrip) {
  TempDir dir;
  auto polar = run_cli({"polar", "--in", data("rhombus.json"), "--out", dir.file("polar.json")});
  ASSERT_EQ(polar.code, 0) << polar.err;
  auto a = run_cli({"product", "--in", data("rhombus.json")});
  auto b = run_cli({"product", "--in", dir.file("polar.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(Json::parse(a.out)["product"], Json::parse(b.out)["product"]);
  auto h = run_cli({"polar", "--in", data("rhombus.json"), "--form", "halfspaces"});
  ASSERT_EQ(h.code, 0);
  EXPECT_EQ(Json::parse(h.out)["halfspaces"].size(), 4u);
}

TEST(Cli, FlagsCounts) {
  auto r = run_cli({"flags", "--dim", "3"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["faces"], 26);
  EXPECT_EQ(j["flags"], 48);
  EXPECT_EQ(j["cube_tiling"], "8");
  EXPECT_EQ(j["cross_polytope_tiling"], "4/3");
  auto l = run_cli({"flags", "--dim", "2", "--list"});
  EXPECT_EQ(Json::parse(l.out)["flag_list"].size(), 8u);
}

TEST(Cli, Lemma7RandomDraws) {
  auto r = run_cli({"lemma7", "--dim", "2", "--alpha-seed", "7", "--count", "1000"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["negative_gaps"], 0);
  EXPECT_EQ(j["constant_weight_gap"], "0");
  EXPECT_EQ(j["count"], 1000);
}

TEST(Cli, KernelExactAndFloat) {
  auto e = run_cli({"kernel", "--dim", "3"});
  ASSERT_EQ(e.code, 0);
  auto je = Json::parse(e.out);
  EXPECT_EQ(je["directions"], 60);
  EXPECT_TRUE(je["all_zero"].get<bool>());
  EXPECT_GT(je["min_radial_derivative"].get<double>(), 0.0);
  auto f = run_cli({"kernel", "--dim", "3", "--backend", "float", "--base", "2,3/2,1"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_LT(Json::parse(f.out)["max_abs_residual"].get<double>(), 1e-6);
}

TEST(Cli, CanonicalizeThenContact) {
  TempDir dir;
  auto c = run_cli({"canonicalize", "--in", data("cut_square.json"), "--out", dir.file("canon.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  auto canon = Json::parse(slurp(dir.file("canon.json")));
  EXPECT_EQ(canon["delta"], "1/200");
  EXPECT_TRUE(canon["certified"].get<bool>());

  auto p = run_cli({"contact", "--in", dir.file("canon.json"), "--out", dir.file("contact.json")});
  ASSERT_EQ(p.code, 0) << p.err;
  auto contact = Json::parse(slurp(dir.file("contact.json")));
  EXPECT_EQ(contact["pairs"].size(), 8u);

  auto g = run_cli({"lemma7", "--in", dir.file("contact.json")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(Json::parse(g.out)["gap"], nullptr);

  auto one = run_cli({"contact", "--in", data("cut_square.json"), "--face", "1,1"});
  ASSERT_EQ(one.code, 0) << one.err;
  auto pair = Json::parse(one.out)["pairs"][0];
  EXPECT_EQ(pair["y"], Json::parse(R"(["99/100","1"])"));
  EXPECT_EQ(pair["y_star"], Json::parse(R"(["100/199","100/199"])"));
}

TEST(Cli, ContactOfTheCubeFeedsKernel) {
  TempDir dir;
  auto p = run_cli({"contact", "--in", data("cube3.json"), "--out", dir.file("contact.json")});
  ASSERT_EQ(p.code, 0) << p.err;
  auto k = run_cli({"kernel", "--in", dir.file("contact.json")});
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_TRUE(Json::parse(k.out)["all_zero"].get<bool>());
}

TEST(Cli, TrialsWriteOneLinePerTrial) {
  TempDir dir;
  auto r = run_cli({"trials", "--dim", "2", "--trials", "500", "--seed", "1", "--out", dir.file("t.jsonl"), "--csv",
                    dir.file("t.csv"), "--summary", dir.file("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(slurp(dir.file("t.jsonl")));
  ASSERT_EQ(ls.size(), 500u);
  for (const auto& l : ls) {
    auto j = Json::parse(l);
    EXPECT_TRUE(j["anomaly"].is_null());
    EXPECT_FALSE(j.contains("repro"));
  }
  EXPECT_EQ(lines(slurp(dir.file("t.csv"))).size(), 501u);
  auto s = Json::parse(slurp(dir.file("s.json")));
  EXPECT_EQ(s["aggregates"]["trials"], 500);
  EXPECT_TRUE(s.contains("timestamp"));
}

TEST(Cli, DeterministicOutputIsByteIdenticalAcrossThreads) {
  TempDir dir;
  auto a = run_cli({"--deterministic", "trials", "--dim", "3", "--trials", "12", "--seed", "5", "--threads", "1",
                    "--out", dir.file("a.jsonl"), "--summary", dir.file("a.json")});
  auto b = run_cli({"--deterministic", "trials", "--dim", "3", "--trials", "12", "--seed", "5", "--threads", "3",
                    "--out", dir.file("b.jsonl"), "--summary", dir.file("b.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir.file("a.jsonl")), slurp(dir.file("b.jsonl")));
  auto sa = Json::parse(slurp(dir.file("a.json")));
  auto sb = Json::parse(slurp(dir.file("b.json")));
  EXPECT_FALSE(sa.contains("timestamp"));
  EXPECT_EQ(sa["aggregates"], sb["aggregates"]);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"flags"}).code, 2);
  EXPECT_EQ(run_cli({"flags", "--dim", "9"}).code, 2);
  EXPECT_EQ(run_cli({"trials", "--dim", "3", "--delta", "1/5"}).code, 2);
  EXPECT_EQ(run_cli({"trials", "--dim", "3", "--delta", "abc"}).code, 2);
  EXPECT_EQ(run_cli({"lemma7"}).code, 2);
  EXPECT_EQ(run_cli({"kernel", "--dim", "2", "--base", "1,-1"}).code, 2);
}

TEST(Cli, InvalidDocumentsExitTwo) {
  TempDir dir;
  EXPECT_EQ(run_cli({"product", "--in", dir.file("missing.json")}).code, 2);
  EXPECT_EQ(run_cli({"product", "--in", write(dir.file("bad.json"), "{not json")}).code, 2);
  EXPECT_EQ(run_cli({"product", "--in", write(dir.file("dim.json"), R"({"dim":2,"backend":"exact","vertices":[["1","0","0"]]})")})
                .code,
            2);
  // Origin on the boundary.
  EXPECT_EQ(run_cli({"product", "--in", write(dir.file("tri.json"),
                                              R"({"dim":2,"backend":"exact","vertices":[["0","0"],["1","0"],["0","1"]]})")})
                .code,
            2);
  // Rational strings with zero denominators and non-integer numbers in exact mode.
  EXPECT_EQ(run_cli({"product", "--in", write(dir.file("zero.json"),
                                              R"({"dim":1,"backend":"exact","vertices":[["1/0"],["-1"]]})")})
                .code,
            2);
  EXPECT_EQ(run_cli({"product", "--in", write(dir.file("float.json"),
                                              R"({"dim":1,"backend":"exact","vertices":[[0.5],[-0.5]]})")})
                .code,
            2);
  const auto r = run_cli({"canonicalize", "--in", write(dir.file("asym.json"),
                                                        R"({"dim":2,"backend":"exact","vertices":[["1","0"],["-1","1"],["-1","-1"]]})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("symmetric"), std::string::npos);
}

TEST(Cli, KernelRejectsNonBaseInput) {
  TempDir dir;
  auto p = run_cli({"contact", "--in", data("cut_square.json"), "--out", dir.file("contact.json")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(run_cli({"kernel", "--in", dir.file("contact.json")}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("trials"), std::string::npos);
}
