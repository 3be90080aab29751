#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <lefgrowth/cli.hpp>

#include "oracles.hpp"

using namespace lefg;
namespace fs = std::filesystem;

namespace {

const std::string kData = LEFGROWTH_DATA_DIR;

std::string data(const std::string& f) { return kData + "/" + f; }

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("lefgrowth_test_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& f) const { return (path_ / f).string(); }
  std::string str() const { return path_.string(); }

private:
  fs::path path_;
};

std::string slurp(const std::string& p) { return read_file(p); }

}  // namespace

TEST(Serialization, SourceDescriptors) {
  auto fib = load_source_file(data("fibonacci.json"));
  EXPECT_EQ(make_subshift(fib.source)->digest(), make_subshift(fibonacci_source())->digest());
  EXPECT_EQ(fib.source->window(0, 12), "abaababaabaab");
  auto per = load_source_file(data("periodic.json"));
  EXPECT_EQ(per.source->window(0, 5), "aabaab");
  auto jl = load_source_file(data("jlp_toy.json"));
  ASSERT_TRUE(jl.jlp);
  EXPECT_EQ(jl.jlp->size(), 3u);
  EXPECT_THROW(load_source(nlohmann::json::parse(R"({"kind":"nope"})")), PreconditionError);
  EXPECT_THROW(load_source_file(data("missing.json")), PreconditionError);
}

TEST(Serialization, JlpParamsRoundTrip) {
  JlpParams p;
  p.r = 2.5;
  p.x = 33;
  p.levels = 3;
  p.seed = 99;
  p.toy_cap = 15;
  auto back = jlp_params_from_json(nlohmann::json::parse(jlp_params_to_json(p).dump()));
  EXPECT_EQ(back.r, 2.5);
  EXPECT_EQ(back.x, 33);
  EXPECT_EQ(back.levels, 3);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.toy_cap, std::optional<std::int64_t>(15));
}

TEST(Serialization, ElementsRoundTrip) {
  auto ss = make_subshift(fibonacci_source());
  for (const auto& w : ss->level(7).words) {
    auto f = make_fU(*ss, CenteredWord(w), 1);
    auto j = nlohmann::json::parse(element_to_json(f).dump());
    EXPECT_EQ(element_from_json(*ss, j), f);
    j["entries"].erase(0);
    EXPECT_THROW(element_from_json(*ss, j), PreconditionError);
  }
  auto bad = nlohmann::json::parse(R"({"precision":0,"entries":[{"word":"a","shift":0},{"word":"c","shift":0}]})");
  EXPECT_THROW(element_from_json(*ss, bad), PreconditionError);
}

TEST(Serialization, ExplicitGeneratorFiles) {
  auto ss = make_subshift(fibonacci_source());
  const std::string u = ss->level(6).words[3];
  auto j = nlohmann::json::parse(R"({"generators":[
      {"name":"f","construct":"fU","word":")" + u + R"("},
      {"name":"fp","construct":"fU","word":")" + u + R"(","shift":1},
      {"name":"h","construct":"hU","word":")" + u + R"("},
      {"name":"t","construct":"tau","word":")" + u + R"("}],
    "order":["t","h","f","fp"]})");
  auto s = load_generators(*ss, j);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.names(), (std::vector<std::string>{"t", "h", "f", "fp"}));
  EXPECT_EQ(s[2], make_fU(*ss, CenteredWord(u)));
  EXPECT_EQ(s[3], make_fU(*ss, CenteredWord(u), 1));
  EXPECT_EQ(s[1], make_hU(*ss, CenteredWord(u)));
  // tau_V = f_{sigma^-1 V} then f_{sigma V}, checked pointwise
  oracle::Text text{ss->window(-600, 600), -600};
  auto pred = [&](std::int64_t k) { return text.matches(k, u); };
  auto ref = oracle::then(oracle::f_of(oracle::shifted(pred, 1)), oracle::f_of(oracle::shifted(pred, -1)));
  auto got = evaluate_range(s[0], -500, 500);
  for (std::int64_t n = -500; n <= 500; ++n) ASSERT_EQ(got[static_cast<std::size_t>(n + 500)], ref(n)) << n;
  j["order"].push_back("zz");
  EXPECT_THROW(load_generators(*ss, j), PreconditionError);
  EXPECT_EQ(generators_digest(s), generators_digest(load_generators(*ss, nlohmann::json::parse(R"({"generators":[
      {"name":"t","construct":"tau","word":")" + u + R"("},
      {"name":"h","construct":"hU","word":")" + u + R"("},
      {"name":"f","construct":"fU","word":")" + u + R"("},
      {"name":"fp","construct":"fU","word":")" + u + R"(","shift":1}]})"))));
}

TEST(Serialization, BuiltinGeneratorFiles) {
  auto ss = make_subshift(fibonacci_source());
  EXPECT_EQ(load_generators_file(*ss, data("base.json")).size(), 560u);
  EXPECT_EQ(load_generators_file(*ss, data("base_c0.json")).size(), 56u);
  auto blocks = load_generators(*ss, nlohmann::json::parse(R"({"builtin":"blocks","m":8,"count":2})"));
  EXPECT_EQ(blocks.size(), 6u);
  EXPECT_THROW(load_generators(*ss, nlohmann::json::parse(R"({"builtin":"blocks","m":8,"count":99})")), PreconditionError);
}

TEST(Serialization, QuotientRoundTrip) {
  auto ss = make_subshift(fibonacci_source());
  auto s = base_generating_set(*ss, 6, {6, 6});
  auto q = build_quotient(*ss, s, 1);
  auto back = quotient_from_json(nlohmann::json::parse(quotient_to_json(q).dump()));
  EXPECT_EQ(back.M, q.M);
  EXPECT_EQ(back.r, q.r);
  EXPECT_EQ(back.C1, q.C1);
  EXPECT_EQ(back.perms, q.perms);
  EXPECT_EQ(back.names, q.names);
  EXPECT_EQ(back.source_digest, q.source_digest);
}

TEST(Cli, VersionAndUsage) {
  auto v = invoke({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("lefgrowth"), std::string::npos);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"complexity"}).code, 2);
  EXPECT_EQ(invoke({"complexity", "--source", data("missing.json")}).code, 2);
}

TEST(Cli, ComplexityTable) {
  auto r = invoke({"complexity", "--source", data("fibonacci.json"), "-n", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string want = "n,value,exact\n";
  const auto text = oracle::fibonacci_prefix(3000);
  for (std::size_t n = 1; n <= 12; ++n) want += std::to_string(n) + "," + std::to_string(oracle::factor_set(text, n).size()) + ",true\n";
  EXPECT_EQ(r.out, want);
  auto j = invoke({"--json", "recurrence", "--source", data("fibonacci.json"), "-n", "5"});
  ASSERT_EQ(j.code, 0);
  auto t = GrowthTable::from_json(nlohmann::json::parse(j.out));
  ASSERT_EQ(t.rows().size(), 5u);
  for (std::size_t n = 1; n <= 5; ++n)
    EXPECT_EQ(t.rows()[n - 1].value, double(oracle::recurrence(text.substr(0, 800), oracle::factor_set(text.substr(0, 800), n), n)));
  EXPECT_NE(nlohmann::json::parse(j.err).at("exit_code"), nullptr);
}

TEST(Cli, CylindersAndDcyl) {
  auto r = invoke({"cylinders", "--source", data("fibonacci.json"), "-m", "3"});
  ASSERT_EQ(r.code, 0);
  std::size_t lines = static_cast<std::size_t>(std::count(r.out.begin(), r.out.end(), '\n'));
  EXPECT_EQ(lines, 8u);
  auto d = invoke({"dcyl", "--source", data("fibonacci.json"), "-m", "8"});
  ASSERT_EQ(d.code, 0) << d.err;
  auto j = nlohmann::json::parse(d.out);
  EXPECT_EQ(j.at("bound"), 2);
  EXPECT_EQ(invoke({"dcyl", "--source", data("fibonacci.json"), "-m", "3"}).code, 2);
}

TEST(Cli, QuotientCertifyAndCorruption) {
  TempDir tmp("quotient");
  const auto src = data("fibonacci.json"), gens = data("base_c0.json");
  ASSERT_EQ(invoke({"quotient", "--source", src, "--gens", gens, "-r", "3", "--out", tmp / "q.json"}).code, 0);
  auto ok = invoke({"certify", "--quotient", tmp / "q.json", "--ball", "2", "--source", src, "--gens", gens});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(nlohmann::json::parse(ok.out).at("injective"), true);
  EXPECT_EQ(invoke({"certify", "--quotient", tmp / "q.json", "--ball", "3", "--source", src, "--gens", gens}).code, 2);
  EXPECT_EQ(invoke({"--ball-budget", "10", "certify", "--quotient", tmp / "q.json", "--ball", "2", "--source", src, "--gens", gens}).code, 3);
  EXPECT_EQ(invoke({"certify", "--quotient", tmp / "q.json", "--ball", "1", "--source", data("periodic.json"), "--gens", gens}).code, 2);

  // swap two images of one permutation: still a bijection, no longer the reduction
  auto j = nlohmann::json::parse(slurp(tmp / "q.json"));
  auto& p = j["perms"][0];
  std::size_t i = 0;
  while (p[i].get<int>() == static_cast<int>(i)) ++i;
  auto a = p[i], b = p[i + 1];
  p[i] = b;
  p[i + 1] = a;
  write_file(tmp / "bad.json", j.dump());
  auto bad = invoke({"certify", "--quotient", tmp / "bad.json", "--ball", "1", "--source", src, "--gens", gens});
  EXPECT_EQ(bad.code, 4);
  EXPECT_NE(bad.err.find("f"), std::string::npos);
}

TEST(Cli, GrowthRowsAndEmptyRadii) {
  TempDir tmp("growth");
  auto r = invoke({"growth", "--source", data("fibonacci.json"), "--gens", data("base_c0.json"), "--radii", "1,2,3", "--out", tmp.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto deg = GrowthTable::from_json(nlohmann::json::parse(slurp(tmp / "quotient_degree.json")));
  ASSERT_EQ(deg.rows().size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(deg.rows()[static_cast<std::size_t>(k)].n, (2 * (k + 1)) / 3);
  auto lo = GrowthTable::from_json(nlohmann::json::parse(slurp(tmp / "quotient_log_order.json")));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(lo.rows()[k].value, std::lgamma(deg.rows()[k].value + 1.0), 1e-6);
  EXPECT_TRUE(fs::exists(tmp / "quotient_degree.csv"));
  EXPECT_EQ(invoke({"growth", "--source", data("fibonacci.json"), "--gens", data("base_c0.json"), "--radii", ""}).code, 2);
  EXPECT_EQ(invoke({"growth", "--source", data("fibonacci.json"), "--gens", data("base_c0.json"), "--radii", "0"}).code, 2);
}

TEST(Cli, LowerBoundAndPlot) {
  TempDir tmp("plot");
  auto lb = invoke({"lower-bound", "--source", data("fibonacci.json"), "--gens", data("base.json"), "--m-list", "6,7,8", "--out", tmp / "lb"});
  ASSERT_EQ(lb.code, 0) << lb.err;
  EXPECT_TRUE(fs::exists(tmp / "lb/lower_bound.csv"));
  EXPECT_TRUE(fs::exists(tmp / "lb/blocks_m8.json"));

  GrowthTable upper(Meaning::quotient_log_order), lower(Meaning::lower_bound_exponent);
  upper.add(2, 100.0, true);
  upper.add(4, 200.0, true);
  lower.add(2, 4.0, true);
  write_file(tmp / "upper.json", upper.to_json().dump());
  write_file(tmp / "lower.json", lower.to_json().dump());
  auto ok = invoke({"plot", "--upper", tmp / "upper.json", "--lower", tmp / "lower.json", "--out", tmp / "p"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(slurp(tmp / "p/upper.dat"), "# n log_M_factorial\n2 100\n4 200\n");
  auto bundle = nlohmann::json::parse(slurp(tmp / "p/bundle.json"));
  EXPECT_EQ(bundle.at("matched").size(), 1u);
  EXPECT_TRUE(bundle.at("sandwich_violations").empty());

  GrowthTable high(Meaning::lower_bound_exponent);
  high.add(4, 500.0, true);
  write_file(tmp / "high.json", high.to_json().dump());
  EXPECT_EQ(invoke({"plot", "--upper", tmp / "upper.json", "--lower", tmp / "high.json", "--out", tmp / "v"}).code, 4);
  write_file(tmp / "upper.csv", upper.to_csv());
  EXPECT_EQ(invoke({"plot", "--upper", tmp / "upper.csv", "--out", tmp / "c"}).code, 2);
  EXPECT_EQ(invoke({"plot", "--out", tmp / "e"}).code, 2);
}

TEST(Cli, JlpBuildVerifyAndTamper) {
  TempDir a("jlp_a"), b("jlp_b");
  std::vector<std::string> build{"jlp", "build", "--r", "2", "--x", "30", "--toy-cap", "12", "--levels", "2", "--seed", "1", "--out"};
  auto ba = build, bb = build;
  ba.push_back(a.str());
  bb.push_back(b.str());
  ASSERT_EQ(invoke(ba).code, 0);
  ASSERT_EQ(invoke(bb).code, 0);
  for (const auto* f : {"source.json", "level_0.json", "level_1.json", "level_2.json", "anchors.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  auto v = invoke({"jlp", "verify", "--dir", a.str()});
  ASSERT_EQ(v.code, 0) << v.err;
  auto rep = nlohmann::json::parse(slurp(a / "verify_report.json"));
  EXPECT_EQ(rep.at("failed"), 0);
  EXPECT_GT(rep.at("passed").get<int>(), 10);

  auto lv = nlohmann::json::parse(slurp(b / "level_1.json"));
  ASSERT_TRUE(lv.is_object());
  for (auto& [k, val] : lv.items())
    if (val.is_string() && k.find("digest") != std::string::npos) val = "0000000000000000";
  write_file(b / "level_1.json", lv.dump(2));
  EXPECT_EQ(invoke({"jlp", "verify", "--dir", b.str()}).code, 4);
  EXPECT_EQ(invoke({"jlp", "verify", "--dir", (a / "nowhere")}).code, 2);
  EXPECT_EQ(invoke({"jlp", "build", "--r", "2", "--x", "31", "--levels", "1", "--out", a / "x"}).code, 2);
}
