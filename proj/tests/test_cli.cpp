#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("rtlb_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }

  Result run(const std::string& args) const {
    Result r;
    auto err = dir / "stderr.txt";
    std::string cmd = std::string(RTLBREAKER_CLI) + " " + args + " 2>" + err.string();
    FILE* p = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }
};

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"ingest", "stats",  "mine-triggers", "forge", "poison",     "simulate",
                                             "evaluate", "attack", "scan",        "pipeline", "demo-corpus"};
  return s;
}

}  // namespace

TEST(Help, EveryFlagDocumented) {
  Sandbox sb;
  const std::string readme = slurp(fs::path(RTLBREAKER_SOURCE_DIR) / "README.md");
  static const std::regex line(R"(^\s+(?:-\w,)?(--[a-z][a-z0-9-]*)(.*)$)");
  for (const auto& sub : subcommands()) {
    auto r = sb.run(sub + " --help");
    ASSERT_EQ(r.code, 0) << sub;
    std::istringstream in(r.out);
    std::string l;
    std::size_t flags = 0;
    while (std::getline(in, l)) {
      std::smatch m;
      if (!std::regex_match(l, m, line)) continue;
      ++flags;
      std::string flag = m[1];
      // type tokens are upper case; a description needs lower-case words
      EXPECT_TRUE(std::regex_search(m[2].str(), std::regex("[a-z]{2,}"))) << sub << " " << flag << " has no help text";
      if (flag != "--help") EXPECT_NE(readme.find(flag), std::string::npos) << sub << " " << flag << " missing from README";
    }
    EXPECT_GE(flags, 3u) << sub;
  }
  auto top = sb.run("--help");
  for (const auto& sub : subcommands()) EXPECT_NE(top.out.find(sub), std::string::npos);
}

TEST(Usage, ErrorsExitTwo) {
  Sandbox sb;
  auto r = sb.run("");
  EXPECT_EQ(r.code, 2);
  r = sb.run("frobnicate");
  EXPECT_EQ(r.code, 2);
  r = sb.run("evaluate --no-such-flag");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("evaluate --help"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  r = sb.run("pipeline --paraphrase sometimes");
  EXPECT_EQ(r.code, 2);
  sb.write("bad.json", R"({"seed": 1, "sede": 2})");
  r = sb.run("evaluate --config " + (sb / "bad.json").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("sede"), std::string::npos);
  r = sb.run("evaluate --mock clean --endpoint http://127.0.0.1:1/x");
  EXPECT_EQ(r.code, 2);
}

TEST(Usage, DataErrorsExitOneWithJson) {
  Sandbox sb;
  sb.write("broken.v", "module m(input a;\n");
  auto r = sb.run("simulate --template counter8 --design " + (sb / "broken.v").string());
  EXPECT_EQ(r.code, 1);
  auto j = json::parse(r.err);
  EXPECT_EQ(j["command"], "simulate");
  EXPECT_TRUE(j.contains("error"));
  EXPECT_TRUE(j.contains("message"));
}

TEST(Mine, FindsPlantedWords) {
  Sandbox sb;
  auto corpus = sb / "demo.jsonl";
  auto r = sb.run("demo-corpus --entries 1000 --plant robust=3 --plant secure=4 --seed 3 --out " + corpus.string());
  ASSERT_EQ(r.code, 0) << r.err;
  r = sb.run("mine-triggers --corpus " + corpus.string() + " --top-k 10 --validate secure");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  std::vector<std::string> toks;
  for (const auto& c : j["candidates"]) toks.push_back(c["token"]);
  EXPECT_EQ(toks, (std::vector<std::string>{"robust", "secure"}));
  EXPECT_EQ(j["seed"].is_null(), false);
}

TEST(Evaluate, MockReport) {
  Sandbox sb;
  auto r = sb.run("evaluate --mock clean --n 10 --k 1 --seed 5");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_DOUBLE_EQ(j["aggregate"]["pass@1"].get<double>(), 1.0);
  r = sb.run("evaluate --mock backdoored --n 2 --k 1,2 --table");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pass@2"), std::string::npos);
}

TEST(Attack, FailOverExitsThree) {
  Sandbox sb;
  auto r = sb.run("attack --mock backdoored");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(json::parse(r.out)["attack_success_rate"].get<double>(), 1.0);
  r = sb.run("attack --mock backdoored --fail-over 0.5");
  EXPECT_EQ(r.code, 3);
  r = sb.run("attack --mock clean --fail-over 0.5");
  EXPECT_EQ(r.code, 0);
}

TEST(Forge, PoisonScanChain) {
  Sandbox sb;
  auto pairs = sb / "pairs.jsonl";
  auto r = sb.run("forge --out " + pairs.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto text = slurp(pairs);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  auto corpus = sb / "clean.jsonl";
  ASSERT_EQ(sb.run("demo-corpus --entries 190 --seed 1 --out " + corpus.string()).code, 0);
  auto data = sb / "data.jsonl";
  r = sb.run("poison --corpus " + corpus.string() + " --pairs " + pairs.string() + " --rate 0.05 --seed 2 --out " +
             data.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t poisoned = 0, lines = 0;
  std::istringstream in(slurp(data));
  for (std::string l; std::getline(in, l); ++lines) poisoned += json::parse(l)["label"] == "poisoned";
  EXPECT_EQ(lines, 200u);
  EXPECT_EQ(poisoned, 10u);
  r = sb.run("scan --dataset " + data.string() + " --corpus " + corpus.string() + " --watchlist robust,writefifo");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(r.out)["findings"].empty());
}

TEST(Simulate, TemplateStimulus) {
  Sandbox sb;
  sb.write("d.v", "module inv(input a, output y);\n  assign y = ~a;\nendmodule\n");
  sb.write("s.jsonl", "{\"cycle\":0,\"inputs\":{\"a\":\"0\"},\"edges\":[]}\n{\"cycle\":1,\"inputs\":{\"a\":\"1\"},\"edges\":[]}\n");
  auto r = sb.run("simulate --design " + (sb / "d.v").string() + " --stimulus " + (sb / "s.jsonl").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "{\"cycle\":0,\"outputs\":{\"y\":\"1\"}}\n{\"cycle\":1,\"outputs\":{\"y\":\"0\"}}\n");
}

TEST(Pipeline, ByteIdenticalAcrossRunsAndJobs) {
  Sandbox sb;
  auto corpus = sb / "c.jsonl";
  ASSERT_EQ(sb.run("demo-corpus --entries 300 --plant robust=2 --seed 1 --out " + corpus.string()).code, 0);
  sb.write("cfg.json", "{\"corpus\": [\"" + corpus.string() + "\"], \"n\": 2}");
  auto cfg = (sb / "cfg.json").string();
  auto a = sb.run("pipeline --config " + cfg + " --seed 7 --out-dir " + (sb / "a").string());
  ASSERT_EQ(a.code, 0) << a.err;
  auto b = sb.run("pipeline --config " + cfg + " --seed 7 --jobs 3 --out-dir " + (sb / "b").string());
  ASSERT_EQ(b.code, 0) << b.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(sb / "a")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(sb / "b" / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(files, 7u);
  auto summary = json::parse(slurp(sb / "a" / "summary.json"));
  EXPECT_EQ(summary["seed"], 7);
}
