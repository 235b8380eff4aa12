// Runs the ziptrace binary and checks exit codes and stdout.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(ZT_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const char* name) { return std::string(ZT_FIXTURES) + "/" + name; }

std::string tmp(const char* name) { return ::testing::TempDir() + name; }

}  // namespace

TEST(Cli, AnalyzeExitCodes) {
  for (const char* e : {"hb-vc", "hb-goldilocks", "ls-eraser"}) {
    EXPECT_EQ(run("analyze " + fx("sigma1.trace") + " --engine " + e).code, 1) << e;
    EXPECT_EQ(run("analyze " + fx("sigma2.trace") + " --engine " + e).code, 0) << e;
  }
  for (const char* e : {"hb-compressed", "ls-compressed"}) {
    EXPECT_EQ(run("analyze " + fx("sigma1.slp") + " --engine " + e).code, 1) << e;
    EXPECT_EQ(run("analyze " + fx("sigma2.slp") + " --engine " + e).code, 0) << e;
  }
}

TEST(Cli, AnalyzeReport) {
  CliRun r = run("analyze " + fx("sigma1.slp") + " -e hb-compressed");
  ASSERT_EQ(r.code, 1);
  json j = json::parse(r.out);
  EXPECT_EQ(j["v"], 1);
  EXPECT_EQ(j["race_found"], true);
  EXPECT_FALSE(j.contains("first_race"));
}

TEST(Cli, MismatchNeedsAuto) {
  EXPECT_EQ(run("analyze " + fx("sigma1.trace") + " -e hb-compressed").code, 2);
  EXPECT_EQ(run("analyze " + fx("sigma1.slp") + " -e hb-vc").code, 2);
  EXPECT_EQ(run("analyze " + fx("sigma1.trace") + " -e hb-compressed --auto").code, 1);
  EXPECT_EQ(run("analyze " + fx("sigma2.slp") + " -e ls-eraser --auto").code, 0);
}

TEST(Cli, UsageAndIoErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("analyze " + fx("sigma1.trace") + " -e nope").code, 2);
  EXPECT_EQ(run("analyze /nonexistent -e hb-vc").code, 2);
  EXPECT_EQ(run("compress /nonexistent").code, 2);
  EXPECT_EQ(run("compress " + fx("sigma1.trace") + " --normalize-threshold 1").code, 2);
}

TEST(Cli, MalformedInput) {
  std::string bad = tmp("zt_cli_bad.trace");
  std::ofstream(bad) << "1|r(x)\n1|nonsense\n";
  EXPECT_EQ(run("analyze " + bad + " -e hb-vc").code, 3);
  EXPECT_EQ(run("compress " + bad).code, 3);

  std::string badg = tmp("zt_cli_bad.slp");
  std::ofstream(badg) << "slp v1\nstart @0\n@0 := @1\n";
  EXPECT_EQ(run("analyze " + badg + " -e hb-compressed").code, 3);
  EXPECT_EQ(run("expand " + badg).code, 3);

  std::string invalid = tmp("zt_cli_invalid.trace");
  std::ofstream(invalid) << "1|join(2)\n";
  EXPECT_EQ(run("analyze " + invalid + " -e hb-vc").code, 3);

  std::string warn = tmp("zt_cli_warn.trace");
  std::ofstream(warn) << "1|acq(l)\n1|w(x)\n";
  EXPECT_EQ(run("analyze " + warn + " -e hb-vc").code, 0);
  EXPECT_EQ(run("analyze " + warn + " -e hb-vc --strict").code, 3);
}

TEST(Cli, CompressExpandRoundTrip) {
  std::string slp = tmp("zt_cli_s1.slp");
  CliRun c = run("compress " + fx("sigma1.trace") + " -o " + slp);
  ASSERT_EQ(c.code, 0);
  json stats = json::parse(c.out);
  EXPECT_EQ(stats["expanded_length"], 16);
  EXPECT_GT(stats["compression_ratio"].get<double>(), 1.0);
  CliRun e = run("expand " + slp);
  ASSERT_EQ(e.code, 0);
  std::ifstream in(fx("sigma1.trace"));
  std::string orig((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(e.out, orig);
}

TEST(Cli, CompressEmptyTrace) {
  std::string empty = tmp("zt_cli_empty.trace");
  std::ofstream(empty) << "";
  CliRun c = run("compress " + empty);
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "slp v1\nstart @0\n@0 :=\n");
}

TEST(Cli, Verify) {
  EXPECT_EQ(run("verify " + fx("sigma1.trace") + " " + fx("sigma2.trace") + " " + fx("sigma1.slp")).code, 0);
  CliRun r = run("verify --runs 20 --seed 7 --iterations 60");
  EXPECT_EQ(r.code, 0);
  std::size_t lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  EXPECT_EQ(lines, 20u);
}

TEST(Cli, Gen) {
  CliRun r = run("gen --pattern inc-loop -n 3");
  ASSERT_EQ(r.code, 0);
  std::size_t lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  EXPECT_EQ(lines, 16u);
  EXPECT_EQ(run("gen --pattern random -n 50 --seed 3").out, run("gen --pattern random -n 50 --seed 3").out);
  EXPECT_EQ(run("gen --pattern spiral").code, 2);
}

TEST(Cli, Bench) {
  CliRun r = run("bench --pattern inc-loop -n 100 --engines hb-compressed,hb-vc --repeat 3");
  ASSERT_EQ(r.code, 0);
  auto nl = r.out.find('\n');
  json first = json::parse(r.out.substr(0, nl));
  EXPECT_EQ(first["engine"], "hb-compressed");
  EXPECT_FALSE(first["speedup"].is_null());
  EXPECT_EQ(run("bench " + fx("sigma1.trace") + " --engines ls-eraser --repeat 1").code, 0);
  EXPECT_EQ(run("bench --engines bogus").code, 2);
}
