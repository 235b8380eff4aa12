// Exercises the shared library through its public header only.
#include <gtest/gtest.h>
#include <ziptrace/ziptrace.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <string>

using nlohmann::json;

namespace {

std::string fixture(const char* name) { return std::string(ZT_FIXTURES) + "/" + name; }

std::string take(char* s) {
  std::string out = s ? s : "";
  zt_string_free(s);
  return out;
}

}  // namespace

TEST(CApi, Version) { EXPECT_STREQ(zt_version(), "1.0.0"); }

TEST(CApi, TraceLifecycle) {
  zt_trace* t = nullptr;
  ASSERT_EQ(zt_trace_load(fixture("sigma1.trace").c_str(), &t), ZT_OK);
  EXPECT_EQ(zt_trace_length(t), 16u);
  char* text = nullptr;
  ASSERT_EQ(zt_trace_serialize(t, &text), ZT_OK);
  EXPECT_EQ(take(text).substr(0, 7), "1|w(x)\n");
  char* stats = nullptr;
  ASSERT_EQ(zt_trace_stats_json(t, &stats), ZT_OK);
  EXPECT_EQ(json::parse(take(stats))["threads"], 2);
  char* diags = nullptr;
  int errs = -1;
  ASSERT_EQ(zt_trace_validate_json(t, &diags, &errs), ZT_OK);
  EXPECT_EQ(take(diags), "[]");
  EXPECT_EQ(errs, 0);
  zt_trace_free(t);
}

TEST(CApi, ErrorCodes) {
  zt_trace* t = nullptr;
  EXPECT_EQ(zt_trace_load("/nonexistent/file", &t), ZT_ERR_IO);
  EXPECT_NE(std::strlen(zt_last_error()), 0u);
  const char bad[] = "1|oops(x)\n";
  EXPECT_EQ(zt_trace_parse(bad, sizeof bad - 1, &t), ZT_ERR_PARSE);
  EXPECT_NE(std::string(zt_last_error()).find("line 1"), std::string::npos);
  EXPECT_EQ(zt_trace_parse(nullptr, 3, &t), ZT_ERR_INVALID_ARG);

  zt_slp* g = nullptr;
  const char cyc[] = "slp v1\nstart @0\n@0 := @1\n@1 := @0\n";
  ASSERT_EQ(zt_slp_parse(cyc, sizeof cyc - 1, &g), ZT_OK);
  zt_report* r = nullptr;
  EXPECT_EQ(zt_analyze_slp(ZT_ENGINE_HB_COMPRESSED, g, nullptr, &r), ZT_ERR_INVALID_GRAMMAR);
  zt_trace* e = nullptr;
  EXPECT_EQ(zt_slp_expand(g, &e), ZT_ERR_INVALID_GRAMMAR);
  zt_slp_free(g);

  zt_engine eng;
  EXPECT_EQ(zt_engine_from_name("nope", &eng), ZT_ERR_INVALID_ARG);
  EXPECT_EQ(zt_analyze_trace(static_cast<zt_engine>(42), nullptr, nullptr, &r), ZT_ERR_INVALID_ARG);
}

TEST(CApi, EmptyInputParses) {
  zt_trace* t = nullptr;
  ASSERT_EQ(zt_trace_parse(nullptr, 0, &t), ZT_OK);
  EXPECT_EQ(zt_trace_length(t), 0u);
  zt_slp* g = nullptr;
  ASSERT_EQ(zt_slp_compress(t, &g), ZT_OK);
  char* text = nullptr;
  ASSERT_EQ(zt_slp_serialize(g, &text), ZT_OK);
  EXPECT_EQ(take(text), "slp v1\nstart @0\n@0 :=\n");
  zt_slp_free(g);
  zt_trace_free(t);
}

TEST(CApi, CompressNormalizeExpand) {
  zt_trace* t = nullptr;
  ASSERT_EQ(zt_trace_load(fixture("sigma1.trace").c_str(), &t), ZT_OK);
  zt_slp* g = nullptr;
  ASSERT_EQ(zt_slp_compress(t, &g), ZT_OK);
  zt_slp* n = nullptr;
  ASSERT_EQ(zt_slp_normalize(g, 2, &n), ZT_OK);
  EXPECT_EQ(zt_slp_normalize(g, 1, &n), ZT_ERR_INVALID_ARG);
  zt_trace* back = nullptr;
  ASSERT_EQ(zt_slp_expand(n, &back), ZT_OK);
  char *a = nullptr, *b = nullptr;
  zt_trace_serialize(t, &a);
  zt_trace_serialize(back, &b);
  EXPECT_EQ(take(a), take(b));
  char* stats = nullptr;
  ASSERT_EQ(zt_slp_stats_json(g, &stats), ZT_OK);
  EXPECT_EQ(json::parse(take(stats))["expanded_length"], 16);
  zt_trace_free(back);
  zt_slp_free(n);
  zt_slp_free(g);
  zt_trace_free(t);
}

TEST(CApi, SaveAndLoad) {
  zt_slp* g = nullptr;
  ASSERT_EQ(zt_slp_load(fixture("sigma2.slp").c_str(), &g), ZT_OK);
  std::string path = ::testing::TempDir() + "zt_capi_roundtrip.slp";
  ASSERT_EQ(zt_slp_save(g, path.c_str()), ZT_OK);
  zt_slp* h = nullptr;
  ASSERT_EQ(zt_slp_load(path.c_str(), &h), ZT_OK);
  char *a = nullptr, *b = nullptr;
  zt_slp_serialize(g, &a);
  zt_slp_serialize(h, &b);
  EXPECT_EQ(take(a), take(b));
  EXPECT_EQ(zt_slp_save(g, "/nonexistent/dir/x.slp"), ZT_ERR_IO);
  std::remove(path.c_str());
  zt_slp_free(h);
  zt_slp_free(g);
}

TEST(CApi, AnalyzeAllEngines) {
  zt_trace* t = nullptr;
  zt_slp* g = nullptr;
  ASSERT_EQ(zt_trace_load(fixture("sigma1.trace").c_str(), &t), ZT_OK);
  ASSERT_EQ(zt_slp_load(fixture("sigma1.slp").c_str(), &g), ZT_OK);
  for (int k = 0; k <= 4; ++k) {
    auto e = static_cast<zt_engine>(k);
    zt_engine round;
    ASSERT_EQ(zt_engine_from_name(zt_engine_name(e), &round), ZT_OK);
    EXPECT_EQ(round, e);
    zt_report* r = nullptr;
    zt_report* wrong = nullptr;
    if (zt_engine_is_compressed(e)) {
      ASSERT_EQ(zt_analyze_slp(e, g, "s1", &r), ZT_OK);
      EXPECT_EQ(zt_analyze_trace(e, t, "s1", &wrong), ZT_ERR_INVALID_ARG);
    } else {
      ASSERT_EQ(zt_analyze_trace(e, t, "s1", &r), ZT_OK);
      EXPECT_EQ(zt_analyze_slp(e, g, "s1", &wrong), ZT_ERR_INVALID_ARG);
    }
    EXPECT_EQ(zt_report_found(r), 1) << zt_engine_name(e);
    EXPECT_GE(zt_report_wall_ms(r), 0.0);
    char* j = nullptr;
    ASSERT_EQ(zt_report_json(r, &j), ZT_OK);
    json parsed = json::parse(take(j));
    EXPECT_EQ(parsed["engine"], zt_engine_name(e));
    EXPECT_EQ(parsed["input"], "s1");
    zt_report_free(r);
  }
  zt_slp_free(g);
  zt_trace_free(t);
}

TEST(CApi, GenerateVerifyBench) {
  zt_gen_spec spec;
  zt_gen_spec_default(&spec);
  EXPECT_STREQ(spec.pattern, "inc-loop");
  spec.iterations = 3;
  zt_trace* t = nullptr;
  ASSERT_EQ(zt_gen_trace(&spec, &t), ZT_OK);
  EXPECT_EQ(zt_trace_length(t), 16u);

  int agree = 0;
  char* j = nullptr;
  char* small = reinterpret_cast<char*>(1);
  ASSERT_EQ(zt_verify_trace(t, 8, "inc", &agree, &j, &small), ZT_OK);
  EXPECT_EQ(agree, 1);
  EXPECT_EQ(small, nullptr);
  EXPECT_EQ(json::parse(take(j))["race_found"]["oracle"], true);

  zt_engine es[] = {ZT_ENGINE_HB_COMPRESSED, ZT_ENGINE_HB_VC};
  char* lines = nullptr;
  ASSERT_EQ(zt_bench_trace(t, es, 2, 3, 8, "inc", &lines), ZT_OK);
  std::string all = take(lines);
  auto nl = all.find('\n');
  ASSERT_NE(nl, std::string::npos);
  json first = json::parse(all.substr(0, nl));
  EXPECT_EQ(first["engine"], "hb-compressed");
  EXPECT_FALSE(first["speedup"].is_null());
  zt_trace_free(t);

  spec.pattern = "nope";
  EXPECT_EQ(zt_gen_trace(&spec, &t), ZT_ERR_INVALID_ARG);
}

TEST(CApi, OracleCap) {
  size_t saved = zt_oracle_cap();
  zt_set_oracle_cap(4);
  EXPECT_EQ(zt_oracle_cap(), 4u);
  zt_set_oracle_cap(saved);
}
