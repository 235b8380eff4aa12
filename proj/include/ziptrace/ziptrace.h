/* ziptrace: race and lockset analysis on grammar-compressed traces. */
#ifndef ZIPTRACE_ZIPTRACE_H
#define ZIPTRACE_ZIPTRACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZT_API __declspec(dllexport)
#else
#define ZT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zt_status {
  ZT_OK = 0,
  ZT_ERR_INVALID_ARG = 1, /* null handle, bad option, engine/input mismatch */
  ZT_ERR_IO = 2,
  ZT_ERR_PARSE = 3,
  ZT_ERR_INVALID_GRAMMAR = 4,
  ZT_ERR_CAP_EXCEEDED = 5, /* brute-force oracle over its size cap */
  ZT_ERR_INTERNAL = 6
} zt_status;

typedef enum zt_engine {
  ZT_ENGINE_HB_COMPRESSED = 0,
  ZT_ENGINE_HB_VC = 1,
  ZT_ENGINE_HB_GOLDILOCKS = 2,
  ZT_ENGINE_LS_COMPRESSED = 3,
  ZT_ENGINE_LS_ERASER = 4
} zt_engine;

typedef struct zt_trace zt_trace;
typedef struct zt_slp zt_slp;
typedef struct zt_report zt_report;

/* Message for the last failing call on this thread; never NULL. */
ZT_API const char* zt_last_error(void);
ZT_API const char* zt_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
ZT_API void zt_string_free(char* s);

/* Traces */
ZT_API zt_status zt_trace_parse(const char* text, size_t len, zt_trace** out);
ZT_API zt_status zt_trace_load(const char* path, zt_trace** out);
ZT_API zt_status zt_trace_serialize(const zt_trace* trace, char** out);
ZT_API zt_status zt_trace_save(const zt_trace* trace, const char* path);
ZT_API size_t zt_trace_length(const zt_trace* trace);
ZT_API zt_status zt_trace_stats_json(const zt_trace* trace, char** out);
/* JSON array of {"severity","event","message"}; *has_errors set to 0/1. */
ZT_API zt_status zt_trace_validate_json(const zt_trace* trace, char** out, int* has_errors);
ZT_API void zt_trace_free(zt_trace* trace);

/* Grammars */
ZT_API zt_status zt_slp_parse(const char* text, size_t len, zt_slp** out);
ZT_API zt_status zt_slp_load(const char* path, zt_slp** out);
ZT_API zt_status zt_slp_serialize(const zt_slp* slp, char** out);
ZT_API zt_status zt_slp_save(const zt_slp* slp, const char* path);
ZT_API zt_status zt_slp_stats_json(const zt_slp* slp, char** out);
ZT_API zt_status zt_slp_validate_json(const zt_slp* slp, char** out, int* has_errors);
ZT_API zt_status zt_slp_compress(const zt_trace* trace, zt_slp** out);
/* run_threshold >= 2 */
ZT_API zt_status zt_slp_normalize(const zt_slp* slp, size_t run_threshold, zt_slp** out);
ZT_API zt_status zt_slp_expand(const zt_slp* slp, zt_trace** out);
ZT_API void zt_slp_free(zt_slp* slp);

/* Engines */
ZT_API zt_status zt_engine_from_name(const char* name, zt_engine* out);
ZT_API const char* zt_engine_name(zt_engine engine);
ZT_API int zt_engine_is_compressed(zt_engine engine);

/* Baseline engines take traces, compressed engines take grammars; the
   other pairing fails with ZT_ERR_INVALID_ARG. input_name may be NULL. */
ZT_API zt_status zt_analyze_trace(zt_engine engine, const zt_trace* trace, const char* input_name,
                                  zt_report** out);
ZT_API zt_status zt_analyze_slp(zt_engine engine, const zt_slp* slp, const char* input_name, zt_report** out);

/* 1 if a race (hb engines) or a violated variable (lockset engines). */
ZT_API int zt_report_found(const zt_report* report);
ZT_API double zt_report_wall_ms(const zt_report* report);
ZT_API zt_status zt_report_json(const zt_report* report, char** out);
ZT_API void zt_report_free(zt_report* report);

/* Synthetic traces */
typedef struct zt_gen_spec {
  const char* pattern; /* "inc-loop", "lock-loop" or "random" */
  uint64_t iterations;
  uint32_t threads;
  uint32_t locks;
  uint32_t vars;
  uint64_t seed;
} zt_gen_spec;

ZT_API void zt_gen_spec_default(zt_gen_spec* spec);
ZT_API zt_status zt_gen_trace(const zt_gen_spec* spec, zt_trace** out);

/* Differential check of all engines (and oracles under the cap).
   *agree is 0/1; json holds every answer. When engines disagree and
   minimized is non-NULL it receives the shrunk trace text. */
ZT_API zt_status zt_verify_trace(const zt_trace* trace, size_t run_threshold, const char* input_name, int* agree,
                                 char** json, char** minimized);

/* One JSON line per engine; times are medians over `repeat` runs. */
ZT_API zt_status zt_bench_trace(const zt_trace* trace, const zt_engine* engines, size_t n_engines, unsigned repeat,
                                size_t run_threshold, const char* input_name, char** json_lines);

ZT_API size_t zt_oracle_cap(void);
ZT_API void zt_set_oracle_cap(size_t cap);

#ifdef __cplusplus
}
#endif

#endif
