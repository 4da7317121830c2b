#ifndef CARNOT_H
#define CARNOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CARNOT_API __attribute__((visibility("default")))
#else
#define CARNOT_API
#endif

/* Status codes double as CLI exit codes. */
typedef enum carnot_status
{
	CARNOT_OK = 0,
	CARNOT_ERROR = 1,      /* usage, I/O or internal error */
	CARNOT_INVALID = 2,    /* parse, schema or validation failure */
	CARNOT_SOLVER = 3,     /* numerical solver failure */
	CARNOT_UNDECIDED = 4   /* semi-decision budget exhausted */
} carnot_status;

typedef struct carnot_group carnot_group;

/* Message of the last failing call on this thread; never NULL. */
CARNOT_API const char* carnot_last_error(void);
CARNOT_API const char* carnot_version(void);
/* Frees strings returned through char** out parameters. */
CARNOT_API void carnot_string_free(char* s);

/* Catalog name (h1, h2_1, free_2_3, ...) or path to a group JSON file;
 * CARNOT_CATALOG_PATH is searched for <name>.json before the built-ins. */
CARNOT_API carnot_status carnot_group_load(const char* name_or_path, carnot_group** out);
CARNOT_API carnot_status carnot_group_parse(const char* json_text, carnot_group** out);
CARNOT_API void carnot_group_free(carnot_group* g);
CARNOT_API int carnot_group_dim(const carnot_group* g);
/* Canonical group JSON. */
CARNOT_API carnot_status carnot_group_emit(const carnot_group* g, char** out);
/* JSON: dim, step, layer_dims, homogeneous_dimension, stratified. */
CARNOT_API carnot_status carnot_group_info(const carnot_group* g, char** out);
/* JSON violation report; CARNOT_INVALID when nonempty. */
CARNOT_API carnot_status carnot_group_validate(const carnot_group* g, char** out);
/* JSON array of catalog names. */
CARNOT_API carnot_status carnot_catalog_list(char** out);

/* Vectors are "p/q,r,..." strings; results are JSON. */
CARNOT_API carnot_status carnot_algebra_product(const carnot_group* g, const char* x, const char* y, char** out);
CARNOT_API carnot_status carnot_algebra_term(const carnot_group* g, int n, const char* x, const char* y, char** out);
CARNOT_API carnot_status carnot_algebra_decompose(int n, char** out);
/* CARNOT_INVALID on any mismatch with the series oracle. */
CARNOT_API carnot_status carnot_algebra_oracle(const carnot_group* g, int trials, uint64_t seed, char** out);

/* command: classify-epi | classify-mono | complement | quotient.
 * request: JSON text (see docs/schemas.md). CARNOT_UNDECIDED with a full
 * report when the search budget runs out. */
CARNOT_API carnot_status carnot_subgroups(const char* command, const char* request, uint64_t seed, char** out);

/* kind: lift | pansu | mvi | implicit | rank | blowup | verify-estimates.
 * CSV files are written to out_dir; the JSON summary lists them. */
CARNOT_API carnot_status carnot_experiment(const char* kind, const char* config, const char* out_dir, uint64_t seed,
                                           int threads, char** out);

/* Writes a run manifest (JSON) with FNV-1a digests of inputs and outputs. */
CARNOT_API carnot_status carnot_write_manifest(const char* path, const char* command, const char* const* inputs,
                                               size_t n_inputs, const char* const* outputs, size_t n_outputs,
                                               uint64_t seed);

/* FNV-1a 64-bit digest of a file, 16 hex digits. */
CARNOT_API carnot_status carnot_hash_file(const char* path, char** out);

#ifdef __cplusplus
}
#endif

#endif
