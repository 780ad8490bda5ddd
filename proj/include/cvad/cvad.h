/* C API for the customizable video anomaly detection engine.
 *
 * All entry points return a cvad_status; on failure a human-readable
 * message is available from cvad_last_error() until the next call on the
 * same engine. Handles are opaque and not thread-safe; create one engine
 * per thread or serialize access externally.
 */
#ifndef CVAD_H
#define CVAD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cvad_engine cvad_engine;

typedef enum cvad_status {
    CVAD_OK = 0,
    CVAD_ERR_CONFIG = 1,  /* bad configuration or usage */
    CVAD_ERR_BACKEND = 2, /* embedding or VQA backend failure */
    CVAD_ERR_DATA = 3     /* missing or malformed input data */
} cvad_status;

const char* cvad_version(void);

/* config_json: engine configuration as a JSON document; pass "{}" or NULL
 * for built-in defaults (mock backends). */
cvad_status cvad_engine_create(const char* config_json, cvad_engine** out_engine);
void cvad_engine_destroy(cvad_engine* engine);

/* Message for the most recent failed call on this engine, or "" if none. */
const char* cvad_last_error(const cvad_engine* engine);

/* Runs detection over one video frame directory for one or more anomaly
 * queries. Score, audit, and run-summary files are written to output_dir
 * (overriding the configured output directory when non-NULL). */
cvad_status cvad_detect(cvad_engine* engine,
                        const char* input_dir,
                        const char* const* queries, size_t n_queries,
                        const char* output_dir);

/* Pools detect outputs per class as listed in a C-VAD manifest and writes
 * the evaluation report (per-class AUROC, category averages, overall) as
 * JSON to report_path. */
cvad_status cvad_evaluate(cvad_engine* engine,
                          const char* scores_dir,
                          const char* cvad_manifest_path,
                          const char* report_path);

/* AUROC of a single score file against a raw binary label file. */
cvad_status cvad_auroc(cvad_engine* engine,
                       const char* score_file,
                       const char* label_file,
                       double* out_auroc);

/* Builds a C-VAD dataset: per-class positive/negative partition plus
 * frame-level label files, from a video manifest and interval annotations.
 * categories_json maps class name to category and may be NULL. The manifest
 * is written to <output_dir>/cvad_manifest.json. */
cvad_status cvad_build_dataset(cvad_engine* engine,
                               const char* video_manifest_path,
                               const char* annotations_path,
                               const char* categories_json_path,
                               const char* output_dir);

/* Renders a score curve (with optional anomaly-interval shading) to a PNG.
 * label_file may be NULL. */
cvad_status cvad_plot(cvad_engine* engine,
                      const char* score_file,
                      const char* label_file,
                      const char* out_image);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CVAD_H */
