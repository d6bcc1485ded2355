/*
 * Copyright 2026 ricnn developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the ricnn engine. All engine state lives behind opaque
 * handles; strings returned by the library are owned by the library and
 * must be released with ricnn_string_free. Functions return RICNN_OK /
 * NULL-vs-non-NULL and record details retrievable via ricnn_last_error().
 */
#ifndef RICNN_H
#define RICNN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RICNN_API __declspec(dllexport)
#else
#define RICNN_API __attribute__((visibility("default")))
#endif

/* Error codes; the CLI maps Config to exit 1 and Runtime to exit 2. */
enum {
  RICNN_OK = 0,
  RICNN_ERR_CONFIG = 1,
  RICNN_ERR_RUNTIME = 2,
  RICNN_ERR_INVALID_ARG = 3
};

RICNN_API const char* ricnn_version(void);

/* Message and code of the most recent failure on this thread. */
RICNN_API const char* ricnn_last_error(void);
RICNN_API int ricnn_last_error_code(void);

RICNN_API void ricnn_string_free(char* text);

/* ---- panels ---------------------------------------------------------- */

typedef struct ricnn_panel ricnn_panel;

/* schema_json: optional column mapping, e.g.
 * {"columns":{"stock":"id","time":"month","return":"ret","factors":[...]},
 *  "factor_lags":{"book_to_price":3}}. Pass NULL for the default schema. */
RICNN_API ricnn_panel* ricnn_panel_load_csv(const char* path,
                                            const char* schema_json);

/* spec_json: {"n_stocks":..,"n_steps":..,"signal":"nonlinear",
 *             "noise_scale":..,"turnover_rate":..,"seed":..} */
RICNN_API ricnn_panel* ricnn_panel_generate(const char* spec_json);

RICNN_API int ricnn_panel_save_csv(const ricnn_panel* panel, const char* path);

RICNN_API int ricnn_panel_steps(const ricnn_panel* panel);
RICNN_API int ricnn_panel_universe_size(const ricnn_panel* panel, int time_index);

RICNN_API void ricnn_panel_free(ricnn_panel* panel);

/* ---- runs ------------------------------------------------------------ */

/* Validates config_json and returns it with every default resolved. */
RICNN_API char* ricnn_effective_config(const char* config_json);

/* Full pipeline into output_dir; returns the report JSON. */
RICNN_API char* ricnn_run(const char* config_json, const char* output_dir);

/* Grid sweep; returns the comparison table as a JSON array of points. */
RICNN_API char* ricnn_sweep(const char* config_json, const char* grid_json,
                            const char* output_dir, int jobs);

/* Metric suite recomputed from an emitted series.csv. */
RICNN_API char* ricnn_recompute_metrics(const char* series_csv_path);

/* RICNN_OK when every metric in report.json matches a recomputation from
 * series.csv at 1e-12 relative tolerance. */
RICNN_API int ricnn_verify_report(const char* report_json_path,
                                  const char* series_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RICNN_H */
