////////////////////////////////////////////////////////////////////////////////
//                                                                            //
//  This file is part of quasidiff                                            //
//                                                                            //
//  Copyright 2026 quasidiff developers                                       //
//                                                                            //
//  Licensed under the Apache License, Version 2.0 (the "License");           //
//  you may not use this file except in compliance with the License.          //
//  You may obtain a copy of the License at                                   //
//                                                                            //
//      http://www.apache.org/licenses/LICENSE-2.0                            //
//                                                                            //
//  Unless required by applicable law or agreed to in writing, software       //
//  distributed under the License is distributed on an "AS IS" BASIS,         //
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  //
//  See the License for the specific language governing permissions and       //
//  limitations under the License.                                            //
//                                                                            //
////////////////////////////////////////////////////////////////////////////////

/* C interface to the quasidiff library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a qd_status; on failure qd_last_error() holds
 * a message for the calling thread. Strings returned through char** are
 * owned by the caller and released with qd_string_free. Boxes are passed as
 * (lo, hi) arrays of length dim and are half-open. */
#ifndef QUASIDIFF_H
#define QUASIDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define QD_API __declspec(dllexport)
#else
#  define QD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qd_status {
  QD_OK = 0,
  QD_ERR_INTERNAL = 1,
  QD_ERR_VALIDATION = 2,
  QD_ERR_RESOURCE = 3,
  QD_ERR_NUMERIC = 4
} qd_status;

typedef enum qd_estimator { QD_FOURIER = 0, QD_AUTOCORR = 1 } qd_estimator;

typedef struct qd_pointset qd_pointset;
typedef struct qd_scheme qd_scheme;
typedef struct qd_peaks qd_peaks;
typedef struct qd_spectrum qd_spectrum;

QD_API const char* qd_version(void);
QD_API const char* qd_last_error(void);
QD_API void qd_string_free(char* s);
/* Thread-count hint for parallel loops (0 = hardware concurrency). Results
 * do not depend on it. */
QD_API void qd_set_threads(unsigned n);

/* ---- parsing helpers shared with the command-line tool ---- */
/* "start:stop:step" (exclusive stop, xi_i = start + i*step) or "a,b,c". */
QD_API qd_status qd_parse_range(const char* spec, double** values, size_t* n);
/* "a..b" (inclusive) or "a,b,c". */
QD_API qd_status qd_parse_index_list(const char* spec, size_t** values, size_t* n);
QD_API void qd_array_free(void* values);
/* 64-bit FNV-1a of the bytes as 16 lowercase hex digits plus NUL. */
QD_API void qd_hash_hex(const char* data, size_t len, char out[17]);

/* ---- point sets ---- */
QD_API qd_status qd_pointset_lattice(size_t dim, const double* lo, const double* hi, double spacing,
                                     qd_pointset** out);
/* Uses the scheme's deformation when it has one. */
QD_API qd_status qd_pointset_model_set(const qd_scheme* s, const double* lo, const double* hi,
                                       qd_pointset** out);
/* rules: preset name or "a:ab,b:a"; lengths: "a=1.618,b=1" or NULL for the
 * rule's own lengths. */
QD_API qd_status qd_pointset_substitution(const char* rules, size_t length, const char* lengths,
                                          double origin, qd_pointset** out);
QD_API qd_status qd_pointset_from_json(const char* text, qd_pointset** out);
QD_API qd_status qd_pointset_to_json(const qd_pointset* ps, char** out);
QD_API void qd_pointset_free(qd_pointset* ps);
QD_API size_t qd_pointset_size(const qd_pointset* ps);
QD_API size_t qd_pointset_dim(const qd_pointset* ps);
/* Row-major coordinates, valid while the handle lives. */
QD_API const double* qd_pointset_coords(const qd_pointset* ps);
/* Region the patch covers (generator region or widened bounding box). */
QD_API qd_status qd_pointset_covering_box(const qd_pointset* ps, double* lo, double* hi);
QD_API qd_status qd_pointset_density(const qd_pointset* ps, const double* lo, const double* hi,
                                     double* out);
QD_API qd_status qd_pointset_min_separation(const qd_pointset* ps, double* out);

QD_API qd_status qd_percolate(const qd_pointset* ps, double p, uint64_t seed, qd_pointset** out);
/* dist_json: {"kind": "uniform_interval"|"two_point", "a": ...} or a table. */
QD_API qd_status qd_displace(const qd_pointset* ps, const char* dist_json, uint64_t seed,
                             qd_pointset** out);

/* ---- cut-and-project schemes ---- */
QD_API qd_status qd_scheme_load(const char* preset_or_path, qd_scheme** out);
QD_API qd_status qd_scheme_from_json(const char* text, qd_scheme** out);
QD_API qd_status qd_scheme_to_json(const qd_scheme* s, char** out);
QD_API qd_status qd_scheme_with_window(const qd_scheme* s, const double* lo, const double* hi,
                                       qd_scheme** out);
QD_API void qd_scheme_free(qd_scheme* s);
QD_API size_t qd_scheme_d_phys(const qd_scheme* s);
QD_API size_t qd_scheme_d_int(const qd_scheme* s);

/* Bragg candidates with k in the closed range [lo, hi]. A deformed scheme
 * gets deformed_amplitude values (quad_points per axis) on the undeformed
 * candidate list. */
QD_API qd_status qd_dual_peaks(const qd_scheme* s, const double* lo, const double* hi, double floor,
                               size_t quad_points, qd_peaks** out);
QD_API size_t qd_peaks_count(const qd_peaks* p);
QD_API qd_status qd_peaks_get(const qd_peaks* p, size_t i, double* k, double* k_star,
                              double* intensity);
/* CSV: k_1..,kstar_1..,q_1..,amplitude_re,amplitude_im,intensity */
QD_API qd_status qd_peaks_to_csv(const qd_peaks* p, char** out);
QD_API void qd_peaks_free(qd_peaks* p);

/* ---- diffraction ---- */
QD_API qd_status qd_fourier_average(const qd_pointset* ps, const double* lo, const double* hi,
                                    const double* xi, double* re, double* im);
/* xi: n rows of dim values. scales >= 1; max_radius <= 0 means untruncated;
 * bin_epsilon <= 0 picks the default. */
QD_API qd_status qd_scan(const qd_pointset* ps, const double* lo, const double* hi, const double* xi,
                         size_t n, qd_estimator est, size_t scales, double max_radius,
                         double bin_epsilon, qd_spectrum** out);
QD_API size_t qd_spectrum_count(const qd_spectrum* sp);
QD_API qd_status qd_spectrum_get(const qd_spectrum* sp, size_t i, double* xi, double* intensity);
QD_API qd_status qd_spectrum_to_csv(const qd_spectrum* sp, char** out);
/* Peaks as CSV (xi_1..,intensity). refine != 0 runs the golden-section pass
 * on the Fourier estimator over the scan box. */
QD_API qd_status qd_spectrum_peaks_csv(const qd_spectrum* sp, const qd_pointset* ps,
                                       const double* lo, const double* hi, double floor, int refine,
                                       char** out);
QD_API void qd_spectrum_free(qd_spectrum* sp);
/* Per-scale table over growing centered cubes:
 * scale,side,box_volume,point_count,intensity,gap */
QD_API qd_status qd_convergence_csv(const qd_pointset* ps, const double* xi, const double* center,
                                    double side0, double growth, size_t count, qd_estimator est,
                                    char** out);

/* ---- predictions for perturbed structures ---- */
/* model_json: {"kind": "percolation", "p": ..} or {"kind": "displacement",
 * "dist": {..}}; base_csv: spectrum or prediction CSV. n0 <= 0 takes the
 * density from the base rows (point_count / box_volume). */
QD_API qd_status qd_predict_perturbed_csv(const char* model_json, const char* base_csv, double n0,
                                          char** out);

/* ---- subshifts ---- */
QD_API qd_status qd_word_from_rules(const char* rules, size_t length, char** out);
/* observable: "indicator:a", "centered:a", "constant:1" or a JSON object
 * {"locality": L, "table": {"aba": [re, im] | re, ...}}. alphas: n_alpha
 * frequencies; one report per frequency in a JSON array. */
QD_API qd_status qd_ww_report_json(const char* word, const char* observable, const double* alphas,
                                   size_t n_alpha, const size_t* lengths, size_t n_lengths,
                                   const size_t* offsets, size_t n_offsets, char** out);
QD_API qd_status qd_check_lr_json(const char* word, const size_t* radii, size_t n, char** out);
/* evaluator: "volume", "count" or "fourier" (|sum exp(-2 pi i xi.x)| over
 * the box); boxes live inside the patch's covering box. */
QD_API qd_status qd_subadditive_json(const qd_pointset* ps, const char* evaluator, const double* xi,
                                     const double* scales, size_t n_scales, size_t samples,
                                     uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif
