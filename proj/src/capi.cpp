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

#include "quasidiff/quasidiff.h"

#include "quasidiff/cutproject.hpp"
#include "quasidiff/diffraction.hpp"
#include "quasidiff/ergodic.hpp"
#include "quasidiff/io.hpp"
#include "quasidiff/parallel.hpp"
#include "quasidiff/randomize.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

using namespace quasidiff;
using nlohmann::json;

struct qd_pointset {
  WeightedPointSet v;
};
struct qd_scheme {
  CutProjectScheme v;
};
struct qd_peaks {
  std::vector<BraggCandidate> v;
  std::size_t d_phys;
  std::size_t d_int;
};
struct qd_spectrum {
  Spectrum v;
};

namespace {

  thread_local std::string g_last_error;

  template <class F>
  qd_status guarded(F&& f) noexcept
  {
    try {
      g_last_error.clear();
      f();
      return QD_OK;
    } catch (const ValidationError& e) {
      g_last_error = e.what();
      return QD_ERR_VALIDATION;
    } catch (const ResourceError& e) {
      g_last_error = e.what();
      return QD_ERR_RESOURCE;
    } catch (const NumericalError& e) {
      g_last_error = e.what();
      return QD_ERR_NUMERIC;
    } catch (const json::exception& e) {
      g_last_error = std::string("invalid JSON value: ") + e.what();
      return QD_ERR_VALIDATION;
    } catch (const std::bad_alloc&) {
      g_last_error = "out of memory";
      return QD_ERR_RESOURCE;
    } catch (const std::exception& e) {
      g_last_error = e.what();
      return QD_ERR_INTERNAL;
    } catch (...) {
      g_last_error = "unknown error";
      return QD_ERR_INTERNAL;
    }
  }

  void require_ptr(const void* p, const char* what)
  {
    if (!p)
      throw ValidationError(std::string(what) + " must not be null");
  }

  char* dup(const std::string& s)
  {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
      throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
  }

  Box make_box(std::size_t dim, const double* lo, const double* hi)
  {
    require_ptr(lo, "box lo");
    require_ptr(hi, "box hi");
    return { Vec(lo, lo + dim), Vec(hi, hi + dim) };
  }

  std::map<char, double> parse_lengths(std::string_view spec)
  {
    std::map<char, double> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto end = std::min(spec.find(',', start), spec.size());
      const auto item = spec.substr(start, end - start);
      if (item.size() < 3 || item[1] != '=')
        throw ValidationError("lengths entry '" + std::string(item) + "' must look like a=1.5");
      const auto v = io::parse_numbers(item.substr(2));
      if (!(v[0] > 0))
        throw ValidationError("letter lengths must be positive");
      out[item[0]] = v[0];
      start = end + 1;
    }
    return out;
  }

  Complex complex_from_json(const json& j)
  {
    if (j.is_number())
      return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return { j[0].get<double>(), j[1].get<double>() };
    throw ValidationError("observable values must be numbers or [re, im] pairs");
  }

  Observable parse_observable(std::string_view spec, std::string_view word)
  {
    if (!spec.empty() && spec.front() == '{') {
      const auto j = io::parse_json(spec, "observable");
      if (!j.contains("table") || !j.at("table").is_object())
        throw ValidationError("observable: missing object field 'table'");
      std::map<std::string, Complex, std::less<>> table;
      for (const auto& [k, v] : j.at("table").items())
        table[k] = complex_from_json(v);
      const std::size_t L = j.value("locality", std::size_t(0));
      return { L, std::move(table) };
    }
    const auto colon = spec.find(':');
    const auto kind = spec.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view() : spec.substr(colon + 1);
    std::string alphabet;
    for (char c : word)
      if (alphabet.find(c) == std::string::npos)
        alphabet += c;
    if (kind == "indicator" && arg.size() == 1) {
      if (alphabet.find(arg[0]) == std::string::npos)
        alphabet += arg[0];
      return Observable::indicator(arg[0], alphabet);
    }
    if (kind == "centered" && arg.size() == 1)
      return Observable::centered_indicator(arg[0], word);
    if (kind == "constant")
      return Observable::constant(arg.empty() ? 1.0 : io::parse_numbers(arg)[0], alphabet);
    throw ValidationError("observable '" + std::string(spec)
                          + "' must be indicator:<letter>, centered:<letter>, constant:<value> or a JSON table");
  }

  std::string fmt(double v) { return io::format_double(v); }

}

extern "C" {

const char* qd_version(void) { return io::version; }

const char* qd_last_error(void) { return g_last_error.c_str(); }

void qd_string_free(char* s) { std::free(s); }

void qd_set_threads(unsigned n) { set_thread_hint(n); }

qd_status qd_parse_range(const char* spec, double** values, size_t* n)
{
  return guarded([&] {
    require_ptr(spec, "range");
    require_ptr(values, "values");
    require_ptr(n, "n");
    const auto v = io::parse_range(spec);
    auto* out = static_cast<double*>(std::malloc(std::max<std::size_t>(v.size(), 1) * sizeof(double)));
    if (!out)
      throw std::bad_alloc();
    std::copy(v.begin(), v.end(), out);
    *values = out;
    *n = v.size();
  });
}

qd_status qd_parse_index_list(const char* spec, size_t** values, size_t* n)
{
  return guarded([&] {
    require_ptr(spec, "index list");
    require_ptr(values, "values");
    require_ptr(n, "n");
    const auto v = io::parse_index_list(spec);
    auto* out = static_cast<size_t*>(std::malloc(std::max<std::size_t>(v.size(), 1) * sizeof(size_t)));
    if (!out)
      throw std::bad_alloc();
    std::copy(v.begin(), v.end(), out);
    *values = out;
    *n = v.size();
  });
}

void qd_array_free(void* values) { std::free(values); }

void qd_hash_hex(const char* data, size_t len, char out[17])
{
  const auto h = io::content_hash(std::string_view(data ? data : "", data ? len : 0));
  std::memcpy(out, h.c_str(), 17);
}

qd_status qd_pointset_lattice(size_t dim, const double* lo, const double* hi, double spacing,
                              qd_pointset** out)
{
  return guarded([&] {
    require_ptr(out, "out");
    *out = new qd_pointset { lattice_points(dim, make_box(dim, lo, hi), spacing) };
  });
}

qd_status qd_pointset_model_set(const qd_scheme* s, const double* lo, const double* hi,
                                qd_pointset** out)
{
  return guarded([&] {
    require_ptr(s, "scheme");
    require_ptr(out, "out");
    const Box b = make_box(s->v.d_phys(), lo, hi);
    if (s->v.deformation())
      *out = new qd_pointset { deformed_model_set(s->v, *s->v.deformation(), b) };
    else
      *out = new qd_pointset { model_set(s->v, b) };
  });
}

qd_status qd_pointset_substitution(const char* rules, size_t length, const char* lengths,
                                   double origin, qd_pointset** out)
{
  return guarded([&] {
    require_ptr(rules, "rules");
    require_ptr(out, "out");
    QD_REQUIRE(length >= 1, "length must be >= 1");
    QD_REQUIRE(std::isfinite(origin), "origin must be finite");
    const auto sub = Substitution::parse(rules);
    const auto word = substitution_fixed_point(sub, length);
    auto len = sub.lengths;
    if (lengths && *lengths)
      for (const auto& [c, v] : parse_lengths(lengths))
        len[c] = v;
    auto ps = word_to_pointset(word, len, origin);
    auto meta = ps.meta();
    meta["params"]["rules"] = rules;
    *out = new qd_pointset { ps.with_meta(std::move(meta)) };
  });
}

qd_status qd_pointset_from_json(const char* text, qd_pointset** out)
{
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = new qd_pointset { io::pointset_from_json(io::parse_json(text, "point set")) };
  });
}

qd_status qd_pointset_to_json(const qd_pointset* ps, char** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(out, "out");
    *out = dup(io::pointset_to_json(ps->v).dump());
  });
}

void qd_pointset_free(qd_pointset* ps) { delete ps; }

size_t qd_pointset_size(const qd_pointset* ps) { return ps ? ps->v.size() : 0; }

size_t qd_pointset_dim(const qd_pointset* ps) { return ps ? ps->v.dim() : 0; }

const double* qd_pointset_coords(const qd_pointset* ps) { return ps ? ps->v.coords().data() : nullptr; }

qd_status qd_pointset_covering_box(const qd_pointset* ps, double* lo, double* hi)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(lo, "lo");
    require_ptr(hi, "hi");
    const Box b = ps->v.covering_box();
    std::copy(b.lo().begin(), b.lo().end(), lo);
    std::copy(b.hi().begin(), b.hi().end(), hi);
  });
}

qd_status qd_pointset_density(const qd_pointset* ps, const double* lo, const double* hi, double* out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(out, "out");
    *out = density(ps->v, make_box(ps->v.dim(), lo, hi));
  });
}

qd_status qd_pointset_min_separation(const qd_pointset* ps, double* out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(out, "out");
    *out = min_separation(ps->v);
  });
}

qd_status qd_percolate(const qd_pointset* ps, double p, uint64_t seed, qd_pointset** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(out, "out");
    *out = new qd_pointset { percolate(ps->v, p, seed) };
  });
}

qd_status qd_displace(const qd_pointset* ps, const char* dist_json, uint64_t seed, qd_pointset** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(dist_json, "dist");
    require_ptr(out, "out");
    const auto dist = io::dist_from_json(io::parse_json(dist_json, "dist"));
    *out = new qd_pointset { displace(ps->v, dist, seed) };
  });
}

qd_status qd_scheme_load(const char* preset_or_path, qd_scheme** out)
{
  return guarded([&] {
    require_ptr(preset_or_path, "scheme");
    require_ptr(out, "out");
    *out = new qd_scheme { io::load_scheme(preset_or_path) };
  });
}

qd_status qd_scheme_from_json(const char* text, qd_scheme** out)
{
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = new qd_scheme { io::scheme_from_json(io::parse_json(text, "scheme")) };
  });
}

qd_status qd_scheme_to_json(const qd_scheme* s, char** out)
{
  return guarded([&] {
    require_ptr(s, "scheme");
    require_ptr(out, "out");
    *out = dup(io::scheme_to_json(s->v).dump());
  });
}

qd_status qd_scheme_with_window(const qd_scheme* s, const double* lo, const double* hi, qd_scheme** out)
{
  return guarded([&] {
    require_ptr(s, "scheme");
    require_ptr(out, "out");
    *out = new qd_scheme { s->v.with_window(make_box(s->v.d_int(), lo, hi)) };
  });
}

void qd_scheme_free(qd_scheme* s) { delete s; }

size_t qd_scheme_d_phys(const qd_scheme* s) { return s ? s->v.d_phys() : 0; }

size_t qd_scheme_d_int(const qd_scheme* s) { return s ? s->v.d_int() : 0; }

qd_status qd_dual_peaks(const qd_scheme* s, const double* lo, const double* hi, double floor,
                        size_t quad_points, qd_peaks** out)
{
  return guarded([&] {
    require_ptr(s, "scheme");
    require_ptr(out, "out");
    auto peaks = dual_peaks(s->v, make_box(s->v.d_phys(), lo, hi), floor);
    if (s->v.deformation()) {
      QD_REQUIRE(quad_points >= 2, "deformed predictions need >= 2 quadrature points per axis");
      parallel_for(peaks.size(), [&](std::size_t i) {
        peaks[i].amplitude = deformed_amplitude(s->v, *s->v.deformation(), peaks[i], quad_points);
        peaks[i].intensity = std::norm(peaks[i].amplitude);
      });
    }
    *out = new qd_peaks { std::move(peaks), s->v.d_phys(), s->v.d_int() };
  });
}

size_t qd_peaks_count(const qd_peaks* p) { return p ? p->v.size() : 0; }

qd_status qd_peaks_get(const qd_peaks* p, size_t i, double* k, double* k_star, double* intensity)
{
  return guarded([&] {
    require_ptr(p, "peaks");
    QD_REQUIRE(i < p->v.size(), "peak index out of range");
    const auto& c = p->v[i];
    if (k)
      std::copy(c.k.begin(), c.k.end(), k);
    if (k_star)
      std::copy(c.k_star.begin(), c.k_star.end(), k_star);
    if (intensity)
      *intensity = c.intensity;
  });
}

qd_status qd_peaks_to_csv(const qd_peaks* p, char** out)
{
  return guarded([&] {
    require_ptr(p, "peaks");
    require_ptr(out, "out");
    std::ostringstream os;
    for (std::size_t j = 0; j < p->d_phys; ++j)
      os << "k_" << j + 1 << ',';
    for (std::size_t j = 0; j < p->d_int; ++j)
      os << "kstar_" << j + 1 << ',';
    for (std::size_t j = 0; j < p->d_phys + p->d_int; ++j)
      os << "q_" << j + 1 << ',';
    os << "amplitude_re,amplitude_im,intensity\n";
    for (const auto& c : p->v) {
      for (double v : c.k)
        os << fmt(v) << ',';
      for (double v : c.k_star)
        os << fmt(v) << ',';
      for (auto q : c.dual_index)
        os << q << ',';
      os << fmt(c.amplitude.real()) << ',' << fmt(c.amplitude.imag()) << ',' << fmt(c.intensity) << '\n';
    }
    *out = dup(os.str());
  });
}

void qd_peaks_free(qd_peaks* p) { delete p; }

qd_status qd_fourier_average(const qd_pointset* ps, const double* lo, const double* hi, const double* xi,
                             double* re, double* im)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(xi, "xi");
    const auto d = ps->v.dim();
    const auto f = fourier_average(ps->v, make_box(d, lo, hi), std::span<const double>(xi, d));
    if (re)
      *re = f.value.real();
    if (im)
      *im = f.value.imag();
  });
}

qd_status qd_scan(const qd_pointset* ps, const double* lo, const double* hi, const double* xi, size_t n,
                  qd_estimator est, size_t scales, double max_radius, double bin_epsilon,
                  qd_spectrum** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(xi, "xi");
    require_ptr(out, "out");
    QD_REQUIRE(est == QD_FOURIER || est == QD_AUTOCORR, "unknown estimator");
    const auto d = ps->v.dim();
    std::vector<Vec> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      grid.emplace_back(xi + i * d, xi + (i + 1) * d);
    ScanOptions opts;
    opts.scales = scales;
    if (max_radius > 0)
      opts.max_radius = max_radius;
    if (bin_epsilon > 0)
      opts.bin_epsilon = bin_epsilon;
    *out = new qd_spectrum { scan_spectrum(ps->v, make_box(d, lo, hi), grid,
                                           est == QD_FOURIER ? Estimator::fourier : Estimator::autocorr,
                                           opts) };
  });
}

size_t qd_spectrum_count(const qd_spectrum* sp) { return sp ? sp->v.entries.size() : 0; }

qd_status qd_spectrum_get(const qd_spectrum* sp, size_t i, double* xi, double* intensity)
{
  return guarded([&] {
    require_ptr(sp, "spectrum");
    QD_REQUIRE(i < sp->v.entries.size(), "spectrum index out of range");
    const auto& e = sp->v.entries[i];
    if (xi)
      std::copy(e.xi.begin(), e.xi.end(), xi);
    if (intensity)
      *intensity = e.intensity;
  });
}

qd_status qd_spectrum_to_csv(const qd_spectrum* sp, char** out)
{
  return guarded([&] {
    require_ptr(sp, "spectrum");
    require_ptr(out, "out");
    std::ostringstream os;
    write_spectrum_csv(os, sp->v);
    *out = dup(os.str());
  });
}

qd_status qd_spectrum_peaks_csv(const qd_spectrum* sp, const qd_pointset* ps, const double* lo,
                                const double* hi, double floor, int refine, char** out)
{
  return guarded([&] {
    require_ptr(sp, "spectrum");
    require_ptr(out, "out");
    ContinuousEstimator est;
    std::optional<Box> box;
    if (refine) {
      require_ptr(ps, "point set");
      box = make_box(ps->v.dim(), lo, hi);
      est = [&](std::span<const double> xi) { return std::norm(fourier_average(ps->v, *box, xi).value); };
    }
    const auto peaks = find_peaks(sp->v, floor, est);
    std::ostringstream os;
    for (std::size_t j = 0; j < sp->v.dim; ++j)
      os << "xi_" << j + 1 << ',';
    os << "intensity\n";
    for (const auto& p : peaks) {
      for (double v : p.xi)
        os << fmt(v) << ',';
      os << fmt(p.intensity) << '\n';
    }
    *out = dup(os.str());
  });
}

void qd_spectrum_free(qd_spectrum* sp) { delete sp; }

qd_status qd_convergence_csv(const qd_pointset* ps, const double* xi, const double* center, double side0,
                             double growth, size_t count, qd_estimator est, char** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(xi, "xi");
    require_ptr(center, "center");
    require_ptr(out, "out");
    const auto d = ps->v.dim();
    const auto cubes = cube_sequence({ Vec(center, center + d), side0, growth, count });
    const std::span<const double> x(xi, d);
    std::vector<double> I(cubes.size());
    std::vector<std::size_t> counts(cubes.size());
    if (est == QD_FOURIER) {
      const auto seq = intensity_sequence(ps->v, cubes, x);
      I = seq.intensities;
      counts = seq.point_counts;
    } else {
      QD_REQUIRE(est == QD_AUTOCORR, "unknown estimator");
      for (std::size_t i = 0; i < cubes.size(); ++i) {
        QD_REQUIRE(ps->v.covering_box().contains(cubes[i]), "cube exceeds the region covered by the patch");
        std::vector<double> c;
        for (std::size_t p = 0; p < ps->v.size(); ++p)
          if (cubes[i].contains(ps->v.point(p)))
            c.insert(c.end(), ps->v.point(p).begin(), ps->v.point(p).end());
        counts[i] = c.size() / d;
        if (counts[i] == 0)
          continue;
        const WeightedPointSet sub(d, std::move(c), {}, json::object(), cubes[i]);
        const double eps = counts[i] >= 2 ? 1e-6 * min_separation(sub) : 1e-6;
        I[i] = identity_intensity(autocorrelation(sub, cubes[i], std::nullopt, eps), x).value;
      }
    }
    std::ostringstream os;
    os << "scale,side,box_volume,point_count,intensity,gap\n";
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      const double gap = i == 0 ? 0.0 : std::abs(I[i] - I[i - 1]);
      os << i << ',' << fmt(cubes[i].side(0)) << ',' << fmt(cubes[i].volume()) << ',' << counts[i] << ','
         << fmt(I[i]) << ',' << fmt(gap) << '\n';
    }
    *out = dup(os.str());
  });
}

qd_status qd_predict_perturbed_csv(const char* model_json, const char* base_csv, double n0, char** out)
{
  return guarded([&] {
    require_ptr(model_json, "model");
    require_ptr(base_csv, "base spectrum");
    require_ptr(out, "out");
    const auto model = io::model_from_json(io::parse_json(model_json, "model"));
    const auto rows = io::read_intensity_csv(base_csv);
    QD_REQUIRE(!rows.empty(), "base spectrum has no rows");
    const std::size_t d = rows.front().xi.size();
    std::ostringstream os;
    for (std::size_t j = 0; j < d; ++j)
      os << "xi_" << j + 1 << ',';
    os << "base_intensity,intensity,diffuse_level\n";
    for (const auto& r : rows) {
      double dens = n0;
      if (!(dens > 0)) {
        QD_REQUIRE(r.density.has_value(),
                   "point density unknown: pass n0 or a base spectrum with point_count and box_volume");
        dens = *r.density;
      }
      const auto p = predicted_intensity(model, r.intensity, r.xi, dens);
      for (double v : r.xi)
        os << fmt(v) << ',';
      os << fmt(r.intensity) << ',' << fmt(p.point_part) << ',' << fmt(p.diffuse_level) << '\n';
    }
    *out = dup(os.str());
  });
}

qd_status qd_word_from_rules(const char* rules, size_t length, char** out)
{
  return guarded([&] {
    require_ptr(rules, "rules");
    require_ptr(out, "out");
    QD_REQUIRE(length >= 1, "length must be >= 1");
    *out = dup(substitution_fixed_point(Substitution::parse(rules), length));
  });
}

qd_status qd_ww_report_json(const char* word, const char* observable, const double* alphas, size_t n_alpha,
                            const size_t* lengths, size_t n_lengths, const size_t* offsets, size_t n_offsets,
                            char** out)
{
  return guarded([&] {
    require_ptr(word, "word");
    require_ptr(observable, "observable");
    require_ptr(out, "out");
    QD_REQUIRE(n_alpha >= 1 && alphas, "at least one frequency is required");
    QD_REQUIRE(n_lengths >= 1 && lengths, "at least one averaging length is required");
    QD_REQUIRE(n_offsets >= 1 && offsets, "at least one offset is required");
    const std::string_view w(word);
    const auto f = parse_observable(observable, w);
    json reports = json::array();
    for (std::size_t a = 0; a < n_alpha; ++a) {
      const auto r = ww_report(w, f, alphas[a], std::span(lengths, n_lengths), std::span(offsets, n_offsets));
      json abs_values = json::array(), values = json::array();
      for (const auto& v : r.values) {
        abs_values.push_back(std::abs(v));
        values.push_back({ v.real(), v.imag() });
      }
      reports.push_back({ { "alpha", r.alpha },
                          { "lengths", r.lengths },
                          { "abs_values", abs_values },
                          { "values", values },
                          { "sup_deviation", r.sup_deviation },
                          { "limit_estimate", r.limit_estimate } });
    }
    *out = dup(reports.dump());
  });
}

qd_status qd_check_lr_json(const char* word, const size_t* radii, size_t n, char** out)
{
  return guarded([&] {
    require_ptr(word, "word");
    require_ptr(out, "out");
    QD_REQUIRE(n >= 1 && radii, "at least one radius is required");
    const std::string_view w(word);
    const auto r = check_linear_repetitivity(w, std::span(radii, n));
    *out = dup(json { { "radii", r.radii },
                      { "constants", r.constants },
                      { "C_estimate", r.C_estimate },
                      { "adequacy_bound", r.adequacy_bound },
                      { "word_length", w.size() },
                      { "singletons", r.singletons } }
                 .dump());
  });
}

qd_status qd_subadditive_json(const qd_pointset* ps, const char* evaluator, const double* xi,
                              const double* scales, size_t n_scales, size_t samples, uint64_t seed, char** out)
{
  return guarded([&] {
    require_ptr(ps, "point set");
    require_ptr(evaluator, "evaluator");
    require_ptr(out, "out");
    QD_REQUIRE(n_scales >= 1 && scales, "at least one scale is required");
    const auto& w = ps->v;
    const std::string kind(evaluator);
    std::function<double(const Box&)> F;
    Vec xiv;
    if (kind == "volume") {
      F = [](const Box& q) { return q.volume(); };
    } else if (kind == "count") {
      F = [&](const Box& q) { return density(w, q) * q.volume(); };
    } else if (kind == "fourier") {
      require_ptr(xi, "xi");
      xiv.assign(xi, xi + w.dim());
      F = [&](const Box& q) { return std::abs(fourier_average(w, q, xiv).value) * q.volume(); };
    } else {
      throw ValidationError("evaluator must be volume, count or fourier");
    }
    const auto r = subadditive_limit(F, w.covering_box(), std::span(scales, n_scales), samples, seed);
    json j = { { "evaluator", kind },
               { "scales", r.scales },
               { "samples_per_scale", samples },
               { "seed", seed },
               { "per_scale_mean", r.per_scale_mean },
               { "per_scale_spread", r.per_scale_spread },
               { "samples", r.samples },
               { "limit", r.limit },
               { "limit_squared", r.limit * r.limit } };
    if (!xiv.empty())
      j["xi"] = xiv;
    *out = dup(j.dump());
  });
}

}
