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

// Command-line front end. Talks to the library only through quasidiff.h.

#include "quasidiff/quasidiff.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

  struct CliError {
    int code;
    std::string message;
  };

  void check(qd_status s)
  {
    if (s != QD_OK)
      throw CliError { static_cast<int>(s), qd_last_error() };
  }

  [[noreturn]] void invalid(const std::string& msg) { throw CliError { QD_ERR_VALIDATION, msg }; }

  std::string take(char* s)
  {
    std::string out = s ? s : "";
    qd_string_free(s);
    return out;
  }

  template <class T, void (*Free)(T*)>
  struct Deleter {
    void operator()(T* p) const { Free(p); }
  };
  using PointSet = std::unique_ptr<qd_pointset, Deleter<qd_pointset, qd_pointset_free>>;
  using Scheme = std::unique_ptr<qd_scheme, Deleter<qd_scheme, qd_scheme_free>>;
  using Peaks = std::unique_ptr<qd_peaks, Deleter<qd_peaks, qd_peaks_free>>;
  using Spectrum = std::unique_ptr<qd_spectrum, Deleter<qd_spectrum, qd_spectrum_free>>;

  std::vector<double> range(const std::string& spec)
  {
    double* v = nullptr;
    size_t n = 0;
    check(qd_parse_range(spec.c_str(), &v, &n));
    std::vector<double> out(v, v + n);
    qd_array_free(v);
    return out;
  }

  std::vector<size_t> index_list(const std::string& spec)
  {
    size_t* v = nullptr;
    size_t n = 0;
    check(qd_parse_index_list(spec.c_str(), &v, &n));
    std::vector<size_t> out(v, v + n);
    qd_array_free(v);
    return out;
  }

  // ---- run context: inputs read, resolved config, output ----------------

  class Run {
  public:
    Run(const CLI::App& sub, std::string command)
    {
      m_config["command"] = std::move(command);
      for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "out")
          continue;
        if (opt->get_type_size() == 0)
          m_config[name] = opt->count() > 0;
        else if (opt->count() > 0)
          m_config[name] = opt->as<std::string>();
        else if (!opt->get_default_str().empty())
          m_config[name] = opt->get_default_str();
      }
    }

    void set(const std::string& key, json v) { m_config[key] = std::move(v); }

    std::string read(const std::string& path)
    {
      std::string bytes;
      if (path == "-") {
        bytes.assign(std::istreambuf_iterator<char>(std::cin), {});
      } else {
        std::ifstream in(path, std::ios::binary);
        if (!in)
          throw CliError { QD_ERR_RESOURCE, "cannot read '" + path + "'" };
        bytes.assign(std::istreambuf_iterator<char>(in), {});
      }
      m_inputs += bytes;
      m_inputs += '\0';
      return bytes;
    }

    json meta() const
    {
      char h[17];
      qd_hash_hex(m_inputs.data(), m_inputs.size(), h);
      return { { "version", qd_version() }, { "config", m_config }, { "input_hash", h } };
    }

    // Point-set JSON: the envelope is merged into the set's own meta.
    std::string pointset_doc(const qd_pointset* ps) const
    {
      char* text = nullptr;
      check(qd_pointset_to_json(ps, &text));
      json doc = json::parse(take(text));
      const json m = meta();
      for (const auto& [k, v] : m.items())
        doc["meta"][k] = v;
      return doc.dump() + "\n";
    }

    std::string csv_doc(const std::string& csv) const { return "# " + meta().dump() + "\n" + csv; }

    std::string report_doc(json report) const
    {
      json doc = { { "meta", meta() } };
      if (report.is_object())
        doc.update(report);
      else
        doc["reports"] = std::move(report);
      return doc.dump(2) + "\n";
    }

  private:
    json m_config = json::object();
    std::string m_inputs;
  };

  void write_output(const std::string& path, const std::string& content)
  {
    if (path.empty() || path == "-") {
      std::cout << content;
      std::cout.flush();
      if (!std::cout)
        throw CliError { QD_ERR_RESOURCE, "cannot write to stdout" };
      return;
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out)
      throw CliError { QD_ERR_RESOURCE, "cannot write '" + path + "'" };
  }

  PointSet load_pointset(Run& run, const std::string& path)
  {
    qd_pointset* ps = nullptr;
    check(qd_pointset_from_json(run.read(path).c_str(), &ps));
    return PointSet(ps);
  }

  Scheme load_scheme(Run& run, const std::string& name, const std::string& window)
  {
    qd_scheme* s = nullptr;
    std::ifstream probe(name);
    if (probe) {
      check(qd_scheme_from_json(run.read(name).c_str(), &s));
    } else {
      check(qd_scheme_load(name.c_str(), &s));
    }
    Scheme out(s);
    if (!window.empty()) {
      const auto w = range(window);
      const size_t d = qd_scheme_d_int(s);
      if (w.size() != 2 * d)
        invalid("--window needs " + std::to_string(2 * d) + " numbers (lo..., hi...)");
      qd_scheme* ws = nullptr;
      check(qd_scheme_with_window(s, w.data(), w.data() + d, &ws));
      out.reset(ws);
    }
    return out;
  }

  struct BoxArg {
    std::vector<double> lo, hi;
  };

  // "lo_1,..,lo_d,hi_1,..,hi_d" or {"lo": [..], "hi": [..]}
  BoxArg parse_box(const std::string& spec, size_t dim)
  {
    BoxArg b;
    if (!spec.empty() && spec.front() == '{') {
      json j;
      try {
        j = json::parse(spec);
        b.lo = j.at("lo").get<std::vector<double>>();
        b.hi = j.at("hi").get<std::vector<double>>();
      } catch (const json::exception&) {
        invalid("--box: expected {\"lo\": [...], \"hi\": [...]}");
      }
    } else {
      const auto v = range(spec);
      if (v.size() % 2 != 0)
        invalid("--box needs an even count of numbers (lo..., hi...)");
      b.lo.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2));
      b.hi.assign(v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    }
    if (b.lo.size() != dim)
      invalid("--box has dimension " + std::to_string(b.lo.size()) + ", expected " + std::to_string(dim));
    return b;
  }

  BoxArg box_or_cover(const std::string& spec, const qd_pointset* ps)
  {
    const size_t d = qd_pointset_dim(ps);
    if (!spec.empty())
      return parse_box(spec, d);
    BoxArg b { std::vector<double>(d), std::vector<double>(d) };
    check(qd_pointset_covering_box(ps, b.lo.data(), b.hi.data()));
    return b;
  }

  // One axis spec per dimension, separated by '/'; the grid is their product
  // with the last axis varying fastest.
  std::vector<double> frequency_grid(const std::string& spec, size_t dim)
  {
    std::vector<std::vector<double>> axes;
    std::size_t start = 0;
    while (true) {
      const auto slash = spec.find('/', start);
      axes.push_back(range(spec.substr(start, slash == std::string::npos ? std::string::npos : slash - start)));
      if (slash == std::string::npos)
        break;
      start = slash + 1;
    }
    if (axes.size() != dim)
      invalid("--xi: need " + std::to_string(dim) + " axis specs separated by '/'");
    std::vector<double> grid;
    std::vector<size_t> at(dim, 0);
    while (true) {
      for (size_t j = 0; j < dim; ++j)
        grid.push_back(axes[j][at[j]]);
      size_t j = dim;
      while (j > 0 && ++at[j - 1] == axes[j - 1].size())
        at[--j] = 0;
      if (j == 0)
        break;
    }
    return grid;
  }

  // Bragg peaks of a patch of side L are about 1/L wide; a coarser grid
  // samples their sidelobes and can miss them.
  void warn_if_coarse(const std::vector<double>& grid, size_t dim, const BoxArg& box)
  {
    for (size_t j = 0; j < dim; ++j) {
      double step = std::numeric_limits<double>::infinity();
      for (size_t i = dim; i < grid.size(); i += dim) {
        const double dx = std::abs(grid[i + j] - grid[i + j - dim]);
        if (dx > 0)
          step = std::min(step, dx);
      }
      const double width = 1.0 / (box.hi[j] - box.lo[j]);
      if (std::isfinite(step) && step > width)
        std::cerr << "warning: --xi step " << step << " on axis " << j + 1 << " exceeds the peak width " << width
                  << "; peaks between grid points may be missed\n";
    }
  }

  std::vector<double> frequency(const std::string& spec, size_t dim)
  {
    const auto v = range(spec);
    if (v.size() != dim)
      invalid("--xi: expected " + std::to_string(dim) + " coordinates");
    return v;
  }

  qd_estimator estimator(const std::string& name)
  {
    if (name == "fourier")
      return QD_FOURIER;
    if (name == "autocorr")
      return QD_AUTOCORR;
    invalid("--estimator must be fourier or autocorr");
  }

  // "uniform:a", "two_point:a" or a JSON object
  json dist_spec(const std::string& spec)
  {
    if (!spec.empty() && spec.front() == '{') {
      try {
        return json::parse(spec);
      } catch (const json::exception&) {
        invalid("--dist: malformed JSON");
      }
    }
    const auto colon = spec.find(':');
    const auto kind = spec.substr(0, colon);
    if (colon == std::string::npos)
      invalid("--dist must look like uniform:0.1, two_point:0.25 or a JSON object");
    const auto a = range(spec.substr(colon + 1));
    if (a.size() != 1)
      invalid("--dist: expected one amplitude");
    if (kind == "uniform" || kind == "uniform_interval")
      return { { "kind", "uniform_interval" }, { "a", a[0] } };
    if (kind == "two_point")
      return { { "kind", "two_point" }, { "a", a[0] } };
    invalid("--dist kind must be uniform or two_point");
  }

  // "percolation:p", "uniform:a", "two_point:a" or a JSON object
  json model_spec(const std::string& spec)
  {
    if (!spec.empty() && spec.front() == '{') {
      try {
        return json::parse(spec);
      } catch (const json::exception&) {
        invalid("--model: malformed JSON");
      }
    }
    if (spec.rfind("percolation:", 0) == 0) {
      const auto p = range(spec.substr(12));
      if (p.size() != 1)
        invalid("--model: expected one probability");
      return { { "kind", "percolation" }, { "p", p[0] } };
    }
    return { { "kind", "displacement" }, { "dist", dist_spec(spec) } };
  }

  std::string word_input(Run& run, const std::string& word_file, const std::string& rules, size_t length)
  {
    if (!word_file.empty()) {
      std::string w = run.read(word_file);
      w.erase(std::remove_if(w.begin(), w.end(), [](unsigned char c) { return std::isspace(c); }), w.end());
      if (w.empty())
        invalid("word file '" + word_file + "' is empty");
      return w;
    }
    if (rules.empty())
      invalid("need --word-file or --rules");
    char* w = nullptr;
    check(qd_word_from_rules(rules.c_str(), length, &w));
    return take(w);
  }

  // ---- options shared by several subcommands ----------------------------

  struct Options {
    // generation
    size_t dim = 1;
    std::string box, scheme, window, rules, lengths;
    double spacing = 1.0, origin = 0.0;
    size_t length = 0;
    // perturbation
    std::string input, dist;
    double p = 0.0;
    uint64_t seed = 0;
    // diffraction
    std::string xi, est = "fourier", vanhove, center;
    size_t scales = 2;
    double max_radius = 0.0, bin_eps = 0.0, floor = 1e-3;
    bool refine = false;
    // predictions
    std::string range, model, base;
    double n0 = 0.0;
    size_t quad = 2000;
    // subshifts
    std::string word_file, alpha = "0", ww_lengths, offsets = "0", f = "indicator:a", radii, evaluator,
                              fisher_scales;
    size_t samples = 10;
  };

  void add_peak_options(CLI::App* c, Options& o)
  {
    c->add_option("input", o.input, "point-set JSON file ('-' for stdin)")->required();
    c->add_option("--xi", o.xi, "frequency, comma separated per axis")->required();
    c->add_option("--vanhove", o.vanhove, "side0,growth,count of the centred cube sequence")
      ->default_str("auto");
    c->add_option("--center", o.center, "cube centre (default: centre of --box)");
    c->add_option("--box", o.box, "domain (default: region of the input)");
    c->add_option("--estimator", o.est, "fourier or autocorr")->capture_default_str();
  }

  std::string run_peak(Run& run, const Options& o)
  {
    const auto ps = load_pointset(run, o.input);
    const size_t d = qd_pointset_dim(ps.get());
    const auto xi = frequency(o.xi, d);
    const auto box = box_or_cover(o.box, ps.get());
    std::vector<double> c(d);
    if (o.center.empty()) {
      for (size_t j = 0; j < d; ++j)
        c[j] = 0.5 * (box.lo[j] + box.hi[j]);
    } else {
      c = frequency(o.center, d);
    }
    double side0 = 0, growth = 2;
    size_t count = 4;
    if (o.vanhove.empty() || o.vanhove == "auto") {
      double side = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < d; ++j)
        side = std::min(side, box.hi[j] - box.lo[j]);
      side0 = side / 8;
    } else {
      const auto v = range(o.vanhove);
      if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2]))
        invalid("--vanhove must be side0,growth,count with an integer count >= 1");
      side0 = v[0];
      growth = v[1];
      count = static_cast<size_t>(v[2]);
    }
    run.set("vanhove", json::array({ side0, growth, count }));
    run.set("center", c);
    char* out = nullptr;
    check(qd_convergence_csv(ps.get(), xi.data(), c.data(), side0, growth, count, estimator(o.est), &out));
    return run.csv_doc(take(out));
  }

}

int main(int argc, char** argv)
{
  CLI::App app { "quasidiff: aperiodic point sets and their diffraction" };
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(qd_version()));
  unsigned threads = 0;
  std::string out_path;
  app.add_option("--threads", threads, "thread-count hint (0 = all cores); results do not depend on it");
  app.add_option("--out,-o", out_path, "output file (default stdout)");
  app.option_defaults()->always_capture_default();

  Options o;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a point set")->require_subcommand(1);
  auto* gen_lat = gen->add_subcommand("lattice", "scaled integer lattice inside a box");
  gen_lat->add_option("--dim", o.dim)->capture_default_str();
  gen_lat->add_option("--box", o.box, "lo_1,..,lo_d,hi_1,..,hi_d")->required();
  gen_lat->add_option("--spacing", o.spacing)->capture_default_str();
  auto* gen_ms = gen->add_subcommand("model-set", "cut-and-project model set");
  gen_ms->add_option("--scheme", o.scheme, "preset name or scheme JSON file")->required();
  gen_ms->add_option("--window", o.window, "replace the window: lo_1,..,hi_1,..");
  gen_ms->add_option("--box", o.box)->required();
  auto* gen_sub = gen->add_subcommand("substitution", "substitution chain from a fixed point");
  gen_sub->add_option("--rules", o.rules, "preset or rules like a:ab,b:a")->required();
  gen_sub->add_option("--length", o.length, "number of letters")->required();
  gen_sub->add_option("--lengths", o.lengths, "tile lengths like a=1.618,b=1");
  gen_sub->add_option("--origin", o.origin)->capture_default_str();

  // perturb
  auto* pert = app.add_subcommand("perturb", "randomize a point set")->require_subcommand(1);
  auto* pert_perc = pert->add_subcommand("percolate", "keep each point with probability p");
  pert_perc->add_option("input", o.input)->required();
  pert_perc->add_option("--p", o.p)->required();
  pert_perc->add_option("--seed", o.seed)->capture_default_str();
  auto* pert_disp = pert->add_subcommand("displace", "i.i.d. bounded displacements");
  pert_disp->add_option("input", o.input)->required();
  pert_disp->add_option("--dist", o.dist, "uniform:a, two_point:a or JSON")->required();
  pert_disp->add_option("--seed", o.seed)->capture_default_str();

  // diffract
  auto* diff = app.add_subcommand("diffract", "diffraction of a point set")->require_subcommand(1);
  auto* diff_scan = diff->add_subcommand("scan", "intensity over a frequency grid");
  diff_scan->add_option("input", o.input)->required();
  diff_scan->add_option("--xi", o.xi, "start:stop:step or a,b,c; axes separated by '/'")->required();
  diff_scan->add_option("--box", o.box);
  diff_scan->add_option("--estimator", o.est)->capture_default_str();
  diff_scan->add_option("--scales", o.scales, "nested boxes in the convergence diagnostic")
    ->capture_default_str();
  diff_scan->add_option("--max-radius", o.max_radius, "autocorrelation truncation (0 = none)")
    ->capture_default_str();
  diff_scan->add_option("--bin-eps", o.bin_eps, "difference binning width (0 = default)")
    ->capture_default_str();
  auto* diff_peak = diff->add_subcommand("peak", "convergence table at one frequency");
  add_peak_options(diff_peak, o);
  auto* diff_peaks = diff->add_subcommand("peaks", "local maxima of a scan above a floor");
  diff_peaks->add_option("input", o.input)->required();
  diff_peaks->add_option("--xi", o.xi)->required();
  diff_peaks->add_option("--floor", o.floor)->capture_default_str();
  diff_peaks->add_option("--box", o.box);
  diff_peaks->add_option("--estimator", o.est)->capture_default_str();
  diff_peaks->add_option("--scales", o.scales)->capture_default_str();
  diff_peaks->add_flag("--refine", o.refine, "golden-section refinement on the Fourier estimator");
  auto* conv = app.add_subcommand("converge", "same as 'diffract peak'");
  add_peak_options(conv, o);

  // predict
  auto* pred = app.add_subcommand("predict", "closed-form predictions")->require_subcommand(1);
  auto* pred_ms = pred->add_subcommand("model-set", "Bragg peaks of a model set");
  pred_ms->add_option("--scheme", o.scheme)->required();
  pred_ms->add_option("--window", o.window);
  pred_ms->add_option("--range", o.range, "closed box lo_1,..,hi_1,.. of physical frequencies")->required();
  pred_ms->add_option("--floor", o.floor)->capture_default_str();
  pred_ms->add_option("--quad", o.quad, "quadrature points per axis for deformed schemes")
    ->capture_default_str();
  auto* pred_pt = pred->add_subcommand("perturbed", "apply a random model to a base spectrum");
  pred_pt->add_option("--model", o.model, "percolation:p, uniform:a, two_point:a or JSON")->required();
  pred_pt->add_option("--base-spectrum", o.base, "spectrum or prediction CSV")->required();
  pred_pt->add_option("--n0", o.n0, "point density (0 = from the base rows)")->capture_default_str();

  // ww
  auto* ww = app.add_subcommand("ww", "Wiener-Wintner averages along a word");
  ww->add_option("--word-file", o.word_file);
  ww->add_option("--rules", o.rules);
  ww->add_option("--length", o.length)->default_val(100000);
  ww->add_option("--alpha", o.alpha, "frequencies: a,b,c or start:stop:step")->capture_default_str();
  ww->add_option("--lengths", o.ww_lengths, "averaging lengths (default: powers of ten)");
  ww->add_option("--offsets", o.offsets, "offsets: a..b or a,b,c")->capture_default_str();
  ww->add_option("--f", o.f, "indicator:x, centered:x, constant:v or JSON table")->capture_default_str();

  // check
  auto* chk = app.add_subcommand("check", "structural diagnostics")->require_subcommand(1);
  auto* chk_lr = chk->add_subcommand("lr", "linear repetitivity constants");
  chk_lr->add_option("--word-file", o.word_file);
  chk_lr->add_option("--rules", o.rules);
  chk_lr->add_option("--length", o.length)->default_val(100000);
  chk_lr->add_option("--radii", o.radii, "a..b or a,b,c")->required();
  auto* chk_sa = chk->add_subcommand("subadditive", "Fisher-box subadditive limit");
  chk_sa->add_option("input", o.input, "point-set JSON (or use --rules)");
  chk_sa->add_option("--rules", o.rules);
  chk_sa->add_option("--length", o.length)->default_val(100000);
  chk_sa->add_option("--lengths", o.lengths);
  chk_sa->add_option("--f", o.evaluator, "volume, count or fourier (default fourier with --xi, else volume)");
  chk_sa->add_option("--xi", o.xi);
  chk_sa->add_option("--scales", o.fisher_scales, "box scales r")->required();
  chk_sa->add_option("--samples", o.samples)->capture_default_str();
  chk_sa->add_option("--seed", o.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : QD_ERR_VALIDATION;
  }

  qd_set_threads(threads);

  try {
    std::string doc;
    if (gen_lat->parsed()) {
      Run run(*gen_lat, "gen lattice");
      const auto b = parse_box(o.box, o.dim);
      qd_pointset* ps = nullptr;
      check(qd_pointset_lattice(o.dim, b.lo.data(), b.hi.data(), o.spacing, &ps));
      doc = run.pointset_doc(PointSet(ps).get());
    } else if (gen_ms->parsed()) {
      Run run(*gen_ms, "gen model-set");
      const auto s = load_scheme(run, o.scheme, o.window);
      const auto b = parse_box(o.box, qd_scheme_d_phys(s.get()));
      qd_pointset* ps = nullptr;
      check(qd_pointset_model_set(s.get(), b.lo.data(), b.hi.data(), &ps));
      doc = run.pointset_doc(PointSet(ps).get());
    } else if (gen_sub->parsed()) {
      Run run(*gen_sub, "gen substitution");
      qd_pointset* ps = nullptr;
      check(qd_pointset_substitution(o.rules.c_str(), o.length, o.lengths.c_str(), o.origin, &ps));
      doc = run.pointset_doc(PointSet(ps).get());
    } else if (pert_perc->parsed()) {
      Run run(*pert_perc, "perturb percolate");
      const auto in = load_pointset(run, o.input);
      qd_pointset* ps = nullptr;
      check(qd_percolate(in.get(), o.p, o.seed, &ps));
      doc = run.pointset_doc(PointSet(ps).get());
    } else if (pert_disp->parsed()) {
      Run run(*pert_disp, "perturb displace");
      const auto in = load_pointset(run, o.input);
      const auto dist = dist_spec(o.dist);
      run.set("dist", dist);
      qd_pointset* ps = nullptr;
      check(qd_displace(in.get(), dist.dump().c_str(), o.seed, &ps));
      doc = run.pointset_doc(PointSet(ps).get());
    } else if (diff_scan->parsed() || diff_peaks->parsed()) {
      auto* sub = diff_scan->parsed() ? diff_scan : diff_peaks;
      Run run(*sub, diff_scan->parsed() ? "diffract scan" : "diffract peaks");
      const auto ps = load_pointset(run, o.input);
      const size_t d = qd_pointset_dim(ps.get());
      const auto box = box_or_cover(o.box, ps.get());
      run.set("box", { { "lo", box.lo }, { "hi", box.hi } });
      const auto grid = frequency_grid(o.xi, d);
      if (diff_peaks->parsed())
        warn_if_coarse(grid, d, box);
      qd_spectrum* sp = nullptr;
      check(qd_scan(ps.get(), box.lo.data(), box.hi.data(), grid.data(), grid.size() / d, estimator(o.est),
                    o.scales, o.max_radius, o.bin_eps, &sp));
      const Spectrum spec(sp);
      char* out = nullptr;
      if (diff_scan->parsed())
        check(qd_spectrum_to_csv(sp, &out));
      else
        check(qd_spectrum_peaks_csv(sp, ps.get(), box.lo.data(), box.hi.data(), o.floor, o.refine, &out));
      doc = run.csv_doc(take(out));
    } else if (diff_peak->parsed() || conv->parsed()) {
      Run run(diff_peak->parsed() ? *diff_peak : *conv, diff_peak->parsed() ? "diffract peak" : "converge");
      doc = run_peak(run, o);
    } else if (pred_ms->parsed()) {
      Run run(*pred_ms, "predict model-set");
      const auto s = load_scheme(run, o.scheme, o.window);
      auto b = parse_box(o.range, qd_scheme_d_phys(s.get()));
      for (auto& h : b.hi)
        h = std::nextafter(h, std::numeric_limits<double>::infinity());
      qd_peaks* p = nullptr;
      check(qd_dual_peaks(s.get(), b.lo.data(), b.hi.data(), o.floor, o.quad, &p));
      const Peaks peaks(p);
      char* out = nullptr;
      check(qd_peaks_to_csv(p, &out));
      doc = run.csv_doc(take(out));
    } else if (pred_pt->parsed()) {
      Run run(*pred_pt, "predict perturbed");
      const auto model = model_spec(o.model);
      run.set("model", model);
      const auto base = run.read(o.base);
      char* out = nullptr;
      check(qd_predict_perturbed_csv(model.dump().c_str(), base.c_str(), o.n0, &out));
      doc = run.csv_doc(take(out));
    } else if (ww->parsed()) {
      Run run(*ww, "ww");
      const auto word = word_input(run, o.word_file, o.rules, o.length);
      const auto alphas = range(o.alpha);
      const auto offsets = index_list(o.offsets);
      std::vector<size_t> lengths;
      if (o.ww_lengths.empty()) {
        const size_t max_off = *std::max_element(offsets.begin(), offsets.end());
        for (size_t n = 1000; max_off < word.size() && n <= word.size() - max_off; n *= 10)
          lengths.push_back(n);
        if (lengths.empty())
          invalid("word too short for the default lengths; pass --lengths");
      } else {
        lengths = index_list(o.ww_lengths);
      }
      run.set("lengths", lengths);
      char* out = nullptr;
      check(qd_ww_report_json(word.c_str(), o.f.c_str(), alphas.data(), alphas.size(), lengths.data(),
                              lengths.size(), offsets.data(), offsets.size(), &out));
      doc = run.report_doc(json::parse(take(out)));
    } else if (chk_lr->parsed()) {
      Run run(*chk_lr, "check lr");
      const auto word = word_input(run, o.word_file, o.rules, o.length);
      const auto radii = index_list(o.radii);
      char* out = nullptr;
      check(qd_check_lr_json(word.c_str(), radii.data(), radii.size(), &out));
      doc = run.report_doc(json::parse(take(out)));
    } else if (chk_sa->parsed()) {
      Run run(*chk_sa, "check subadditive");
      PointSet ps;
      if (!o.input.empty()) {
        ps = load_pointset(run, o.input);
      } else if (!o.rules.empty()) {
        qd_pointset* raw = nullptr;
        check(qd_pointset_substitution(o.rules.c_str(), o.length, o.lengths.c_str(), 0.0, &raw));
        ps.reset(raw);
      } else {
        invalid("need an input point set or --rules");
      }
      const std::string evaluator = !o.evaluator.empty() ? o.evaluator : (o.xi.empty() ? "volume" : "fourier");
      run.set("f", evaluator);
      std::vector<double> xi;
      if (evaluator == "fourier") {
        if (o.xi.empty())
          invalid("--f fourier needs --xi");
        xi = frequency(o.xi, qd_pointset_dim(ps.get()));
      }
      const auto scales = range(o.fisher_scales);
      char* out = nullptr;
      check(qd_subadditive_json(ps.get(), evaluator.c_str(), xi.empty() ? nullptr : xi.data(), scales.data(),
                                scales.size(), o.samples, o.seed, &out));
      doc = run.report_doc(json::parse(take(out)));
    }
    write_output(out_path, doc);
    return 0;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return QD_ERR_RESOURCE;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return QD_ERR_INTERNAL;
  }
}
