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

#include "quasidiff/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace quasidiff::io {

  namespace {

    [[noreturn]] void fail(std::string_view where, const std::string& what)
    {
      throw ValidationError(std::string(where) + ": " + what);
    }

    const json& field(const json& j, const char* key, std::string_view where)
    {
      if (!j.is_object() || !j.contains(key))
        fail(where, std::string("missing field '") + key + "'");
      return j.at(key);
    }

    double number(const json& j, std::string_view where)
    {
      if (!j.is_number())
        fail(where, "expected a number");
      return j.get<double>();
    }

    std::size_t count(const json& j, std::string_view where)
    {
      if (!j.is_number_integer() || j.get<std::int64_t>() < 1)
        fail(where, "expected a positive integer");
      return j.get<std::size_t>();
    }

    Vec numbers(const json& j, std::string_view where)
    {
      if (!j.is_array())
        fail(where, "expected an array of numbers");
      Vec v;
      for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(number(j[i], std::string(where) + "[" + std::to_string(i) + "]"));
      return v;
    }

    Eigen::MatrixXd matrix(const json& j, std::size_t rows, std::size_t cols, std::string_view where)
    {
      if (!j.is_array() || j.size() != rows)
        fail(where, "expected " + std::to_string(rows) + " rows");
      Eigen::MatrixXd m(rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::string w = std::string(where) + "[" + std::to_string(r) + "]";
        const Vec row = numbers(j[r], w);
        if (row.size() != cols)
          fail(w, "expected " + std::to_string(cols) + " columns");
        for (std::size_t c = 0; c < cols; ++c)
          m(r, c) = row[c];
      }
      return m;
    }

    json matrix_json(const Eigen::MatrixXd& m)
    {
      json rows = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          row.push_back(m(r, c));
        rows.push_back(row);
      }
      return rows;
    }

    std::string_view trim(std::string_view s)
    {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
      return s;
    }

    double to_double(std::string_view s)
    {
      s = trim(s);
      double v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        throw ValidationError("not a finite number: '" + std::string(s) + "'");
      return v;
    }

    std::size_t to_index(std::string_view s)
    {
      s = trim(s);
      std::size_t v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw ValidationError("not a non-negative integer: '" + std::string(s) + "'");
      return v;
    }

    std::vector<std::string_view> split(std::string_view s, char sep)
    {
      std::vector<std::string_view> out;
      std::size_t start = 0;
      while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
          break;
        start = pos + 1;
      }
      return out;
    }

  }

  json box_to_json(const Box& b)
  {
    return { { "lo", b.lo() }, { "hi", b.hi() } };
  }

  Box box_from_json(const json& j, std::string_view where)
  {
    const std::string w(where);
    Vec lo = numbers(field(j, "lo", where), w + ".lo");
    Vec hi = numbers(field(j, "hi", where), w + ".hi");
    if (lo.size() != hi.size() || lo.empty())
      fail(where, "lo and hi must be non-empty and of equal length");
    try {
      return { std::move(lo), std::move(hi) };
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }

  json pointset_to_json(const WeightedPointSet& wps)
  {
    json pts = json::array();
    for (std::size_t i = 0; i < wps.size(); ++i) {
      const auto p = wps.point(i);
      pts.push_back(Vec(p.begin(), p.end()));
    }
    json j = { { "dim", wps.dim() }, { "points", std::move(pts) } };
    if (!wps.unit_weights()) {
      json w = json::array();
      for (const auto& c : wps.weights())
        w.push_back({ c.real(), c.imag() });
      j["weights"] = std::move(w);
    }
    json meta = wps.meta().is_object() ? wps.meta() : json::object();
    if (wps.region())
      meta["region"] = box_to_json(*wps.region());
    j["meta"] = std::move(meta);
    return j;
  }

  WeightedPointSet pointset_from_json(const json& j)
  {
    const std::size_t d = count(field(j, "dim", "pointset"), "pointset.dim");
    const json& pts = field(j, "points", "pointset");
    if (!pts.is_array())
      fail("pointset.points", "expected an array");
    std::vector<double> coords;
    coords.reserve(pts.size() * d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string w = "pointset.points[" + std::to_string(i) + "]";
      const Vec p = numbers(pts[i], w);
      if (p.size() != d)
        fail(w, "expected " + std::to_string(d) + " coordinates");
      if (i > 0 && !std::lexicographical_compare(coords.end() - static_cast<std::ptrdiff_t>(d), coords.end(),
                                                 p.begin(), p.end()))
        fail(w, "points must be strictly lexicographically sorted");
      coords.insert(coords.end(), p.begin(), p.end());
    }
    std::vector<Complex> weights;
    if (j.contains("weights")) {
      const json& wj = j.at("weights");
      if (!wj.is_array() || wj.size() != pts.size())
        fail("pointset.weights", "expected one [re, im] pair per point");
      for (std::size_t i = 0; i < wj.size(); ++i) {
        const std::string w = "pointset.weights[" + std::to_string(i) + "]";
        const Vec c = numbers(wj[i], w);
        if (c.size() != 2)
          fail(w, "expected [re, im]");
        weights.emplace_back(c[0], c[1]);
      }
    }
    json meta = j.contains("meta") ? j.at("meta") : json::object();
    if (!meta.is_object())
      fail("pointset.meta", "expected an object");
    std::optional<Box> region;
    if (meta.contains("region") && !meta.at("region").is_null()) {
      region = box_from_json(meta.at("region"), "pointset.meta.region");
      if (region->dim() != d)
        fail("pointset.meta.region", "dimension does not match dim");
    }
    return { d, std::move(coords), std::move(weights), std::move(meta), std::move(region) };
  }

  json deformation_to_json(const Deformation& d)
  {
    if (d.kind() == Deformation::Kind::affine)
      return { { "kind", "affine" }, { "A", matrix_json(d.A()) }, { "b", d.b() } };
    json vals = json::array();
    const std::size_t dp = d.d_phys();
    for (std::size_t i = 0; i < d.values().size(); i += dp)
      vals.push_back(Vec(d.values().begin() + static_cast<std::ptrdiff_t>(i),
                         d.values().begin() + static_cast<std::ptrdiff_t>(i + dp)));
    json grid = box_to_json(*d.grid());
    grid["shape"] = d.shape();
    return { { "kind", "table" }, { "grid", grid }, { "values", vals } };
  }

  Deformation deformation_from_json(const json& j, std::size_t d_phys, std::size_t d_int)
  {
    const json& kind = field(j, "kind", "deformation");
    if (kind == "affine") {
      auto A = matrix(field(j, "A", "deformation"), d_phys, d_int, "deformation.A");
      Vec b = j.contains("b") ? numbers(j.at("b"), "deformation.b") : Vec(d_phys, 0.0);
      if (b.size() != d_phys)
        fail("deformation.b", "expected " + std::to_string(d_phys) + " entries");
      return Deformation::affine(std::move(A), std::move(b));
    }
    if (kind == "table") {
      const json& g = field(j, "grid", "deformation");
      Box grid = box_from_json(g, "deformation.grid");
      if (grid.dim() != d_int)
        fail("deformation.grid", "dimension must equal d_int");
      const json& sj = field(g, "shape", "deformation.grid");
      if (!sj.is_array() || sj.size() != d_int)
        fail("deformation.grid.shape", "expected " + std::to_string(d_int) + " node counts");
      std::vector<std::size_t> shape;
      for (std::size_t i = 0; i < sj.size(); ++i)
        shape.push_back(count(sj[i], "deformation.grid.shape[" + std::to_string(i) + "]"));
      const json& vj = field(j, "values", "deformation");
      if (!vj.is_array())
        fail("deformation.values", "expected an array of vectors");
      std::vector<double> vals;
      for (std::size_t i = 0; i < vj.size(); ++i) {
        const std::string w = "deformation.values[" + std::to_string(i) + "]";
        const Vec v = numbers(vj[i], w);
        if (v.size() != d_phys)
          fail(w, "expected " + std::to_string(d_phys) + " components");
        vals.insert(vals.end(), v.begin(), v.end());
      }
      return Deformation::table(std::move(grid), std::move(shape), std::move(vals), d_phys);
    }
    fail("deformation.kind", "expected \"affine\" or \"table\"");
  }

  json scheme_to_json(const CutProjectScheme& s)
  {
    json j = { { "d_phys", s.d_phys() },
               { "d_int", s.d_int() },
               { "basis", matrix_json(s.basis()) },
               { "window", box_to_json(s.window()) },
               { "deformation", nullptr } };
    if (s.deformation())
      j["deformation"] = deformation_to_json(*s.deformation());
    return j;
  }

  CutProjectScheme scheme_from_json(const json& j)
  {
    const std::size_t d = count(field(j, "d_phys", "scheme"), "scheme.d_phys");
    const std::size_t m = count(field(j, "d_int", "scheme"), "scheme.d_int");
    auto basis = matrix(field(j, "basis", "scheme"), d + m, d + m, "scheme.basis");
    Box window = box_from_json(field(j, "window", "scheme"), "scheme.window");
    if (window.dim() != m)
      fail("scheme.window", "dimension must equal d_int");
    std::optional<Deformation> def;
    if (j.contains("deformation") && !j.at("deformation").is_null())
      def = deformation_from_json(j.at("deformation"), d, m);
    return { d, m, std::move(basis), std::move(window), std::move(def) };
  }

  CutProjectScheme load_scheme(std::string_view preset_or_path)
  {
    const auto names = CutProjectScheme::preset_names();
    if (std::find(names.begin(), names.end(), preset_or_path) != names.end())
      return CutProjectScheme::preset(preset_or_path);
    const std::string path(preset_or_path);
    if (!std::filesystem::exists(path)) {
      std::string known;
      for (const auto& n : names)
        known += (known.empty() ? "" : ", ") + n;
      throw ValidationError("unknown scheme '" + path + "' (not a file; presets: " + known + ")");
    }
    return scheme_from_json(parse_json(read_file(path), path));
  }

  json dist_to_json(const DisplacementDist& d)
  {
    switch (d.kind) {
      case DisplacementDist::Kind::uniform_interval:
        return { { "kind", "uniform_interval" }, { "a", d.a } };
      case DisplacementDist::Kind::two_point:
        return { { "kind", "two_point" }, { "a", d.a } };
      case DisplacementDist::Kind::table: {
        json atoms = json::array();
        for (const auto& [v, p] : d.atoms)
          atoms.push_back({ { "shift", v }, { "prob", p } });
        return { { "kind", "table" }, { "atoms", atoms } };
      }
    }
    return nullptr;
  }

  DisplacementDist dist_from_json(const json& j)
  {
    const json& kind = field(j, "kind", "dist");
    if (kind == "uniform_interval")
      return DisplacementDist::uniform_interval(number(field(j, "a", "dist"), "dist.a"));
    if (kind == "two_point")
      return DisplacementDist::two_point(number(field(j, "a", "dist"), "dist.a"));
    if (kind == "table") {
      const json& aj = field(j, "atoms", "dist");
      if (!aj.is_array())
        fail("dist.atoms", "expected an array");
      std::vector<std::pair<Vec, double>> atoms;
      for (std::size_t i = 0; i < aj.size(); ++i) {
        const std::string w = "dist.atoms[" + std::to_string(i) + "]";
        atoms.emplace_back(numbers(field(aj[i], "shift", w), w + ".shift"),
                           number(field(aj[i], "prob", w), w + ".prob"));
      }
      return DisplacementDist::table(std::move(atoms));
    }
    fail("dist.kind", "expected \"uniform_interval\", \"two_point\" or \"table\"");
  }

  json model_to_json(const RandomModel& m)
  {
    if (m.kind == RandomModel::Kind::percolation)
      return { { "kind", "percolation" }, { "p", m.p }, { "seed", m.seed } };
    return { { "kind", "displacement" }, { "dist", dist_to_json(m.dist) }, { "seed", m.seed } };
  }

  RandomModel model_from_json(const json& j)
  {
    const json& kind = field(j, "kind", "model");
    std::uint64_t seed = 0;
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() >= 0))
        fail("model.seed", "expected a non-negative integer");
      seed = j.at("seed").get<std::uint64_t>();
    }
    RandomModel m;
    if (kind == "percolation")
      m = RandomModel::percolation(number(field(j, "p", "model"), "model.p"), seed);
    else if (kind == "displacement")
      m = RandomModel::displacement(dist_from_json(field(j, "dist", "model")), seed);
    else
      fail("model.kind", "expected \"percolation\" or \"displacement\"");
    m.validate();
    return m;
  }

  std::string read_file(const std::string& path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ResourceError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write_file(const std::string& path, std::string_view content)
  {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw ResourceError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw ResourceError("write to '" + path + "' failed");
  }

  json parse_json(std::string_view text, std::string_view what)
  {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string(what) + ": malformed JSON: " + e.what());
    }
  }

  std::string content_hash(std::string_view bytes)
  {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  std::string format_double(double v)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  std::vector<double> parse_range(std::string_view spec)
  {
    const auto parts = split(spec, ':');
    if (parts.size() == 1)
      return parse_numbers(spec);
    if (parts.size() != 3)
      throw ValidationError("range '" + std::string(spec) + "' must be start:stop:step");
    const double start = to_double(parts[0]), stop = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0))
      throw ValidationError("range step must be positive");
    if (!(stop > start))
      throw ValidationError("range stop must exceed start");
    const double n = std::ceil((stop - start) / step);
    if (n > 1e8)
      throw ResourceError("range '" + std::string(spec) + "' has too many points");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v >= stop)
        break;
      out.push_back(v);
    }
    return out;
  }

  std::vector<std::size_t> parse_index_list(std::string_view spec)
  {
    const auto dots = spec.find("..");
    std::vector<std::size_t> out;
    if (dots != std::string_view::npos) {
      const std::size_t a = to_index(spec.substr(0, dots)), b = to_index(spec.substr(dots + 2));
      if (b < a)
        throw ValidationError("index range '" + std::string(spec) + "' is empty");
      if (b - a > 100'000'000)
        throw ResourceError("index range '" + std::string(spec) + "' is too long");
      for (std::size_t i = a; i <= b; ++i)
        out.push_back(i);
      return out;
    }
    for (auto p : split(spec, ','))
      out.push_back(to_index(p));
    return out;
  }

  std::vector<double> parse_numbers(std::string_view spec)
  {
    std::vector<double> out;
    for (auto p : split(spec, ','))
      out.push_back(to_double(p));
    return out;
  }

  std::vector<IntensityRow> read_intensity_csv(std::string_view text)
  {
    std::vector<IntensityRow> rows;
    std::vector<std::size_t> freq;
    std::size_t icol = std::string_view::npos;
    std::size_t ncol = std::string_view::npos, vcol = std::string_view::npos;
    bool header = false;
    std::size_t lineno = 0;
    for (auto line : split(text, '\n')) {
      ++lineno;
      if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
      if (trim(line).empty() || line.front() == '#')
        continue;
      const auto cells = split(line, ',');
      if (!header) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          const auto name = trim(cells[c]);
          if (name.starts_with("xi_") || name.starts_with("k_"))
            freq.push_back(c);
          else if (name == "intensity" || name == "predicted_intensity")
            icol = c;
          else if (name == "point_count")
            ncol = c;
          else if (name == "box_volume")
            vcol = c;
        }
        if (freq.empty() || icol == std::string_view::npos)
          throw ValidationError("CSV header needs xi_*/k_* columns and an intensity column");
        header = true;
        continue;
      }
      if (cells.size() <= std::max(icol, freq.back()))
        throw ValidationError("CSV line " + std::to_string(lineno) + " has too few columns");
      IntensityRow r;
      try {
        for (std::size_t c : freq)
          r.xi.push_back(to_double(cells[c]));
        r.intensity = to_double(cells[icol]);
        if (ncol < cells.size() && vcol < cells.size())
          r.density = to_double(cells[ncol]) / to_double(cells[vcol]);
      } catch (const ValidationError& e) {
        throw ValidationError("CSV line " + std::to_string(lineno) + ": " + e.what());
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

}
