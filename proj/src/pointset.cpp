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

#include "quasidiff/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace quasidiff {

  namespace {
    constexpr double kGolden = 1.6180339887498948482;

    struct CellHash {
      std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept
      {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
          h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
      }
    };

    double brute_min_separation(const WeightedPointSet& wps)
    {
      double best = std::numeric_limits<double>::infinity();
      const std::size_t d = wps.dim();
      for (std::size_t i = 0; i < wps.size(); ++i)
        for (std::size_t j = i + 1; j < wps.size(); ++j) {
          double s = 0;
          for (std::size_t a = 0; a < d; ++a) {
            const double t = wps.point(i)[a] - wps.point(j)[a];
            s += t * t;
          }
          best = std::min(best, s);
        }
      return std::sqrt(best);
    }
  }

  WeightedPointSet::WeightedPointSet(std::size_t dim, std::vector<double> coords,
                                     std::vector<Complex> weights, nlohmann::json meta,
                                     std::optional<Box> region)
    : m_dim(dim), m_meta(std::move(meta)), m_region(std::move(region))
  {
    QD_REQUIRE(dim >= 1, "point set dimension must be >= 1");
    QD_REQUIRE(coords.size() % dim == 0, "coordinate count is not a multiple of the dimension");
    const std::size_t n = coords.size() / dim;
    if (weights.empty())
      weights.assign(n, Complex(1.0, 0.0));
    QD_REQUIRE(weights.size() == n, "weight count does not match point count");
    QD_REQUIRE(!m_region || m_region->dim() == dim, "region dimension mismatch");
    for (double c : coords)
      QD_REQUIRE(std::isfinite(c), "point coordinates must be finite");
    for (const auto& w : weights)
      QD_REQUIRE(std::isfinite(w.real()) && std::isfinite(w.imag()), "weights must be finite");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(coords.begin() + a * dim, coords.begin() + (a + 1) * dim,
                                          coords.begin() + b * dim, coords.begin() + (b + 1) * dim);
    };
    if (!std::is_sorted(order.begin(), order.end(), less))
      std::stable_sort(order.begin(), order.end(), less);

    m_coords.resize(coords.size());
    m_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(coords.begin() + order[i] * dim, dim, m_coords.begin() + i * dim);
      m_weights[i] = weights[order[i]];
    }
    for (std::size_t i = 1; i < n; ++i)
      QD_REQUIRE(!std::equal(m_coords.begin() + (i - 1) * dim, m_coords.begin() + i * dim,
                             m_coords.begin() + i * dim),
                 "duplicate point: point sets must be uniformly discrete");
    m_unit_weights = std::all_of(m_weights.begin(), m_weights.end(),
                                 [](const Complex& w) { return w == Complex(1.0, 0.0); });
    if (!m_meta.is_object())
      m_meta = nlohmann::json::object();
  }

  Box WeightedPointSet::covering_box() const
  {
    if (m_region)
      return *m_region;
    QD_REQUIRE(!empty(), "empty point set has no covering box");
    Vec lo(m_dim, std::numeric_limits<double>::infinity());
    Vec hi(m_dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < m_dim; ++j) {
        lo[j] = std::min(lo[j], point(i)[j]);
        hi[j] = std::max(hi[j], point(i)[j]);
      }
    for (auto& h : hi)
      h = std::nextafter(h, std::numeric_limits<double>::infinity());
    return { lo, hi };
  }

  WeightedPointSet WeightedPointSet::with_meta(nlohmann::json meta) const
  {
    WeightedPointSet c = *this;
    c.m_meta = meta.is_object() ? std::move(meta) : nlohmann::json::object();
    return c;
  }

  WeightedPointSet WeightedPointSet::with_region(std::optional<Box> region) const
  {
    QD_REQUIRE(!region || region->dim() == m_dim, "region dimension mismatch");
    WeightedPointSet c = *this;
    c.m_region = std::move(region);
    return c;
  }

  // ---------------------------------------------------------------------------

  Substitution Substitution::parse(std::string_view spec)
  {
    Substitution s;
    if (spec == "fibonacci") {
      s.alphabet = { 'a', 'b' };
      s.rules = { { 'a', "ab" }, { 'b', "a" } };
      s.lengths = { { 'a', kGolden }, { 'b', 1.0 } };
    } else if (spec == "thue-morse") {
      s.alphabet = { 'a', 'b' };
      s.rules = { { 'a', "ab" }, { 'b', "ba" } };
      s.lengths = { { 'a', 1.0 }, { 'b', 1.0 } };
    } else if (spec == "silver-mean") {
      s.alphabet = { 'a', 'b' };
      s.rules = { { 'a', "aab" }, { 'b', "a" } };
      s.lengths = { { 'a', 1.0 + std::sqrt(2.0) }, { 'b', 1.0 } };
    } else if (spec == "period-doubling") {
      s.alphabet = { 'a', 'b' };
      s.rules = { { 'a', "ab" }, { 'b', "aa" } };
      s.lengths = { { 'a', 1.0 }, { 'b', 1.0 } };
    } else {
      // "a:ab,b:a"
      std::size_t pos = 0;
      while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        const auto item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
        const auto colon = item.find(':');
        if (colon != 1 || item.size() < 3)
          throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                  "bad substitution rule '" + std::string(item)
                                    + "' (expected preset name or rules like a:ab,b:a)");
        const char sym = item[0];
        if (s.rules.count(sym))
          throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                  std::string("duplicate rule for symbol ") + sym);
        s.alphabet.push_back(sym);
        s.rules[sym] = std::string(item.substr(2));
        s.lengths[sym] = 1.0;
        if (comma == std::string_view::npos)
          break;
        pos = comma + 1;
      }
    }
    s.seed = s.alphabet.front();
    s.validate();
    return s;
  }

  void Substitution::validate() const
  {
    QD_REQUIRE(!alphabet.empty(), "substitution alphabet is empty");
    for (char c : alphabet) {
      auto it = rules.find(c);
      if (it == rules.end() || it->second.empty())
        throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                std::string("missing or empty rule for symbol ") + c);
      for (char t : it->second)
        if (std::find(alphabet.begin(), alphabet.end(), t) == alphabet.end())
          throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                  std::string("rule for ") + c + " uses unknown symbol " + t);
      auto lt = lengths.find(c);
      QD_REQUIRE(lt != lengths.end() && lt->second > 0 && std::isfinite(lt->second),
                 std::string("symbol ") + c + " needs a positive length");
    }
    if (std::find(alphabet.begin(), alphabet.end(), seed) == alphabet.end())
      throw SubstitutionError(SubstitutionError::Kind::unknown_symbol, "seed symbol not in alphabet");
  }

  bool Substitution::is_primitive() const
  {
    const std::size_t n = alphabet.size();
    auto index = [&](char c) {
      return static_cast<std::size_t>(std::find(alphabet.begin(), alphabet.end(), c) - alphabet.begin());
    };
    // m[i][j]: symbol i occurs in rule(j)
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (std::size_t j = 0; j < n; ++j)
      for (char c : rules.at(alphabet[j]))
        m[index(c)][j] = true;
    auto power = m;
    for (std::size_t step = 1; step < n * n; ++step) {
      std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          if (power[i][k])
            for (std::size_t j = 0; j < n; ++j)
              if (m[k][j])
                next[i][j] = true;
      power = std::move(next);
    }
    for (const auto& row : power)
      for (bool b : row)
        if (!b)
          return false;
    return true;
  }

  Word Substitution::apply(std::string_view w) const
  {
    Word out;
    for (char c : w) {
      auto it = rules.find(c);
      if (it == rules.end())
        throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                std::string("symbol ") + c + " has no rule");
      out += it->second;
    }
    return out;
  }

  Word Substitution::iterate(std::string_view w, std::size_t n) const
  {
    Word cur(w);
    for (std::size_t i = 0; i < n; ++i)
      cur = apply(cur);
    return cur;
  }

  Word substitution_fixed_point(const Substitution& s, std::size_t min_length)
  {
    s.validate();
    QD_REQUIRE(min_length > 0, "min_length must be positive");
    const auto& r = s.rules.at(s.seed);
    if (r.size() < 2 || r.front() != s.seed)
      throw SubstitutionError(SubstitutionError::Kind::not_prefix_preserving,
                              std::string("rule for seed ") + s.seed + " must start with "
                                + s.seed + " and have length >= 2");
    if (!s.is_primitive())
      throw SubstitutionError(SubstitutionError::Kind::not_primitive, "substitution is not primitive");
    // sigma maps prefixes of the fixed point to prefixes, so truncation is safe.
    Word w(1, s.seed);
    while (w.size() < min_length) {
      Word next;
      next.reserve(std::min(min_length, w.size() * 8));
      for (char c : w) {
        next += s.rules.at(c);
        if (next.size() >= min_length)
          break;
      }
      w = std::move(next);
    }
    w.resize(min_length);
    return w;
  }

  WeightedPointSet word_to_pointset(std::string_view w, const std::map<char, double>& lengths,
                                    double origin)
  {
    std::vector<char> symbols;
    std::vector<double> len;
    for (const auto& [c, l] : lengths) {
      QD_REQUIRE(l > 0 && std::isfinite(l), std::string("length of ") + c + " must be positive");
      symbols.push_back(c);
      len.push_back(l);
    }
    std::vector<std::uint64_t> counts(symbols.size(), 0);
    std::vector<double> coords;
    coords.reserve(w.size());
    auto position = [&] {
      double x = origin;
      for (std::size_t s = 0; s < symbols.size(); ++s)
        x += static_cast<double>(counts[s]) * len[s];
      return x;
    };
    for (char c : w) {
      auto it = std::lower_bound(symbols.begin(), symbols.end(), c);
      if (it == symbols.end() || *it != c)
        throw SubstitutionError(SubstitutionError::Kind::unknown_symbol,
                                std::string("no length for symbol ") + c);
      coords.push_back(position());
      ++counts[static_cast<std::size_t>(it - symbols.begin())];
    }
    const double end = position();
    nlohmann::json params = { { "length", w.size() }, { "origin", origin } };
    for (std::size_t s = 0; s < symbols.size(); ++s)
      params["lengths"][std::string(1, symbols[s])] = len[s];
    nlohmann::json meta = { { "generator", "substitution" }, { "params", params }, { "seed", nullptr } };
    std::optional<Box> region;
    if (!w.empty())
      region = Box({ origin }, { end });
    return { 1, std::move(coords), {}, std::move(meta), std::move(region) };
  }

  WeightedPointSet lattice_points(std::size_t dim, const Box& box, double spacing)
  {
    QD_REQUIRE(dim == box.dim(), "lattice dimension does not match box");
    QD_REQUIRE(spacing > 0 && std::isfinite(spacing), "lattice spacing must be positive");
    std::vector<std::int64_t> first(dim), count(dim);
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < dim; ++j) {
      auto k0 = static_cast<std::int64_t>(std::ceil(box.lo()[j] / spacing));
      while (static_cast<double>(k0) * spacing < box.lo()[j])
        ++k0;
      while (static_cast<double>(k0 - 1) * spacing >= box.lo()[j])
        --k0;
      auto k1 = static_cast<std::int64_t>(std::ceil(box.hi()[j] / spacing));
      while (static_cast<double>(k1) * spacing < box.hi()[j])
        ++k1;
      while (static_cast<double>(k1 - 1) * spacing >= box.hi()[j])
        --k1;
      first[j] = k0;
      count[j] = std::max<std::int64_t>(k1 - k0, 0);
      total *= static_cast<std::uint64_t>(count[j]);
    }
    if (total > 100'000'000ull)
      throw ResourceError("lattice patch would exceed 1e8 points");
    std::vector<double> coords;
    coords.reserve(total * dim);
    std::vector<std::int64_t> idx(dim, 0);
    for (std::uint64_t n = 0; n < total; ++n) {
      for (std::size_t j = 0; j < dim; ++j)
        coords.push_back(static_cast<double>(first[j] + idx[j]) * spacing);
      for (std::size_t j = dim; j-- > 0;) {
        if (++idx[j] < count[j])
          break;
        idx[j] = 0;
      }
    }
    nlohmann::json meta = { { "generator", "lattice" },
                            { "params", { { "dim", dim }, { "spacing", spacing } } },
                            { "seed", nullptr } };
    return { dim, std::move(coords), {}, std::move(meta), box };
  }

  double density(const WeightedPointSet& wps, const Box& box)
  {
    QD_REQUIRE(box.dim() == wps.dim(), "density: box dimension mismatch");
    if (!wps.empty() || wps.region()) {
      const Box cover = wps.covering_box();
      double scale = 0;
      for (std::size_t j = 0; j < box.dim(); ++j)
        scale = std::max({ scale, std::abs(cover.lo()[j]), std::abs(cover.hi()[j]) });
      QD_REQUIRE(cover.contains(box, 1e-12 * std::max(scale, 1.0)),
                 "density: box exceeds the region covered by the patch");
    }
    double sum = 0, comp = 0;
    for (std::size_t i = 0; i < wps.size(); ++i)
      if (box.contains(wps.point(i))) {
        const double y = wps.weights()[i].real() - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
    return sum / box.volume();
  }

  double min_separation(const WeightedPointSet& wps)
  {
    QD_REQUIRE(wps.size() >= 2, "min_separation needs at least two points");
    const std::size_t d = wps.dim();
    if (d == 1) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < wps.size(); ++i)
        best = std::min(best, wps.point(i)[0] - wps.point(i - 1)[0]);
      return best;
    }
    if (wps.size() <= 64)
      return brute_min_separation(wps);

    Vec lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < wps.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::min(lo[j], wps.point(i)[j]);
        hi[j] = std::max(hi[j], wps.point(i)[j]);
      }
    double extent = 0, vol = 1;
    for (std::size_t j = 0; j < d; ++j) {
      extent = std::max(extent, hi[j] - lo[j]);
      vol *= std::max(hi[j] - lo[j], 1e-300);
    }
    double h = std::pow(vol / static_cast<double>(wps.size()), 1.0 / static_cast<double>(d));
    if (!(h > 0) || !std::isfinite(h))
      h = extent / static_cast<double>(wps.size());

    while (h < extent) {
      std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> grid;
      std::vector<std::int64_t> key(d);
      for (std::size_t i = 0; i < wps.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j)
          key[j] = static_cast<std::int64_t>(std::floor((wps.point(i)[j] - lo[j]) / h));
        grid[key].push_back(i);
      }
      double best2 = std::numeric_limits<double>::infinity();
      std::vector<std::int64_t> nb(d), off(d);
      for (const auto& [cell, members] : grid) {
        std::fill(off.begin(), off.end(), -1);
        while (true) {
          for (std::size_t j = 0; j < d; ++j)
            nb[j] = cell[j] + off[j];
          auto it = grid.find(nb);
          if (it != grid.end())
            for (std::size_t a : members)
              for (std::size_t b : it->second)
                if (a < b) {
                  double s = 0;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double t = wps.point(a)[j] - wps.point(b)[j];
                    s += t * t;
                  }
                  best2 = std::min(best2, s);
                }
          std::size_t j = 0;
          while (j < d && ++off[j] > 1)
            off[j++] = -1;
          if (j == d)
            break;
        }
      }
      if (std::sqrt(best2) <= h)
        return std::sqrt(best2);
      h *= 2;
    }
    return brute_min_separation(wps);
  }

}
