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

#include "quasidiff/geometry.hpp"
#include "quasidiff/error.hpp"
#include "quasidiff/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quasidiff {

  Box::Box(Vec lo, Vec hi)
    : m_lo(std::move(lo)), m_hi(std::move(hi)), m_volume(1.0)
  {
    QD_REQUIRE(!m_lo.empty(), "box must have dimension >= 1");
    QD_REQUIRE(m_lo.size() == m_hi.size(), "box lo/hi dimension mismatch");
    for (std::size_t j = 0; j < m_lo.size(); ++j) {
      QD_REQUIRE(std::isfinite(m_lo[j]) && std::isfinite(m_hi[j]), "box bounds must be finite");
      QD_REQUIRE(m_lo[j] < m_hi[j], "box requires lo < hi on axis " + std::to_string(j));
      m_volume *= m_hi[j] - m_lo[j];
    }
  }

  Box Box::cube(std::span<const double> center, double side)
  {
    QD_REQUIRE(side > 0, "cube side must be positive");
    Vec lo(center.begin(), center.end()), hi = lo;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] -= 0.5 * side;
      hi[j] += 0.5 * side;
    }
    return { std::move(lo), std::move(hi) };
  }

  Vec Box::sides() const
  {
    Vec s(dim());
    for (std::size_t j = 0; j < dim(); ++j)
      s[j] = side(j);
    return s;
  }

  Vec Box::center() const
  {
    Vec c(dim());
    for (std::size_t j = 0; j < dim(); ++j)
      c[j] = 0.5 * (m_lo[j] + m_hi[j]);
    return c;
  }

  bool Box::contains(std::span<const double> x) const noexcept
  {
    for (std::size_t j = 0; j < m_lo.size(); ++j)
      if (!(x[j] >= m_lo[j] && x[j] < m_hi[j]))
        return false;
    return true;
  }

  bool Box::contains(const Box& other, double tol) const
  {
    QD_REQUIRE(other.dim() == dim(), "box dimension mismatch");
    for (std::size_t j = 0; j < dim(); ++j)
      if (other.m_lo[j] < m_lo[j] - tol || other.m_hi[j] > m_hi[j] + tol)
        return false;
    return true;
  }

  Box Box::translated(std::span<const double> t) const
  {
    QD_REQUIRE(t.size() == dim(), "translation dimension mismatch");
    Vec lo = m_lo, hi = m_hi;
    for (std::size_t j = 0; j < dim(); ++j) {
      lo[j] += t[j];
      hi[j] += t[j];
    }
    return { std::move(lo), std::move(hi) };
  }

  Box Box::padded(double pad) const
  {
    Vec lo = m_lo, hi = m_hi;
    for (std::size_t j = 0; j < dim(); ++j) {
      lo[j] -= pad;
      hi[j] += pad;
    }
    return { std::move(lo), std::move(hi) };
  }

  std::vector<Box> cube_sequence(const VanHoveCubes& vh)
  {
    QD_REQUIRE(!vh.center.empty(), "van Hove center must have dimension >= 1");
    QD_REQUIRE(vh.side0 > 0, "van Hove side0 must be positive");
    QD_REQUIRE(vh.growth > 1, "van Hove growth must exceed 1");
    QD_REQUIRE(vh.count > 0, "van Hove count must be positive");
    std::vector<Box> out;
    out.reserve(vh.count);
    for (std::size_t n = 0; n < vh.count; ++n)
      out.push_back(Box::cube(vh.center, vh.side0 * std::pow(vh.growth, static_cast<double>(n))));
    return out;
  }

  double boundary_fraction(const Box& b, double pad)
  {
    QD_REQUIRE(pad > 0, "boundary pad must be positive");
    double outer = 1.0, inner = 1.0, vol = 1.0;
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const double s = b.side(j);
      outer *= s + 2 * pad;
      inner *= std::max(s - 2 * pad, 0.0);
      vol *= s;
    }
    return (outer - inner) / vol;
  }

  bool FisherFamily::admits(const Box& b, double r, double rel_tol) const
  {
    if (b.dim() != dim)
      return false;
    for (std::size_t j = 0; j < dim; ++j) {
      const double s = b.side(j);
      if (s < r * (1 - rel_tol) || s > 2 * r * (1 + rel_tol))
        return false;
    }
    return true;
  }

  std::vector<Box> fisher_boxes(const FisherFamily& family, std::span<const double> scales,
                                std::span<const double> anchor, std::optional<std::uint64_t> seed)
  {
    QD_REQUIRE(family.dim >= 1, "Fisher family dimension must be >= 1");
    QD_REQUIRE(anchor.size() == family.dim, "anchor dimension mismatch");
    for (std::size_t i = 0; i < scales.size(); ++i) {
      QD_REQUIRE(scales[i] > 0, "Fisher scales must be positive");
      QD_REQUIRE(i == 0 || scales[i] > scales[i - 1], "Fisher scales must be strictly increasing");
    }
    std::vector<Box> out;
    out.reserve(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const double r = scales[i];
      Vec lo(anchor.begin(), anchor.end()), hi(family.dim);
      for (std::size_t j = 0; j < family.dim; ++j) {
        double side = 1.5 * r;
        if (seed) {
          CounterRng rng(*seed);
          const std::uint64_t idx = i * family.dim + j;
          side = r * (1.0 + rng.uniform(idx, 0));
          lo[j] += r * rng.uniform(idx, 1);
        }
        hi[j] = lo[j] + side;
      }
      out.emplace_back(std::move(lo), std::move(hi));
    }
    return out;
  }

}
