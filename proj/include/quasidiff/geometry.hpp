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

#ifndef QUASIDIFF_GEOMETRY_HPP
#define QUASIDIFF_GEOMETRY_HPP

#include "quasidiff/error.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace quasidiff {

  using Vec = std::vector<double>;

  /// Axis-aligned box lo <= x < hi (half-open on every axis). Immutable.
  class Box {
  public:
    Box(Vec lo, Vec hi);

    /// Cube of the given side centered at `center`.
    static Box cube(std::span<const double> center, double side);

    std::size_t dim() const noexcept { return m_lo.size(); }
    const Vec& lo() const noexcept { return m_lo; }
    const Vec& hi() const noexcept { return m_hi; }
    double side(std::size_t j) const { return m_hi[j] - m_lo[j]; }
    Vec sides() const;
    Vec center() const;
    double volume() const noexcept { return m_volume; }

    bool contains(std::span<const double> x) const noexcept;
    // Closed containment of another box, with absolute slack `tol`.
    bool contains(const Box& other, double tol = 0.0) const;

    Box translated(std::span<const double> t) const;
    Box padded(double pad) const;

    bool operator==(const Box&) const = default;

  private:
    Vec m_lo;
    Vec m_hi;
    double m_volume;
  };

  // Growing centered cubes; side of cube n is side0 * growth^n.
  struct VanHoveCubes {
    Vec center;
    double side0 = 1.0;
    double growth = 2.0;
    std::size_t count = 1;
  };

  std::vector<Box> cube_sequence(const VanHoveCubes& vh);

  // Outer/inner slab bound on vol(boundary layer of width pad) / vol(box):
  //   (prod(s_j + 2 pad) - prod(max(s_j - 2 pad, 0))) / prod(s_j).
  double boundary_fraction(const Box& b, double pad);

  // The box family B(r): all side lengths in [r, 2r].
  struct FisherFamily {
    std::size_t dim = 1;
    bool admits(const Box& b, double r, double rel_tol = 1e-12) const;
  };

  // One box per scale. Without a seed every side is 1.5 r and lo = anchor;
  // with a seed, sides are uniform in [r, 2r] and lo = anchor + U[0, r)^d.
  std::vector<Box> fisher_boxes(const FisherFamily& family,
                                std::span<const double> scales,
                                std::span<const double> anchor,
                                std::optional<std::uint64_t> seed = std::nullopt);

}

#endif
