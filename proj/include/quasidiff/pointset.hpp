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

#ifndef QUASIDIFF_POINTSET_HPP
#define QUASIDIFF_POINTSET_HPP

#include "quasidiff/error.hpp"
#include "quasidiff/geometry.hpp"

#include <json.hpp>

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quasidiff {

  using Complex = std::complex<double>;

  /// A finite patch of a weighted, uniformly discrete point set in R^d.
  ///
  /// Canonical form: points are sorted lexicographically (weights permuted
  /// along) and pairwise distinct. Coordinates are stored flat, `dim` values
  /// per point. `region`, when present, is the box on which the patch is
  /// known to be complete (set by all generators); averaging boxes are
  /// checked against it.
  class WeightedPointSet {
  public:
    WeightedPointSet(std::size_t dim,
                     std::vector<double> coords,
                     std::vector<Complex> weights = {},
                     nlohmann::json meta = nlohmann::json::object(),
                     std::optional<Box> region = std::nullopt);

    std::size_t dim() const noexcept { return m_dim; }
    std::size_t size() const noexcept { return m_weights.size(); }
    bool empty() const noexcept { return m_weights.empty(); }

    std::span<const double> point(std::size_t i) const
    {
      return { m_coords.data() + i * m_dim, m_dim };
    }
    const std::vector<double>& coords() const noexcept { return m_coords; }
    const std::vector<Complex>& weights() const noexcept { return m_weights; }
    bool unit_weights() const noexcept { return m_unit_weights; }

    const nlohmann::json& meta() const noexcept { return m_meta; }
    const std::optional<Box>& region() const noexcept { return m_region; }

    // The generator region if known, otherwise the closed bounding box of
    // the points widened by one ulp so every point is inside (half-open).
    Box covering_box() const;

    WeightedPointSet with_meta(nlohmann::json meta) const;
    WeightedPointSet with_region(std::optional<Box> region) const;

    bool operator==(const WeightedPointSet& o) const
    {
      return m_dim == o.m_dim && m_coords == o.m_coords && m_weights == o.m_weights;
    }

  private:
    std::size_t m_dim;
    std::vector<double> m_coords;
    std::vector<Complex> m_weights;
    bool m_unit_weights;
    nlohmann::json m_meta;
    std::optional<Box> m_region;
  };

  using Word = std::string;

  class SubstitutionError : public ValidationError {
  public:
    enum class Kind { not_prefix_preserving, not_primitive, unknown_symbol };
    SubstitutionError(Kind k, const std::string& msg) : ValidationError(msg), m_kind(k) {}
    Kind kind() const noexcept { return m_kind; }
  private:
    Kind m_kind;
  };

  /// Substitution rule on single-character symbols, with a geometric length
  /// per symbol for realizing words as 1D chains.
  struct Substitution {
    std::vector<char> alphabet;
    std::map<char, std::string> rules;
    std::map<char, double> lengths;
    char seed = 'a';

    // "fibonacci", "thue-morse", "silver-mean", "period-doubling", or an
    // explicit rule list "a:ab,b:a" (seed = first symbol, unit lengths).
    static Substitution parse(std::string_view spec);

    void validate() const;
    // Incidence matrix raised to the |alphabet|^2 power is entrywise positive.
    bool is_primitive() const;

    Word apply(std::string_view w) const;
    Word iterate(std::string_view w, std::size_t n) const;
  };

  // Prefix of the one-sided fixed point, exactly min_length symbols long.
  Word substitution_fixed_point(const Substitution& s, std::size_t min_length);

  // Left endpoints of the tiles: point i sits at origin + (sum of lengths of
  // letters before i).
  WeightedPointSet word_to_pointset(std::string_view w,
                                    const std::map<char, double>& lengths,
                                    double origin = 0.0);

  // All points of spacing * Z^dim inside the half-open box.
  WeightedPointSet lattice_points(std::size_t dim, const Box& box, double spacing);

  // Sum of weights of the points in `box`, divided by vol(box). Real part of
  // the weight sum is returned.
  double density(const WeightedPointSet& wps, const Box& box);

  // Minimal pairwise Euclidean distance (uniform grid, O(N) expected).
  double min_separation(const WeightedPointSet& wps);

}

#endif
