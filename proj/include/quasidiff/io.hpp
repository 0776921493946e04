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

#ifndef QUASIDIFF_IO_HPP
#define QUASIDIFF_IO_HPP

#include "quasidiff/cutproject.hpp"
#include "quasidiff/diffraction.hpp"
#include "quasidiff/pointset.hpp"
#include "quasidiff/randomize.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quasidiff::io {

  using nlohmann::json;

  inline constexpr const char* version = "0.1.0";

  json box_to_json(const Box& b);
  Box box_from_json(const json& j, std::string_view where = "box");

  // {"dim", "points", "weights" (omitted for unit weights), "meta"}; the
  // region, if any, is carried as meta.region.
  json pointset_to_json(const WeightedPointSet& wps);
  WeightedPointSet pointset_from_json(const json& j);

  json scheme_to_json(const CutProjectScheme& s);
  CutProjectScheme scheme_from_json(const json& j);
  // Preset name or a JSON file path.
  CutProjectScheme load_scheme(std::string_view preset_or_path);

  json deformation_to_json(const Deformation& d);
  Deformation deformation_from_json(const json& j, std::size_t d_phys, std::size_t d_int);

  json model_to_json(const RandomModel& m);
  RandomModel model_from_json(const json& j);
  DisplacementDist dist_from_json(const json& j);
  json dist_to_json(const DisplacementDist& d);

  std::string read_file(const std::string& path);
  void write_file(const std::string& path, std::string_view content);
  json parse_json(std::string_view text, std::string_view what);

  // FNV-1a 64-bit, lower-case hex.
  std::string content_hash(std::string_view bytes);

  // 17 significant digits.
  std::string format_double(double v);

  // "start:stop:step" -> start + i*step for start + i*step < stop, or a
  // comma list of values.
  std::vector<double> parse_range(std::string_view spec);
  // "1..100" (inclusive) or a comma list.
  std::vector<std::size_t> parse_index_list(std::string_view spec);
  // "a,b,c" -> numbers.
  std::vector<double> parse_numbers(std::string_view spec);

  // Rows of a spectrum or prediction CSV: frequency columns (xi_* or k_*)
  // and the intensity column. Lines starting with '#' are skipped. When the
  // point_count and box_volume columns exist, density is their ratio.
  struct IntensityRow {
    Vec xi;
    double intensity = 0.0;
    std::optional<double> density;
  };
  std::vector<IntensityRow> read_intensity_csv(std::string_view text);

}

#endif
