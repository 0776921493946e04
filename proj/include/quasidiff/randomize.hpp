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

#ifndef QUASIDIFF_RANDOMIZE_HPP
#define QUASIDIFF_RANDOMIZE_HPP

#include "quasidiff/pointset.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace quasidiff {

  /// Bounded displacement law. uniform_interval: each axis U[-a, a];
  /// two_point: each axis +a or -a with probability 1/2; table: finite atoms.
  struct DisplacementDist {
    enum class Kind { uniform_interval, two_point, table };
    Kind kind = Kind::uniform_interval;
    double a = 0.0;
    std::vector<std::pair<Vec, double>> atoms;

    static DisplacementDist uniform_interval(double a);
    static DisplacementDist two_point(double a);
    static DisplacementDist table(std::vector<std::pair<Vec, double>> atoms);

    void validate(std::size_t dim) const;
    // Largest possible displacement (Euclidean) in dimension `dim`.
    double max_norm(std::size_t dim) const;
  };

  struct RandomModel {
    enum class Kind { percolation, displacement };
    Kind kind = Kind::percolation;
    double p = 0.5;
    DisplacementDist dist;
    std::uint64_t seed = 0;

    static RandomModel percolation(double p, std::uint64_t seed);
    static RandomModel displacement(DisplacementDist d, std::uint64_t seed);
    void validate() const;
  };

  // Keeps point i iff uniform(seed, i) < p. Requires 0 < p < 1.
  WeightedPointSet percolate(const WeightedPointSet& wps, double p, std::uint64_t seed);

  // Moves point i by an independent draw keyed on (seed, i). The new minimal
  // separation is recorded in meta.params.min_separation.
  WeightedPointSet displace(const WeightedPointSet& wps, const DisplacementDist& dist,
                            std::uint64_t seed);

  // E[exp(-2 pi i xi.X)].
  Complex char_fn(const DisplacementDist& dist, std::span<const double> xi);

  struct PredictedIntensity {
    double point_part = 0.0;
    double diffuse_level = 0.0;
  };

  PredictedIntensity predicted_intensity(const RandomModel& model, double base_intensity,
                                         std::span<const double> xi, double n0);

  struct TrialStats {
    Vec xi;
    std::size_t trials = 0;
    double mean_intensity = 0.0;
    double std_error = 0.0;
    double predicted = 0.0;       // point part from the base patch
    double diffuse_level = 0.0;
    double base_intensity = 0.0;  // |c^xi_B|^2 of the unperturbed patch
    Complex base_amplitude;
    Complex mean_amplitude;       // trial mean of c^xi_B
    double amplitude_std_error = 0.0;
    double n0 = 0.0;
  };

  // Trial t uses seed base_seed + t. Requires trials >= 2.
  TrialStats monte_carlo_intensity(const WeightedPointSet& wps, const RandomModel& model,
                                   const Box& box, std::span<const double> xi,
                                   std::size_t trials, std::uint64_t base_seed);

}

#endif
