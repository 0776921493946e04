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

#ifndef QUASIDIFF_TESTS_SUPPORT_HPP
#define QUASIDIFF_TESTS_SUPPORT_HPP

#include "quasidiff/cutproject.hpp"
#include "quasidiff/pointset.hpp"

#include <cmath>
#include <vector>

namespace qdtest {

  inline const double tau = (1.0 + std::sqrt(5.0)) / 2.0;

  inline quasidiff::WeightedPointSet integers(double lo, double hi)
  {
    return quasidiff::lattice_points(1, quasidiff::Box({ lo }, { hi }), 1.0);
  }

  // Fibonacci model set on [0, length).
  inline quasidiff::WeightedPointSet fibonacci_patch(double length)
  {
    return quasidiff::model_set(quasidiff::CutProjectScheme::preset("fibonacci"),
                                quasidiff::Box({ 0.0 }, { length }));
  }

  inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}

#endif
