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

#include "quasidiff/error.hpp"
#include "quasidiff/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace quasidiff;

TEST_CASE("box basics")
{
  const Box b({ 0.0, -1.0 }, { 2.0, 3.0 });
  CHECK(b.dim() == 2);
  CHECK(b.volume() == doctest::Approx(8.0));
  CHECK(b.contains(Vec { 0.0, -1.0 }));
  CHECK_FALSE(b.contains(Vec { 2.0, 0.0 }));
  CHECK(b.center() == Vec { 1.0, 1.0 });
  CHECK_THROWS_AS(Box({ 1.0 }, { 1.0 }), ValidationError);
  CHECK_THROWS_AS(Box({ 0.0 }, { NAN }), ValidationError);
  CHECK_THROWS_AS(Box({ 0.0, 0.0 }, { 1.0 }), ValidationError);
}

TEST_CASE("cube sequence is nested")
{
  const auto cubes = cube_sequence({ { 0.5, -2.0 }, 1.0, 2.0, 8 });
  REQUIRE(cubes.size() == 8);
  CHECK(cubes[3].side(0) == doctest::Approx(8.0));
  for (std::size_t n = 0; n + 1 < cubes.size(); ++n)
    CHECK(cubes[n + 1].contains(cubes[n]));
  CHECK_THROWS_AS(cube_sequence({ { 0.0 }, 1.0, 1.0, 3 }), ValidationError);
  CHECK_THROWS_AS(cube_sequence({ { 0.0 }, 0.0, 2.0, 3 }), ValidationError);
}

TEST_CASE("boundary fraction")
{
  CHECK(boundary_fraction(Box({ 0.0 }, { 10.0 }), 1.0) == doctest::Approx(0.4));
  double prev = INFINITY;
  for (double s = 4; s < 1e6; s *= 1.7) {
    const double f = boundary_fraction(Box({ 0.0, 0.0 }, { s, s }), 1.0);
    CHECK(f < prev);
    prev = f;
  }
  CHECK(prev < 2e-5);
  // pad >= s/2: the inner box vanishes
  CHECK(boundary_fraction(Box({ 0.0 }, { 2.0 }), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("fisher boxes")
{
  const double scales[] = { 1, 2, 4 };
  const double anchor[] = { 0 };
  const auto det = fisher_boxes({ 1 }, scales, anchor);
  REQUIRE(det.size() == 3);
  CHECK(det[0] == Box({ 0.0 }, { 1.5 }));
  CHECK(det[1] == Box({ 0.0 }, { 3.0 }));
  CHECK(det[2] == Box({ 0.0 }, { 6.0 }));

  const double anchor2[] = { 3, -7 };
  const auto a = fisher_boxes({ 2 }, scales, anchor2, 99);
  const auto b = fisher_boxes({ 2 }, scales, anchor2, 99);
  CHECK(a == b);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(FisherFamily { 2 }.admits(a[i], scales[i]));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(a[i].side(j) >= scales[i]);
      CHECK(a[i].side(j) <= 2 * scales[i]);
    }
  }
  CHECK(fisher_boxes({ 2 }, scales, anchor2, 100) != a);
  const double bad[] = { 2, 1 };
  CHECK_THROWS_AS(fisher_boxes({ 1 }, bad, anchor), ValidationError);
}
