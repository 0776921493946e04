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
#include "quasidiff/pointset.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace quasidiff;

TEST_CASE("lattice points")
{
  const auto z = lattice_points(1, Box({ 0.0 }, { 5.0 }), 1.0);
  CHECK(z.coords() == std::vector<double> { 0, 1, 2, 3, 4 });
  CHECK(lattice_points(2, Box({ 0.0, 0.0 }, { 2.0, 2.0 }), 1.0).size() == 4);
  CHECK(lattice_points(3, Box({ -1.0, 0.0, 0.2 }, { 2.5, 1.0, 3.0 }), 0.5).size() == 7 * 2 * 5);
  CHECK(z.meta()["generator"] == "lattice");
  CHECK_THROWS_AS(lattice_points(1, Box({ 0.0 }, { 1e9 }), 1e-3), ResourceError);
}

TEST_CASE("canonical form and invariants")
{
  const WeightedPointSet w(2, { 1, 0, 0, 5, 0, 1 });
  CHECK(w.coords() == std::vector<double> { 0, 1, 0, 5, 1, 0 });
  CHECK_THROWS_AS(WeightedPointSet(1, { 1, 2, 1 }), ValidationError);
  CHECK_THROWS_AS(WeightedPointSet(1, { 1, NAN }), ValidationError);
  CHECK_THROWS_AS(WeightedPointSet(1, { 1, 2 }, { 1.0 }), ValidationError);
}

TEST_CASE("substitution fixed points")
{
  CHECK(substitution_fixed_point(Substitution::parse("fibonacci"), 8) == "abaababa");
  CHECK(substitution_fixed_point(Substitution::parse("thue-morse"), 4) == "abba");
  CHECK(substitution_fixed_point(Substitution::parse("a:ab,b:a"), 13) == "abaababaabaab");

  const auto fib = Substitution::parse("fibonacci");
  std::size_t f1 = 1, f2 = 2;  // F_2, F_3
  for (std::size_t n = 0; n <= 20; ++n) {
    CHECK(fib.iterate("a", n).size() == f1);
    const std::size_t f3 = f1 + f2;
    f1 = f2;
    f2 = f3;
  }

  const auto w = substitution_fixed_point(fib, 100000);
  const double fa = static_cast<double>(std::count(w.begin(), w.end(), 'a')) / w.size();
  CHECK(fa == doctest::Approx(1 / qdtest::tau).epsilon(1e-3));
  CHECK((1 - fa) == doctest::Approx(1 / (qdtest::tau * qdtest::tau)).epsilon(1e-3));
}

TEST_CASE("substitution errors are distinct")
{
  try {
    substitution_fixed_point(Substitution::parse("a:ba,b:a"), 10);
    FAIL("expected an error");
  } catch (const SubstitutionError& e) {
    CHECK(e.kind() == SubstitutionError::Kind::not_prefix_preserving);
  }
  try {
    substitution_fixed_point(Substitution::parse("a:ab,b:b"), 10);
    FAIL("expected an error");
  } catch (const SubstitutionError& e) {
    CHECK(e.kind() == SubstitutionError::Kind::not_primitive);
  }
  CHECK_THROWS_AS(Substitution::parse("a:ac,b:a"), SubstitutionError);
}

TEST_CASE("word to point set")
{
  CHECK(word_to_pointset("ab", { { 'a', 2.0 }, { 'b', 1.0 } }).coords() == std::vector<double> { 0, 2 });
  CHECK(word_to_pointset("aaa", { { 'a', 1.0 } }).coords() == std::vector<double> { 0, 1, 2 });
  CHECK_THROWS_AS(word_to_pointset("abc", { { 'a', 1.0 }, { 'b', 1.0 } }), ValidationError);

  // concatenation consistency
  const std::map<char, double> len { { 'a', qdtest::tau }, { 'b', 1.0 } };
  const auto whole = word_to_pointset("abaababa", len);
  const auto left = word_to_pointset("abaab", len);
  const auto right = word_to_pointset("aba", len, 3 * qdtest::tau + 2);
  std::vector<double> joined = left.coords();
  joined.insert(joined.end(), right.coords().begin(), right.coords().end());
  REQUIRE(joined.size() == whole.size());
  for (std::size_t i = 0; i < joined.size(); ++i)
    CHECK(joined[i] == doctest::Approx(whole.coords()[i]).epsilon(1e-12));
}

TEST_CASE("fibonacci chain agrees with the fibonacci model set")
{
  const auto w = substitution_fixed_point(Substitution::parse("fibonacci"), 1000);
  const auto chain = word_to_pointset(w, { { 'a', qdtest::tau }, { 'b', 1.0 } });
  const double end = chain.coords().back();
  const auto ms = qdtest::fibonacci_patch(end + 0.5);
  REQUIRE(ms.size() == chain.size());
  for (std::size_t i = 0; i < ms.size(); ++i)
    REQUIRE(std::abs(ms.coords()[i] - chain.coords()[i]) < 1e-9);
}

TEST_CASE("density")
{
  const auto z = qdtest::integers(0, 1000);
  CHECK(density(z, Box({ 0.0 }, { 1000.0 })) == doctest::Approx(1.0));
  const WeightedPointSet half(1, z.coords(), std::vector<Complex>(z.size(), 0.5), {}, z.region());
  CHECK(density(half, Box({ 0.0 }, { 1000.0 })) == doctest::Approx(0.5));
  const auto fib = qdtest::fibonacci_patch(1e5);
  CHECK(density(fib, Box({ 0.0 }, { 1e5 })) == doctest::Approx(qdtest::tau / std::sqrt(5.0)).epsilon(1e-3));
  CHECK_THROWS_AS(density(z, Box({ -5.0 }, { 10.0 })), ValidationError);

  // lattice density approaches spacing^-dim
  for (double s : { 10.0, 100.0, 1000.0 }) {
    const auto l = lattice_points(2, Box({ 0.1, 0.1 }, { s, s }), 0.5);
    const Box b({ 0.1, 0.1 }, { s, s });
    CHECK(std::abs(density(l, b) - 4.0) <= 4.0 * boundary_fraction(b, 0.5));
  }
}

TEST_CASE("min separation")
{
  CHECK(min_separation(qdtest::integers(0, 100)) == 1.0);
  const auto fib = qdtest::fibonacci_patch(2000);
  CHECK(min_separation(fib) == doctest::Approx(1.0).epsilon(1e-12));
  const auto grid = lattice_points(2, Box({ 0.0, 0.0 }, { 30.0, 30.0 }), 0.7);
  CHECK(min_separation(grid) == doctest::Approx(0.7));
  std::vector<double> c = grid.coords();
  c.push_back(10.0);
  c.push_back(10.001);
  CHECK(min_separation(WeightedPointSet(2, c)) == doctest::Approx(std::hypot(10 - 9.8, 10.001 - 9.8)));
  CHECK_THROWS_AS(min_separation(qdtest::integers(0, 1)), ValidationError);
}

TEST_CASE("json round trip is the identity")
{
  const auto fib = qdtest::fibonacci_patch(500);
  const auto text = io::pointset_to_json(fib).dump();
  const auto back = io::pointset_from_json(io::parse_json(text, "test"));
  CHECK(back == fib);
  CHECK(back.region() == fib.region());
  CHECK(io::pointset_to_json(back).dump() == text);

  const WeightedPointSet w(2, { 0, 0, 1, 0.5 }, { Complex(1, -2), Complex(0.25, 0) });
  const auto wb = io::pointset_from_json(io::pointset_to_json(w));
  CHECK(wb == w);
  CHECK(io::pointset_to_json(w).contains("weights"));
  CHECK_FALSE(io::pointset_to_json(fib).contains("weights"));

  auto unsorted = io::parse_json(R"({"dim":1,"points":[[2],[1]]})", "test");
  CHECK_THROWS_AS(io::pointset_from_json(unsorted), ValidationError);
}
