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
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace quasidiff;

TEST_CASE("scheme json")
{
  for (const auto& name : CutProjectScheme::preset_names()) {
    const auto s = CutProjectScheme::preset(name);
    const auto back = io::scheme_from_json(io::scheme_to_json(s));
    CHECK(back.basis() == s.basis());
    CHECK(back.window() == s.window());
    CHECK(io::scheme_to_json(back) == io::scheme_to_json(s));
  }
  const auto j = io::parse_json(R"({"d_phys":1,"d_int":1,"basis":[[1,0],[0,1]],"window":{"lo":[-0.5],"hi":[0.5]},
    "deformation":{"kind":"affine","A":[[0.1]],"b":[0.2]}})", "test");
  const auto s = io::scheme_from_json(j);
  REQUIRE(s.deformation());
  const double y[] = { 1.0 };
  CHECK((*s.deformation())(y)[0] == doctest::Approx(0.3));
  CHECK(io::scheme_to_json(s)["deformation"]["kind"] == "affine");

  const auto t = io::parse_json(R"({"d_phys":1,"d_int":1,"basis":[[1,0],[0,1]],"window":{"lo":[-0.5],"hi":[0.5]},
    "deformation":{"kind":"table","grid":{"lo":[-0.5],"hi":[0.5],"shape":[3]},"values":[[0],[1],[0]]}})", "test");
  const auto st = io::scheme_from_json(t);
  CHECK(io::scheme_to_json(st)["deformation"] == t["deformation"]);

  auto bad = j;
  bad["basis"] = { { 1, 0 } };
  try {
    io::scheme_from_json(bad);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("scheme.basis") != std::string::npos);
  }
  bad = j;
  bad.erase("window");
  CHECK_THROWS_WITH_AS(io::scheme_from_json(bad), doctest::Contains("window"), ValidationError);
  CHECK_THROWS_AS(io::parse_json("{\"a\":", "x"), ValidationError);
  CHECK_THROWS_AS(io::load_scheme("no-such-preset"), ValidationError);
  CHECK(io::load_scheme("fibonacci").covolume() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("model json")
{
  const auto p = io::model_from_json(io::parse_json(R"({"kind":"percolation","p":0.5,"seed":42})", "m"));
  CHECK(p.kind == RandomModel::Kind::percolation);
  CHECK(p.seed == 42);
  const auto d = io::model_from_json(
    io::parse_json(R"({"kind":"displacement","dist":{"kind":"uniform_interval","a":0.1},"seed":7})", "m"));
  CHECK(d.dist.kind == DisplacementDist::Kind::uniform_interval);
  CHECK(d.dist.a == 0.1);
  CHECK(io::model_to_json(d) == io::parse_json(R"({"kind":"displacement","dist":{"kind":"uniform_interval","a":0.1},"seed":7})", "m"));
  const auto tab = io::dist_from_json(io::parse_json(R"({"kind":"table","atoms":[{"shift":[0.1],"prob":1}]})", "d"));
  CHECK(io::dist_to_json(tab)["atoms"][0]["prob"] == 1.0);
  CHECK_THROWS_AS(io::model_from_json(io::parse_json(R"({"kind":"percolation","p":1.5})", "m")), ValidationError);
  CHECK_THROWS_AS(io::model_from_json(io::parse_json(R"({"kind":"gaussian"})", "m")), ValidationError);
}

TEST_CASE("ranges and lists")
{
  CHECK(io::parse_range("0:2.5:0.5") == std::vector<double> { 0, 0.5, 1, 1.5, 2 });
  const auto r = io::parse_range("0:3:0.001");
  CHECK(r.size() == 3000);
  CHECK(r[1234] == 1234 * 0.001);
  CHECK(io::parse_range("1,0.5,2") == std::vector<double> { 1, 0.5, 2 });
  CHECK(io::parse_index_list("3..6") == std::vector<std::size_t> { 3, 4, 5, 6 });
  CHECK(io::parse_index_list("1,10,100") == std::vector<std::size_t> { 1, 10, 100 });
  CHECK_THROWS_AS(io::parse_range("0:1:0"), ValidationError);
  CHECK_THROWS_AS(io::parse_range("0:1"), ValidationError);
  CHECK_THROWS_AS(io::parse_numbers("1,x"), ValidationError);
  CHECK_THROWS_AS(io::parse_range("0:1:1e-12"), ResourceError);
}

TEST_CASE("formatting and hashing")
{
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::content_hash("") == "cbf29ce484222325");
  CHECK(io::content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("intensity csv")
{
  const std::string text = "# {\"version\":\"0.1.0\"}\nxi_1,intensity,estimator\n0,1,fourier\n0.5,0.25,fourier\n";
  const auto rows = io::read_intensity_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].xi == Vec { 0.5 });
  CHECK(rows[1].intensity == 0.25);
  CHECK_FALSE(rows[0].density);
  const auto withn = io::read_intensity_csv("xi_1,intensity,estimator,box_volume,point_count\n1,1,fourier,200,100\n");
  CHECK(withn[0].density == 0.5);
  const auto pred = io::read_intensity_csv("k_1,kstar_1,intensity\n1,0,1\n");
  CHECK(pred[0].xi == Vec { 1.0 });
  CHECK_THROWS_AS(io::read_intensity_csv("a,b\n1,2\n"), ValidationError);
  CHECK_THROWS_AS(io::read_intensity_csv("xi_1,intensity\n1\n"), ValidationError);
}
