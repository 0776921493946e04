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

#include "quasidiff/cutproject.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace quasidiff;
using qdtest::tau;

namespace {

  CutProjectScheme trivial_scheme()
  {
    return { 1, 1, Eigen::Matrix2d::Identity(), Box({ -0.5 }, { 0.5 }) };
  }

  Deformation affine_1d(double a, double b)
  {
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = a;
    return Deformation::affine(A, { b });
  }

  const BraggCandidate& peak_near(const std::vector<BraggCandidate>& peaks, double k)
  {
    for (const auto& p : peaks)
      if (std::abs(p.k[0] - k) < 1e-9)
        return p;
    FAIL("no peak near " << k);
    return peaks.front();
  }

}

TEST_CASE("trivial scheme gives the integers")
{
  const auto z = model_set(trivial_scheme(), Box({ 0.0 }, { 10.0 }));
  CHECK(z.coords() == std::vector<double> { 0, 1, 2, 3, 4, 5, 6, 7, 8, 9 });
  CHECK(z.meta()["generator"] == "model-set");
}

TEST_CASE("fibonacci model set")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  CHECK(s.covolume() == doctest::Approx(std::sqrt(5.0)));
  const auto fib = model_set(s, Box({ 0.0 }, { 100.0 }));
  CHECK(std::abs(static_cast<double>(fib.size()) - std::round(0.7236 * 100)) <= 1);
  for (std::size_t i = 0; i + 1 < fib.size(); ++i) {
    const double gap = fib.coords()[i + 1] - fib.coords()[i];
    CHECK((std::abs(gap - 1) < 1e-9 || std::abs(gap - tau) < 1e-9));
  }
  const auto silver = model_set(CutProjectScheme::preset("silver-mean"), Box({ 0.0 }, { 1000.0 }));
  CHECK(density(silver, Box({ 0.0 }, { 1000.0 })) == doctest::Approx(0.5).epsilon(5e-3));
  const auto ammann = model_set(CutProjectScheme::preset("ammann-1d"), Box({ 0.0 }, { 1000.0 }));
  CHECK(density(ammann, Box({ 0.0 }, { 1000.0 })) == doctest::Approx(tau / std::sqrt(5.0)).epsilon(5e-3));
}

TEST_CASE("scheme validation and enumeration cap")
{
  Eigen::Matrix2d sing;
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(CutProjectScheme(1, 1, sing, Box({ 0.0 }, { 1.0 })), ValidationError);
  CHECK_THROWS_AS(CutProjectScheme::preset("penrose"), ValidationError);
  CHECK_THROWS_AS(model_set(CutProjectScheme::preset("fibonacci"), Box({ 0.0 }, { 1e6 }), { 1000 }),
                  ResourceError);
  // rationally dependent projection: x = q1 + q2 hits the same point repeatedly
  Eigen::Matrix2d dep;
  dep << 1, 1, 0, 1;
  const CutProjectScheme bad(1, 1, dep, Box({ -0.3 }, { 0.3 }));
  CHECK_THROWS_AS(model_set(bad.with_window(Box({ -1.5 }, { 1.5 })), Box({ 0.0 }, { 10.0 })), Error);
  CHECK_THROWS_AS(dual_peaks(bad, Box({ 0.0 }, { 3.0 }), 1e-3), DegenerateProjectionError);
}

TEST_CASE("star map")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const std::int64_t zero[] = { 0, 0 }, q[] = { 0, 1 };
  CHECK(star_map(s, zero).phys == Vec { 0.0 });
  CHECK(star_map(s, zero).internal == Vec { 0.0 });
  const auto im = star_map(s, q);
  CHECK(im.phys[0] == doctest::Approx(tau));
  CHECK(im.internal[0] == doctest::Approx(1 - tau));
  CHECK(im.internal[0] == doctest::Approx(-0.618).epsilon(1e-3));

  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> u(-1000, 1000);
  for (int t = 0; t < 100; ++t) {
    const std::int64_t a[] = { u(gen), u(gen) }, b[] = { u(gen), u(gen) }, c[] = { a[0] + b[0], a[1] + b[1] };
    const auto sa = star_map(s, a), sb = star_map(s, b), sc = star_map(s, c);
    CHECK(sc.phys[0] == doctest::Approx(sa.phys[0] + sb.phys[0]).epsilon(1e-12));
    CHECK(sc.internal[0] == doctest::Approx(sa.internal[0] + sb.internal[0]).epsilon(1e-12));
  }
}

TEST_CASE("lattice and dual lattice pair to integers")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const Eigen::MatrixXd P = s.basis().transpose() * s.dual_basis();
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> u(-1000, 1000);
  for (int t = 0; t < 1000; ++t) {
    Eigen::Vector2d q(u(gen), u(gen)), r(u(gen), u(gen));
    const double pairing = (s.basis() * q).dot(s.dual_basis() * r);
    REQUIRE(std::abs(pairing - std::nearbyint(pairing)) < 1e-9);
  }
  CHECK((P - Eigen::Matrix2d::Identity()).norm() < 1e-12);
}

TEST_CASE("window monotonicity and translation covariance")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const Box pb({ -50.0 }, { 50.0 });
  const auto small = model_set(s, pb);
  const auto big = model_set(s.with_window(Box({ -1.2 }, { 0.8 })), pb);
  std::size_t j = 0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    while (j < big.size() && big.coords()[j] < small.coords()[i] - 1e-12)
      ++j;
    REQUIRE(j < big.size());
    CHECK(big.coords()[j] == doctest::Approx(small.coords()[i]));
  }

  // translating by a lattice vector t moves the window by t*
  const std::int64_t q[] = { 2, 3 };
  const auto t = star_map(s, q);
  const auto moved = model_set(s.with_window(s.window().translated(t.internal)), pb.translated(t.phys));
  REQUIRE(moved.size() == small.size());
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(moved.coords()[i] == doctest::Approx(small.coords()[i] + t.phys[0]).epsilon(1e-12));

  // periods (t* = 0) of the trivial scheme leave the set invariant
  const auto z = model_set(trivial_scheme(), Box({ 0.0 }, { 20.0 }));
  const auto zt = model_set(trivial_scheme(), Box({ 3.0 }, { 23.0 }));
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(zt.coords()[i] == z.coords()[i] + 3.0);
}

TEST_CASE("deformed model sets")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const Box pb({ 0.0 }, { 200.0 });
  const auto plain = model_set(s, pb);
  CHECK(deformed_model_set(s, affine_1d(0, 0), pb) == plain);

  const double c = 0.3;
  const auto shifted = deformed_model_set(s, affine_1d(0, c), pb);
  const auto ref = model_set(s, Box({ -c }, { 200.0 - c }));
  REQUIRE(shifted.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(shifted.coords()[i] == doctest::Approx(ref.coords()[i] + c).epsilon(1e-12));

  const auto d = deformed_model_set(s, affine_1d(0.1, 0), pb);
  CHECK(d.meta()["params"]["sup_deformation"].get<double>() == doctest::Approx(0.1));
  CHECK(d.meta()["params"]["separation_warning"] == false);
  const auto wild = deformed_model_set(s, affine_1d(0.9, 0), pb);
  CHECK(wild.meta()["params"]["separation_warning"] == true);
}

TEST_CASE("table deformation interpolates linearly")
{
  const auto tab = Deformation::table(Box({ -1.0 }, { 1.0 }), { 3 }, { 0.0, 1.0, 4.0 }, 1);
  const double y1[] = { 0.5 }, y2[] = { -0.5 }, y3[] = { 5.0 };
  CHECK(tab(y1)[0] == doctest::Approx(2.5));
  CHECK(tab(y2)[0] == doctest::Approx(0.5));
  CHECK(tab(y3)[0] == doctest::Approx(4.0));
  CHECK(tab.sup_norm(Box({ -1.0 }, { 1.0 })) == doctest::Approx(4.0));
  CHECK_THROWS_AS(Deformation::table(Box({ -1.0 }, { 1.0 }), { 3 }, { 0.0, 1.0 }, 1), ValidationError);
}

TEST_CASE("window fourier transform")
{
  const double k0[] = { 0.0 }, k1[] = { 1.0 }, k3[] = { 0.3 };
  CHECK(window_ft(Box({ 0.0 }, { 2.5 }), k0).real() == doctest::Approx(2.5));
  CHECK(std::abs(window_ft(Box({ -0.5 }, { 0.5 }), k1)) < 1e-15);
  const Complex v = window_ft(Box({ -0.5 }, { 0.5 }), k3);
  CHECK(v.real() == doctest::Approx(std::sin(M_PI * 0.3) / (M_PI * 0.3)));
  CHECK(std::abs(v.imag()) < 1e-15);
  const double k2[] = { 0.3, 1.0 };
  CHECK(std::abs(window_ft(Box({ -0.5, -0.5 }, { 0.5, 0.5 }), k2)) < 1e-15);
}

TEST_CASE("dual peaks")
{
  const auto z = dual_peaks(trivial_scheme(), Box({ -2.5 }, { 2.5 }), 0.5);
  REQUIRE(z.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(z[i].k[0] == doctest::Approx(static_cast<double>(i) - 2.0));
    CHECK(z[i].intensity == doctest::Approx(1.0));
  }

  // frozen from an independent 30-digit computation
  const auto s = CutProjectScheme::preset("fibonacci");
  const auto fib = dual_peaks(s, Box({ 0.0 }, { 3.0 }), 1e-3);
  CHECK(fib.size() == 40);
  const std::map<double, double> expected {
    { 0.0, 0.52360679774997897 },
    { 1.894427190999916, 0.47523299118683982 },
    { 1.1708203932499368, 0.40455209606524435 },
    { 0.7236067977499789, 0.2580340278060318 },
    { 2.3416407864998736, 0.16888546376255668 },
    { 2.618033988749895, 0.12065431358143658 },
    { 0.4472135954999579, 0.059023355365487881 },
    { 0.8944271909999159, 0.024640057091967172 },
    { 2.170820393249937, 0.022761018316195969 },
    { 2.788854381999832, 0.018969688773009159 },
  };
  for (const auto& [k, I] : expected)
    CHECK(peak_near(fib, k).intensity == doctest::Approx(I).epsilon(1e-12));
  const auto& p = peak_near(fib, 1.894427190999916);
  CHECK(p.dual_index == std::vector<std::int64_t> { 2, 3 });
  CHECK(p.k_star[0] == doctest::Approx(0.10557280900008412));
  for (const auto& c : fib)
    CHECK(c.intensity == doctest::Approx(std::norm(c.amplitude)));

  // density squared at k = 0, symmetric under k -> -k
  const auto patch = model_set(s, Box({ 0.0 }, { 1e4 }));
  const double n0 = density(patch, Box({ 0.0 }, { 1e4 }));
  CHECK(std::abs(peak_near(fib, 0.0).intensity - n0 * n0) < 2 * boundary_fraction(Box({ 0.0 }, { 1e4 }), tau));
  const auto sym = dual_peaks(s, Box({ -3.0 }, { 3.0 }), 1e-3);
  for (const auto& c : sym)
    CHECK(peak_near(sym, -c.k[0]).intensity == doctest::Approx(c.intensity).epsilon(1e-12));
  CHECK_THROWS_AS(dual_peaks(s, Box({ 0.0 }, { 3.0 }), 0.0), ValidationError);
}

TEST_CASE("deformed amplitude")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const auto fib = dual_peaks(s, Box({ 0.0 }, { 3.0 }), 1e-3);
  const auto& p = peak_near(fib, 1.894427190999916);
  const Complex a0 = deformed_amplitude(s, affine_1d(0, 0), p, 10000);
  CHECK(std::abs(a0 - p.amplitude) < 1e-6);
  const Complex ac = deformed_amplitude(s, affine_1d(0, 0.37), p, 10000);
  CHECK(std::abs(ac) == doctest::Approx(std::abs(a0)).epsilon(1e-12));

  // frozen from 30-digit adaptive quadrature (conjugated to the candidate convention)
  const Complex a = deformed_amplitude(s, affine_1d(0.1, 0), p, 10000);
  CHECK(a.real() == doctest::Approx(0.69833357371176768).epsilon(1e-6));
  CHECK(a.imag() == doctest::Approx(-0.070520189895631139).epsilon(1e-5));
  CHECK(std::norm(a) == doctest::Approx(0.49264287735596473).epsilon(1e-6));
  CHECK_THROWS_AS(deformed_amplitude(s, affine_1d(0.1, 0), p, 1), ValidationError);
}

TEST_CASE("integers preset matches the trivial scheme")
{
  const auto a = model_set(CutProjectScheme::preset("integers"), Box({ -3.0 }, { 7.0 }));
  const auto b = model_set(trivial_scheme(), Box({ -3.0 }, { 7.0 }));
  CHECK(a.coords() == b.coords());
  CHECK(a.size() == 10);
}
