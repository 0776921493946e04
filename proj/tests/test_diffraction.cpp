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
#include "quasidiff/diffraction.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace quasidiff;
using qdtest::tau;

namespace {

  double intensity(const WeightedPointSet& w, const Box& b, double xi)
  {
    const double x[] = { xi };
    return std::norm(fourier_average(w, b, x).value);
  }

  WeightedPointSet random_patch(std::mt19937_64& gen, std::size_t dim, std::size_t n, const Box& b)
  {
    std::uniform_real_distribution<double> u(0, 1), wr(-2, 2);
    std::vector<double> c;
    std::vector<Complex> w;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j)
        c.push_back(b.lo()[j] + u(gen) * b.side(j));
      w.emplace_back(wr(gen), wr(gen));
    }
    return { dim, c, w, nlohmann::json::object(), b };
  }

}

TEST_CASE("fourier averages on the integers")
{
  const auto z = qdtest::integers(0, 1000);
  const Box b({ 0.0 }, { 1000.0 });
  const double x0[] = { 0.0 }, xh[] = { 0.5 }, x3[] = { 3.0 };
  const auto f0 = fourier_average(z, b, x0);
  CHECK(f0.value.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f0.point_count == 1000);
  CHECK(f0.box_volume == 1000.0);
  CHECK(std::abs(fourier_average(z, b, xh).value) == 0.0);
  CHECK(std::abs(fourier_average(z, b, x3).value - 1.0) < 1e-13);
  const double x2[] = { 0.5, 0.5 };
  CHECK_THROWS_AS(fourier_average(z, b, x2), ValidationError);
}

TEST_CASE("fourier average properties")
{
  std::mt19937_64 gen(3);
  const Box b({ -3.0, 1.0 }, { 5.0, 4.0 });
  const auto w = random_patch(gen, 2, 150, b);
  const double xi[] = { 0.731, -1.27 }, mxi[] = { -0.731, 1.27 };
  const auto c = fourier_average(w, b, xi);
  double mass = 0;
  for (const auto& x : w.weights())
    mass += std::abs(x);
  CHECK(std::abs(c.value) <= mass / b.volume());

  // conjugate symmetry for real weights
  std::vector<Complex> real_w;
  for (const auto& x : w.weights())
    real_w.emplace_back(x.real(), 0.0);
  const WeightedPointSet wr(2, w.coords(), real_w, {}, b);
  const auto a = fourier_average(wr, b, xi), am = fourier_average(wr, b, mxi);
  CHECK(std::abs(a.value - std::conj(am.value)) < 1e-14);

  // joint translation: phase only
  const double t[] = { 0.37, -2.11 };
  std::vector<double> moved = w.coords();
  for (std::size_t i = 0; i < moved.size(); ++i)
    moved[i] += t[i % 2];
  const WeightedPointSet wt(2, moved, w.weights(), {}, b.translated(t));
  const auto ct = fourier_average(wt, b.translated(t), xi);
  CHECK(std::norm(ct.value) == doctest::Approx(std::norm(c.value)).epsilon(1e-10));
  const Complex phase = std::exp(Complex(0, -2 * M_PI * (xi[0] * t[0] + xi[1] * t[1])));
  CHECK(std::abs(ct.value - c.value * phase) < 1e-10);
}

TEST_CASE("intensity sequences")
{
  const auto z = qdtest::integers(-500, 500);
  const auto cubes = cube_sequence({ { 0.0 }, 10.0, 2.0, 6 });
  const double x0[] = { 0.0 }, xh[] = { 0.5 };
  const auto s0 = intensity_sequence(z, cubes, x0);
  for (double I : s0.intensities)
    CHECK(I == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s0.last_gap < 1e-14);
  CHECK(s0.converged);
  const auto sh = intensity_sequence(z, cubes, xh);
  for (double I : sh.intensities)
    CHECK(I < 1e-28);
  const auto too_big = cube_sequence({ { 0.0 }, 10.0, 2.0, 8 });
  CHECK_THROWS_AS(intensity_sequence(z, too_big, x0), ValidationError);
}

TEST_CASE("fibonacci peaks converge to the closed form")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const double L = 138197;
  const auto fib = model_set(s, Box({ 0.0 }, { L }));
  CHECK(fib.size() == 100001);
  const auto peaks = dual_peaks(s, Box({ 0.0 }, { 3.0 }), 1e-3);
  const auto boxes = concentric_boxes(Box({ 0.0 }, { L }), 4);
  for (const auto& p : peaks) {
    if (p.intensity < 0.05)
      continue;
    const auto seq = intensity_sequence(fib, boxes, p.k);
    CHECK(seq.intensities.back() == doctest::Approx(p.intensity).epsilon(0.02));
    CHECK(seq.last_gap < 1e-3);
  }
}

TEST_CASE("autocorrelation of an integer patch")
{
  const auto z = qdtest::integers(0, 10);
  const auto ac = autocorrelation(z, Box({ 0.0 }, { 10.0 }), std::nullopt, 1e-6);
  REQUIRE(ac.bins().size() == 19);
  for (const auto& bin : ac.bins()) {
    const double k = bin.position[0];
    CHECK(k == std::nearbyint(k));
    CHECK(bin.coefficient.real() == doctest::Approx((10 - std::abs(k)) / 10));
  }
  const double zero[] = { 0.0 };
  CHECK(ac.coefficient_at(zero).real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(autocorrelation(z, Box({ 0.0 }, { 10.0 }), std::nullopt, 0.6), ValidationError);

  const WeightedPointSet one(1, { 2.5 }, {}, {}, Box({ 0.0 }, { 4.0 }));
  const auto a1 = autocorrelation(one, Box({ 0.0 }, { 4.0 }), std::nullopt, 1e-6);
  REQUIRE(a1.bins().size() == 1);
  CHECK(a1.bins()[0].coefficient.real() == doctest::Approx(0.25));
}

TEST_CASE("autocorrelation hermitian symmetry and zero coefficient")
{
  const auto fib = qdtest::fibonacci_patch(3000);
  const Box b({ 0.0 }, { 3000.0 });
  const auto ac = autocorrelation(fib, b, 200.0, 1e-7);
  const double mass = ac.total_mass();
  for (const auto& bin : ac.bins()) {
    const double mz[] = { -bin.position[0] };
    REQUIRE(std::abs(ac.coefficient_at(mz) - std::conj(bin.coefficient)) <= 1e-12 * mass);
  }
  const double zero[] = { 0.0 };
  CHECK(ac.coefficient_at(zero).real() == doctest::Approx(static_cast<double>(fib.size()) / 3000.0).epsilon(1e-14));

  // the same patch through the grid search (d = 2 embedding) and brute force
  std::mt19937_64 gen(8);
  const Box b2({ 0.0, 0.0 }, { 20.0, 20.0 });
  std::vector<double> c;
  for (double x = 0.25; x < 20; x += 1.0)
    for (double y = 0.5; y < 20; y += 1.0)
      c.insert(c.end(), { x + 0.1 * std::sin(7 * y), y + 0.1 * std::cos(3 * x) });
  const WeightedPointSet w2(2, c, {}, {}, b2);
  const auto full = autocorrelation(w2, b2, std::nullopt, 1e-7);
  const auto cut = autocorrelation(w2, b2, 3.0, 1e-7);
  for (const auto& bin : cut.bins())
    CHECK(std::abs(full.coefficient_at(bin.position) - bin.coefficient) < 1e-14);
  std::size_t inside = 0;
  for (const auto& bin : full.bins())
    if (std::hypot(bin.position[0], bin.position[1]) <= 3.0)
      ++inside;
  CHECK(inside == cut.bins().size());
}

TEST_CASE("bin collisions are detected")
{
  // differences 1 and 1 + 3e-7 share an eps = 1e-6 cell
  const WeightedPointSet w(1, { 0.0, 1.0, 5.0, 6.0000003 }, {}, {}, Box({ 0.0 }, { 7.0 }));
  CHECK_THROWS_AS(autocorrelation(w, Box({ 0.0 }, { 7.0 }), std::nullopt, 1e-6), NumericalError);
  // differences 1 and 1 + 1.4e-6 land in neighbouring cells but closer than 2 eps = 2e-6
  const WeightedPointSet v(1, { 0.0, 1.0, 5.0, 6.0000014 }, {}, {}, Box({ 0.0 }, { 7.0 }));
  CHECK_THROWS_AS(autocorrelation(v, Box({ 0.0 }, { 7.0 }), std::nullopt, 2e-6), NumericalError);
  CHECK_NOTHROW(autocorrelation(v, Box({ 0.0 }, { 7.0 }), std::nullopt, 1e-7));
}

TEST_CASE("cross-estimator identity on random patches")
{
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> xu(-5, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 1 + trial % 2;
    Box b = dim == 1 ? Box({ -4.0 }, { 9.0 }) : Box({ 0.0, -2.0 }, { 6.0, 3.0 });
    const auto w = random_patch(gen, dim, 20 + trial * 4, b);
    const auto ac = autocorrelation(w, b, std::nullopt, 1e-6 * min_separation(w));
    Vec xi(dim);
    for (auto& x : xi)
      x = xu(gen);
    const double ref = std::norm(fourier_average(w, b, xi).value);
    const auto id = identity_intensity(ac, xi);
    REQUIRE(std::abs(id.value - ref) <= 1e-10 * std::max(ref, 1e-300));
    CHECK(std::abs(id.imag) < 1e-10 * std::max(ref, 1e-12) + 1e-13);
  }
}

TEST_CASE("intensity from autocorrelation")
{
  const auto z = qdtest::integers(0, 1000);
  const Box b({ 0.0 }, { 1000.0 });
  const auto ac = autocorrelation(z, b, std::nullopt, 1e-6);
  const double xh[] = { 0.5 }, x1[] = { 1.0 };
  CHECK(std::abs(identity_intensity(ac, xh).value) < 1e-10);
  CHECK(identity_intensity(ac, x1).value == doctest::Approx(1.0).epsilon(1e-10));
  // explicit identity configuration: averaging over the difference range, normalized by vol(B)
  const auto r = intensity_from_autocorr(ac, x1, ac.difference_box(), b.volume());
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

  const auto cut = autocorrelation(z, b, 50.0, 1e-6);
  CHECK_THROWS_AS(intensity_from_autocorr(cut, x1, Box({ -60.0 }, { 60.0 })), ValidationError);
}

TEST_CASE("truncated autocorrelation reproduces a fibonacci peak")
{
  const auto s = CutProjectScheme::preset("fibonacci");
  const double L = 138197;
  const Box b({ 0.0 }, { L });
  const auto fib = model_set(s, b);
  const auto peaks = dual_peaks(s, Box({ 0.0 }, { 3.0 }), 0.3);
  const auto ac = autocorrelation(fib, b, 1000.0, 1e-6);
  for (const auto& p : peaks) {
    const auto r = intensity_from_autocorr(ac, p.k, Box({ -1000.0 }, { 1000.0 }));
    CHECK(r.value == doctest::Approx(p.intensity).epsilon(0.02));
  }
}

TEST_CASE("spectrum scans")
{
  const auto z = qdtest::integers(-1000, 1000);
  const Box b({ -1000.0 }, { 1000.0 });
  const std::vector<Vec> grid { { 1.0 }, { 0.0 }, { 0.5 }, { 0.25 } };
  const auto sp = scan_spectrum(z, b, grid, Estimator::fourier);
  REQUIRE(sp.entries.size() == 4);
  CHECK(sp.entries[0].xi[0] == 0.0);
  CHECK(sp.entries[0].intensity == doctest::Approx(1.0));
  CHECK(sp.entries[1].intensity < 1e-12);
  CHECK(sp.entries[2].intensity < 1e-24);
  CHECK(sp.entries[3].intensity == doctest::Approx(1.0));
  CHECK(sp.entries[3].per_scale.size() == 2);
  CHECK(sp.entries[3].box_volume == 2000.0);

  const std::vector<Vec> one { { 0.37 } };
  CHECK(scan_spectrum(z, b, one, Estimator::fourier).entries[0].intensity == intensity(z, b, 0.37));

  const auto auto_sp = scan_spectrum(z, Box({ -100.0 }, { 100.0 }), grid, Estimator::autocorr);
  const auto four_sp = scan_spectrum(z, Box({ -100.0 }, { 100.0 }), grid, Estimator::fourier);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(std::abs(auto_sp.entries[i].intensity - four_sp.entries[i].intensity)
          <= 1e-10 * std::max(four_sp.entries[i].intensity, 1e-3));

  std::ostringstream os;
  write_spectrum_csv(os, sp);
  const auto text = os.str();
  CHECK(text.rfind("xi_1,intensity,estimator,box_volume,point_count,last_gap,converged\n", 0) == 0);
  CHECK(text.find("\n0,1,fourier,2000,2000,") != std::string::npos);
}

TEST_CASE("peak finding")
{
  const auto z = qdtest::integers(-1000, 1000);
  const Box b({ -1000.0 }, { 1000.0 });
  std::vector<Vec> grid;
  for (int i = -40; i <= 40; ++i)
    grid.push_back({ i * 0.05 });
  const auto sp = scan_spectrum(z, b, grid, Estimator::fourier);
  const auto pk = find_peaks(sp, 0.5);
  REQUIRE(pk.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(pk[i].xi[0] == doctest::Approx(static_cast<double>(i) - 2.0));

  Spectrum flat = sp;
  for (auto& e : flat.entries)
    e.intensity = 0;
  CHECK(find_peaks(flat, 1e-6).empty());

  // refinement lands on the dual peaks when the grid resolves the peak width
  const auto s = CutProjectScheme::preset("fibonacci");
  const Box fb({ 0.0 }, { 2000.0 });
  const auto fib = model_set(s, fb);
  std::vector<Vec> fg;
  for (int i = 0; i <= 15000; ++i)
    fg.push_back({ i * 2e-4 });
  const auto fsp = scan_spectrum(fib, fb, fg, Estimator::fourier, { 1 });
  const auto refined = find_peaks(fsp, 1e-2, [&](std::span<const double> xi) {
    return std::norm(fourier_average(fib, fb, xi).value);
  });
  for (const auto& e : dual_peaks(s, Box({ 0.0 }, { 3.0 }), 1e-2)) {
    double best = INFINITY;
    for (const auto& p : refined)
      best = std::min(best, std::abs(e.k[0] - p.xi[0]));
    CHECK(best < 1e-4);
  }
}
