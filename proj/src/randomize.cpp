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

#include "quasidiff/randomize.hpp"
#include "quasidiff/diffraction.hpp"
#include "quasidiff/io.hpp"
#include "quasidiff/parallel.hpp"
#include "quasidiff/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace quasidiff {

  namespace {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
  }

  DisplacementDist DisplacementDist::uniform_interval(double a)
  {
    DisplacementDist d;
    d.kind = Kind::uniform_interval;
    d.a = a;
    return d;
  }

  DisplacementDist DisplacementDist::two_point(double a)
  {
    DisplacementDist d;
    d.kind = Kind::two_point;
    d.a = a;
    return d;
  }

  DisplacementDist DisplacementDist::table(std::vector<std::pair<Vec, double>> atoms)
  {
    DisplacementDist d;
    d.kind = Kind::table;
    d.atoms = std::move(atoms);
    return d;
  }

  void DisplacementDist::validate(std::size_t dim) const
  {
    if (kind != Kind::table) {
      QD_REQUIRE(std::isfinite(a) && a >= 0, "displacement half-width a must be finite and >= 0");
      return;
    }
    QD_REQUIRE(!atoms.empty(), "displacement table needs at least one atom");
    double total = 0;
    for (const auto& [v, p] : atoms) {
      QD_REQUIRE(v.size() == dim, "displacement atom has the wrong dimension");
      for (double c : v)
        QD_REQUIRE(std::isfinite(c), "displacement atoms must be finite (bounded support)");
      QD_REQUIRE(p >= 0 && std::isfinite(p), "displacement probabilities must be >= 0");
      total += p;
    }
    QD_REQUIRE(std::abs(total - 1.0) < 1e-9, "displacement probabilities must sum to 1");
  }

  double DisplacementDist::max_norm(std::size_t dim) const
  {
    if (kind != Kind::table)
      return a * std::sqrt(static_cast<double>(dim));
    double best = 0;
    for (const auto& [v, p] : atoms) {
      double s = 0;
      for (double c : v)
        s += c * c;
      if (p > 0)
        best = std::max(best, std::sqrt(s));
    }
    return best;
  }

  RandomModel RandomModel::percolation(double p, std::uint64_t seed)
  {
    RandomModel m;
    m.kind = Kind::percolation;
    m.p = p;
    m.seed = seed;
    return m;
  }

  RandomModel RandomModel::displacement(DisplacementDist d, std::uint64_t seed)
  {
    RandomModel m;
    m.kind = Kind::displacement;
    m.dist = std::move(d);
    m.seed = seed;
    return m;
  }

  void RandomModel::validate() const
  {
    if (kind == Kind::percolation)
      QD_REQUIRE(p > 0 && p < 1, "percolation probability must satisfy 0 < p < 1");
  }

  WeightedPointSet percolate(const WeightedPointSet& wps, double p, std::uint64_t seed)
  {
    QD_REQUIRE(p > 0 && p < 1, "percolation probability must satisfy 0 < p < 1");
    const CounterRng rng(seed);
    std::vector<double> coords;
    std::vector<Complex> weights;
    for (std::size_t i = 0; i < wps.size(); ++i)
      if (rng.uniform(i) < p) {
        coords.insert(coords.end(), wps.point(i).begin(), wps.point(i).end());
        weights.push_back(wps.weights()[i]);
      }
    nlohmann::json meta = { { "generator", "percolate" },
                            { "params", { { "p", p }, { "parent", wps.meta() } } },
                            { "seed", seed } };
    return { wps.dim(), std::move(coords), std::move(weights), std::move(meta), wps.region() };
  }

  WeightedPointSet displace(const WeightedPointSet& wps, const DisplacementDist& dist, std::uint64_t seed)
  {
    const std::size_t d = wps.dim();
    dist.validate(d);
    const CounterRng rng(seed);
    std::vector<double> coords(wps.coords());
    for (std::size_t i = 0; i < wps.size(); ++i) {
      double* x = coords.data() + i * d;
      switch (dist.kind) {
        case DisplacementDist::Kind::uniform_interval:
          for (std::size_t j = 0; j < d; ++j)
            x[j] += (2.0 * rng.uniform(i, j) - 1.0) * dist.a;
          break;
        case DisplacementDist::Kind::two_point:
          for (std::size_t j = 0; j < d; ++j)
            x[j] += rng.uniform(i, j) < 0.5 ? dist.a : -dist.a;
          break;
        case DisplacementDist::Kind::table: {
          const double u = rng.uniform(i);
          double cum = 0;
          std::size_t pick = dist.atoms.size() - 1;
          for (std::size_t a = 0; a < dist.atoms.size(); ++a) {
            cum += dist.atoms[a].second;
            if (u < cum) {
              pick = a;
              break;
            }
          }
          for (std::size_t j = 0; j < d; ++j)
            x[j] += dist.atoms[pick].first[j];
          break;
        }
      }
    }
    nlohmann::json params = { { "dist", io::dist_to_json(dist) }, { "parent", wps.meta() } };
    WeightedPointSet out(d, std::move(coords), wps.weights(), nlohmann::json::object(), wps.region());
    params["min_separation"] = out.size() >= 2 ? nlohmann::json(min_separation(out)) : nlohmann::json(nullptr);
    return out.with_meta({ { "generator", "displace" }, { "params", params }, { "seed", seed } });
  }

  Complex char_fn(const DisplacementDist& dist, std::span<const double> xi)
  {
    switch (dist.kind) {
      case DisplacementDist::Kind::uniform_interval: {
        double v = 1;
        for (double x : xi) {
          const double t = kTwoPi * x * dist.a;
          v *= std::abs(t) < 1e-300 ? 1.0 : std::sin(t) / t;
        }
        return v;
      }
      case DisplacementDist::Kind::two_point: {
        double v = 1;
        for (double x : xi)
          v *= std::cos(kTwoPi * x * dist.a);
        return v;
      }
      case DisplacementDist::Kind::table: {
        Complex s;
        for (const auto& [v, p] : dist.atoms) {
          QD_REQUIRE(v.size() == xi.size(), "displacement atom dimension does not match the frequency");
          double t = 0;
          for (std::size_t j = 0; j < v.size(); ++j)
            t += xi[j] * v[j];
          const double r = t - std::nearbyint(t);
          s += p * Complex(std::cos(kTwoPi * r), -std::sin(kTwoPi * r));
        }
        return s;
      }
    }
    return 1.0;
  }

  PredictedIntensity predicted_intensity(const RandomModel& model, double base_intensity,
                                         std::span<const double> xi, double n0)
  {
    QD_REQUIRE(base_intensity >= 0, "base intensity must be >= 0");
    QD_REQUIRE(n0 > 0, "point density n0 must be positive");
    model.validate();
    if (model.kind == RandomModel::Kind::percolation)
      return { model.p * model.p * base_intensity, model.p * (1 - model.p) * n0 };
    const double s2 = std::norm(char_fn(model.dist, xi));
    return { s2 * base_intensity, n0 * (1 - s2) };
  }

  TrialStats monte_carlo_intensity(const WeightedPointSet& wps, const RandomModel& model,
                                   const Box& box, std::span<const double> xi, std::size_t trials,
                                   std::uint64_t base_seed)
  {
    QD_REQUIRE(trials >= 2, "monte_carlo_intensity needs at least 2 trials");
    model.validate();
    TrialStats st;
    st.xi.assign(xi.begin(), xi.end());
    st.trials = trials;
    const auto base = fourier_average(wps, box, xi);
    st.base_amplitude = base.value;
    st.base_intensity = std::norm(base.value);
    st.n0 = density(wps, box);
    const auto pred = predicted_intensity(model, st.base_intensity, xi, st.n0);
    st.predicted = pred.point_part;
    st.diffuse_level = pred.diffuse_level;

    std::vector<Complex> amps(trials);
    parallel_for(trials, [&](std::size_t t) {
      const std::uint64_t seed = base_seed + t;
      const auto perturbed = model.kind == RandomModel::Kind::percolation
                               ? percolate(wps, model.p, seed)
                               : displace(wps, model.dist, seed);
      amps[t] = fourier_average(perturbed, box, xi).value;
    });

    const double T = static_cast<double>(trials);
    double mean = 0;
    Complex amean;
    for (const auto& a : amps) {
      mean += std::norm(a);
      amean += a;
    }
    mean /= T;
    amean /= T;
    double var = 0, avar = 0;
    for (const auto& a : amps) {
      var += (std::norm(a) - mean) * (std::norm(a) - mean);
      avar += std::norm(a - amean);
    }
    st.mean_intensity = mean;
    st.std_error = std::sqrt(var / (T - 1) / T);
    st.mean_amplitude = amean;
    st.amplitude_std_error = std::sqrt(avar / (T - 1) / T);
    return st;
  }

}
