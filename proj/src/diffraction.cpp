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

#include "quasidiff/diffraction.hpp"
#include "quasidiff/parallel.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace quasidiff {

  namespace {

    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    inline Complex unit_phase(double t)
    {
      const double r = t - std::nearbyint(t);
      return { std::cos(kTwoPi * r), -std::sin(kTwoPi * r) };
    }

    struct KahanComplex {
      Complex sum, comp;
      void add(Complex v)
      {
        const Complex y = v - comp;
        const Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
    };

    // Indices of points inside `box`. Canonical order is lexicographic, so
    // the first coordinate range is a contiguous block.
    std::vector<std::size_t> points_in(const WeightedPointSet& wps, const Box& box)
    {
      const auto& c = wps.coords();
      const std::size_t d = wps.dim(), n = wps.size();
      auto first_coord_less = [&](std::size_t i, double v) { return c[i * d] < v; };
      std::size_t lo = 0, hi = n;
      {
        std::size_t count = n;
        while (count > 0) {
          const std::size_t step = count / 2, mid = lo + step;
          if (first_coord_less(mid, box.lo()[0])) {
            lo = mid + 1;
            count -= step + 1;
          } else {
            count = step;
          }
        }
        std::size_t l2 = lo;
        count = n - lo;
        while (count > 0) {
          const std::size_t step = count / 2, mid = l2 + step;
          if (first_coord_less(mid, box.hi()[0])) {
            l2 = mid + 1;
            count -= step + 1;
          } else {
            count = step;
          }
        }
        hi = l2;
      }
      std::vector<std::size_t> out;
      out.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        if (box.contains(wps.point(i)))
          out.push_back(i);
      return out;
    }

    void require_dims(const WeightedPointSet& wps, const Box& box, std::span<const double> xi)
    {
      QD_REQUIRE(box.dim() == wps.dim(), "box dimension does not match the point set");
      QD_REQUIRE(xi.size() == wps.dim(), "frequency dimension does not match the point set");
    }

    void require_covered(const WeightedPointSet& wps, const Box& box)
    {
      if (wps.empty() && !wps.region())
        return;
      const Box cover = wps.covering_box();
      double scale = 1;
      for (std::size_t j = 0; j < box.dim(); ++j)
        scale = std::max({ scale, std::abs(cover.lo()[j]), std::abs(cover.hi()[j]) });
      QD_REQUIRE(cover.contains(box, 1e-12 * scale),
                 "averaging box exceeds the region covered by the patch");
    }

    struct VecKeyHash {
      std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept
      {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) {
          h ^= static_cast<std::uint64_t>(x);
          h *= 1099511628211ull;
          h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
      }
    };

    struct BinAccumulator {
      Vec raw_sum;
      Vec raw_min;
      Vec raw_max;
      std::uint64_t count = 0;
      KahanComplex coeff;
    };

    using BinMap = std::unordered_map<std::vector<std::int64_t>, BinAccumulator, VecKeyHash>;

    class PairAccumulator {
    public:
      PairAccumulator(std::size_t d, double eps) : m_d(d), m_eps(eps), m_key(d), m_z(d) {}

      void add(std::span<const double> x, std::span<const double> y, Complex w)
      {
        for (std::size_t j = 0; j < m_d; ++j) {
          m_z[j] = x[j] - y[j];
          const double q = std::round(m_z[j] / m_eps);
          if (!(std::abs(q) < 9e15))
            throw NumericalError("difference vector overflows the epsilon grid; increase bin_epsilon");
          m_key[j] = static_cast<std::int64_t>(q);
        }
        auto [it, fresh] = m_bins.try_emplace(m_key);
        auto& b = it->second;
        if (fresh) {
          b.raw_sum.assign(m_d, 0.0);
          b.raw_min = m_z;
          b.raw_max = m_z;
        }
        for (std::size_t j = 0; j < m_d; ++j) {
          b.raw_sum[j] += m_z[j];
          b.raw_min[j] = std::min(b.raw_min[j], m_z[j]);
          b.raw_max[j] = std::max(b.raw_max[j], m_z[j]);
        }
        ++b.count;
        b.coeff.add(w);
      }

      BinMap& bins() noexcept { return m_bins; }

    private:
      std::size_t m_d;
      double m_eps;
      std::vector<std::int64_t> m_key;
      Vec m_z;
      BinMap m_bins;
    };

    double dist2(std::span<const double> a, std::span<const double> b)
    {
      double s = 0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a[j] - b[j];
        s += t * t;
      }
      return s;
    }

    double golden_max(const std::function<double(double)>& f, double a, double b, double& best_x)
    {
      const double inv_phi = 1.0 / std::numbers::phi;
      double c = b - (b - a) * inv_phi, d = a + (b - a) * inv_phi;
      double fc = f(c), fd = f(d);
      for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - (b - a) * inv_phi;
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + (b - a) * inv_phi;
          fd = f(d);
        }
      }
      best_x = fc > fd ? c : d;
      return std::max(fc, fd);
    }

  }

  // ---------------------------------------------------------------------------

  FourierAverage fourier_average(const WeightedPointSet& wps, const Box& box,
                                 std::span<const double> xi)
  {
    require_dims(wps, box, xi);
    const std::size_t d = wps.dim();
    KahanComplex acc;
    std::size_t count = 0;
    for (std::size_t i : points_in(wps, box)) {
      const auto x = wps.point(i);
      double t = 0;
      for (std::size_t j = 0; j < d; ++j)
        t += xi[j] * x[j];
      acc.add(wps.weights()[i] * unit_phase(t));
      ++count;
    }
    return { Vec(xi.begin(), xi.end()), acc.sum / box.volume(), box.volume(), count };
  }

  IntensitySequence intensity_sequence(const WeightedPointSet& wps, std::span<const Box> boxes,
                                       std::span<const double> xi, std::optional<double> tolerance)
  {
    QD_REQUIRE(!boxes.empty(), "intensity_sequence needs at least one box");
    IntensitySequence out;
    for (const auto& b : boxes) {
      require_dims(wps, b, xi);
      require_covered(wps, b);
    }
    for (const auto& b : boxes) {
      const auto fa = fourier_average(wps, b, xi);
      out.intensities.push_back(std::norm(fa.value));
      out.box_volumes.push_back(fa.box_volume);
      out.point_counts.push_back(fa.point_count);
    }
    const auto& I = out.intensities;
    out.last_gap = I.size() >= 2 ? std::abs(I.back() - I[I.size() - 2]) : 0.0;
    out.tolerance = tolerance.value_or(1e-3 * std::max(I.back(), 1e-6));
    out.converged = I.size() >= 2 && out.last_gap < out.tolerance;
    return out;
  }

  // ---------------------------------------------------------------------------

  AutocorrelationPatch::AutocorrelationPatch(std::vector<Bin> bins, double bin_epsilon,
                                             double normalizing_volume,
                                             std::optional<double> max_radius, Box source_box)
    : m_bins(std::move(bins)), m_eps(bin_epsilon), m_volume(normalizing_volume),
      m_radius(max_radius), m_source(std::move(source_box))
  {
    QD_REQUIRE(m_eps > 0, "bin_epsilon must be positive");
    QD_REQUIRE(m_volume > 0, "normalizing volume must be positive");
    std::sort(m_bins.begin(), m_bins.end(), [](const Bin& a, const Bin& b) { return a.key < b.key; });
  }

  Complex AutocorrelationPatch::coefficient_at(std::span<const double> z) const
  {
    QD_REQUIRE(z.size() == dim(), "difference vector has the wrong dimension");
    std::vector<std::int64_t> key(dim());
    for (std::size_t j = 0; j < dim(); ++j)
      key[j] = static_cast<std::int64_t>(std::round(z[j] / m_eps));
    auto it = std::lower_bound(m_bins.begin(), m_bins.end(), key,
                               [](const Bin& b, const std::vector<std::int64_t>& k) { return b.key < k; });
    if (it != m_bins.end() && it->key == key)
      return it->coefficient;
    return {};
  }

  double AutocorrelationPatch::total_mass() const noexcept
  {
    double s = 0;
    for (const auto& b : m_bins)
      s += std::abs(b.coefficient);
    return s;
  }

  Box AutocorrelationPatch::difference_box() const
  {
    Vec lo(dim()), hi(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      hi[j] = m_source.side(j);
      lo[j] = -hi[j];
    }
    return { lo, hi };
  }

  AutocorrelationPatch autocorrelation(const WeightedPointSet& wps, const Box& box,
                                       std::optional<double> max_radius, double bin_epsilon)
  {
    QD_REQUIRE(box.dim() == wps.dim(), "box dimension does not match the point set");
    QD_REQUIRE(bin_epsilon > 0 && std::isfinite(bin_epsilon), "bin_epsilon must be positive");
    QD_REQUIRE(!max_radius || *max_radius > 0, "max_radius must be positive");
    require_covered(wps, box);
    const std::size_t d = wps.dim();
    const auto idx = points_in(wps, box);

    double sep = std::numeric_limits<double>::infinity();
    if (idx.size() >= 2) {
      std::vector<double> c;
      c.reserve(idx.size() * d);
      for (auto i : idx)
        c.insert(c.end(), wps.point(i).begin(), wps.point(i).end());
      sep = min_separation(WeightedPointSet(d, std::move(c)));
      QD_REQUIRE(bin_epsilon < 0.5 * sep, "bin_epsilon must be below half the minimal separation");
    }

    const double R = max_radius.value_or(std::numeric_limits<double>::infinity());
    const double R2 = R * R;
    const auto& w = wps.weights();

    // Fixed-size chunks of source points, merged in chunk order: the result
    // does not depend on the number of threads.
    constexpr std::size_t kChunk = 1024;
    const std::size_t nchunks = (idx.size() + kChunk - 1) / kChunk;
    std::vector<BinMap> partial(nchunks);

    // Uniform grid for truncated pair search.
    const bool use_grid = std::isfinite(R) && d > 1;
    const double cell = use_grid ? std::max(R / 2, std::isfinite(sep) ? sep : R) : 0.0;
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, VecKeyHash> grid;
    auto cell_of = [&](std::span<const double> x) {
      std::vector<std::int64_t> k(d);
      for (std::size_t j = 0; j < d; ++j)
        k[j] = static_cast<std::int64_t>(std::floor((x[j] - box.lo()[j]) / cell));
      return k;
    };
    if (use_grid)
      for (std::size_t a = 0; a < idx.size(); ++a)
        grid[cell_of(wps.point(idx[a]))].push_back(a);
    const auto reach = use_grid ? static_cast<std::int64_t>(std::ceil(R / cell)) : 0;

    parallel_for(nchunks, [&](std::size_t ch) {
      PairAccumulator acc(d, bin_epsilon);
      const std::size_t begin = ch * kChunk, end = std::min(idx.size(), begin + kChunk);
      for (std::size_t a = begin; a < end; ++a) {
        const auto x = wps.point(idx[a]);
        const Complex wx = w[idx[a]];
        if (!std::isfinite(R)) {
          for (std::size_t b = 0; b < idx.size(); ++b)
            acc.add(x, wps.point(idx[b]), wx * std::conj(w[idx[b]]));
        } else if (d == 1) {
          // sorted: scan both directions until the radius is exceeded
          std::size_t b = a;
          while (true) {
            const auto y = wps.point(idx[b]);
            if (x[0] - y[0] > R)
              break;
            acc.add(x, y, wx * std::conj(w[idx[b]]));
            if (b == 0)
              break;
            --b;
          }
          for (b = a + 1; b < idx.size(); ++b) {
            const auto y = wps.point(idx[b]);
            if (y[0] - x[0] > R)
              break;
            acc.add(x, y, wx * std::conj(w[idx[b]]));
          }
        } else {
          const auto home = cell_of(x);
          std::vector<std::int64_t> off(d, -reach), nb(d);
          std::vector<std::size_t> partners;
          while (true) {
            for (std::size_t j = 0; j < d; ++j)
              nb[j] = home[j] + off[j];
            auto it = grid.find(nb);
            if (it != grid.end())
              for (std::size_t b : it->second)
                if (dist2(x, wps.point(idx[b])) <= R2)
                  partners.push_back(b);
            std::size_t j = 0;
            while (j < d && ++off[j] > reach)
              off[j++] = -reach;
            if (j == d)
              break;
          }
          std::sort(partners.begin(), partners.end());
          for (std::size_t b : partners)
            acc.add(x, wps.point(idx[b]), wx * std::conj(w[idx[b]]));
        }
      }
      partial[ch] = std::move(acc.bins());
    });

    BinMap merged;
    for (auto& part : partial) {
      // Merge in key order so floating sums are schedule independent.
      std::vector<const BinMap::value_type*> items;
      items.reserve(part.size());
      for (const auto& kv : part)
        items.push_back(&kv);
      std::sort(items.begin(), items.end(), [](auto* a, auto* b) { return a->first < b->first; });
      for (const auto* kv : items) {
        auto [it, fresh] = merged.try_emplace(kv->first, kv->second);
        if (fresh)
          continue;
        auto& m = it->second;
        for (std::size_t j = 0; j < d; ++j) {
          m.raw_sum[j] += kv->second.raw_sum[j];
          m.raw_min[j] = std::min(m.raw_min[j], kv->second.raw_min[j]);
          m.raw_max[j] = std::max(m.raw_max[j], kv->second.raw_max[j]);
        }
        m.count += kv->second.count;
        m.coeff.add(kv->second.coeff.sum);
      }
      part.clear();
    }

    // A bin must hold one cluster of raw differences (spread at float-noise
    // level), and distinct clusters must sit at least bin_epsilon apart.
    // Otherwise the grid either merged two classes or split one.
    const double tight = 1e-3 * bin_epsilon;
    std::vector<AutocorrelationPatch::Bin> bins;
    bins.reserve(merged.size());
    for (auto& [key, acc] : merged) {
      for (std::size_t j = 0; j < d; ++j)
        if (acc.raw_max[j] - acc.raw_min[j] > tight)
          throw NumericalError("autocorrelation bin collision: one bin received distinct differences "
                               "(spread " + std::to_string(acc.raw_max[j] - acc.raw_min[j])
                               + "); decrease bin_epsilon");
      Vec pos(d);
      for (std::size_t j = 0; j < d; ++j)
        pos[j] = acc.raw_sum[j] / static_cast<double>(acc.count);
      bins.push_back({ key, std::move(pos), acc.coeff.sum / box.volume() });
    }
    std::sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    std::vector<std::int64_t> off(d, -1), nb(d);
    for (const auto& bin : bins) {
      std::fill(off.begin(), off.end(), -1);
      while (true) {
        if (off > std::vector<std::int64_t>(d, 0)) {
          for (std::size_t j = 0; j < d; ++j)
            nb[j] = bin.key[j] + off[j];
          const auto it = std::lower_bound(bins.begin(), bins.end(), nb,
                                           [](const auto& b, const auto& k) { return b.key < k; });
          if (it != bins.end() && it->key == nb) {
            double gap = 0;
            for (std::size_t j = 0; j < d; ++j)
              gap = std::max(gap, std::abs(it->position[j] - bin.position[j]));
            if (gap < bin_epsilon)
              throw NumericalError("autocorrelation bin collision: neighbouring bins hold differences "
                                   "closer than bin_epsilon; decrease bin_epsilon");
          }
        }
        std::size_t j = 0;
        while (j < d && ++off[j] > 1)
          off[j++] = -1;
        if (j == d)
          break;
      }
    }
    return { std::move(bins), bin_epsilon, box.volume(), max_radius, box };
  }

  AutocorrIntensity intensity_from_autocorr(const AutocorrelationPatch& patch,
                                            std::span<const double> xi, const Box& averaging_box,
                                            std::optional<double> normalizing_volume)
  {
    const std::size_t d = patch.dim();
    QD_REQUIRE(xi.size() == d && averaging_box.dim() == d,
               "frequency/averaging box dimension does not match the autocorrelation");
    if (patch.max_radius()) {
      double far = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const double m = std::max(std::abs(averaging_box.lo()[j]), std::abs(averaging_box.hi()[j]));
        far += m * m;
      }
      QD_REQUIRE(std::sqrt(far) <= *patch.max_radius() * (1 + 1e-12),
                 "averaging box exceeds the max_radius of the autocorrelation patch");
    }
    const double V = normalizing_volume.value_or(averaging_box.volume());
    QD_REQUIRE(V > 0, "normalizing volume must be positive");
    KahanComplex acc;
    for (const auto& b : patch.bins()) {
      bool inside = true;
      for (std::size_t j = 0; j < d && inside; ++j)
        inside = b.position[j] >= averaging_box.lo()[j] && b.position[j] <= averaging_box.hi()[j];
      if (!inside)
        continue;
      double t = 0;
      for (std::size_t j = 0; j < d; ++j)
        t += xi[j] * b.position[j];
      acc.add(b.coefficient * unit_phase(t));
    }
    return { acc.sum.real() / V, acc.sum.imag() / V };
  }

  AutocorrIntensity identity_intensity(const AutocorrelationPatch& patch, std::span<const double> xi)
  {
    if (patch.max_radius()) {
      double diam = 0;
      for (std::size_t j = 0; j < patch.dim(); ++j)
        diam += patch.source_box().side(j) * patch.source_box().side(j);
      QD_REQUIRE(*patch.max_radius() >= std::sqrt(diam),
                 "identity configuration needs an untruncated autocorrelation");
    }
    // Every difference lies in patch.difference_box(), so no membership test.
    KahanComplex acc;
    for (const auto& b : patch.bins()) {
      double t = 0;
      for (std::size_t j = 0; j < patch.dim(); ++j)
        t += xi[j] * b.position[j];
      acc.add(b.coefficient * unit_phase(t));
    }
    const double V = patch.source_box().volume();
    // coefficients carry 1/vol(B); the identity sum equals vol(B) |c|^2
    return { acc.sum.real() / V, acc.sum.imag() / V };
  }

  // ---------------------------------------------------------------------------

  const char* estimator_name(Estimator e) noexcept
  {
    return e == Estimator::fourier ? "fourier" : "autocorr";
  }

  Estimator estimator_from_name(std::string_view name)
  {
    if (name == "fourier")
      return Estimator::fourier;
    if (name == "autocorr")
      return Estimator::autocorr;
    throw ValidationError("unknown estimator '" + std::string(name) + "' (fourier|autocorr)");
  }

  std::vector<Box> concentric_boxes(const Box& box, std::size_t scales)
  {
    QD_REQUIRE(scales >= 1, "need at least one scale");
    std::vector<Box> out;
    const Vec c = box.center();
    for (std::size_t i = 0; i < scales; ++i) {
      const double f = std::ldexp(1.0, -static_cast<int>(scales - 1 - i));
      if (i + 1 == scales) {
        out.push_back(box);
        continue;
      }
      Vec lo(box.dim()), hi(box.dim());
      for (std::size_t j = 0; j < box.dim(); ++j) {
        lo[j] = c[j] - 0.5 * f * box.side(j);
        hi[j] = c[j] + 0.5 * f * box.side(j);
      }
      out.emplace_back(lo, hi);
    }
    return out;
  }

  Spectrum scan_spectrum(const WeightedPointSet& wps, const Box& box, std::span<const Vec> xi_grid,
                         Estimator estimator, const ScanOptions& opts)
  {
    QD_REQUIRE(!xi_grid.empty(), "frequency grid is empty");
    const std::size_t d = wps.dim();
    for (const auto& xi : xi_grid)
      require_dims(wps, box, xi);
    const auto boxes = concentric_boxes(box, opts.scales);
    for (const auto& b : boxes)
      require_covered(wps, b);

    std::vector<std::vector<double>> per_scale(xi_grid.size(), std::vector<double>(boxes.size()));
    std::size_t final_count = points_in(wps, box).size();

    if (estimator == Estimator::fourier) {
      parallel_for(xi_grid.size(), [&](std::size_t g) {
        for (std::size_t s = 0; s < boxes.size(); ++s)
          per_scale[g][s] = std::norm(fourier_average(wps, boxes[s], xi_grid[g]).value);
      });
    } else {
      for (std::size_t s = 0; s < boxes.size(); ++s) {
        double eps = 0;
        if (opts.bin_epsilon) {
          eps = *opts.bin_epsilon;
        } else {
          const auto idx = points_in(wps, boxes[s]);
          double sep = 1.0;
          if (idx.size() >= 2) {
            std::vector<double> c;
            for (auto i : idx)
              c.insert(c.end(), wps.point(i).begin(), wps.point(i).end());
            sep = min_separation(WeightedPointSet(d, std::move(c)));
          }
          eps = 1e-6 * sep;
        }
        const auto patch = autocorrelation(wps, boxes[s], opts.max_radius, eps);
        std::optional<Box> avg;
        if (opts.max_radius) {
          const double h = *opts.max_radius / std::sqrt(static_cast<double>(d));
          avg = Box(Vec(d, -h), Vec(d, h));
        }
        parallel_for(xi_grid.size(), [&](std::size_t g) {
          per_scale[g][s] = avg ? intensity_from_autocorr(patch, xi_grid[g], *avg).value
                                : identity_intensity(patch, xi_grid[g]).value;
        });
      }
    }

    Spectrum sp;
    sp.dim = d;
    sp.entries.reserve(xi_grid.size());
    for (std::size_t g = 0; g < xi_grid.size(); ++g) {
      SpectrumEntry e;
      e.xi = xi_grid[g];
      e.per_scale = per_scale[g];
      e.intensity = std::max(0.0, e.per_scale.back());
      e.estimator = estimator;
      e.box_volume = box.volume();
      e.point_count = final_count;
      const auto& I = e.per_scale;
      e.last_gap = I.size() >= 2 ? std::abs(I.back() - I[I.size() - 2]) : 0.0;
      e.converged = I.size() >= 2 && e.last_gap < 1e-3 * std::max(I.back(), 1e-6);
      sp.entries.push_back(std::move(e));
    }
    std::stable_sort(sp.entries.begin(), sp.entries.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.xi < b.xi; });
    return sp;
  }

  std::vector<Peak> find_peaks(const Spectrum& sp, double floor, const ContinuousEstimator& refine)
  {
    const auto& E = sp.entries;
    std::vector<Peak> out;
    if (E.empty())
      return out;
    const std::size_t d = sp.dim;

    // Grid step per axis: the smallest positive spacing of distinct values.
    Vec step(d, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < d; ++a) {
      Vec vals;
      for (const auto& e : E)
        vals.push_back(e.xi[a]);
      std::sort(vals.begin(), vals.end());
      for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[i - 1])
          step[a] = std::min(step[a], vals[i] - vals[i - 1]);
      if (!std::isfinite(step[a]))
        step[a] = 0;
    }

    for (std::size_t i = 0; i < E.size(); ++i) {
      const double I = E[i].intensity;
      if (!(I >= floor))
        continue;
      bool is_max = true;
      if (d == 1) {
        if (i > 0 && E[i - 1].intensity > I)
          is_max = false;
        if (i + 1 < E.size() && E[i + 1].intensity >= I)
          is_max = false;
      } else {
        for (std::size_t j = 0; j < E.size() && is_max; ++j) {
          if (j == i)
            continue;
          bool neighbour = true;
          for (std::size_t a = 0; a < d && neighbour; ++a)
            neighbour = std::abs(E[j].xi[a] - E[i].xi[a]) <= step[a] * (1 + 1e-9);
          if (!neighbour)
            continue;
          if (E[j].intensity > I || (E[j].intensity == I && j > i))
            is_max = false;
        }
      }
      if (!is_max)
        continue;

      Peak p{ E[i].xi, I };
      if (refine) {
        Vec x = p.xi;
        double best = I;
        for (std::size_t a = 0; a < d; ++a) {
          double lo = x[a] - step[a], hi = x[a] + step[a];
          if (d == 1) {
            lo = i > 0 ? E[i - 1].xi[0] : x[0];
            hi = i + 1 < E.size() ? E[i + 1].xi[0] : x[0];
          }
          if (!(hi > lo))
            continue;
          double arg = x[a];
          Vec probe = x;
          const double v = golden_max([&](double t) {
            probe[a] = t;
            return refine(probe);
          }, lo, hi, arg);
          if (v > best) {
            best = v;
            x[a] = arg;
          }
        }
        p.xi = x;
        p.intensity = best;
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  void write_spectrum_csv(std::ostream& os, const Spectrum& sp)
  {
    for (std::size_t j = 0; j < sp.dim; ++j)
      os << "xi_" << (j + 1) << ',';
    os << "intensity,estimator,box_volume,point_count,last_gap,converged\n";
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return buf;
    };
    for (const auto& e : sp.entries) {
      for (double x : e.xi)
        os << num(x) << ',';
      os << num(e.intensity) << ',' << estimator_name(e.estimator) << ',' << num(e.box_volume) << ','
         << e.point_count << ',' << num(e.last_gap) << ',' << (e.converged ? "true" : "false") << '\n';
    }
  }

}
