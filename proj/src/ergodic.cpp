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

#include "quasidiff/ergodic.hpp"
#include "quasidiff/parallel.hpp"
#include "quasidiff/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

namespace quasidiff {

  namespace {

    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // exp(-2 pi i t) with the integer part of t removed first.
    Complex unit_phase(double t)
    {
      const double r = t - std::nearbyint(t);
      return { std::cos(kTwoPi * r), -std::sin(kTwoPi * r) };
    }

    void require_window(std::string_view word, const Observable& f, std::size_t n, std::size_t offset)
    {
      QD_REQUIRE(n >= 1, "averaging length must be >= 1");
      QD_REQUIRE(offset + n - 1 + f.block_length() <= word.size(),
                 "averaging window runs past the end of the word (offset " + std::to_string(offset)
                   + ", length " + std::to_string(n) + ", word length " + std::to_string(word.size())
                   + ")");
    }

    // f evaluated at positions offset .. offset+n-1.
    std::vector<Complex> sample(std::string_view word, const Observable& f, std::size_t n, std::size_t offset)
    {
      require_window(word, f, n, offset);
      std::vector<Complex> v(n);
      const std::size_t bl = f.block_length();
      if (bl == 1) {
        std::array<const Complex*, 256> lut {};
        for (const auto& [k, c] : f.table())
          lut[static_cast<unsigned char>(k[0])] = &c;
        for (std::size_t k = 0; k < n; ++k) {
          const auto* c = lut[static_cast<unsigned char>(word[offset + k])];
          if (!c)
            return { f(word.substr(offset + k, 1)) };  // throws
          v[k] = *c;
        }
        return v;
      }
      for (std::size_t k = 0; k < n; ++k)
        v[k] = f(word.substr(offset + k, bl));
      return v;
    }

    Complex modulated_mean(const std::vector<Complex>& vals, double alpha)
    {
      Complex sum, comp;
      for (std::size_t k = 0; k < vals.size(); ++k) {
        const Complex y = vals[k] * unit_phase(alpha * static_cast<double>(k)) - comp;
        const Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      return sum / static_cast<double>(vals.size());
    }

    void summarize(SubadditiveResult& r)
    {
      for (const auto& s : r.samples) {
        double m = 0;
        for (double v : s)
          m += v;
        r.per_scale_mean.push_back(m / static_cast<double>(s.size()));
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        r.per_scale_spread.push_back(*hi - *lo);
      }
      r.limit = r.per_scale_mean.back();
    }

  }

  Observable::Observable(std::size_t locality, std::map<std::string, Complex, std::less<>> table)
    : m_locality(locality), m_table(std::move(table))
  {
    QD_REQUIRE(!m_table.empty(), "observable table is empty");
    for (const auto& [k, v] : m_table) {
      QD_REQUIRE(k.size() == block_length(),
                 "observable block '" + k + "' must have length " + std::to_string(block_length()));
      QD_REQUIRE(std::isfinite(v.real()) && std::isfinite(v.imag()), "observable values must be finite");
      m_maxabs = std::max(m_maxabs, std::abs(v));
    }
  }

  Observable Observable::constant(Complex c, std::string_view alphabet)
  {
    std::map<std::string, Complex, std::less<>> t;
    for (char a : alphabet)
      t[std::string(1, a)] = c;
    return { 0, std::move(t) };
  }

  Observable Observable::indicator(char letter, std::string_view alphabet)
  {
    std::map<std::string, Complex, std::less<>> t;
    for (char a : alphabet)
      t[std::string(1, a)] = a == letter ? 1.0 : 0.0;
    QD_REQUIRE(t.count(std::string(1, letter)), "indicator letter is not in the alphabet");
    return { 0, std::move(t) };
  }

  Observable Observable::centered_indicator(char letter, std::string_view sample)
  {
    QD_REQUIRE(!sample.empty(), "centering sample is empty");
    const std::set<char> letters(sample.begin(), sample.end());
    const double mean = static_cast<double>(std::count(sample.begin(), sample.end(), letter))
                        / static_cast<double>(sample.size());
    std::map<std::string, Complex, std::less<>> t;
    for (char a : letters)
      t[std::string(1, a)] = (a == letter ? 1.0 : 0.0) - mean;
    t.try_emplace(std::string(1, letter), 1.0 - mean);
    return { 0, std::move(t) };
  }

  Complex Observable::operator()(std::string_view block) const
  {
    const auto it = m_table.find(block);
    if (it == m_table.end())
      throw ValidationError("observable has no value for block '" + std::string(block) + "'");
    return it->second;
  }

  Complex ww_average(std::string_view word, const Observable& f, double alpha, std::size_t n,
                     std::size_t offset)
  {
    QD_REQUIRE(std::isfinite(alpha), "frequency must be finite");
    return modulated_mean(sample(word, f, n, offset), alpha);
  }

  OffsetSpread ww_sup_over_offsets(std::string_view word, const Observable& f, double alpha,
                                   std::size_t n, std::span<const std::size_t> offsets)
  {
    QD_REQUIRE(!offsets.empty(), "no offsets given");
    std::vector<double> mags(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
      require_window(word, f, n, offsets[i]);
    parallel_for(offsets.size(), [&](std::size_t i) {
      mags[i] = std::abs(ww_average(word, f, alpha, n, offsets[i]));
    });
    const auto [lo, hi] = std::minmax_element(mags.begin(), mags.end());
    return { *hi, *lo, *hi - *lo };
  }

  double ww_sup_over_frequencies(std::string_view word, const Observable& f,
                                 std::span<const double> alphas, std::size_t n, std::size_t offset)
  {
    QD_REQUIRE(!alphas.empty(), "no frequencies given");
    const auto vals = sample(word, f, n, offset);
    std::vector<double> mags(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t i) { mags[i] = std::abs(modulated_mean(vals, alphas[i])); });
    return *std::max_element(mags.begin(), mags.end());
  }

  AverageReport ww_report(std::string_view word, const Observable& f, double alpha,
                          std::span<const std::size_t> lengths, std::span<const std::size_t> offsets)
  {
    QD_REQUIRE(!lengths.empty(), "no averaging lengths given");
    QD_REQUIRE(!offsets.empty(), "no offsets given");
    AverageReport r;
    r.alpha = alpha;
    r.lengths.assign(lengths.begin(), lengths.end());
    r.values.resize(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i)
      require_window(word, f, lengths[i], offsets[0]);
    parallel_for(lengths.size(), [&](std::size_t i) {
      r.values[i] = ww_average(word, f, alpha, lengths[i], offsets[0]);
    });
    const std::size_t nmax = *std::max_element(lengths.begin(), lengths.end());
    r.sup_deviation = ww_sup_over_offsets(word, f, alpha, nmax, offsets).spread;
    r.limit_estimate = std::abs(ww_average(word, f, alpha, nmax, offsets[0]));
    return r;
  }

  SubadditiveResult subadditive_limit(const std::function<double(const Box&)>& evaluator,
                                      const Box& domain, std::span<const double> scales,
                                      std::size_t samples_per_scale, std::uint64_t seed)
  {
    QD_REQUIRE(!scales.empty(), "no scales given");
    QD_REQUIRE(samples_per_scale >= 1, "need at least one sample per scale");
    const std::size_t d = domain.dim();
    for (double r : scales) {
      QD_REQUIRE(r > 0 && std::isfinite(r), "scales must be positive");
      for (std::size_t j = 0; j < d; ++j)
        QD_REQUIRE(2 * r <= domain.side(j),
                   "scale " + std::to_string(r) + " needs boxes exceeding the available patch");
    }
    const CounterRng rng(seed);
    SubadditiveResult res;
    res.scales.assign(scales.begin(), scales.end());
    res.samples.assign(scales.size(), std::vector<double>(samples_per_scale));
    for (std::size_t s = 0; s < scales.size(); ++s) {
      const double r = scales[s];
      parallel_for(samples_per_scale, [&](std::size_t i) {
        Vec lo(d), hi(d);
        for (std::size_t j = 0; j < d; ++j) {
          const std::uint64_t idx = (s * samples_per_scale + i) * d + j;
          const double side = r * (1.0 + rng.uniform(idx, 0));
          lo[j] = domain.lo()[j] + rng.uniform(idx, 1) * (domain.side(j) - side);
          hi[j] = lo[j] + side;
        }
        const Box q(lo, hi);
        res.samples[s][i] = evaluator(q) / q.volume();
      });
    }
    summarize(res);
    return res;
  }

  SubadditiveResult subadditive_limit(const std::function<double(std::string_view)>& evaluator,
                                      std::string_view word, std::span<const std::size_t> lengths,
                                      std::size_t samples_per_scale, std::uint64_t seed)
  {
    QD_REQUIRE(!lengths.empty(), "no lengths given");
    QD_REQUIRE(samples_per_scale >= 1, "need at least one sample per scale");
    for (std::size_t r : lengths)
      QD_REQUIRE(r >= 1 && r <= word.size(),
                 "factor length " + std::to_string(r) + " exceeds the available word");
    const CounterRng rng(seed);
    SubadditiveResult res;
    res.samples.assign(lengths.size(), std::vector<double>(samples_per_scale));
    for (std::size_t s = 0; s < lengths.size(); ++s) {
      const std::size_t r = lengths[s];
      res.scales.push_back(static_cast<double>(r));
      const std::size_t span = word.size() - r + 1;
      parallel_for(samples_per_scale, [&](std::size_t i) {
        auto off = static_cast<std::size_t>(rng.uniform(s * samples_per_scale + i) * static_cast<double>(span));
        off = std::min(off, span - 1);
        res.samples[s][i] = evaluator(word.substr(off, r)) / static_cast<double>(r);
      });
    }
    summarize(res);
    return res;
  }

  RepetitivityReport check_linear_repetitivity(std::string_view word, std::span<const std::size_t> radii)
  {
    QD_REQUIRE(!radii.empty(), "no radii given");
    RepetitivityReport rep;
    rep.radii.assign(radii.begin(), radii.end());
    const std::size_t rmax = *std::max_element(radii.begin(), radii.end());
    QD_REQUIRE(radii.front() >= 1 && *std::min_element(radii.begin(), radii.end()) >= 1, "radii must be >= 1");
    rep.adequacy_bound = 4 * rmax;
    QD_REQUIRE(word.size() >= rep.adequacy_bound,
               "word of length " + std::to_string(word.size()) + " is too short for radius "
                 + std::to_string(rmax) + "; need at least " + std::to_string(rep.adequacy_bound));

    // Two polynomial hashes modulo the Mersenne prime 2^61 - 1.
    using u64 = std::uint64_t;
    constexpr u64 P = (u64(1) << 61) - 1;
    auto mulmod = [](u64 a, u64 b) {
      const unsigned __int128 m = static_cast<unsigned __int128>(a) * b;
      u64 r = static_cast<u64>(m & P) + static_cast<u64>(m >> 61);
      return r >= P ? r - P : r;
    };
    constexpr u64 B1 = 1000003, B2 = 998244353;
    const std::size_t N = word.size();

    struct KeyHash {
      std::size_t operator()(const std::pair<u64, u64>& k) const noexcept
      {
        return std::hash<u64>{}(k.first ^ (k.second * 0x9E3779B97F4A7C15ULL));
      }
    };

    double cmax = 0;
    for (std::size_t R : radii) {
      u64 p1 = 1, p2 = 1;
      for (std::size_t i = 0; i < R; ++i) {
        p1 = mulmod(p1, B1);
        p2 = mulmod(p2, B2);
      }
      u64 h1 = 0, h2 = 0;
      for (std::size_t i = 0; i < R; ++i) {
        const u64 c = static_cast<unsigned char>(word[i]) + 1;
        h1 = (mulmod(h1, B1) + c) % P;
        h2 = (mulmod(h2, B2) + c) % P;
      }
      std::unordered_map<std::pair<u64, u64>, std::pair<std::size_t, std::size_t>, KeyHash> seen;
      std::size_t maxgap = 0;
      for (std::size_t i = 0;; ++i) {
        auto [it, fresh] = seen.try_emplace({ h1, h2 }, i, 1);
        if (!fresh) {
          maxgap = std::max(maxgap, i - it->second.first);
          it->second.first = i;
          ++it->second.second;
        }
        if (i + R >= N)
          break;
        const u64 out = static_cast<unsigned char>(word[i]) + 1;
        const u64 in = static_cast<unsigned char>(word[i + R]) + 1;
        h1 = (mulmod(h1, B1) + P - mulmod(out, p1) + in) % P;
        h2 = (mulmod(h2, B2) + P - mulmod(out, p2) + in) % P;
      }
      for (const auto& [k, v] : seen)
        if (v.second == 1) {
          ++rep.singletons;
          maxgap = std::max(maxgap, N);
        }
      const double c = static_cast<double>(maxgap) / static_cast<double>(R);
      rep.constants.push_back(c);
      cmax = std::max(cmax, c);
    }
    rep.C_estimate = cmax;
    return rep;
  }

}
