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

#ifndef QUASIDIFF_ERGODIC_HPP
#define QUASIDIFF_ERGODIC_HPP

#include "quasidiff/geometry.hpp"
#include "quasidiff/pointset.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quasidiff {

  /// Locally constant function on a subshift: its value depends on the block
  /// of 2L+1 symbols starting at the evaluation position.
  class Observable {
  public:
    Observable(std::size_t locality, std::map<std::string, Complex, std::less<>> table);

    static Observable constant(Complex c, std::string_view alphabet);
    static Observable indicator(char letter, std::string_view alphabet);
    // Indicator minus its mean over `sample`.
    static Observable centered_indicator(char letter, std::string_view sample);

    std::size_t locality() const noexcept { return m_locality; }
    std::size_t block_length() const noexcept { return 2 * m_locality + 1; }
    const std::map<std::string, Complex, std::less<>>& table() const noexcept { return m_table; }
    double max_abs() const noexcept { return m_maxabs; }

    // Throws ValidationError for a block missing from the table.
    Complex operator()(std::string_view block) const;

  private:
    std::size_t m_locality;
    std::map<std::string, Complex, std::less<>> m_table;
    double m_maxabs = 0.0;
  };

  // (1/n) sum_{k<n} exp(-2 pi i alpha k) f(word[offset+k, offset+k+2L]).
  Complex ww_average(std::string_view word, const Observable& f, double alpha,
                     std::size_t n, std::size_t offset);

  struct OffsetSpread {
    double sup = 0.0;
    double inf = 0.0;
    double spread = 0.0;
  };

  OffsetSpread ww_sup_over_offsets(std::string_view word, const Observable& f, double alpha,
                                   std::size_t n, std::span<const std::size_t> offsets);

  double ww_sup_over_frequencies(std::string_view word, const Observable& f,
                                 std::span<const double> alphas, std::size_t n,
                                 std::size_t offset);

  struct AverageReport {
    double alpha = 0.0;
    std::vector<std::size_t> lengths;
    std::vector<Complex> values;       // at offsets[0]
    double sup_deviation = 0.0;        // spread over offsets at the largest length
    double limit_estimate = 0.0;       // |A_n| at the largest length
  };

  AverageReport ww_report(std::string_view word, const Observable& f, double alpha,
                          std::span<const std::size_t> lengths,
                          std::span<const std::size_t> offsets);

  struct SubadditiveResult {
    std::vector<double> scales;
    std::vector<std::vector<double>> samples;  // F(Q)/|Q| per scale and position
    std::vector<double> per_scale_mean;
    std::vector<double> per_scale_spread;      // max - min per scale
    double limit = 0.0;                        // mean at the largest scale
  };

  // Boxes with sides in [r, 2r] placed uniformly inside `domain`.
  SubadditiveResult subadditive_limit(const std::function<double(const Box&)>& evaluator,
                                      const Box& domain, std::span<const double> scales,
                                      std::size_t samples_per_scale, std::uint64_t seed);

  // Factors of length r at uniformly drawn offsets.
  SubadditiveResult subadditive_limit(const std::function<double(std::string_view)>& evaluator,
                                      std::string_view word, std::span<const std::size_t> lengths,
                                      std::size_t samples_per_scale, std::uint64_t seed);

  struct RepetitivityReport {
    std::vector<std::size_t> radii;
    std::vector<double> constants;   // max return gap / R
    double C_estimate = 0.0;
    std::size_t adequacy_bound = 0;  // 4 * max radius
    std::size_t singletons = 0;      // factors seen only once (gap set to |word|)
  };

  RepetitivityReport check_linear_repetitivity(std::string_view word,
                                               std::span<const std::size_t> radii);

}

#endif
