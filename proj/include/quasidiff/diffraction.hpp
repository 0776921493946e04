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

#ifndef QUASIDIFF_DIFFRACTION_HPP
#define QUASIDIFF_DIFFRACTION_HPP

#include "quasidiff/pointset.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace quasidiff {

  // Character convention throughout: (xi, x) = exp(2 pi i xi.x).

  struct FourierAverage {
    Vec xi;
    Complex value;
    double box_volume = 0.0;
    std::size_t point_count = 0;
  };

  /// (1/vol B) * sum_{x in B} w_x exp(-2 pi i xi.x), Kahan-compensated, in
  /// canonical point order.
  FourierAverage fourier_average(const WeightedPointSet& wps, const Box& box,
                                 std::span<const double> xi);

  struct IntensitySequence {
    std::vector<double> intensities;
    std::vector<double> box_volumes;
    std::vector<std::size_t> point_counts;
    double last_gap = 0.0;
    double tolerance = 0.0;
    bool converged = false;
  };

  // |c^xi_B|^2 for each box. Default tolerance is 1e-3 * max(I_last, 1e-6).
  IntensitySequence intensity_sequence(const WeightedPointSet& wps, std::span<const Box> boxes,
                                       std::span<const double> xi,
                                       std::optional<double> tolerance = std::nullopt);

  /// Finite-volume autocorrelation (1/vol B) sum_{x,y in B} w_x conj(w_y) delta_{x-y},
  /// with differences quantized to an epsilon grid. Each bin keeps the mean of
  /// the raw differences it received as its position.
  class AutocorrelationPatch {
  public:
    struct Bin {
      std::vector<std::int64_t> key;
      Vec position;
      Complex coefficient;
    };

    AutocorrelationPatch(std::vector<Bin> bins, double bin_epsilon, double normalizing_volume,
                         std::optional<double> max_radius, Box source_box);

    const std::vector<Bin>& bins() const noexcept { return m_bins; }
    double bin_epsilon() const noexcept { return m_eps; }
    double normalizing_volume() const noexcept { return m_volume; }
    const std::optional<double>& max_radius() const noexcept { return m_radius; }
    const Box& source_box() const noexcept { return m_source; }
    std::size_t dim() const noexcept { return m_source.dim(); }

    // Coefficient of the bin containing z (zero if none).
    Complex coefficient_at(std::span<const double> z) const;
    // Sum of |coefficient| over all bins.
    double total_mass() const noexcept;
    // Box holding every difference of two points of the source box.
    Box difference_box() const;

  private:
    std::vector<Bin> m_bins;  // sorted by key
    double m_eps;
    double m_volume;
    std::optional<double> m_radius;
    Box m_source;
  };

  // Pairs with Euclidean |x-y| <= max_radius (all pairs when unset). Throws
  // ValidationError if bin_epsilon >= min_separation/2 and NumericalError
  // if one bin receives raw differences spread wider than bin_epsilon.
  AutocorrelationPatch autocorrelation(const WeightedPointSet& wps, const Box& box,
                                       std::optional<double> max_radius, double bin_epsilon);

  struct AutocorrIntensity {
    double value = 0.0;
    double imag = 0.0;  // should vanish by Hermitian symmetry
  };

  // (1/V) sum_{bins z in averaging_box} coeff(z) exp(-2 pi i xi.z) with
  // V = vol(averaging_box) unless `normalizing_volume` is given.
  AutocorrIntensity intensity_from_autocorr(const AutocorrelationPatch& patch,
                                            std::span<const double> xi, const Box& averaging_box,
                                            std::optional<double> normalizing_volume = std::nullopt);

  // Untruncated identity configuration: all differences, normalized by the
  // source box volume. Equals |fourier_average(wps, B, xi)|^2 exactly.
  AutocorrIntensity identity_intensity(const AutocorrelationPatch& patch,
                                       std::span<const double> xi);

  enum class Estimator { fourier, autocorr };

  const char* estimator_name(Estimator e) noexcept;
  Estimator estimator_from_name(std::string_view name);

  struct SpectrumEntry {
    Vec xi;
    double intensity = 0.0;
    Estimator estimator = Estimator::fourier;
    double box_volume = 0.0;
    std::size_t point_count = 0;
    std::vector<double> per_scale;
    double last_gap = 0.0;
    bool converged = false;
  };

  struct Spectrum {
    std::size_t dim = 1;
    std::vector<SpectrumEntry> entries;  // sorted by xi
  };

  struct ScanOptions {
    // Number of concentric boxes per entry; box i has the scan box's sides
    // divided by 2^(scales-1-i), so the last one is the scan box itself.
    std::size_t scales = 2;
    std::optional<double> max_radius;   // autocorr only
    std::optional<double> bin_epsilon;  // autocorr only; default 1e-6 * min separation
  };

  Spectrum scan_spectrum(const WeightedPointSet& wps, const Box& box,
                         std::span<const Vec> xi_grid, Estimator estimator,
                         const ScanOptions& opts = {});

  // Boxes used by scan_spectrum for the per-scale diagnostics.
  std::vector<Box> concentric_boxes(const Box& box, std::size_t scales);

  struct Peak {
    Vec xi;
    double intensity = 0.0;
  };

  using ContinuousEstimator = std::function<double(std::span<const double>)>;

  // Grid-local maxima with intensity >= floor. When `refine` is given, each
  // maximum is refined by a golden-section search between its grid
  // neighbours (per axis).
  std::vector<Peak> find_peaks(const Spectrum& sp, double floor,
                               const ContinuousEstimator& refine = {});

  // header: xi_1..xi_d,intensity,estimator,box_volume,point_count,last_gap,converged
  void write_spectrum_csv(std::ostream& os, const Spectrum& sp);

}

#endif
