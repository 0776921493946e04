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

#ifndef QUASIDIFF_CUTPROJECT_HPP
#define QUASIDIFF_CUTPROJECT_HPP

#include "quasidiff/pointset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace quasidiff {

  /// Continuous map theta: window -> R^{d_phys} used to deform model sets.
  /// Either affine (A y + b) or a table sampled on a regular grid over a box
  /// with multilinear interpolation (clamped to the grid outside it).
  class Deformation {
  public:
    enum class Kind { affine, table };

    static Deformation affine(Eigen::MatrixXd A, Vec b);
    // `values` holds d_phys numbers per node, nodes in row-major order over
    // `shape` (last axis fastest). Each shape entry must be >= 2.
    static Deformation table(Box grid, std::vector<std::size_t> shape,
                             std::vector<double> values, std::size_t d_phys);

    Kind kind() const noexcept { return m_kind; }
    std::size_t d_phys() const noexcept { return m_dphys; }
    std::size_t d_int() const noexcept;

    Vec operator()(std::span<const double> y) const;
    // Upper bound of |theta(y)| (Euclidean) over the window.
    double sup_norm(const Box& window) const;

    const Eigen::MatrixXd& A() const noexcept { return m_A; }
    const Vec& b() const noexcept { return m_b; }
    const std::optional<Box>& grid() const noexcept { return m_grid; }
    const std::vector<std::size_t>& shape() const noexcept { return m_shape; }
    const std::vector<double>& values() const noexcept { return m_values; }

  private:
    Deformation() = default;
    Kind m_kind = Kind::affine;
    std::size_t m_dphys = 0;
    Eigen::MatrixXd m_A;
    Vec m_b;
    std::optional<Box> m_grid;
    std::vector<std::size_t> m_shape;
    std::vector<double> m_values;
  };

  /// Lattice M Z^{d+m} in R^d x R^m (columns of M are the generators) with a
  /// box window in internal space. Amplitudes are divided by |det M|, so the
  /// lattice need not have unit covolume.
  class CutProjectScheme {
  public:
    CutProjectScheme(std::size_t d_phys, std::size_t d_int, Eigen::MatrixXd basis,
                     Box window, std::optional<Deformation> deformation = std::nullopt);

    // "fibonacci", "silver-mean", "ammann-1d" (see README for the matrices).
    static CutProjectScheme preset(std::string_view name);
    static std::vector<std::string> preset_names();

    std::size_t d_phys() const noexcept { return m_dphys; }
    std::size_t d_int() const noexcept { return m_dint; }
    std::size_t rank() const noexcept { return m_dphys + m_dint; }
    const Eigen::MatrixXd& basis() const noexcept { return m_basis; }
    const Eigen::MatrixXd& inverse() const noexcept { return m_inverse; }
    // (M^-1)^T; columns generate the dual lattice.
    const Eigen::MatrixXd& dual_basis() const noexcept { return m_dual; }
    const Box& window() const noexcept { return m_window; }
    double covolume() const noexcept { return m_covolume; }
    const std::optional<Deformation>& deformation() const noexcept { return m_deformation; }

    CutProjectScheme with_window(Box w) const;
    CutProjectScheme with_deformation(std::optional<Deformation> d) const;

  private:
    std::size_t m_dphys;
    std::size_t m_dint;
    Eigen::MatrixXd m_basis;
    Eigen::MatrixXd m_inverse;
    Eigen::MatrixXd m_dual;
    Box m_window;
    double m_covolume;
    std::optional<Deformation> m_deformation;
  };

  struct EnumerationLimits {
    std::uint64_t max_candidates = 100'000'000;
  };

  struct StarImage {
    Vec phys;
    Vec internal;
  };

  StarImage star_map(const CutProjectScheme& s, std::span<const std::int64_t> q);

  WeightedPointSet model_set(const CutProjectScheme& s, const Box& physbox,
                             const EnumerationLimits& limits = {});

  // Points x + theta(x*) that land in physbox. meta.params.separation_warning
  // is set when sup|theta| is not below half the undeformed separation.
  WeightedPointSet deformed_model_set(const CutProjectScheme& s, const Deformation& theta,
                                      const Box& physbox, const EnumerationLimits& limits = {});

  // Integral over the window of exp(-2 pi i k*.y) dy, closed form per axis.
  Complex window_ft(const Box& window, std::span<const double> k_star);

  struct BraggCandidate {
    Vec k;
    Vec k_star;
    std::vector<std::int64_t> dual_index;
    Complex amplitude;
    double intensity = 0.0;
  };

  class DegenerateProjectionError : public NumericalError {
  public:
    using NumericalError::NumericalError;
  };

  // Dual lattice points with k in the closed range and intensity >= floor,
  // sorted by k. Throws DegenerateProjectionError when two listed peaks share
  // k (within 1e-9) with different dual indices.
  std::vector<BraggCandidate> dual_peaks(const CutProjectScheme& s, const Box& phys_range,
                                         double intensity_floor,
                                         const EnumerationLimits& limits = {});

  // (1/covol) * integral_W exp(-2 pi i k*.y) exp(+2 pi i k.theta(y)) dy by the
  // midpoint rule. Same conjugation as BraggCandidate::amplitude, so theta = 0
  // gives window_ft(W, k*)/covol; the Fourier-average limit c^k is its conjugate.
  Complex deformed_amplitude(const CutProjectScheme& s, const Deformation& theta,
                             const BraggCandidate& cand, std::size_t quad_points_per_axis);

}

#endif
