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
#include "quasidiff/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quasidiff {

  namespace {

    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // exp(-2 pi i t) with the argument reduced to one period first.
    inline Complex unit_phase(double t)
    {
      const double r = t - std::nearbyint(t);
      return { std::cos(kTwoPi * r), -std::sin(kTwoPi * r) };
    }

    // Calls visit(q) for every integer vector q whose image B q may lie in the
    // closed box [lo, hi]. The innermost axis is solved exactly per row of
    // outer coordinates, so the work is (#outer rows + #hits) rather than the
    // whole bounding box. Callers filter the visited vectors exactly.
    template <class Visit>
    void enumerate_lattice(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Binv,
                           const Vec& lo, const Vec& hi, std::uint64_t cap, Visit&& visit)
    {
      const auto n = static_cast<std::size_t>(B.rows());
      double bound_scale = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        bound_scale = std::max({ bound_scale, std::abs(lo[i]), std::abs(hi[i]) });
      const double slack = 1e-9 * bound_scale;

      std::vector<std::int64_t> zmin(n), zmax(n);
      for (std::size_t i = 0; i < n; ++i) {
        double c = 0, h = 0;
        for (std::size_t j = 0; j < n; ++j) {
          c += Binv(i, j) * 0.5 * (lo[j] + hi[j]);
          h += std::abs(Binv(i, j)) * 0.5 * (hi[j] - lo[j]);
        }
        const double a = std::ceil(c - h - 1e-9 * (1 + std::abs(c) + h));
        const double b = std::floor(c + h + 1e-9 * (1 + std::abs(c) + h));
        if (!(std::abs(a) < 9e15 && std::abs(b) < 9e15))
          throw ResourceError("lattice enumeration range overflows 64-bit integers");
        zmin[i] = static_cast<std::int64_t>(a);
        zmax[i] = static_cast<std::int64_t>(b);
        if (zmax[i] < zmin[i])
          return;
      }

      std::size_t inner = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (zmax[i] - zmin[i] > zmax[inner] - zmin[inner])
          inner = i;

      double outer_rows = 1;
      for (std::size_t i = 0; i < n; ++i)
        if (i != inner)
          outer_rows *= static_cast<double>(zmax[i] - zmin[i] + 1);
      if (outer_rows > static_cast<double>(cap))
        throw ResourceError("lattice enumeration needs " + std::to_string(outer_rows)
                            + " candidate rows, above the cap of " + std::to_string(cap));

      std::uint64_t candidates = 0;
      std::vector<std::int64_t> q(zmin);
      Eigen::VectorXd r(static_cast<Eigen::Index>(n));
      while (true) {
        r.setZero();
        for (std::size_t j = 0; j < n; ++j)
          if (j != inner)
            for (std::size_t i = 0; i < n; ++i)
              r[static_cast<Eigen::Index>(i)] += B(i, j) * static_cast<double>(q[j]);

        double tmin = static_cast<double>(zmin[inner]), tmax = static_cast<double>(zmax[inner]);
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
          const double bia = B(i, inner), ri = r[static_cast<Eigen::Index>(i)];
          if (std::abs(bia) < 1e-300) {
            feasible = ri >= lo[i] - slack && ri <= hi[i] + slack;
            continue;
          }
          double t0 = (lo[i] - slack - ri) / bia, t1 = (hi[i] + slack - ri) / bia;
          if (t0 > t1)
            std::swap(t0, t1);
          tmin = std::max(tmin, std::ceil(t0));
          tmax = std::min(tmax, std::floor(t1));
        }
        if (feasible && tmin <= tmax) {
          candidates += static_cast<std::uint64_t>(tmax - tmin + 1);
          ++candidates;
          if (candidates > cap)
            throw ResourceError("lattice enumeration exceeded the cap of " + std::to_string(cap)
                                + " candidate vectors");
          for (auto t = static_cast<std::int64_t>(tmin); t <= static_cast<std::int64_t>(tmax); ++t) {
            q[inner] = t;
            visit(std::as_const(q));
          }
        }

        std::size_t i = 0;
        for (; i < n; ++i) {
          if (i == inner)
            continue;
          if (++q[i] <= zmax[i])
            break;
          q[i] = zmin[i];
        }
        if (i == n)
          break;
        q[inner] = zmin[inner];
      }
    }

    // Image B q, summed in a fixed order so results are bit-reproducible.
    void apply(const Eigen::MatrixXd& B, const std::vector<std::int64_t>& q, Vec& out)
    {
      const auto n = static_cast<std::size_t>(B.rows());
      out.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out[i] += B(i, j) * static_cast<double>(q[j]);
    }

    struct ModelSetPoint {
      Vec x;
      Vec star;
    };

    std::vector<ModelSetPoint> enumerate_model_set(const CutProjectScheme& s, const Box& physbox,
                                                   const EnumerationLimits& limits)
    {
      QD_REQUIRE(physbox.dim() == s.d_phys(), "physical box dimension does not match the scheme");
      Vec lo = physbox.lo(), hi = physbox.hi();
      lo.insert(lo.end(), s.window().lo().begin(), s.window().lo().end());
      hi.insert(hi.end(), s.window().hi().begin(), s.window().hi().end());
      std::vector<ModelSetPoint> out;
      Vec img;
      const std::size_t d = s.d_phys();
      enumerate_lattice(s.basis(), s.inverse(), lo, hi, limits.max_candidates,
                        [&](const std::vector<std::int64_t>& q) {
                          apply(s.basis(), q, img);
                          std::span<const double> x(img.data(), d), y(img.data() + d, s.d_int());
                          if (physbox.contains(x) && s.window().contains(y))
                            out.push_back({ Vec(x.begin(), x.end()), Vec(y.begin(), y.end()) });
                        });
      return out;
    }

    nlohmann::json scheme_params(const CutProjectScheme& s, const Box& physbox)
    {
      auto j = io::scheme_to_json(s);
      return { { "scheme", j }, { "box", io::box_to_json(physbox) } };
    }

    double separation_or_inf(const WeightedPointSet& w)
    {
      return w.size() >= 2 ? min_separation(w) : std::numeric_limits<double>::infinity();
    }

  }

  // ---------------------------------------------------------------------------

  Deformation Deformation::affine(Eigen::MatrixXd A, Vec b)
  {
    QD_REQUIRE(A.rows() >= 1 && A.cols() >= 1, "affine deformation needs a nonempty matrix");
    QD_REQUIRE(static_cast<std::size_t>(A.rows()) == b.size(), "affine deformation: A rows != len(b)");
    QD_REQUIRE(A.allFinite(), "affine deformation must be finite");
    Deformation d;
    d.m_kind = Kind::affine;
    d.m_dphys = b.size();
    d.m_A = std::move(A);
    d.m_b = std::move(b);
    return d;
  }

  Deformation Deformation::table(Box grid, std::vector<std::size_t> shape, std::vector<double> values,
                                 std::size_t d_phys)
  {
    QD_REQUIRE(shape.size() == grid.dim(), "deformation table: shape/grid dimension mismatch");
    QD_REQUIRE(d_phys >= 1, "deformation table: d_phys must be >= 1");
    std::size_t nodes = 1;
    for (auto n : shape) {
      QD_REQUIRE(n >= 2, "deformation table needs at least 2 nodes per axis");
      nodes *= n;
    }
    QD_REQUIRE(values.size() == nodes * d_phys, "deformation table: wrong number of values");
    for (double v : values)
      QD_REQUIRE(std::isfinite(v), "deformation table values must be finite");
    Deformation d;
    d.m_kind = Kind::table;
    d.m_dphys = d_phys;
    d.m_grid = std::move(grid);
    d.m_shape = std::move(shape);
    d.m_values = std::move(values);
    return d;
  }

  std::size_t Deformation::d_int() const noexcept
  {
    return m_kind == Kind::affine ? static_cast<std::size_t>(m_A.cols()) : m_shape.size();
  }

  Vec Deformation::operator()(std::span<const double> y) const
  {
    QD_REQUIRE(y.size() == d_int(), "deformation argument has the wrong dimension");
    Vec out(m_dphys, 0.0);
    if (m_kind == Kind::affine) {
      for (std::size_t i = 0; i < m_dphys; ++i) {
        double v = m_b[i];
        for (std::size_t j = 0; j < y.size(); ++j)
          v += m_A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * y[j];
        out[i] = v;
      }
      return out;
    }
    const std::size_t m = m_shape.size();
    std::vector<std::size_t> base(m);
    Vec frac(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double step = m_grid->side(j) / static_cast<double>(m_shape[j] - 1);
      double t = (y[j] - m_grid->lo()[j]) / step;
      t = std::clamp(t, 0.0, static_cast<double>(m_shape[j] - 1));
      base[j] = std::min(static_cast<std::size_t>(t), m_shape[j] - 2);
      frac[j] = t - static_cast<double>(base[j]);
    }
    for (std::size_t corner = 0; corner < (std::size_t{ 1 } << m); ++corner) {
      double w = 1;
      std::size_t flat = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const bool up = (corner >> j) & 1u;
        w *= up ? frac[j] : 1 - frac[j];
        flat = flat * m_shape[j] + base[j] + (up ? 1 : 0);
      }
      if (w == 0)
        continue;
      for (std::size_t i = 0; i < m_dphys; ++i)
        out[i] += w * m_values[flat * m_dphys + i];
    }
    return out;
  }

  double Deformation::sup_norm(const Box& window) const
  {
    double best = 0;
    if (m_kind == Kind::affine) {
      const std::size_t m = window.dim();
      Vec y(m);
      for (std::size_t corner = 0; corner < (std::size_t{ 1 } << m); ++corner) {
        for (std::size_t j = 0; j < m; ++j)
          y[j] = ((corner >> j) & 1u) ? window.hi()[j] : window.lo()[j];
        const Vec v = (*this)(y);
        double s = 0;
        for (double c : v)
          s += c * c;
        best = std::max(best, std::sqrt(s));
      }
      return best;
    }
    for (std::size_t n = 0; n < m_values.size() / m_dphys; ++n) {
      double s = 0;
      for (std::size_t i = 0; i < m_dphys; ++i)
        s += m_values[n * m_dphys + i] * m_values[n * m_dphys + i];
      best = std::max(best, std::sqrt(s));
    }
    return best;
  }

  // ---------------------------------------------------------------------------

  CutProjectScheme::CutProjectScheme(std::size_t d_phys, std::size_t d_int, Eigen::MatrixXd basis,
                                     Box window, std::optional<Deformation> deformation)
    : m_dphys(d_phys), m_dint(d_int), m_basis(std::move(basis)), m_window(std::move(window)),
      m_deformation(std::move(deformation))
  {
    QD_REQUIRE(d_phys >= 1 && d_int >= 1, "scheme dimensions must be >= 1");
    const auto n = static_cast<Eigen::Index>(d_phys + d_int);
    QD_REQUIRE(m_basis.rows() == n && m_basis.cols() == n,
               "basis must be a (d_phys+d_int) x (d_phys+d_int) matrix");
    QD_REQUIRE(m_basis.allFinite(), "basis entries must be finite");
    QD_REQUIRE(m_window.dim() == d_int, "window dimension must equal d_int");
    const double scale = m_basis.cwiseAbs().maxCoeff();
    const double det = m_basis.determinant();
    QD_REQUIRE(std::abs(det) > 1e-12 * std::pow(scale, static_cast<double>(n)),
               "basis matrix is singular");
    m_covolume = std::abs(det);
    m_inverse = m_basis.inverse();
    m_dual = m_inverse.transpose();
    if (m_deformation) {
      QD_REQUIRE(m_deformation->d_phys() == d_phys, "deformation codomain must be R^d_phys");
      QD_REQUIRE(m_deformation->d_int() == d_int, "deformation domain must be R^d_int");
    }
  }

  CutProjectScheme CutProjectScheme::preset(std::string_view name)
  {
    const double tau = std::numbers::phi;
    const double s2 = std::numbers::sqrt2;
    Eigen::MatrixXd M(2, 2);
    if (name == "fibonacci") {
      M << 1, tau, 1, 1 - tau;
      return { 1, 1, M, Box({ -1.0 }, { tau - 1 }) };
    }
    if (name == "silver-mean") {
      M << 1, s2, 1, -s2;
      return { 1, 1, M, Box({ -1.0 }, { s2 - 1 }) };
    }
    if (name == "ammann-1d") {
      M << 1, tau, 1, 1 - tau;
      return { 1, 1, M, Box({ -0.5 * tau }, { 0.5 * tau }) };
    }
    if (name == "integers") {
      // internal direction decoupled: every lattice point lands in the window
      M << 1, 0, 0, 1;
      return { 1, 1, M, Box({ -0.5 }, { 0.5 }) };
    }
    throw ValidationError("unknown scheme preset '" + std::string(name) + "'");
  }

  std::vector<std::string> CutProjectScheme::preset_names()
  {
    return { "fibonacci", "silver-mean", "ammann-1d", "integers" };
  }

  CutProjectScheme CutProjectScheme::with_window(Box w) const
  {
    return { m_dphys, m_dint, m_basis, std::move(w), m_deformation };
  }

  CutProjectScheme CutProjectScheme::with_deformation(std::optional<Deformation> d) const
  {
    return { m_dphys, m_dint, m_basis, m_window, std::move(d) };
  }

  StarImage star_map(const CutProjectScheme& s, std::span<const std::int64_t> q)
  {
    QD_REQUIRE(q.size() == s.rank(), "star_map: integer vector has the wrong length");
    Vec img;
    apply(s.basis(), std::vector<std::int64_t>(q.begin(), q.end()), img);
    return { Vec(img.begin(), img.begin() + static_cast<std::ptrdiff_t>(s.d_phys())),
             Vec(img.begin() + static_cast<std::ptrdiff_t>(s.d_phys()), img.end()) };
  }

  WeightedPointSet model_set(const CutProjectScheme& s, const Box& physbox,
                             const EnumerationLimits& limits)
  {
    const auto pts = enumerate_model_set(s, physbox, limits);
    std::vector<double> coords;
    coords.reserve(pts.size() * s.d_phys());
    for (const auto& p : pts)
      coords.insert(coords.end(), p.x.begin(), p.x.end());
    nlohmann::json meta = { { "generator", "model-set" }, { "params", scheme_params(s, physbox) },
                            { "seed", nullptr } };
    WeightedPointSet out(s.d_phys(), std::move(coords), {}, std::move(meta), physbox);
    if (out.size() >= 2 && min_separation(out) < 1e-9)
      throw ValidationError("physical projection is not injective on this patch "
                            "(two lattice points within 1e-9)");
    return out;
  }

  WeightedPointSet deformed_model_set(const CutProjectScheme& s, const Deformation& theta,
                                      const Box& physbox, const EnumerationLimits& limits)
  {
    QD_REQUIRE(theta.d_phys() == s.d_phys() && theta.d_int() == s.d_int(),
               "deformation dimensions do not match the scheme");
    const double sup = theta.sup_norm(s.window());
    const Box padded = sup > 0 ? physbox.padded(sup) : physbox;
    const auto pts = enumerate_model_set(s, padded, limits);

    std::vector<double> undeformed, coords;
    undeformed.reserve(pts.size() * s.d_phys());
    for (const auto& p : pts) {
      undeformed.insert(undeformed.end(), p.x.begin(), p.x.end());
      Vec x = p.x;
      const Vec t = theta(p.star);
      for (std::size_t j = 0; j < x.size(); ++j)
        x[j] += t[j];
      if (physbox.contains(x))
        coords.insert(coords.end(), x.begin(), x.end());
    }
    const double sep = separation_or_inf(WeightedPointSet(s.d_phys(), std::move(undeformed)));
    auto params = scheme_params(s, physbox);
    params["deformation"] = io::deformation_to_json(theta);
    params["sup_deformation"] = sup;
    params["separation_warning"] = !(sup < 0.5 * sep);
    nlohmann::json meta = { { "generator", "deformed-model-set" }, { "params", params },
                            { "seed", nullptr } };
    return { s.d_phys(), std::move(coords), {}, std::move(meta), physbox };
  }

  Complex window_ft(const Box& window, std::span<const double> k_star)
  {
    QD_REQUIRE(k_star.size() == window.dim(), "window_ft: frequency dimension mismatch");
    Complex out(1.0, 0.0);
    for (std::size_t j = 0; j < window.dim(); ++j) {
      const double kappa = k_star[j], a = window.lo()[j], b = window.hi()[j];
      if (std::abs(kappa) < 1e-12) {
        out *= b - a;
        continue;
      }
      const Complex num = unit_phase(kappa * b) - unit_phase(kappa * a);
      out *= num / Complex(0.0, -kTwoPi * kappa);
    }
    return out;
  }

  std::vector<BraggCandidate> dual_peaks(const CutProjectScheme& s, const Box& phys_range,
                                         double intensity_floor, const EnumerationLimits& limits)
  {
    QD_REQUIRE(intensity_floor > 0, "dual_peaks needs a positive intensity floor");
    QD_REQUIRE(phys_range.dim() == s.d_phys(), "frequency range dimension does not match the scheme");
    const std::size_t d = s.d_phys(), m = s.d_int();
    const double amp_floor = std::sqrt(intensity_floor) * s.covolume();

    // |window_ft| <= prod_i min(len_i, 1/(pi |kappa_i|)).
    Vec lo = phys_range.lo(), hi = phys_range.hi();
    double all_len = 1;
    for (std::size_t j = 0; j < m; ++j)
      all_len *= s.window().side(j);
    if (all_len < amp_floor)
      return {};
    for (std::size_t j = 0; j < m; ++j) {
      const double others = all_len / s.window().side(j);
      const double kmax = others / (std::numbers::pi * amp_floor);
      lo.push_back(-kmax);
      hi.push_back(kmax);
    }

    std::vector<BraggCandidate> out;
    Vec img;
    enumerate_lattice(s.dual_basis(), s.basis().transpose(), lo, hi, limits.max_candidates,
                      [&](const std::vector<std::int64_t>& q) {
                        apply(s.dual_basis(), q, img);
                        for (std::size_t j = 0; j < d; ++j)
                          if (img[j] < phys_range.lo()[j] || img[j] > phys_range.hi()[j])
                            return;
                        BraggCandidate c;
                        c.k.assign(img.begin(), img.begin() + static_cast<std::ptrdiff_t>(d));
                        c.k_star.assign(img.begin() + static_cast<std::ptrdiff_t>(d), img.end());
                        c.amplitude = window_ft(s.window(), c.k_star) / s.covolume();
                        c.intensity = std::norm(c.amplitude);
                        if (c.intensity < intensity_floor)
                          return;
                        c.dual_index = q;
                        out.push_back(std::move(c));
                      });
    std::sort(out.begin(), out.end(), [](const BraggCandidate& a, const BraggCandidate& b) {
      return a.k < b.k;
    });
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size() && out[j].k[0] - out[i].k[0] <= 1e-9; ++j) {
        bool same = true;
        for (std::size_t a = 0; a < d; ++a)
          same = same && std::abs(out[j].k[a] - out[i].k[a]) <= 1e-9;
        if (same)
          throw DegenerateProjectionError(
            "degenerate dual projection: two dual lattice vectors project to the same "
            "physical frequency (within 1e-9); k* is not unique for this basis");
      }
    return out;
  }

  Complex deformed_amplitude(const CutProjectScheme& s, const Deformation& theta,
                             const BraggCandidate& cand, std::size_t quad_points_per_axis)
  {
    QD_REQUIRE(quad_points_per_axis >= 2, "deformed_amplitude needs >= 2 quadrature points per axis");
    QD_REQUIRE(theta.d_phys() == s.d_phys() && theta.d_int() == s.d_int(),
               "deformation dimensions do not match the scheme");
    QD_REQUIRE(cand.k.size() == s.d_phys() && cand.k_star.size() == s.d_int(),
               "candidate dimensions do not match the scheme");
    const std::size_t m = s.d_int();
    const std::size_t q = quad_points_per_axis;
    Vec step(m);
    double cell = 1;
    for (std::size_t j = 0; j < m; ++j) {
      step[j] = s.window().side(j) / static_cast<double>(q);
      cell *= step[j];
    }
    std::size_t total = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (total > 400'000'000 / q)
        throw ResourceError("deformed_amplitude: quadrature grid too large");
      total *= q;
    }
    Complex sum, comp;
    Vec y(m);
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t n = 0; n < total; ++n) {
      for (std::size_t j = 0; j < m; ++j)
        y[j] = s.window().lo()[j] + (static_cast<double>(idx[j]) + 0.5) * step[j];
      const Vec t = theta(y);
      double phase = 0;
      for (std::size_t j = 0; j < m; ++j)
        phase += cand.k_star[j] * y[j];
      for (std::size_t j = 0; j < t.size(); ++j)
        phase -= cand.k[j] * t[j];
      const Complex v = unit_phase(phase) - comp;
      const Complex tt = sum + v;
      comp = (tt - sum) - v;
      sum = tt;
      for (std::size_t j = m; j-- > 0;) {
        if (++idx[j] < q)
          break;
        idx[j] = 0;
      }
    }
    return sum * cell / s.covolume();
  }

}
