#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace taxis {

/// Cell-centered rectangular mesh on [0, lx] x [0, ly].
///
/// The homogeneous Neumann condition is realized by mirror ghost cells, so
/// every boundary face carries zero normal flux.
class Grid {
public:
  Grid(std::size_t nx, std::size_t ny, double lx = 1.0, double ly = 1.0);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double h_min() const noexcept { return hx_ < hy_ ? hx_ : hy_; }
  double cell_volume() const noexcept { return hx_ * hy_; }
  double area() const noexcept { return lx_ * ly_; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
  double x(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * hx_; }
  double y(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * hy_; }

  bool operator==(const Grid& other) const noexcept;

private:
  std::size_t nx_;
  std::size_t ny_;
  double lx_;
  double ly_;
  double hx_;
  double hy_;
};

/// One scalar unknown sampled at cell centers, x index fastest.
class Field {
public:
  Field() = default;
  explicit Field(const Grid& g, double value = 0.0) : values_(g.size(), value) {}
  explicit Field(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool conforms(const Grid& g) const noexcept { return values_.size() == g.size(); }
  bool all_finite() const noexcept;

  bool operator==(const Field&) const = default;

private:
  std::vector<double> values_;
};

/// Samples fn(x, y) at every cell center.
template <class Fn>
Field sample(const Grid& g, Fn&& fn) {
  Field out(g);
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i)
      out[g.index(i, j)] = fn(g.x(i), g.y(j));
  return out;
}

/// Throws StructuralError unless phi has one value per cell of g.
void require_conforming(const Field& phi, const Grid& g);

/// Five-point Neumann Laplacian.
Field laplacian(const Field& phi, const Grid& g);

/// Conservative discretization of div(carrier * grad(potential)).
///
/// Each interior face carries carrier_up * (potential difference) / h, where
/// carrier_up is taken from the cell with the lower potential (the cell the
/// flux leaves). Boundary faces carry no flux.
Field taxis_divergence(const Field& carrier, const Field& potential, const Grid& g);

/// Midpoint rule.
double integrate(const Field& phi, const Grid& g);
double integrate(std::span<const double> phi, const Grid& g);

double norm_lp(const Field& phi, const Grid& g, double p);
double norm_linf(const Field& phi);

/// (sum (|Dxx|^p + |Dyy|^p + |Dxy|^p) vol)^(1/p). Boundary cells reuse the
/// stencil of the nearest cell whose centered stencil fits (one-sided closure),
/// so the seminorm of any linear field is zero.
double seminorm_w2p(const Field& phi, const Grid& g, double p);

/// Largest |difference| / h over interior faces.
double max_face_gradient(const Field& phi, const Grid& g);

/// Face-gradient quadrature of |grad v|^2 / (v + 1)^2 with the face value of
/// v taken as the mean of the two cells.
double log_gradient_energy(const Field& v, const Grid& g);

/// Midpoint quadrature of |grad phi|^p with the cell gradient taken from
/// centered differences against the mirror ghost cells.
double gradient_power_integral(const Field& phi, const Grid& g, double p);

// ---- FLD1 snapshot files ----

struct Snapshot {
  Grid grid;
  double t;
  Field values;
};

/// Header line `FLD1 nx ny Lx Ly t\n`, then nx*ny little-endian float64.
void write_fld(const std::filesystem::path& path, const Grid& g, double t, const Field& phi);
Snapshot read_fld(const std::filesystem::path& path);

} // namespace taxis
