#pragma once

#include <array>
#include <string>

#include "taxis/grid.hpp"
#include "taxis/solver.hpp"

namespace taxis {

/// base + amplitude * cos(kx pi x / lx) * cos(ky pi y / ly) * exp(-decay t).
/// Integer wave numbers keep the normal derivative zero on the boundary.
struct CosineMode {
  double base = 1.0;
  double amplitude = 0.0;
  int kx = 0;
  int ky = 0;
  double decay = 0.0;
};

/// Closed-form (u*, v*, w*) used for manufactured-solution runs.
struct ManufacturedTriple {
  std::string name;
  std::array<CosineMode, 3> modes; // u, v, w
};

/// Constant (1, 1, 0).
ManufacturedTriple constant_triple();
/// u* = 2 + cos(pi x) cos(pi y) e^{-t}; v* = 1, w* = 0 constant.
ManufacturedTriple forager_only_triple();
/// u* varies in x only, v* and w* in y only: every taxis term is nonzero and
/// each carrier is constant along its potential gradient.
ManufacturedTriple separated_cosine_triple();
/// All three components vary in both directions.
ManufacturedTriple coupled_cosine_triple();

/// Throws StructuralError for a name outside {constant, forager, cosine, coupled}.
ManufacturedTriple manufactured_triple(const std::string& name);

struct ModeValue {
  double value, dt, dx, dy, lap;
};

ModeValue eval_mode(const CosineMode& m, double x, double y, double t, double lx, double ly);

/// Exact fields of the triple at time t.
std::array<Field, 3> manufactured_fields(const ManufacturedTriple& tri, const Grid& g, double t);

/// Pointwise residual sources (S_u, S_v, S_w) making the triple an exact
/// solution of the regularized system with the given parameters.
std::array<double, 3> mms_source_at(const ManufacturedTriple& tri, const ModelParams& params,
                                    double x, double y, double t, double lx, double ly);

/// Source fields at time t. Throws StructuralError for negative wave numbers
/// or a triple that leaves the nonnegative cone.
std::array<Field, 3> mms_source(const ManufacturedTriple& tri, const ModelParams& params,
                                const Grid& g, double t);

/// Forcing callback for step().
Forcing mms_forcing(const ManufacturedTriple& tri, const ModelParams& params, const Grid& g);

/// Parameters used by the manufactured-solution studies.
ModelParams mms_params();

} // namespace taxis
