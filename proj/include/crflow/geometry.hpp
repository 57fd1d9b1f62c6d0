// Discrete Riemannian geometry on the periodic grid.
//
// Sign conventions (these differ from much of the numerical literature):
//
//   quantity            discrete definition
//   ------------------  -----------------------------------------------------
//   Gamma^k_ij          1/2 g^kl (D_i g_jl + D_j g_il - D_l g_ij)
//   R^i_jkl             D_k G^i_lj - D_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj,
//                       projected onto the algebraic curvature symmetries
//   Ric_ij              R^a_iaj          (positive on round spheres)
//   Laplacian           -(1/sqrt g) D_a (sqrt g g^ab D_b phi)   (positive operator)
//   div of 1-form       -(1/sqrt g) D_a (sqrt g g^ab w_b)
//   div of sym tensor   (delta h)_j = -g^ik h_ij|k
//
// D is the periodic central difference of order 2 or 4. Both scalar
// divergences are in conservative form, so they integrate to zero exactly
// against the cell-sum quadrature.
#pragma once

#include <optional>

#include "crflow/field.hpp"

namespace crflow {

struct CurvatureBundle {
    Field<Christoffel> christoffel;
    Field<Block81> riemann;  // R^i_jkl; empty unless full detail requested
    SymTensorField ricci;
    ScalarField scalar;
    Field<Block81> weyl;  // W_ijkl, fully lowered; empty unless full detail requested
};

enum class CurvatureDetail { ricci, full };

/// A metric with every derived quantity the operators need.
struct Geometry {
    MetricField metric;
    SymTensorField inverse;
    ScalarField density;  // sqrt det g
    CurvatureBundle curvature;

    const Grid& grid() const { return metric.grid; }
};

/// Pointwise g^{-1}; throws NonPositiveDefinite.
SymTensorField inverse_metric(const MetricField& g);

/// Curvature of a grid metric by finite differences.
CurvatureBundle curvature(const MetricField& g, CurvatureDetail detail = CurvatureDetail::full);

Geometry make_geometry(MetricField g, CurvatureDetail detail = CurvatureDetail::ricci);

/// A spatially constant metric whose curvature is supplied rather than
/// differenced: the representation of a left-invariant metric in a Milnor
/// frame. Christoffel symbols are zero (frame derivatives of constants vanish);
/// the Riemann tensor is rebuilt from Ricci, which is exact in three dimensions.
Geometry constant_geometry(const Grid& grid, const Sym3& metric, const Sym3& ricci,
                           CurvatureDetail detail = CurvatureDetail::ricci);

}  // namespace crflow
