#pragma once

#include "qcsim/grid.hpp"

namespace qcsim {

// Discrete vector calculus on a collocated grid. Results are computed at
// interior nodes only; boundary nodes of the outputs are zero, and stencils
// next to the boundary read the Dirichlet values stored in the input.
//
// Two families coexist:
//  * node operators (gradient, divergence, curl, scalar_gradient): second
//    order centered differences at the nodes;
//  * energy operators (vec_laplacian, grad_div) together with their
//    factors edge_gradient / cell_divergence, for which
//        <vec_laplacian f, g> = -<edge_gradient f, edge_gradient g>
//        <grad_div f, g>      = -<cell_divergence f, cell_divergence g>
//    hold exactly whenever g vanishes on the boundary.

TensorField gradient(const VectorField& f);
ScalarField divergence(const VectorField& f);
VectorField curl(const VectorField& f);
VectorField scalar_gradient(const ScalarField& phi);

VectorField vec_laplacian(const VectorField& f);
VectorField grad_div(const VectorField& f);
EdgeGradient edge_gradient(const VectorField& f);
CellField cell_divergence(const VectorField& f);

/// Pointwise a x b at interior nodes.
VectorField cross(const VectorField& a, const VectorField& b);

// Grid inner products: cell volume times the sum over interior nodes
// (edges / cells for the staggered types), in a fixed order.
double inner(const VectorField& f, const VectorField& g);
double inner(const TensorField& f, const TensorField& g);
double inner(const ScalarField& f, const ScalarField& g);
double inner(const EdgeGradient& f, const EdgeGradient& g);
double inner(const CellField& f, const CellField& g);

double norm_l2(const VectorField& f);
double norm_l2(const TensorField& f);
double norm_l2(const EdgeGradient& f);
double norm_l2(const CellField& f);

/// sqrt(||f||^2 + ||grad f||^2) with the energy (edge) gradient.
double norm_h1(const VectorField& f);

/// Largest pointwise Euclidean norm over interior nodes.
double max_norm(const VectorField& f);

}  // namespace qcsim
