// ops.hpp -- discrete differential operators and pointwise field algebra
#pragma once

#include "mbi/grid.hpp"

namespace mbi {

// Second-order stencils: central differences at interior nodes, one-sided
// second-order at boundary nodes so results stay total on the grid.
VectorField3 gradient(const ScalarField& f);
ScalarField divergence(const VectorField3& v);
VectorField3 curl(const VectorField3& v);

/// All nine Jacobian entries d v_c / d x_a, index [a*3+c].
std::array<ScalarField, 9> jacobian(const VectorField3& v);

NormEstimate proxy_norm(const VectorField3& v, double alpha = 0.5);
NormEstimate proxy_norm(const ScalarField& f, double alpha = 0.5);

// Pointwise algebra. Plain nodewise arithmetic, no stencils involved.
ScalarField add(const ScalarField& a, const ScalarField& b);
VectorField3 add(const VectorField3& a, const VectorField3& b);
ScalarField sub(const ScalarField& a, const ScalarField& b);
VectorField3 sub(const VectorField3& a, const VectorField3& b);
ScalarField scale(const ScalarField& a, double s);
VectorField3 scale(const VectorField3& a, double s);
ScalarField dot(const VectorField3& a, const VectorField3& b);
VectorField3 mul(const ScalarField& f, const VectorField3& v);
ScalarField mul(const ScalarField& a, const ScalarField& b);

/// b += s*a
void axpy(VectorField3& b, double s, const VectorField3& a);
void axpy(ScalarField& b, double s, const ScalarField& a);

double max_abs(const ScalarField& f);
/// max over nodes of the Euclidean vector magnitude
double max_abs(const VectorField3& v);

/// Same reductions restricted to nodes at least `margin` nodes away from
/// every face (where all involved stencils are purely central).
double max_abs_interior(const ScalarField& f, int margin);
double max_abs_interior(const VectorField3& v, int margin);

void require_same_grid(const GridSpec& a, const GridSpec& b);

}  // namespace mbi
