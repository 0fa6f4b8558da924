#pragma once

#include "tumorpf/grid.hpp"

namespace tumorpf {

// Finite-difference operators on the node-centred grid. Homogeneous Neumann
// boundaries are imposed by mirror ghosts: the ghost beyond node 0 holds the
// value of node 1, the ghost beyond node N the value of node N-1.
//
// These are the OpenMP kernels used by the solver. Bit-for-bit equal serial
// versions live in namespace tumorpf::serial and back the tests.

// 5-point (2D) / 7-point (3D) Laplacian.
ScalarField laplacian(const ScalarField& f);

// laplacian(laplacian(f)), ghosts re-reflected between stages.
ScalarField biharmonic(const ScalarField& f);

// scale * sum_axes d_a( A_a(coef) * D_a(pot) ), edge average A and edge
// difference D, edge fluxes mirrored across the boundary.
ScalarField div_mobility_grad(const ScalarField& coef, const ScalarField& pot, double scale);

// Same flux form with the degenerate mobility M * a^2 (1-a)^2 evaluated at the
// edge average a = A_a(phi).
ScalarField div_degenerate_mobility_grad(const ScalarField& phi, const ScalarField& pot,
                                         double mobility);

namespace serial {

ScalarField laplacian(const ScalarField& f);
ScalarField biharmonic(const ScalarField& f);
ScalarField div_mobility_grad(const ScalarField& coef, const ScalarField& pot, double scale);
ScalarField div_degenerate_mobility_grad(const ScalarField& phi, const ScalarField& pot,
                                         double mobility);

}  // namespace serial

}  // namespace tumorpf
