#pragma once

// Variational functional
//   F(phi) = ( int |D phi|^q )^{(n+1)/n} / | int Re <D phi, phi> |,  q = 2n/(n+1),
// and the transformation Psi = |D phi|^{q-2} D phi linking its Euler-Lagrange
// equation to the nonlinear Dirac equation.

#include "nldirac/fields.hpp"
#include "nldirac/spectral.hpp"

namespace nldirac {

/// D_P phi for phi in the constraint space (phi is projected first).
SpinorField constrained_D(const SpectralData& spec, const SpinorField& phi);

Real variational_functional(const SpectralData& spec, const SpinorField& phi, int n);

SpinorField el_transform(const SpectralData& spec, const SpinorField& phi, Real q);

/// || D Psi - mu D phi ||_{L^2} with Psi = el_transform(phi, q).
Real el_q_residual(const SpectralData& spec, const SpinorField& phi, Real q, Complex mu);

}  // namespace nldirac
