#pragma once

namespace phasync::tol {

// Relative QEP residual bound and spectral identity bound.
inline constexpr double qep = 1e-9;
inline constexpr double spec = 1e-9;

// Distinctness: two eigenvalues closer than distinct * max(1, rho) coincide.
inline constexpr double distinct = 1e-8;

// Imaginary residue allowed on quantities that are real by construction,
// relative to 1 + ||.||_F.
inline constexpr double real = 1e-8;

// sigma_min <= rank * sigma_max flags a matrix as singular.
inline constexpr double rank = 1e-10;

// Base factor of the compatibility threshold.
inline constexpr double compat = 1e-8;

// ||[C,K]||_F <= commutator * ||C||_F * ||K||_F counts as commuting.
inline constexpr double commutator = 1e-10;

// Integrator blow-up guard.
inline constexpr double blowup = 1e300;

}  // namespace phasync::tol
