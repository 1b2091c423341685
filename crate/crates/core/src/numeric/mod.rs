//! Numerical building blocks shared by the solvers and the charge/energy
//! integrals: an adaptive Runge-Kutta integrator, quadrature rules,
//! finite-difference weights and the modified Bessel function `K_n`.

pub mod bessel;
pub mod fd;
pub mod ode;
pub mod quad;
