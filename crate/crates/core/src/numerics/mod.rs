//! Numerical building blocks: quadrature, golden-section search, an embedded
//! Runge-Kutta step and straight-line least squares.

pub mod fit;
pub mod golden;
pub mod ode;
pub mod quadrature;
