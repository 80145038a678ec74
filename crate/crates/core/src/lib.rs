//! Exact-arithmetic desingularization engine: marked ideals on affine charts,
//! blow-ups, projections, maximal contact and the inductive resolution loop.

pub mod poly;
pub mod ideal;
pub mod chart;
pub mod idealistic;
pub mod monomial;
pub mod projection;
pub mod io;
pub mod driver;
