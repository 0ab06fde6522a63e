//! Pseudo-spectral laboratory for incompressible Oldroyd-type viscoelastic
//! flows on the periodic box: Littlewood–Paley blocks and hybrid Besov norms,
//! constitutive laws and objectivity, exact-linear IMEX time stepping,
//! per-annulus energy functionals and decay-rate fitting.

pub mod analysis;
pub mod app;
pub mod checks;
pub mod constitutive;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod lp;
pub mod ops;
pub mod solver;

pub use error::{Error, Result};
pub use field::{Rank, SpectralField};
pub use grid::Grid;
