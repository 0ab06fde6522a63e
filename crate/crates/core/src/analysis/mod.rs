//! Linear dispersion, per-annulus energy functionals, lemma residuals,
//! decay fits and canonical norm sets.

mod decay;
mod energy;
mod lemma;
mod norms;
mod symbol;

pub use decay::{fit_decay_exponent, fourier_split_radius, low_frequency_mass, DecayFit, MIN_FIT_SAMPLES};
pub use energy::{
    case_bands, energy_functionals, forms, lyapunov_weight, reference_exponents, small_k_search, Band, BandBounds,
    BandPlan, BlockMoments, EnergyFunctional, EnergyPlan, Form, Moments, CASE_II_J0, GRAM_TRACE_BOUND,
    MAX_CORRELATION,
};
pub use lemma::{lemma_residual, RecordedRun, ResidualReport};
pub use norms::{
    decay_label, decay_norms, initial_norms, integral_norms, sup_norms, theory_exponent, NormDecl,
};
pub use symbol::{dispersion_sweep, linear_symbol, LinearSymbol};
