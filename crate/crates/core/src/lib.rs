//! Exact computational laboratory for Kakeya/Nikodym phenomena over finite
//! fields and finite Artinian rings: maximal operators and their norms,
//! the polynomial method with multiplicities producing machine-checkable
//! certificates, probabilistic reductions (random-translation amplification
//! and random-projection flattening), and Kakeya geometry over F[x]/x^k and
//! Z/p^k.

pub mod amplify;
pub mod caps;
pub mod error;
pub mod geometry;
pub mod gf;
pub mod linalg;
pub mod maximal;
pub mod polymethod;
pub mod rings;
pub mod rng;

pub use caps::Caps;
pub use error::{Error, Result};
pub use gf::{field_make, FieldElement, FieldSpec, MultivariatePolynomial, UniPolynomial};

/// Configure the global worker pool size.  `None` leaves the default
/// (one worker per CPU).  Returns an error string if the pool was already
/// initialized, which callers may ignore.
pub fn set_worker_threads(n: Option<usize>) -> std::result::Result<(), String> {
    match n {
        None => Ok(()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| e.to_string()),
    }
}
