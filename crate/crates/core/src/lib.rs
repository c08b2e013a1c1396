//! Quantum discord and geometric discord of two-qubit states, together with
//! the NMR pulse-sequence simulations and the singlet-triplet relaxation
//! model used to study how those correlations are prepared and how they
//! decay.
//!
//! Module map:
//! - [`matcore`]: 2x2/4x4 Hermitian algebra, entropy, fidelities.
//! - [`states`]: named two-qubit states.
//! - [`correlations`]: mutual information, discord (grid and Bell-diagonal),
//!   geometric discord.
//! - [`nmrsim`]: rotating-frame pulse-sequence and decoupling simulator.
//! - [`relaxmodel`]: two-rate spin-lock relaxation model and its fit.

pub mod correlations;
pub mod error;
pub mod matcore;
pub mod nmrsim;
pub mod relaxmodel;
pub mod states;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, DensityMatrix, DeviationMatrix, Subsystem};
