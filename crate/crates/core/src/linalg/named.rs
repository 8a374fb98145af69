//! Reference qutrit states.

use super::{DensityMatrix, PureState};

/// Strange state `(0, 1, −1)/√2`.
pub fn strange() -> PureState {
    PureState::from_real(&[0.0, 1.0, -1.0]).expect("nonzero")
}

/// Norrell state `(−1, 2, −1)/√6`.
pub fn norrell() -> PureState {
    PureState::from_real(&[-1.0, 2.0, -1.0]).expect("nonzero")
}

/// Maximally coherent state `(1, −1, 1)/√3`.
pub fn max_coherent() -> PureState {
    PureState::from_real(&[1.0, -1.0, 1.0]).expect("nonzero")
}

/// `(1 − p)|ψ⟩⟨ψ| + p·noise`.
pub fn noisy(psi: &PureState, noise: &DensityMatrix, p: f64) -> crate::Result<DensityMatrix> {
    DensityMatrix::mix(&DensityMatrix::from_pure(psi), noise, p)
}
