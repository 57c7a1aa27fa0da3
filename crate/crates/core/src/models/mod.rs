//! The Bell, minimal `N+1`-qubit and spin-helix models.

mod bell;
mod helix;
mod minimal;

pub use bell::{bell3_blocks, bell3_epsilon_model, bell3_model, bell_q};
pub use helix::{helix_model, helix_state, HelixParams};
pub use minimal::{minimal_closed_ness, minimal_model, MinimalClosedForm, MinimalModelParams};

use crate::error::Result;
use crate::liouville::LindbladModel;
use crate::operators::PureState;
use crate::zeno::{check_model_criterion, CriterionReport};

/// A Lindblad model together with the pure state it targets.
#[derive(Clone, Debug)]
pub struct TargetedModel {
    pub name: String,
    pub model: LindbladModel,
    /// Dark state of the dissipator on `H_0`.
    pub zeno: PureState,
    /// Target state on `H_1`.
    pub target: PureState,
    /// `ψ_Zeno ⊗ ψ_target` in the site basis.
    pub full_target: PureState,
}

impl TargetedModel {
    pub fn new(name: impl Into<String>, model: LindbladModel, zeno: PureState, target: PureState) -> Result<Self> {
        let amps = model.layout().product(zeno.amplitudes(), target.amplitudes())?;
        let full_target = PureState::normalized(amps)?;
        Ok(Self {
            name: name.into(),
            model,
            zeno,
            target,
            full_target,
        })
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Ok(Self {
            model: self.model.with_gamma(gamma)?,
            ..self.clone()
        })
    }

    pub fn criterion(&self, tol: f64) -> Result<CriterionReport> {
        check_model_criterion(&self.model, &self.zeno, &self.target, tol)
    }
}
