//! Boosted Type-II fusion gate: outcome sampling and ancilla accounting.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::graphstate::FusionBasis;
use crate::rng::Threshold;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GateScheme {
    /// Boosted with one ancillary Bell pair.
    #[default]
    BellAncilla,
    /// Boosted with four ancillary single photons.
    FourSingles,
}

impl GateScheme {
    pub fn ancilla_photons(self) -> u8 {
        match self {
            GateScheme::BellAncilla => 2,
            GateScheme::FourSingles => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossScope {
    DataOnly,
    /// Ancilla photons are detected in the gate too and can herald loss.
    #[default]
    DataAndAncilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateParams {
    pub p_success: f64,
    pub scheme: GateScheme,
    /// Failure basis of the two fusions inside each site.
    pub internal_basis: FusionBasis,
    /// Failure basis of the fusions between neighbouring sites.
    pub external_basis: FusionBasis,
}

impl Default for GateParams {
    fn default() -> Self {
        GateParams {
            p_success: 0.75,
            scheme: GateScheme::BellAncilla,
            internal_basis: FusionBasis::rotated(),
            external_basis: FusionBasis::standard(),
        }
    }
}

impl GateParams {
    pub fn with_p(p_success: f64) -> Self {
        GateParams { p_success, ..Default::default() }
    }

    pub fn ancilla_photons(&self) -> u8 {
        self.scheme.ancilla_photons()
    }

    pub fn photons_in_scope(&self, scope: LossScope) -> u32 {
        match scope {
            LossScope::DataOnly => 2,
            LossScope::DataAndAncilla => 2 + self.ancilla_photons() as u32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonRole {
    Data1,
    Data2,
    Ancilla(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionKind {
    Success,
    Failure,
    LossDetected,
}

/// Outcome of one gate. Lost photons are kept as a bit mask: bit 0 is the
/// first data photon, bit 1 the second, bit `2 + i` ancilla `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FusionResult {
    pub kind: FusionKind,
    pub lost_mask: u8,
}

impl FusionResult {
    pub const SUCCESS: FusionResult = FusionResult { kind: FusionKind::Success, lost_mask: 0 };
    pub const FAILURE: FusionResult = FusionResult { kind: FusionKind::Failure, lost_mask: 0 };

    pub fn lost(roles: &[PhotonRole]) -> FusionResult {
        let mut mask = 0;
        for r in roles {
            mask |= match r {
                PhotonRole::Data1 => 1,
                PhotonRole::Data2 => 2,
                PhotonRole::Ancilla(i) => 4 << i,
            };
        }
        assert!(mask != 0, "a loss outcome needs at least one lost photon");
        FusionResult { kind: FusionKind::LossDetected, lost_mask: mask }
    }

    pub fn lost_photons(&self) -> Vec<PhotonRole> {
        let mut out = Vec::new();
        for bit in 0..8u8 {
            if self.lost_mask >> bit & 1 == 1 {
                out.push(match bit {
                    0 => PhotonRole::Data1,
                    1 => PhotonRole::Data2,
                    i => PhotonRole::Ancilla(i - 2),
                });
            }
        }
        out
    }

    pub fn data1_lost(&self) -> bool {
        self.lost_mask & 1 != 0
    }

    pub fn data2_lost(&self) -> bool {
        self.lost_mask & 2 != 0
    }
}

/// Precomputed thresholds for repeated sampling of one gate configuration.
///
/// Every sample consumes exactly `3 + ancilla_photons` uniforms whatever the
/// outcome, so runs that differ only in probabilities stay coupled.
#[derive(Clone, Copy, Debug)]
pub struct GateSampler {
    success: Threshold,
    loss: Threshold,
    ancillas: u8,
    ancilla_in_scope: bool,
    lossless: bool,
}

impl GateSampler {
    pub fn new(params: &GateParams, p_loss: f64, scope: LossScope) -> Self {
        GateSampler {
            success: Threshold::new(params.p_success),
            loss: Threshold::new(p_loss),
            ancillas: params.ancilla_photons(),
            ancilla_in_scope: scope == LossScope::DataAndAncilla,
            lossless: p_loss <= 0.0,
        }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> FusionResult {
        let success = self.success.draw(rng);
        let mut mask = 0u8;
        if self.loss.draw(rng) {
            mask |= 1;
        }
        if self.loss.draw(rng) {
            mask |= 2;
        }
        for i in 0..self.ancillas {
            if self.loss.draw(rng) && self.ancilla_in_scope {
                mask |= 4 << i;
            }
        }
        if mask != 0 && !self.lossless {
            FusionResult { kind: FusionKind::LossDetected, lost_mask: mask }
        } else if success {
            FusionResult::SUCCESS
        } else {
            FusionResult::FAILURE
        }
    }
}

pub fn sample_fusion<R: RngCore + ?Sized>(
    params: &GateParams,
    p_loss: f64,
    scope: LossScope,
    rng: &mut R,
) -> FusionResult {
    GateSampler::new(params, p_loss, scope).sample(rng)
}

pub fn effective_success_prob(params: &GateParams, p_loss: f64, scope: LossScope) -> f64 {
    params.p_success * (1.0 - p_loss).powi(params.photons_in_scope(scope) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;

    #[test]
    fn deterministic_extremes() {
        let mut r = run_rng(3, 0);
        let sure = GateParams::with_p(1.0);
        for _ in 0..1000 {
            assert_eq!(sample_fusion(&sure, 0.0, LossScope::DataOnly, &mut r), FusionResult::SUCCESS);
            let lost = sample_fusion(&sure, 1.0, LossScope::DataOnly, &mut r);
            assert_eq!(lost.kind, FusionKind::LossDetected);
            assert_eq!(lost.lost_photons(), vec![PhotonRole::Data1, PhotonRole::Data2]);
        }
    }

    #[test]
    fn ancilla_counts() {
        assert_eq!(GateScheme::BellAncilla.ancilla_photons(), 2);
        assert_eq!(GateScheme::FourSingles.ancilla_photons(), 4);
    }

    #[test]
    fn effective_probability_examples() {
        let g = GateParams::default();
        assert_eq!(effective_success_prob(&g, 0.0, LossScope::DataAndAncilla), 0.75);
        let a = effective_success_prob(&g, 0.01, LossScope::DataAndAncilla);
        assert!((a - 0.75 * 0.99f64.powi(4)).abs() < 1e-15);
        assert!((a - 0.72045).abs() < 1e-5);
        let b = effective_success_prob(&g, 0.016, LossScope::DataOnly);
        assert!((b - 0.72619).abs() < 1e-5);
    }

    #[test]
    fn role_mask_round_trip() {
        let roles = vec![PhotonRole::Data2, PhotonRole::Ancilla(1)];
        assert_eq!(FusionResult::lost(&roles).lost_photons(), roles);
    }
}
