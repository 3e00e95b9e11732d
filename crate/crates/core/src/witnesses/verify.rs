//! The verification driver: run both deciders on a pair, attach the
//! strongest available global certificate, and optionally re-verify at the
//! next field level or against a full group scan.

use super::*;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Cap on enumerated candidates per exhaustive decision.
    pub budget: u64,
    /// Seed for every randomized search; recorded in reports.
    pub seed: u64,
    /// Accept stored (transferred) certificates after exact re-checking.
    pub use_stored: bool,
    /// Also scan the whole target group for a global conjugator.
    pub exhaustive: bool,
    /// Re-run the global decider after one field extension.
    pub stability: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: 10_000_000,
            seed: 0,
            use_stored: true,
            exhaustive: false,
            stability: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub level: String,
    pub global: GlobalStatus,
}

/// A pair with both decider outcomes filled in, plus the optional
/// independent group scan and stability re-run.
#[derive(Clone, Debug)]
pub struct VerifiedWitness {
    pub pair: WitnessPair,
    pub group_scan: Option<GlobalStatus>,
    pub stability: Option<StabilityReport>,
}

impl VerifiedWitness {
    /// The pair is a witness: element-conjugate with certificates, and the
    /// global status rules out a conjugator (at its level or symbolically).
    pub fn refutes(&self) -> bool {
        matches!(self.pair.element_status, Some(ElementStatus::Verified))
            && matches!(
                self.pair.global_status,
                Some(GlobalStatus::Exhausted { .. }) | Some(GlobalStatus::Symbolic { .. })
            )
            && !matches!(self.group_scan, Some(GlobalStatus::Found { .. }))
    }

    /// Some search ran out of budget.
    pub fn undecided(&self) -> bool {
        matches!(
            self.pair.element_status,
            Some(ElementStatus::Inconclusive { .. })
        ) || matches!(self.pair.global_status, Some(GlobalStatus::Unknown { .. }))
    }
}

/// Run both deciders and attach certificates.
///
/// The global certificate preference order: a symbolic obstruction (valid
/// at every level) when the pair is in the two-dimensional unipotent swap
/// family and not running an explicit exhaustive scan; otherwise the
/// intertwiner-space decision at this level.
pub fn verify_witness(
    pair: &WitnessPair,
    opts: &VerifyOptions,
) -> Result<VerifiedWitness, WitnessError> {
    let mut out = pair.clone();
    let (status, certs) = element_conjugate(pair, opts.budget, opts.seed, opts.use_stored)?;
    out.element_certificates = certs;
    out.element_status = Some(status);

    let symbolic = symbolic_global_obstruction(pair);
    let space = globally_conjugate(pair, opts.budget)?;
    let global = match (&symbolic, &space) {
        // A found conjugator beats everything: the pair is refuted as a
        // witness and the report must say so.
        (_, GlobalStatus::Found { .. }) => space.clone(),
        (Some(sym), _) if !opts.exhaustive => sym.clone(),
        _ => space.clone(),
    };
    out.global_status = Some(global);

    let group_scan = if opts.exhaustive {
        Some(globally_conjugate_group_scan(pair, opts.budget)?)
    } else {
        None
    };
    if let Some(GlobalStatus::Found { conjugator }) = &group_scan {
        out.global_status = Some(GlobalStatus::Found {
            conjugator: conjugator.clone(),
        });
    }

    let stability = if opts.stability {
        let lifted = embed_witness(pair)?;
        let global = match symbolic_global_obstruction(&lifted) {
            Some(sym) => sym,
            None => globally_conjugate(&lifted, opts.budget)?,
        };
        Some(StabilityReport {
            level: lifted.target().field.level_label(),
            global,
        })
    } else {
        None
    };

    Ok(VerifiedWitness {
        pair: out,
        group_scan,
        stability,
    })
}
