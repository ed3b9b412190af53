//! State documents and the entropic report of `quantities`.
//!
//! ```json
//! {"systems": [["A", 2], ["B", 2]], "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}
//! ```
//!
//! Exactly one of `matrix` (density matrix), `amplitudes` (pure state) or
//! `ensemble` (weights plus conditional density matrices) must be present.

use std::collections::BTreeMap;

use qbroadcast::info::{
    conditional_entropy, conditional_mutual_information, coherent_information, entropy_of, holevo_information,
    mutual_information,
};
use qbroadcast::{CqState, DensityMatrix, PureState, SystemLayout};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::{MatrixDoc, VectorDoc};

/// Subsystem count above which the subset tables would explode.
pub const MAX_SYSTEMS: usize = 6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub weights: Vec<f64>,
    pub states: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub systems: Vec<(String, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<VectorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleDoc>,
}

pub enum ParsedState {
    Density(DensityMatrix),
    Ensemble(CqState),
}

fn to_matrix(field: &str, rows: &MatrixDoc, d: usize) -> CliResult<qbroadcast::linalg::CMatrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::validate(format!("{field}: expected a {d}×{d} matrix")));
    }
    Ok(qbroadcast::linalg::CMatrix::from_fn(d, d, |i, j| qbroadcast::linalg::c(rows[i][j][0], rows[i][j][1])))
}

impl StateDocument {
    pub fn parse(&self) -> CliResult<ParsedState> {
        if self.systems.is_empty() || self.systems.len() > MAX_SYSTEMS {
            return Err(CliError::validate(format!("systems: between 1 and {MAX_SYSTEMS} subsystems required")));
        }
        let layout = SystemLayout::new(self.systems.iter().cloned()).map_err(|e| CliError::at("systems", e))?;
        let d = layout.dim();
        match (&self.matrix, &self.amplitudes, &self.ensemble) {
            (Some(m), None, None) => {
                let m = to_matrix("matrix", m, d)?;
                Ok(ParsedState::Density(DensityMatrix::new(m, layout).map_err(|e| CliError::at("matrix", e))?))
            }
            (None, Some(v), None) => {
                if v.len() != d {
                    return Err(CliError::validate(format!("amplitudes: {} entries, expected {d}", v.len())));
                }
                let amps = qbroadcast::linalg::CVector::from_fn(d, |i, _| qbroadcast::linalg::c(v[i][0], v[i][1]));
                let psi = PureState::new(amps, layout).map_err(|e| CliError::at("amplitudes", e))?;
                Ok(ParsedState::Density(psi.projector()))
            }
            (None, None, Some(e)) => {
                let states = e
                    .states
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let field = format!("ensemble.states[{i}]");
                        DensityMatrix::new(to_matrix(&field, m, d)?, layout.clone()).map_err(|err| CliError::at(&field, err))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(ParsedState::Ensemble(CqState::new(e.weights.clone(), states).map_err(|err| CliError::at("ensemble", err))?))
            }
            _ => Err(CliError::validate("state: exactly one of matrix, amplitudes or ensemble is required")),
        }
    }
}

/// Entropic functionals of a state, keyed by subsystem labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantityReport {
    pub systems: Vec<String>,
    /// `H(S)` for every non-empty subset `S`, labels joined by `,`.
    pub entropy: BTreeMap<String, f64>,
    /// `H(A|B)` keyed `"A|B"`.
    pub conditional_entropy: BTreeMap<String, f64>,
    /// `I(A>B)` keyed `"A>B"`.
    pub coherent_information: BTreeMap<String, f64>,
    /// `I(A;B)` keyed `"A;B"`, `A` before `B` in layout order.
    pub mutual_information: BTreeMap<String, f64>,
    /// `I(A;B|C)` keyed `"A;B|C"`.
    pub conditional_mutual_information: BTreeMap<String, f64>,
    /// Holevo quantity of an ensemble input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holevo_information: Option<f64>,
}

pub fn report(state: &ParsedState) -> CliResult<QuantityReport> {
    let (rho, holevo) = match state {
        ParsedState::Density(rho) => (rho.clone(), None),
        ParsedState::Ensemble(cq) => {
            let labels: Vec<String> = cq.quantum_layout().labels().map(String::from).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            (cq.average(), Some(holevo_information(cq, &refs)?))
        }
    };
    let labels: Vec<String> = rho.layout().labels().map(String::from).collect();
    let n = labels.len();
    let subset = |mask: usize| -> Vec<&str> { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i].as_str()).collect() };

    let mut entropy = BTreeMap::new();
    for mask in 1..(1usize << n) {
        let s = subset(mask);
        entropy.insert(s.join(","), entropy_of(&rho, &s)?);
    }
    let mut cond = BTreeMap::new();
    let mut coh = BTreeMap::new();
    let mut mutual = BTreeMap::new();
    let mut cmi = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (la, lb) = (labels[a].as_str(), labels[b].as_str());
            cond.insert(format!("{la}|{lb}"), conditional_entropy(&rho, &[la], &[lb])?);
            coh.insert(format!("{la}>{lb}"), coherent_information(&rho, &[la], &[lb])?);
            if a < b {
                mutual.insert(format!("{la};{lb}"), mutual_information(&rho, &[la], &[lb])?);
                for (cidx, lc) in labels.iter().enumerate() {
                    if cidx != a && cidx != b {
                        cmi.insert(format!("{la};{lb}|{lc}"), conditional_mutual_information(&rho, &[la], &[lb], &[lc.as_str()])?);
                    }
                }
            }
        }
    }
    Ok(QuantityReport {
        systems: labels.clone(),
        entropy,
        conditional_entropy: cond,
        coherent_information: coh,
        mutual_information: mutual,
        conditional_mutual_information: cmi,
        holevo_information: holevo,
    })
}
