//! JSON channel descriptions.
//!
//! ```json
//! {"kind": "kraus", "dims": {"A'": 2, "B": 2, "C": 1},
//!  "payload": {"kraus": [[[[1,0],[0,0]], [[0,0],[1,0]]]]}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows. Every
//! validation error names the offending field.

use std::collections::BTreeMap;
use std::path::Path;

use qbroadcast::channel::{
    bsc, make_classical_degraded_cq, make_constant_broadcast, make_constant_cq, make_ghz_copy, make_identity_to_bob,
    make_noiseless_bit_cq, make_pinching, make_pinching_cq, BOB, CHARLIE, ENV, INPUT,
};
use qbroadcast::linalg::{c, CMatrix, CVector};
use qbroadcast::region::RegionChannel;
use qbroadcast::{BroadcastChannel, CqBroadcastChannel, DensityMatrix, DephasingSpec, KrausChannel, PureState, SystemLayout};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub type ComplexDoc = [f64; 2];
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;
pub type VectorDoc = Vec<ComplexDoc>;

pub const BUILTINS: [&str; 8] =
    ["pinching", "pinching-cq", "ghz-copy", "identity-to-bob", "noiseless-bit", "constant", "constant-broadcast", "bsc-cascade"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecKind {
    Cq,
    Kraus,
    Isometry,
    Dephasing,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecDocument {
    pub kind: SpecKind,
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CqPayload {
    conditionals: Vec<MatrixDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausPayload {
    kraus: Vec<MatrixDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IsometryPayload {
    isometry: MatrixDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DephasingPayload {
    env_vectors: Vec<VectorDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinPayload {
    name: String,
    /// `bsc-cascade` flip probabilities `[to B, B to C]`.
    #[serde(default)]
    flips: Option<[f64; 2]>,
}

/// A parsed channel: classical-quantum or fully quantum.
#[derive(Debug, Clone)]
pub enum ParsedChannel {
    Cq(CqBroadcastChannel),
    Quantum(BroadcastChannel),
}

impl ParsedChannel {
    pub fn region_channel(&self) -> RegionChannel<'_> {
        match self {
            ParsedChannel::Cq(w) => RegionChannel::Cq(w),
            ParsedChannel::Quantum(n) => RegionChannel::Quantum(n),
        }
    }

    pub fn cq(&self) -> CliResult<&CqBroadcastChannel> {
        match self {
            ParsedChannel::Cq(w) => Ok(w),
            ParsedChannel::Quantum(_) => Err(CliError::validate("channel: this command needs a cq channel (kind \"cq\")")),
        }
    }

    pub fn quantum(&self) -> CliResult<&BroadcastChannel> {
        match self {
            ParsedChannel::Quantum(n) => Ok(n),
            ParsedChannel::Cq(_) => {
                Err(CliError::validate("channel: this command needs a quantum channel (kind \"kraus\", \"isometry\" or \"dephasing\")"))
            }
        }
    }
}

fn complex_matrix(field: &str, rows: &MatrixDoc, shape: (usize, usize)) -> CliResult<CMatrix> {
    if rows.len() != shape.0 {
        return Err(CliError::validate(format!("{field}: {} rows, expected {}", rows.len(), shape.0)));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(CliError::validate(format!("{field}: row {i} has {} entries, expected {}", row.len(), shape.1)));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::validate(format!("{field}: row {i} has a non-finite entry")));
        }
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn complex_vector(field: &str, v: &VectorDoc, len: usize) -> CliResult<CVector> {
    if v.len() != len {
        return Err(CliError::validate(format!("{field}: {} entries, expected {len}", v.len())));
    }
    if v.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::validate(format!("{field}: non-finite entry")));
    }
    Ok(CVector::from_fn(len, |i, _| c(v[i][0], v[i][1])))
}

pub fn matrix_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_doc(v: &CVector) -> VectorDoc {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn payload<T: serde::de::DeserializeOwned>(value: &Value) -> CliResult<T> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::validate(format!("payload: {e}")))
}

impl ChannelSpecDocument {
    fn dim(&self, label: &str) -> CliResult<usize> {
        match self.dims.get(label) {
            Some(0) => Err(CliError::validate(format!("dims.{label}: dimension must be positive"))),
            Some(d) => Ok(*d),
            None => Err(CliError::validate(format!("dims.{label}: missing"))),
        }
    }

    fn check_labels(&self, allowed: &[&str]) -> CliResult<()> {
        match self.dims.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::validate(format!("dims.{k}: unexpected label (allowed: {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn parse(&self) -> CliResult<ParsedChannel> {
        match self.kind {
            SpecKind::Cq => self.parse_cq(),
            SpecKind::Kraus => self.parse_kraus(),
            SpecKind::Isometry => self.parse_isometry(),
            SpecKind::Dephasing => self.parse_dephasing(),
            SpecKind::Builtin => self.parse_builtin(),
        }
    }

    fn parse_cq(&self) -> CliResult<ParsedChannel> {
        self.check_labels(&[BOB, CHARLIE])?;
        let (db, dc) = (self.dim(BOB)?, self.dim(CHARLIE)?);
        let p: CqPayload = payload(&self.payload)?;
        if p.conditionals.is_empty() {
            return Err(CliError::validate("payload.conditionals: empty input alphabet"));
        }
        let layout = SystemLayout::new([(BOB, db), (CHARLIE, dc)])?;
        let conds = p
            .conditionals
            .iter()
            .enumerate()
            .map(|(x, m)| {
                let field = format!("payload.conditionals[{x}]");
                let m = complex_matrix(&field, m, (db * dc, db * dc))?;
                DensityMatrix::new(m, layout.clone()).map_err(|e| CliError::at(&field, e))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(ParsedChannel::Cq(CqBroadcastChannel::new(conds).map_err(|e| CliError::at("payload.conditionals", e))?))
    }

    fn quantum_dims(&self) -> CliResult<(usize, usize, usize)> {
        self.check_labels(&[INPUT, BOB, CHARLIE])?;
        Ok((self.dim(INPUT)?, self.dim(BOB)?, self.dim(CHARLIE)?))
    }

    fn parse_kraus(&self) -> CliResult<ParsedChannel> {
        let (din, db, dc) = self.quantum_dims()?;
        let p: KrausPayload = payload(&self.payload)?;
        if p.kraus.is_empty() {
            return Err(CliError::validate("payload.kraus: empty Kraus set"));
        }
        let ops = p
            .kraus
            .iter()
            .enumerate()
            .map(|(i, m)| complex_matrix(&format!("payload.kraus[{i}]"), m, (db * dc, din)))
            .collect::<CliResult<Vec<_>>>()?;
        let out = SystemLayout::new([(BOB, db), (CHARLIE, dc)])?;
        let ch = KrausChannel::new(ops, SystemLayout::single(INPUT, din)?, out).map_err(|e| CliError::at("payload.kraus", e))?;
        Ok(ParsedChannel::Quantum(BroadcastChannel::new(ch)?))
    }

    fn parse_isometry(&self) -> CliResult<ParsedChannel> {
        let (din, db, dc) = self.quantum_dims()?;
        let p: IsometryPayload = payload(&self.payload)?;
        let v = complex_matrix("payload.isometry", &p.isometry, (db * dc, din))?;
        let bc = BroadcastChannel::from_isometry(v, din, db, dc).map_err(|e| CliError::at("payload.isometry", e))?;
        Ok(ParsedChannel::Quantum(bc))
    }

    fn parse_dephasing(&self) -> CliResult<ParsedChannel> {
        self.check_labels(&[CHARLIE, ENV])?;
        let dc = self.dim(CHARLIE)?;
        let de = if self.dims.contains_key(ENV) { self.dim(ENV)? } else { 1 };
        let layout = if de == 1 { SystemLayout::single(CHARLIE, dc)? } else { SystemLayout::new([(CHARLIE, dc), (ENV, de)])? };
        let p: DephasingPayload = payload(&self.payload)?;
        if p.env_vectors.is_empty() {
            return Err(CliError::validate("payload.env_vectors: no environment vectors"));
        }
        let vectors = p
            .env_vectors
            .iter()
            .enumerate()
            .map(|(x, v)| {
                let field = format!("payload.env_vectors[{x}]");
                let amps = complex_vector(&field, v, dc * de)?;
                PureState::new(amps, layout.clone()).map_err(|e| CliError::at(&field, e))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let spec = DephasingSpec::new(vectors).map_err(|e| CliError::at("payload.env_vectors", e))?;
        Ok(ParsedChannel::Quantum(qbroadcast::channel::make_generalized_dephasing(spec)?))
    }

    fn parse_builtin(&self) -> CliResult<ParsedChannel> {
        let p: BuiltinPayload = payload(&self.payload)?;
        let dim_or = |label: &str, default: usize| if self.dims.contains_key(label) { self.dim(label) } else { Ok(default) };
        if p.flips.is_some() && p.name != "bsc-cascade" {
            return Err(CliError::validate(format!("payload.flips: only used by bsc-cascade, not {}", p.name)));
        }
        let parsed = match p.name.as_str() {
            "pinching" => ParsedChannel::Quantum(make_pinching()),
            "pinching-cq" => ParsedChannel::Cq(make_pinching_cq()),
            "ghz-copy" => ParsedChannel::Quantum(make_ghz_copy()),
            "identity-to-bob" => ParsedChannel::Quantum(make_identity_to_bob(dim_or(INPUT, 2)?)),
            "noiseless-bit" => ParsedChannel::Cq(make_noiseless_bit_cq()),
            "constant" => ParsedChannel::Cq(make_constant_cq()),
            "constant-broadcast" => {
                ParsedChannel::Quantum(make_constant_broadcast(dim_or(INPUT, 2)?, dim_or(BOB, 2)?, dim_or(CHARLIE, 2)?)?)
            }
            "bsc-cascade" => {
                let [fy, fz] = p.flips.unwrap_or([0.1, 0.2]);
                if !(0.0..=1.0).contains(&fy) || !(0.0..=1.0).contains(&fz) {
                    return Err(CliError::validate(format!("payload.flips: [{fy}, {fz}] must lie in [0, 1]")));
                }
                ParsedChannel::Cq(make_classical_degraded_cq(&bsc(fy), &bsc(fz))?)
            }
            other => {
                return Err(CliError::validate(format!("payload.name: unknown builtin {other:?} (known: {})", BUILTINS.join(", "))))
            }
        };
        Ok(parsed)
    }

    /// Builtin document for `name`.
    pub fn builtin(name: &str) -> Self {
        ChannelSpecDocument { kind: SpecKind::Builtin, dims: BTreeMap::new(), payload: serde_json::json!({ "name": name }) }
    }

    /// Explicit document describing `channel`.
    pub fn from_channel(channel: &ParsedChannel) -> Self {
        match channel {
            ParsedChannel::Cq(w) => {
                let conds: Vec<MatrixDoc> = w.conditionals().iter().map(|s| matrix_doc(s.matrix())).collect();
                ChannelSpecDocument {
                    kind: SpecKind::Cq,
                    dims: BTreeMap::from([(BOB.to_string(), w.b_dim()), (CHARLIE.to_string(), w.c_dim())]),
                    payload: serde_json::json!({ "conditionals": conds }),
                }
            }
            ParsedChannel::Quantum(n) => {
                if let Some(spec) = n.dephasing_spec() {
                    let vectors: Vec<VectorDoc> = spec.env_vectors().iter().map(|v| vector_doc(v.amplitudes())).collect();
                    let mut dims = BTreeMap::from([(CHARLIE.to_string(), spec.charlie_dim())]);
                    if spec.residual_env_dim() > 1 {
                        dims.insert(ENV.to_string(), spec.residual_env_dim());
                    }
                    return ChannelSpecDocument { kind: SpecKind::Dephasing, dims, payload: serde_json::json!({ "env_vectors": vectors }) };
                }
                let dims = BTreeMap::from([
                    (INPUT.to_string(), n.input_dim()),
                    (BOB.to_string(), n.b_dim()),
                    (CHARLIE.to_string(), n.c_dim()),
                ]);
                let kraus: Vec<MatrixDoc> = n.channel().kraus().iter().map(matrix_doc).collect();
                if n.is_isometry() {
                    ChannelSpecDocument { kind: SpecKind::Isometry, dims, payload: serde_json::json!({ "isometry": kraus[0] }) }
                } else {
                    ChannelSpecDocument { kind: SpecKind::Kraus, dims, payload: serde_json::json!({ "kraus": kraus }) }
                }
            }
        }
    }
}

/// Parses a JSON channel document.
pub fn parse_channel_spec(text: &str) -> CliResult<ParsedChannel> {
    parse_document(text)?.parse()
}

pub fn parse_document(text: &str) -> CliResult<ChannelSpecDocument> {
    Ok(serde_json::from_str(text)?)
}

/// Reads `arg` as a spec file, or as a builtin name when no such file exists.
pub fn load_channel(arg: &str) -> CliResult<(ChannelSpecDocument, ParsedChannel)> {
    let doc = if Path::new(arg).is_file() {
        parse_document(&std::fs::read_to_string(arg)?)?
    } else if BUILTINS.contains(&arg) {
        ChannelSpecDocument::builtin(arg)
    } else {
        return Err(CliError::validate(format!("channel: no spec file or builtin named {arg:?}")));
    };
    let parsed = doc.parse()?;
    Ok((doc, parsed))
}
