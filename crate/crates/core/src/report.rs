//! Verification reports: a fixed list of named checks with defects and
//! tolerances, plus the extracted constants when the framing is flat.
//!
//! JSON output is byte-deterministic: field order is fixed by the struct
//! definitions and every float is written with 17 significant digits, which
//! round-trips f64 exactly.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::io::Write;

use crate::tensor::Tensor;

/// One verification check: a named defect against a pinned tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: &'static str, max_defect: f64, tol: f64) -> CheckRow {
        // A non-finite defect can only mean the computation broke; report it
        // as a maximal failing defect rather than emitting invalid JSON.
        let max_defect = if max_defect.is_finite() { max_defect } else { f64::MAX };
        CheckRow { name, max_defect, tol, pass: max_defect <= tol }
    }
}

/// Wrapper serializing a tensor as nested arrays in index order.
#[derive(Debug, Clone)]
pub struct NestedTensor(pub Tensor);

impl Serialize for NestedTensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        fn emit<S: Serializer>(dim: usize, rank: usize, data: &[f64], s: S) -> Result<S::Ok, S::Error> {
            if rank == 0 {
                return s.serialize_f64(data[0]);
            }
            let chunk = data.len() / dim;
            let mut seq = s.serialize_seq(Some(dim))?;
            for i in 0..dim {
                seq.serialize_element(&NestedSlice {
                    dim,
                    rank: rank - 1,
                    data: &data[i * chunk..(i + 1) * chunk],
                })?;
            }
            seq.end()
        }

        struct NestedSlice<'a> {
            dim: usize,
            rank: usize,
            data: &'a [f64],
        }
        impl Serialize for NestedSlice<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                emit(self.dim, self.rank, self.data, s)
            }
        }

        emit(self.0.dim(), self.0.rank(), self.0.data(), serializer)
    }
}

/// A constants block computed along both routes with their agreement defect
/// and cross-point spread.
#[derive(Debug, Clone, Serialize)]
pub struct TwoPathConstants {
    pub definition: NestedTensor,
    pub formula: NestedTensor,
    pub agreement_defect: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarConstants {
    pub pointwise: f64,
    pub from_constants: f64,
    pub spread: f64,
}

/// Extracted constants of a flat framing.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsSection {
    pub c: NestedTensor,
    pub c_spread: f64,
    /// Absent on odd-dimensional charts.
    pub nijenhuis: Option<TwoPathConstants>,
    /// Absent on odd-dimensional charts.
    pub domega: Option<TwoPathConstants>,
    pub scalar_curvature: ScalarConstants,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub framing: String,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckRow>,
    pub constants: Option<ConstantsSection>,
    pub flat: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Deterministic JSON with fixed field order and 17-significant-digit
    /// floats.
    pub fn to_json(&self) -> String {
        json_17sig(self)
    }

    /// Human-readable rendering of the same data.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("framing: {}\n", self.framing));
        s.push_str(&format!("seed: {}  points: {}\n", self.seed, self.points));
        for c in &self.checks {
            s.push_str(&format!(
                "[{}] {:<32} max_defect {:>12.5e}  tol {:>9.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_defect,
                c.tol
            ));
        }
        match &self.constants {
            None => s.push_str("constants: (not flat)\n"),
            Some(k) => {
                s.push_str("constants:\n");
                s.push_str(&format!("  c = {}\n", nested_text(&k.c.0)));
                s.push_str(&format!("  c_spread = {:.5e}\n", k.c_spread));
                if let Some(nj) = &k.nijenhuis {
                    s.push_str(&format!("  nijenhuis = {}\n", nested_text(&nj.definition.0)));
                    s.push_str(&format!(
                        "  nijenhuis_agreement = {:.5e}  spread = {:.5e}\n",
                        nj.agreement_defect, nj.spread
                    ));
                }
                if let Some(dw) = &k.domega {
                    s.push_str(&format!("  domega = {}\n", nested_text(&dw.definition.0)));
                    s.push_str(&format!(
                        "  domega_agreement = {:.5e}  spread = {:.5e}\n",
                        dw.agreement_defect, dw.spread
                    ));
                }
                s.push_str(&format!(
                    "  scalar_curvature = {:.12e}  from_constants = {:.12e}  spread = {:.5e}\n",
                    k.scalar_curvature.pointwise,
                    k.scalar_curvature.from_constants,
                    k.scalar_curvature.spread
                ));
            }
        }
        s.push_str(&format!("flat: {}\n", self.flat));
        s.push_str(&format!("overall: {}\n", if self.passed() { "PASS" } else { "FAIL" }));
        s
    }
}

/// Serialize anything with fixed field order and 17-significant-digit
/// floats; the byte output is deterministic for a given value.
pub fn json_17sig<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    String::from_utf8(out).expect("serializer emits utf-8")
}

/// Nonzero entries of a tensor in `T[i][j][k] = v` form (1-based indices),
/// or `0` if all entries vanish.
pub fn tensor_text(t: &Tensor) -> String {
    nested_text(t)
}

/// Nonzero entries of a tensor in `T[i][j][k] = v` form, or `0` if all zero.
fn nested_text(t: &Tensor) -> String {
    let mut parts = Vec::new();
    crate::tensor::for_each_index(t.dim(), t.rank(), |idx| {
        let v = t.get(idx);
        if v.abs() > 1e-12 {
            let ix: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            parts.push(format!("[{}]={:.6}", ix.join(","), v));
        }
    });
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ")
    }
}

/// serde_json formatter writing every float with 17 significant digits.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        // Normalize the sign of zero so reports cannot differ in -0.0.
        let v = if value == 0.0 { 0.0 } else { value };
        write!(writer, "{v:.16e}")
    }
}
