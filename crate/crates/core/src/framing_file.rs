//! The on-disk framing format: a JSON object with the chart dimension, the
//! domain box keyed by coordinate name, and the matrix of entry expressions
//! (row = chart component, column = frame index). Unknown keys are rejected.
//!
//! ```json
//! {"dim": 2,
//!  "domain": {"x1": [0.1, 10.0], "x2": [-10.0, 10.0]},
//!  "w": [["x1", "0"], ["0", "x1"]]}
//! ```

use std::collections::HashMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::frame::FramingSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFraming {
    dim: usize,
    domain: HashMap<String, [f64; 2]>,
    w: Vec<Vec<String>>,
}

/// Parse the JSON framing format into a `FramingSpec` (expressions are
/// syntax-checked on `compile`).
pub fn parse_framing(json: &str) -> Result<FramingSpec> {
    let raw: RawFraming =
        serde_json::from_str(json).map_err(|e| Error::InvalidFraming(e.to_string()))?;
    if raw.dim == 0 {
        return Err(Error::InvalidFraming("dim must be at least 1".into()));
    }
    if raw.domain.len() != raw.dim {
        return Err(Error::InvalidFraming(format!(
            "domain has {} entries for dim {}",
            raw.domain.len(),
            raw.dim
        )));
    }
    let mut domain = Vec::with_capacity(raw.dim);
    for k in 1..=raw.dim {
        let key = format!("x{k}");
        let iv = raw
            .domain
            .get(&key)
            .ok_or_else(|| Error::InvalidFraming(format!("domain is missing `{key}`")))?;
        if !(iv[0] < iv[1]) {
            return Err(Error::InvalidFraming(format!(
                "domain interval for `{key}` is empty or inverted"
            )));
        }
        domain.push(*iv);
    }
    if raw.w.len() != raw.dim || raw.w.iter().any(|row| row.len() != raw.dim) {
        return Err(Error::InvalidFraming(format!(
            "w must be a {0}x{0} matrix of expressions",
            raw.dim
        )));
    }
    Ok(FramingSpec { dim: raw.dim, domain, w: raw.w })
}

/// Serialize a spec into the framing format. Domain keys appear in
/// coordinate order for charts up to dimension 9 (the supported range).
pub fn to_json(spec: &FramingSpec) -> String {
    let mut domain = serde_json::Map::new();
    for (k, iv) in spec.domain.iter().enumerate() {
        domain.insert(
            format!("x{}", k + 1),
            serde_json::json!([iv[0], iv[1]]),
        );
    }
    let value = serde_json::json!({
        "dim": spec.dim,
        "domain": domain,
        "w": spec.w,
    });
    serde_json::to_string(&value).expect("framing serialization cannot fail")
}

/// FNV-1a over a byte string; used to tag file-loaded framings in reports.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
