//! The `.vfxcert` certificate file format.
//!
//! A certificate is a JSON object:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "source_digest": "<sha256 hex of the source file>",
//!   "func": "(func (args) (pre true) (body ...) (post ...))",
//!   "proof": ["intro", "split", "arith 0 ok", ...],
//!   "body_digest": "<sha256 hex over the four fields above>",
//!   "metadata": { "tool_version": "...", "timestamp": "..." }
//! }
//! ```
//!
//! `body_digest` covers `format_version`, `source_digest`, `func` and `proof`
//! serialized in that order; metadata is outside the covered region so that
//! two runs on the same input agree on every covered byte.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;
pub const EXTENSION: &str = "vfxcert";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discharge {
    /// The obligation follows from the hypotheses.
    Ok,
    /// The hypotheses are themselves unsatisfiable.
    Contradiction,
}

/// One proof step: `intro`, `split` or `arith <leaf> <ok|contradiction>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofStep {
    Intro,
    Split,
    Arith { leaf: usize, how: Discharge },
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::Intro => f.write_str("intro"),
            ProofStep::Split => f.write_str("split"),
            ProofStep::Arith { leaf, how } => {
                let how = match how {
                    Discharge::Ok => "ok",
                    Discharge::Contradiction => "contradiction",
                };
                write!(f, "arith {leaf} {how}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed proof step `{0}`")]
pub struct BadStep(pub String);

impl FromStr for ProofStep {
    type Err = BadStep;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadStep(s.to_string());
        let words: Vec<&str> = s.split(' ').collect();
        match words.as_slice() {
            ["intro"] => Ok(ProofStep::Intro),
            ["split"] => Ok(ProofStep::Split),
            ["arith", leaf, how] => {
                if leaf.is_empty() || !leaf.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                if leaf.len() > 1 && leaf.starts_with('0') {
                    return Err(bad());
                }
                let leaf = leaf.parse().map_err(|_| bad())?;
                let how = match *how {
                    "ok" => Discharge::Ok,
                    "contradiction" => Discharge::Contradiction,
                    _ => return Err(bad()),
                };
                Ok(ProofStep::Arith { leaf, how })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format_version: u32,
    pub source_digest: String,
    pub func: String,
    pub proof: Vec<String>,
    pub body_digest: String,
    pub metadata: Metadata,
}

#[derive(Serialize)]
struct Covered<'a> {
    format_version: u32,
    source_digest: &'a str,
    func: &'a str,
    proof: &'a [String],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, thiserror::Error)]
pub enum CertError {
    #[error("certificate is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Certificate {
    /// Assembles a certificate and seals it with `body_digest`.
    pub fn new(
        source_digest: String,
        func: String,
        proof: Vec<String>,
        metadata: Metadata,
    ) -> Certificate {
        let mut c = Certificate {
            format_version: FORMAT_VERSION,
            source_digest,
            func,
            proof,
            body_digest: String::new(),
            metadata,
        };
        c.reseal();
        c
    }

    /// The exact bytes covered by `body_digest`.
    pub fn covered_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&Covered {
            format_version: self.format_version,
            source_digest: &self.source_digest,
            func: &self.func,
            proof: &self.proof,
        })
        .expect("covered region always serializes")
    }

    pub fn compute_digest(&self) -> String {
        sha256_hex(&self.covered_bytes())
    }

    /// Recomputes `body_digest` after editing the covered fields.
    pub fn reseal(&mut self) {
        self.body_digest = self.compute_digest();
    }

    pub fn digest_ok(&self) -> bool {
        self.body_digest == self.compute_digest()
    }

    pub fn steps(&self) -> Result<Vec<ProofStep>, BadStep> {
        self.proof.iter().map(|s| s.parse()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Certificate, CertError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        Certificate::new(
            sha256_hex(b"int main() {}"),
            "(func (args) (pre true) (body skip) (post true))".into(),
            vec!["intro".into(), "arith 0 contradiction".into()],
            Metadata {
                tool_version: "0.1.0".into(),
                timestamp: "0".into(),
            },
        )
    }

    #[test]
    fn steps_round_trip() {
        for s in ["intro", "split", "arith 0 ok", "arith 17 contradiction"] {
            let step: ProofStep = s.parse().unwrap();
            assert_eq!(step.to_string(), s);
        }
        for s in ["", "intros", "arith", "arith x ok", "arith 1 maybe", "arith 01 ok", "split "] {
            assert!(s.parse::<ProofStep>().is_err(), "{s:?}");
        }
    }

    #[test]
    fn json_round_trip_keeps_digest() {
        let c = sample();
        assert!(c.digest_ok());
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(back.digest_ok());
    }

    #[test]
    fn digest_ignores_metadata_but_covers_proof() {
        let a = sample();
        let mut b = sample();
        b.metadata.timestamp = "later".into();
        b.reseal();
        assert_eq!(a.body_digest, b.body_digest);
        b.proof.pop();
        assert!(!b.digest_ok());
    }

    #[test]
    fn known_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
