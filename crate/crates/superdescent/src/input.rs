//! External description of an algebra: a JSON document giving the prime,
//! the base-field degree, and either explicit structure constants or a
//! builtin family name. Parsing is total; validation happens on load.

use serde::Deserialize;

use crate::error::{Error, Result};

/// One structure constant c_{ij}^k, written with 1-based basis indices.
/// `coeff` lists the F_q coordinates over F_p, length d, entries < p.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: u64,
    #[serde(default = "default_degree")]
    pub d: u32,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub constants: Option<Vec<ConstantEntry>>,
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub params: Option<Vec<u32>>,
}

fn default_degree() -> u32 {
    1
}

impl AlgebraSpec {
    pub fn builtin(p: u64, d: u32, family: &str, params: &[u32]) -> AlgebraSpec {
        AlgebraSpec {
            p,
            d,
            r: None,
            constants: None,
            builtin: Some(family.to_string()),
            params: Some(params.to_vec()),
        }
    }

    pub fn from_json_str(text: &str) -> Result<AlgebraSpec> {
        let spec: AlgebraSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<AlgebraSpec> {
        let spec: AlgebraSpec = serde_json::from_slice(bytes)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Shape checks only; primality and irreducibility are the field
    /// tower's business, associativity and nilpotency the algebra's.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::MalformedSpec("d must be positive".into()));
        }
        match (&self.builtin, &self.r, &self.constants) {
            (Some(_), None, None) => Ok(()),
            (None, Some(r), constants) => {
                let r = *r;
                if r == 0 {
                    return Err(Error::MalformedSpec("r must be positive".into()));
                }
                if self.params.is_some() {
                    return Err(Error::MalformedSpec(
                        "params only make sense with a builtin".into(),
                    ));
                }
                let mut seen = std::collections::BTreeSet::new();
                for e in constants.iter().flatten() {
                    for (name, v) in [("i", e.i), ("j", e.j), ("k", e.k)] {
                        if v == 0 || v > r {
                            return Err(Error::MalformedSpec(format!(
                                "index {name}={v} out of range 1..={r}"
                            )));
                        }
                    }
                    if e.coeff.len() != self.d as usize {
                        return Err(Error::MalformedSpec(format!(
                            "coeff for ({},{},{}) must have length d={}",
                            e.i, e.j, e.k, self.d
                        )));
                    }
                    if e.coeff.iter().any(|&c| c >= self.p) {
                        return Err(Error::MalformedSpec(format!(
                            "coeff residues for ({},{},{}) must be below p={}",
                            e.i, e.j, e.k, self.p
                        )));
                    }
                    if !seen.insert((e.i, e.j, e.k)) {
                        return Err(Error::MalformedSpec(format!(
                            "duplicate constant for ({},{},{})",
                            e.i, e.j, e.k
                        )));
                    }
                }
                Ok(())
            }
            (Some(_), _, _) => Err(Error::MalformedSpec(
                "builtin specs must not carry r or constants".into(),
            )),
            (None, None, _) => Err(Error::MalformedSpec(
                "spec needs either builtin or r (+ constants)".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub levels: Vec<u32>,
    pub size_bound: u64,
    pub format: OutputFormat,
    pub slow_oracle: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            levels: vec![1],
            size_bound: 1 << 24,
            format: OutputFormat::Tsv,
            slow_oracle: false,
        }
    }
}

impl RunConfig {
    pub fn with_levels(levels: &[u32]) -> RunConfig {
        RunConfig { levels: levels.to_vec(), ..RunConfig::default() }
    }
}

/// Comma-separated positive integers, e.g. "1,2,4".
pub fn parse_levels(text: &str) -> Result<Vec<u32>> {
    let mut out = vec![];
    for piece in text.split(',') {
        let piece = piece.trim();
        let n: u32 = piece
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad level '{piece}'")))?;
        if n == 0 {
            return Err(Error::InvalidArgument("levels must be positive".into()));
        }
        out.push(n);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}


#[cfg(test)]
mod parsing_is_total {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn levels_never_panic(text in ".{0,64}") {
            let _ = parse_levels(&text);
        }

        #[test]
        fn spec_text_never_panics(text in ".{0,256}") {
            let _ = AlgebraSpec::from_json_str(&text);
        }

        #[test]
        fn spec_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = AlgebraSpec::from_slice(&bytes);
        }

        // valid JSON shape, hostile field values
        #[test]
        fn spec_validation_never_panics(
            p in 0u64..20, d in 0u32..5, r in 0usize..5,
            i in 0usize..5, j in 0usize..5, k in 0usize..5, c in 0u64..10,
        ) {
            let text = format!(
                r#"{{"p": {p}, "d": {d}, "r": {r}, "constants": [{{"i": {i}, "j": {j}, "k": {k}, "coeff": [{c}]}}]}}"#
            );
            let _ = AlgebraSpec::from_json_str(&text);
        }
    }
}
