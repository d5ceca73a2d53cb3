//! Tensor interchange files: a text header followed by one component per
//! line in sorted index order, lossless shortest-roundtrip decimals.
//!
//! ```text
//! spin7 tensor v1
//! kind 4-form
//! # comments allowed anywhere
//! 0 1 2 3 1
//! 0 1 6 7 -1
//! ```
//!
//! Readers accept components in any index order (and any permutation of each
//! index tuple); inconsistent duplicates and repeated indices are rejected
//! with the offending index pair.

use anyhow::{anyhow, bail, Context, Result};
use spin7_core::{FourForm, Matrix8, ThreeForm, TwoForm};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    Two,
    Three,
    Four,
}

impl TensorKind {
    pub fn rank(self) -> usize {
        match self {
            TensorKind::Two => 2,
            TensorKind::Three => 3,
            TensorKind::Four => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TensorKind::Two => "2-form",
            TensorKind::Three => "3-form",
            TensorKind::Four => "4-form",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "2-form" => Ok(TensorKind::Two),
            "3-form" => Ok(TensorKind::Three),
            "4-form" => Ok(TensorKind::Four),
            other => bail!("unknown tensor kind {other:?} (expected 2-form, 3-form or 4-form)"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Tensor {
    Two(TwoForm),
    Three(ThreeForm),
    Four(FourForm),
}

impl Tensor {
    pub fn kind(&self) -> TensorKind {
        match self {
            Tensor::Two(_) => TensorKind::Two,
            Tensor::Three(_) => TensorKind::Three,
            Tensor::Four(_) => TensorKind::Four,
        }
    }
}

fn parity(perm: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

pub fn read_tensor(path: &Path) -> Result<Tensor> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading tensor file {}", path.display()))?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let magic = lines.next().ok_or_else(|| anyhow!("empty tensor file"))?;
    if magic != "spin7 tensor v1" {
        bail!("bad header line {magic:?} (expected \"spin7 tensor v1\")");
    }
    let kind_line = lines.next().ok_or_else(|| anyhow!("missing kind line"))?;
    let kind = match kind_line.strip_prefix("kind ") {
        Some(k) => TensorKind::parse(k.trim())?,
        None => bail!("expected \"kind <2-form|3-form|4-form>\", got {kind_line:?}"),
    };
    let rank = kind.rank();

    // accumulate components keyed by sorted index tuple
    let mut entries: BTreeMap<Vec<usize>, (Vec<usize>, f64)> = BTreeMap::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != rank + 1 {
            bail!("line {:?}: expected {} indices and a value", line, rank);
        }
        let idx: Vec<usize> = fields[..rank]
            .iter()
            .map(|f| {
                f.parse::<usize>()
                    .ok()
                    .filter(|v| *v < 8)
                    .ok_or_else(|| anyhow!("line {line:?}: bad index {f:?}"))
            })
            .collect::<Result<_>>()?;
        let value: f64 =
            fields[rank].parse().with_context(|| format!("line {line:?}: bad value"))?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            if value != 0.0 {
                let p = sorted.windows(2).find(|w| w[0] == w[1]).unwrap();
                bail!(
                    "not antisymmetric: repeated index pair ({}, {}) with nonzero value on entry {}",
                    p[0], p[1], lineno + 1
                );
            }
            continue;
        }
        // normalize the value to the sorted representative
        let sign = parity(&idx);
        let canon = sign * value;
        if let Some((first_idx, existing)) = entries.get(&sorted) {
            if *existing != canon {
                bail!(
                    "not antisymmetric: entries for indices {:?} and {:?} disagree \
                     ({} vs expected {})",
                    first_idx,
                    idx,
                    value,
                    parity(&idx) * existing
                );
            }
        } else {
            entries.insert(sorted, (idx, canon));
        }
    }

    Ok(match kind {
        TensorKind::Two => {
            let mut m = Matrix8::zeros();
            for (sorted, (_, v)) in entries {
                m[(sorted[0], sorted[1])] = v;
                m[(sorted[1], sorted[0])] = -v;
            }
            Tensor::Two(TwoForm::try_from_matrix(m)?)
        }
        TensorKind::Three => {
            let mut f = ThreeForm::zero();
            for (sorted, (_, v)) in entries {
                f.set_component([sorted[0], sorted[1], sorted[2]], v);
            }
            Tensor::Three(f)
        }
        TensorKind::Four => {
            let mut f = FourForm::zero();
            for (sorted, (_, v)) in entries {
                f.set_component([sorted[0], sorted[1], sorted[2], sorted[3]], v);
            }
            Tensor::Four(f)
        }
    })
}

pub fn write_tensor(path: &Path, tensor: &Tensor) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "spin7 tensor v1")?;
    writeln!(out, "kind {}", tensor.kind().label())?;
    match tensor {
        Tensor::Two(t) => {
            for i in 0..8 {
                for j in (i + 1)..8 {
                    writeln!(out, "{i} {j} {}", t.component(i, j))?;
                }
            }
        }
        Tensor::Three(t) => {
            for i in 0..8 {
                for j in (i + 1)..8 {
                    for k in (j + 1)..8 {
                        writeln!(out, "{i} {j} {k} {}", t.component(i, j, k))?;
                    }
                }
            }
        }
        Tensor::Four(t) => {
            for i in 0..8 {
                for j in (i + 1)..8 {
                    for k in (j + 1)..8 {
                        for l in (k + 1)..8 {
                            writeln!(out, "{i} {j} {k} {l} {}", t.component(i, j, k, l))?;
                        }
                    }
                }
            }
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spin7_core::algebra::standard_phi;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("spin7_tensor_io");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn phi_round_trips_losslessly() {
        let path = tmp("phi.tsr");
        write_tensor(&path, &Tensor::Four(standard_phi())).unwrap();
        let Tensor::Four(read) = read_tensor(&path).unwrap() else { panic!("kind") };
        assert_eq!(read.sub(&standard_phi()).max_abs(), 0.0);
    }

    #[test]
    fn random_values_round_trip_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f = FourForm::from_sorted_fn(|_, _, _, _| rng.random_range(-1.0..1.0));
        let path = tmp("rand.tsr");
        write_tensor(&path, &Tensor::Four(f.clone())).unwrap();
        let Tensor::Four(read) = read_tensor(&path).unwrap() else { panic!("kind") };
        // shortest-roundtrip decimals restore every bit
        assert_eq!(read.as_slice(), f.as_slice());
    }

    #[test]
    fn unsorted_entries_are_normalized() {
        let path = tmp("unsorted.tsr");
        std::fs::write(&path, "spin7 tensor v1\nkind 2-form\n3 1 2.5\n").unwrap();
        let Tensor::Two(t) = read_tensor(&path).unwrap() else { panic!("kind") };
        assert_eq!(t.component(1, 3), -2.5);
    }

    #[test]
    fn inconsistent_duplicates_are_rejected_with_the_pair() {
        let path = tmp("dup.tsr");
        std::fs::write(&path, "spin7 tensor v1\nkind 2-form\n1 3 2.5\n3 1 2.5\n").unwrap();
        let err = read_tensor(&path).unwrap_err().to_string();
        assert!(err.contains("not antisymmetric"), "{err}");
    }

    #[test]
    fn repeated_index_rejected() {
        let path = tmp("rep.tsr");
        std::fs::write(&path, "spin7 tensor v1\nkind 3-form\n1 1 2 0.5\n").unwrap();
        let err = read_tensor(&path).unwrap_err().to_string();
        assert!(err.contains("repeated index pair (1, 1)"), "{err}");
    }
}
