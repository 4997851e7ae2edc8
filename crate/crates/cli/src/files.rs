//! On-disk formats. Candidates are 1-based in files, fractions are `p/q`
//! strings in lowest terms, and nothing is stored as a float.

use std::path::Path;

use anyhow::{bail, Context};
use num_bigint::BigInt;
use num_traits::Zero;
use pav_core::election::{CandidateSet, ElectionInstance, Profile, Rational};
use pav_core::lp::{FarkasCertificate, LinearSystem};
use pav_core::proof::{build_program3, history_system, DeviationShape, History};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotEntry {
    pub approve: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub m: usize,
    pub k: usize,
    pub ballots: Vec<BallotEntry>,
}

pub fn to_set(indices: &[usize], m: usize) -> anyhow::Result<CandidateSet> {
    let mut set = CandidateSet::EMPTY;
    for &i in indices {
        if i == 0 || i > m {
            bail!("candidate {i} is outside 1..={m}");
        }
        set = set.with(i - 1);
    }
    Ok(set)
}

pub fn to_indices(set: CandidateSet) -> Vec<usize> {
    set.iter().map(|c| c + 1).collect()
}

pub fn parse_fraction(s: &str) -> anyhow::Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| anyhow::anyhow!("bad fraction {s:?}: {e}"))
}

impl ProfileFile {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    #[cfg(test)]
    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn instance(&self) -> anyhow::Result<ElectionInstance> {
        if self.ballots.is_empty() {
            bail!("profile has no ballots");
        }
        let by_count = self.ballots.iter().all(|b| b.count.is_some() && b.weight.is_none());
        let by_weight = self.ballots.iter().all(|b| b.weight.is_some() && b.count.is_none());
        let mut sets = Vec::with_capacity(self.ballots.len());
        for b in &self.ballots {
            if b.approve.is_empty() {
                bail!("ballot with no approved candidates");
            }
            sets.push(to_set(&b.approve, self.m)?);
        }
        let profile = if by_count {
            Profile::from_counts(self.m, sets.into_iter().zip(self.ballots.iter().map(|b| b.count.unwrap())))?
        } else if by_weight {
            let weights = self
                .ballots
                .iter()
                .map(|b| parse_fraction(b.weight.as_deref().unwrap()))
                .collect::<anyhow::Result<Vec<_>>>()?;
            Profile::new(self.m, sets.into_iter().zip(weights))?
        } else {
            bail!("every ballot needs exactly one of `weight` or `count`, used consistently");
        };
        Ok(ElectionInstance::new(profile, self.k)?)
    }

    /// The normalised profile, one entry per distinct ballot with its weight.
    pub fn from_instance(instance: &ElectionInstance) -> Self {
        ProfileFile {
            m: instance.m(),
            k: instance.k(),
            ballots: instance
                .profile()
                .iter()
                .map(|(a, w)| BallotEntry {
                    approve: to_indices(a),
                    weight: Some(w.to_string()),
                    count: None,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEntry {
    #[serde(rename = "W")]
    pub committee: Vec<usize>,
    #[serde(rename = "T")]
    pub deviation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeEntry {
    pub size: usize,
    pub overlap: usize,
}

/// What the certified system is: a history's system or the shape program for one
/// deviation shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    History(Vec<StepEntry>),
    Shape(ShapeEntry),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub m: usize,
    pub k: usize,
    #[serde(flatten)]
    pub subject: Subject,
    /// Row multipliers as integer strings in canonical row order; trailing
    /// zeros are left out.
    pub multipliers: Vec<String>,
}

fn encode_multipliers(certificate: &FarkasCertificate) -> Vec<String> {
    let y = &certificate.multipliers;
    let len = y.iter().rposition(|v| !v.is_zero()).map_or(0, |i| i + 1);
    y[..len].iter().map(BigInt::to_string).collect()
}

impl CertificateFile {
    pub fn for_history(history: &History, certificate: &FarkasCertificate) -> Self {
        CertificateFile {
            m: history.m(),
            k: history.k(),
            subject: Subject::History(
                history
                    .steps()
                    .iter()
                    .map(|s| StepEntry {
                        committee: to_indices(s.committee),
                        deviation: to_indices(s.deviation),
                    })
                    .collect(),
            ),
            multipliers: encode_multipliers(certificate),
        }
    }

    pub fn for_shape(k: usize, shape: DeviationShape, certificate: &FarkasCertificate) -> Self {
        CertificateFile {
            m: k + shape.outside(),
            k,
            subject: Subject::Shape(ShapeEntry {
                size: shape.size,
                overlap: shape.overlap,
            }),
            multipliers: encode_multipliers(certificate),
        }
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string(self)? + "\n").with_context(|| format!("writing {}", path.display()))
    }

    /// Rebuilds the certified system from its description.
    pub fn system(&self) -> anyhow::Result<LinearSystem> {
        match &self.subject {
            Subject::History(steps) => {
                let steps = steps
                    .iter()
                    .map(|s| Ok((to_set(&s.committee, self.m)?, to_set(&s.deviation, self.m)?)))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Ok(history_system(&History::new(self.m, self.k, steps)?))
            }
            Subject::Shape(s) => {
                let shape = DeviationShape::new(s.size, s.overlap);
                if self.m != self.k + s.size.saturating_sub(s.overlap) {
                    bail!("m = {} does not match shape ({}, {}) with k = {}", self.m, s.size, s.overlap, self.k);
                }
                Ok(build_program3(self.k, shape)?)
            }
        }
    }

    /// Multipliers padded with zeros to `rows` entries.
    pub fn certificate(&self, rows: usize) -> anyhow::Result<FarkasCertificate> {
        if self.multipliers.len() > rows {
            bail!("{} multipliers for {rows} rows", self.multipliers.len());
        }
        let mut multipliers = self
            .multipliers
            .iter()
            .map(|s| s.parse::<BigInt>().with_context(|| format!("bad multiplier {s:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        multipliers.resize(rows, BigInt::zero());
        Ok(FarkasCertificate { multipliers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pav_core::lp::solve_feasibility;
    use pav_core::lp::LpVerdict;

    #[test]
    fn profile_round_trip() {
        let file = ProfileFile {
            m: 4,
            k: 2,
            ballots: vec![
                BallotEntry {
                    approve: vec![1, 2],
                    weight: Some("1/3".into()),
                    count: None,
                },
                BallotEntry {
                    approve: vec![3, 4],
                    weight: Some("2/3".into()),
                    count: None,
                },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        file.write(&path).unwrap();
        let back = ProfileFile::read(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(ProfileFile::from_instance(&back.instance().unwrap()), file);
    }

    #[test]
    fn counts_are_normalised() {
        let file = ProfileFile {
            m: 3,
            k: 1,
            ballots: vec![
                BallotEntry {
                    approve: vec![1],
                    weight: None,
                    count: Some(1),
                },
                BallotEntry {
                    approve: vec![2, 3],
                    weight: None,
                    count: Some(3),
                },
            ],
        };
        let back = ProfileFile::from_instance(&file.instance().unwrap());
        assert_eq!(back.ballots[0].weight.as_deref(), Some("1/4"));
        assert_eq!(back.ballots[1].weight.as_deref(), Some("3/4"));
    }

    #[test]
    fn bad_profiles() {
        let mixed = r#"{"m":3,"k":1,"ballots":[{"approve":[1],"count":1},{"approve":[2],"weight":"1/2"}]}"#;
        let f: ProfileFile = serde_json::from_str(mixed).unwrap();
        assert!(f.instance().is_err());
        let range = r#"{"m":3,"k":1,"ballots":[{"approve":[4],"count":1}]}"#;
        let f: ProfileFile = serde_json::from_str(range).unwrap();
        assert!(f.instance().is_err());
        let sum = r#"{"m":3,"k":1,"ballots":[{"approve":[1],"weight":"1/3"}]}"#;
        let f: ProfileFile = serde_json::from_str(sum).unwrap();
        assert!(f.instance().is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let shape = DeviationShape::new(2, 1);
        let system = build_program3(3, shape).unwrap();
        let LpVerdict::Infeasible(cert) = solve_feasibility(&system) else {
            panic!("feasible");
        };
        let file = CertificateFile::for_shape(3, shape, &cert);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        file.write(&path).unwrap();
        let back = CertificateFile::read(&path).unwrap();
        assert_eq!(back, file);
        let rebuilt = back.system().unwrap();
        assert_eq!(rebuilt, system);
        assert_eq!(back.certificate(rebuilt.num_rows()).unwrap(), cert);

        let history = History::new(4, 2, [(CandidateSet::range(0, 2), CandidateSet::from_iter([0, 3]))]).unwrap();
        let file = CertificateFile::for_history(&history, &cert);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains(r#""history":[{"W":[1,2],"T":[1,4]}]"#), "{json}");
        assert_eq!(serde_json::from_str::<CertificateFile>(&json).unwrap(), file);
    }
}
