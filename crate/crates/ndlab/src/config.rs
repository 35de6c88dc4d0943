//! Run configuration: flat `key = value` files merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndlab_core::generate::Family;
use ndlab_core::params::{Mode, Params};

use crate::error::HarnessError;
use crate::verify::ArtifactKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Mis,
    NetDecomp,
    RulingSet,
    Luby,
    Mpx,
    Verify,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Mis, Algorithm::NetDecomp, Algorithm::RulingSet, Algorithm::Luby, Algorithm::Mpx, Algorithm::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mis => "mis",
            Algorithm::NetDecomp => "net-decomp",
            Algorithm::RulingSet => "ruling-set",
            Algorithm::Luby => "luby",
            Algorithm::Mpx => "mpx",
            Algorithm::Verify => "verify",
        }
    }

    /// Kind of artifact the algorithm writes.
    pub fn artifact_kind(self) -> Option<ArtifactKind> {
        match self {
            Algorithm::Mis | Algorithm::Luby => Some(ArtifactKind::Is),
            Algorithm::NetDecomp => Some(ArtifactKind::Nd),
            Algorithm::RulingSet => Some(ArtifactKind::Ruling),
            Algorithm::Mpx => Some(ArtifactKind::Partition),
            Algorithm::Verify => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Family(Family),
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(p) => write!(f, "file:{}", p.display()),
            GraphSource::Family(fam) => write!(f, "{fam}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub source: GraphSource,
    /// Generator seed, also the seed of the randomized baselines.
    pub seed: u64,
    pub mode: Mode,
    /// Constant overrides in first-mention order; a later value replaces
    /// an earlier one.
    pub overrides: Vec<(String, String)>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Input of the `verify` algorithm.
    pub artifact: Option<PathBuf>,
    pub kind: Option<ArtifactKind>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected \"key = value\"", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text)
}

impl RunConfig {
    /// Builds a config from entries applied in order, so later entries win.
    /// Constants are written `set.<name>`.
    pub fn from_entries(entries: &[(String, String)]) -> Result<Self, HarnessError> {
        let mut algorithm = None;
        let mut source = None;
        let mut cfg = RunConfig {
            algorithm: Algorithm::Mis,
            source: GraphSource::Family(Family::Path { n: 1 }),
            seed: 1,
            mode: Mode::Desk,
            overrides: Vec::new(),
            out: None,
            report: None,
            artifact: None,
            kind: None,
        };
        let bad = |k: &str, v: &str| HarnessError::Config(format!("bad value {v:?} for {k}"));
        for (k, v) in entries {
            match k.as_str() {
                "algorithm" => algorithm = Some(v.parse()?),
                "graph" => source = Some(GraphSource::File(PathBuf::from(v))),
                "family" => source = Some(GraphSource::Family(v.parse().map_err(|_| bad(k, v))?)),
                "seed" => cfg.seed = v.parse().map_err(|_| bad(k, v))?,
                "mode" => cfg.mode = v.parse().map_err(|_| bad(k, v))?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "report" => cfg.report = Some(PathBuf::from(v)),
                "artifact" => cfg.artifact = Some(PathBuf::from(v)),
                "kind" => cfg.kind = Some(v.parse()?),
                _ => {
                    let name = k
                        .strip_prefix("set.")
                        .ok_or_else(|| HarnessError::Config(format!("unknown key {k:?}")))?;
                    cfg.set(name, v)?;
                }
            }
        }
        cfg.algorithm = algorithm.ok_or_else(|| HarnessError::Config("no algorithm given".into()))?;
        cfg.source = source.ok_or_else(|| HarnessError::Config("no graph or family given".into()))?;
        if cfg.algorithm == Algorithm::Verify && (cfg.artifact.is_none() || cfg.kind.is_none()) {
            return Err(HarnessError::Config("verify needs an artifact and its kind".into()));
        }
        cfg.params()?;
        Ok(cfg)
    }

    /// Records one constant override.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), HarnessError> {
        if name == "mode" || !Params::keys().contains(&name) {
            return Err(HarnessError::Config(format!("unknown constant {name:?}")));
        }
        match self.overrides.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = value.to_string(),
            None => self.overrides.push((name.to_string(), value.to_string())),
        }
        Ok(())
    }

    /// The mode's preset with every override applied.
    pub fn params(&self) -> Result<Params, HarnessError> {
        let mut p = Params::for_mode(self.mode);
        for (k, v) in &self.overrides {
            p.set(k, v)?;
        }
        Ok(p)
    }
}

/// Splits a `key=value` flag.
pub fn split_assignment(s: &str) -> Result<(String, String), HarnessError> {
    let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::Config(format!("expected key=value, got {s:?}")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(text: &str) -> Vec<(String, String)> {
        parse_config(text).unwrap()
    }

    #[test]
    fn later_entries_win() {
        let mut e = entries("algorithm = mis\nfamily = path:10 # comment\nset.c_diam = 5\n");
        e.push(("set.c_diam".into(), "7".into()));
        e.push(("seed".into(), "9".into()));
        let cfg = RunConfig::from_entries(&e).unwrap();
        assert_eq!(cfg.overrides, vec![("c_diam".to_string(), "7".to_string())]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.params().unwrap().c_diam, 7.0);
        assert_eq!(cfg.source.to_string(), "path:10");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config("no equals sign").is_err());
        assert!(RunConfig::from_entries(&entries("family = path:3")).is_err());
        assert!(RunConfig::from_entries(&entries("algorithm = mis")).is_err());
        assert!(RunConfig::from_entries(&entries("algorithm = mis\nfamily = path:3\nbogus = 1")).is_err());
        assert!(RunConfig::from_entries(&entries("algorithm = mis\nfamily = path:3\nset.c_diam = x")).is_err());
        assert!(RunConfig::from_entries(&entries("algorithm = verify\nfamily = path:3")).is_err());
        assert!(RunConfig::from_entries(&entries("algorithm = dance\nfamily = path:3")).is_err());
    }
}
