//! Benchmark manifests: a TOML list of programs with their properties and domains.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{AnalysisConfig, Engine};
use crate::model::{DomainError, InputDomain, IntRange};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkEntry {
    pub name: String,
    /// Relative to the manifest.
    pub file: PathBuf,
    pub property: String,
    #[serde(default)]
    pub domains: BTreeMap<String, String>,
    pub unwind: Option<u32>,
    pub max_reads: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "benchmark")]
    pub benchmarks: Vec<BenchmarkEntry>,
    #[serde(skip)]
    pub dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid manifest {path}: {source}")]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("benchmark `{name}`: {source}")]
    Domain { name: String, source: DomainError },
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut m: Manifest = toml::from_str(&text).map_err(|source| ManifestError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        m.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn source_path(&self, entry: &BenchmarkEntry) -> PathBuf {
        self.dir.join(&entry.file)
    }

    /// The golden report next to the program: `<stem>.expected.json`.
    pub fn expected_path(&self, entry: &BenchmarkEntry) -> PathBuf {
        self.source_path(entry).with_extension("expected.json")
    }

    pub fn config(&self, entry: &BenchmarkEntry, engine: Engine) -> Result<AnalysisConfig, ManifestError> {
        let path = self.source_path(entry);
        let source = fs::read_to_string(&path).map_err(|source| ManifestError::Io { path, source })?;
        let mut c = AnalysisConfig::new(&entry.name, source, &entry.property);
        c.domains = entry
            .domains
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.parse::<IntRange>()?)))
            .collect::<Result<_, DomainError>>()
            .map_err(|source| ManifestError::Domain {
                name: entry.name.clone(),
                source,
            })?;
        if let Some(u) = entry.unwind {
            c.bounds.unwind = u;
        }
        c.max_reads = entry.max_reads.unwrap_or(InputDomain::DEFAULT_MAX_READS);
        c.engine = engine;
        Ok(c)
    }
}
