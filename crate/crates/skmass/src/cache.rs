//! One JSON file per weight holding the exact eigenbasis as decimal strings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skmass_core::qseries::{cusp_dimension, hecke_eigenbasis};
use skmass_core::EigenBasis;

pub const CACHE_ENV: &str = "SKMASS_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub weight: u32,
    pub precision: usize,
    pub dimension: usize,
    pub forms: Vec<Vec<String>>,
    pub checksum: String,
}

#[derive(Serialize)]
struct Payload<'a> {
    weight: u32,
    precision: usize,
    dimension: usize,
    forms: &'a [Vec<String>],
}

/// SHA-256 (hex) of the compact JSON of every field except the checksum.
pub fn checksum(weight: u32, precision: usize, dimension: usize, forms: &[Vec<String>]) -> String {
    let p = Payload {
        weight,
        precision,
        dimension,
        forms,
    };
    let bytes = serde_json::to_vec(&p).expect("payload serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl CacheFile {
    pub fn from_basis(b: &EigenBasis) -> Self {
        let forms = b.to_decimal_strings();
        let dimension = forms.len();
        CacheFile {
            weight: b.weight,
            precision: b.precision,
            dimension,
            checksum: checksum(b.weight, b.precision, dimension, &forms),
            forms,
        }
    }

    pub fn verify(&self) -> bool {
        self.checksum == checksum(self.weight, self.precision, self.dimension, &self.forms)
            && self.dimension == self.forms.len()
            && self.forms.iter().all(|f| f.len() == self.precision)
    }

    /// The basis truncated to `precision` coefficients.
    pub fn to_basis(&self, precision: usize) -> Result<EigenBasis> {
        if self.dimension == 0 {
            return Ok(EigenBasis {
                weight: self.weight,
                forms: Vec::new(),
                precision,
            });
        }
        let forms: Vec<Vec<String>> = self.forms.iter().map(|f| f[..precision].to_vec()).collect();
        Ok(EigenBasis::from_decimal_strings(self.weight, &forms)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The stored file was unusable and has been rewritten.
    Rewritten(String),
}

#[derive(Debug, Clone)]
pub struct BasisCache {
    pub dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BasisCache { dir: dir.into() }
    }

    /// Flag, then the environment, then the per-user data directory.
    pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(CACHE_ENV).filter(|p| !p.is_empty()) {
            return PathBuf::from(p);
        }
        dirs::data_dir()
            .unwrap_or_else(std::env::temp_dir)
            .join("skmass")
    }

    pub fn path(&self, weight: u32) -> PathBuf {
        self.dir.join(format!("weight-{weight:03}.json"))
    }

    fn read(&self, weight: u32, precision: usize) -> std::result::Result<Option<EigenBasis>, String> {
        let path = self.path(weight);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("cannot read {}: {e}", path.display())),
        };
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| format!("{} is not a cache file: {e}", path.display()))?;
        if file.weight != weight {
            return Err(format!("{} holds weight {}", path.display(), file.weight));
        }
        if !file.verify() {
            return Err(format!("checksum mismatch in {}", path.display()));
        }
        if file.precision < precision {
            return Ok(None);
        }
        file.to_basis(precision)
            .map(Some)
            .map_err(|e| format!("{} failed validation: {e}", path.display()))
    }

    fn write(&self, basis: &EigenBasis) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.path(basis.weight);
        let tmp = path.with_extension("json.tmp");
        let mut text = serde_json::to_string_pretty(&CacheFile::from_basis(basis))?;
        text.push('\n');
        let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, &path).with_context(|| format!("replacing {}", path.display()))?;
        Ok(())
    }

    /// Load from disk or compute and store. A corrupt file is recomputed and overwritten.
    pub fn load(&self, weight: u32, precision: usize) -> Result<(EigenBasis, CacheStatus)> {
        if weight % 2 == 1 {
            anyhow::bail!("weight {weight} is odd; level-one cusp forms have even weight");
        }
        let precision = precision.max(cusp_dimension(weight) + 2);
        let status = match self.read(weight, precision) {
            Ok(Some(b)) => return Ok((b, CacheStatus::Hit)),
            Ok(None) => CacheStatus::Miss,
            Err(reason) => {
                eprintln!("warning: {reason}; recomputing");
                CacheStatus::Rewritten(reason)
            }
        };
        let basis = hecke_eigenbasis(weight, precision)?;
        self.write(&basis)?;
        Ok((basis, status))
    }
}
