//! On-disk cache of spectral decompositions.
//!
//! One file per model, named `<hash>.eig`, where the hash is the model's
//! SHA-256 key. All integers and floats are little-endian:
//!
//! ```text
//! offset  size        field
//! 0       8           magic  b"LOOPEIG1"
//! 8       32          raw SHA-256 model key
//! 40      8           dim (u64)
//! 48      8           flags (u64): bit 0 set when eigenvectors follow
//! 56      8 * dim     eigenvalues of H (f64)
//! ...     16 * dim^2  eigenvector matrix, row-major, (re, im) f64 pairs
//! ```
//!
//! Unreadable or inconsistent files are treated as misses and rebuilt.

use std::path::{Path, PathBuf};

use crate::linalg::CMat;
use crate::operators::SpectralModel;
use crate::{Error, Result, C64};

pub const MAGIC: &[u8; 8] = b"LOOPEIG1";
/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "LOOPINT_CACHE_DIR";
const HEADER: usize = 56;

/// Decoded cache entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedEigen {
    pub hash: String,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<CMat>,
}

pub fn encode(hash: &str, eigenvalues: &[f64], eigenvectors: Option<&CMat>) -> Result<Vec<u8>> {
    let key = hex::decode(hash).map_err(|e| Error::Cache(format!("bad hash: {e}")))?;
    if key.len() != 32 {
        return Err(Error::Cache(format!("hash has {} bytes, expected 32", key.len())));
    }
    let dim = eigenvalues.len();
    if let Some(v) = eigenvectors {
        if v.nrows() != dim || v.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.nrows() });
        }
    }
    let mut out = Vec::with_capacity(HEADER + 8 * dim + eigenvectors.map_or(0, |_| 16 * dim * dim));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&key);
    out.extend_from_slice(&(dim as u64).to_le_bytes());
    out.extend_from_slice(&u64::from(eigenvectors.is_some()).to_le_bytes());
    for x in eigenvalues {
        out.extend_from_slice(&x.to_le_bytes());
    }
    if let Some(v) = eigenvectors {
        for i in 0..dim {
            for j in 0..dim {
                out.extend_from_slice(&v[(i, j)].re.to_le_bytes());
                out.extend_from_slice(&v[(i, j)].im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn bad(msg: &str) -> Error {
    Error::Cache(msg.to_string())
}

fn f64_at(b: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(b[off..off + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<CachedEigen> {
    if bytes.len() < HEADER || &bytes[..8] != MAGIC {
        return Err(bad("missing header"));
    }
    let hash = hex::encode(&bytes[8..40]);
    let dim = u64::from_le_bytes(bytes[40..48].try_into().expect("8 bytes"));
    let flags = u64::from_le_bytes(bytes[48..56].try_into().expect("8 bytes"));
    if flags > 1 {
        return Err(bad("unknown flags"));
    }
    let body = (bytes.len() - HEADER) as u64;
    let expected = dim.checked_mul(8).and_then(|e| {
        if flags == 1 {
            dim.checked_mul(dim)?.checked_mul(16)?.checked_add(e)
        } else {
            Some(e)
        }
    });
    if expected != Some(body) {
        return Err(bad("length does not match dim"));
    }
    let dim = dim as usize;
    let eigenvalues: Vec<f64> = (0..dim).map(|i| f64_at(bytes, HEADER + 8 * i)).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(bad("non-finite eigenvalue"));
    }
    let eigenvectors = (flags == 1).then(|| {
        let base = HEADER + 8 * dim;
        CMat::from_fn(dim, dim, |i, j| {
            let off = base + 16 * (i * dim + j);
            C64::new(f64_at(bytes, off), f64_at(bytes, off + 8))
        })
    });
    Ok(CachedEigen { hash, eigenvalues, eigenvectors })
}

/// A directory of cache files.
#[derive(Debug, Clone)]
pub struct SpectralCache {
    pub dir: PathBuf,
}

impl SpectralCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// The cache named by `LOOPINT_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn path_for(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.eig"))
    }

    /// The entry for `hash`; corrupt or mismatched files count as misses.
    pub fn load(&self, hash: &str) -> Option<CachedEigen> {
        let bytes = std::fs::read(self.path_for(hash)).ok()?;
        decode(&bytes).ok().filter(|e| e.hash == hash)
    }

    pub fn store(&self, m: &SpectralModel) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let bytes = encode(&m.hash, &m.eigenvalues, m.eigenvectors.as_ref())?;
        write_atomic(&self.path_for(&m.hash), &bytes)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_spinor_rep;
    use crate::forms::ScalarForm;
    use crate::operators::{build_model, build_model_cached, BundleModel};

    fn potential_model() -> BundleModel {
        let a = ScalarForm::monomial(2, 1, &[0], &[0, 1], C64::new(0.3, 0.0))
            .add(&ScalarForm::monomial(2, 1, &[0], &[0, -1], C64::new(0.3, 0.0)))
            .unwrap();
        BundleModel::line_with_potential(&a).unwrap()
    }

    #[test]
    fn encode_decode_round_trip() {
        let rep = build_spinor_rep(2).unwrap();
        let m = build_model(&potential_model(), 2, &rep).unwrap();
        let bytes = encode(&m.hash, &m.eigenvalues, m.eigenvectors.as_ref()).unwrap();
        let e = decode(&bytes).unwrap();
        assert_eq!(e.hash, m.hash);
        assert_eq!(e.eigenvalues, m.eigenvalues);
        assert_eq!(e.eigenvectors, m.eigenvectors);
    }

    #[test]
    fn truncated_or_tampered_bytes_are_rejected() {
        let bytes = encode(&"ab".repeat(32), &[1.0, 2.0], None).unwrap();
        assert!(decode(&bytes).is_ok());
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut flags = bytes.clone();
        flags[48] = 7;
        assert!(decode(&flags).is_err());
        let mut huge = bytes.clone();
        huge[40..48].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode(&huge).is_err());
    }

    #[test]
    fn cached_build_matches_and_survives_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectralCache::new(dir.path());
        let rep = build_spinor_rep(2).unwrap();
        let b = potential_model();
        let fresh = build_model_cached(&b, 2, &rep, Some(&cache)).unwrap();
        assert!(cache.path_for(&fresh.hash).exists());
        let hit = build_model_cached(&b, 2, &rep, Some(&cache)).unwrap();
        assert_eq!(hit.eigenvalues, fresh.eigenvalues);
        std::fs::write(cache.path_for(&fresh.hash), b"garbage").unwrap();
        let rebuilt = build_model_cached(&b, 2, &rep, Some(&cache)).unwrap();
        assert_eq!(rebuilt.eigenvalues, fresh.eigenvalues);
        assert!(cache.load(&fresh.hash).is_some());
    }
}
