//! On-disk cache of Victor-Miller bases as exact q-expansion JSON.

use std::fs;
use std::path::{Path, PathBuf};

use lkernel::modforms::{victor_miller_basis, QExpansion, QExpansionJson};
use lkernel::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct BasisFile {
    weight: u32,
    prec: usize,
    basis: Vec<QExpansionJson>,
}

/// What happened on a cache lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// The file held fewer coefficients than requested.
    Upgraded,
    /// The file could not be parsed and was rewritten.
    Repaired,
}

pub fn cache_path(dir: &Path, k: u32) -> PathBuf {
    dir.join(format!("basis_k{k}.json"))
}

fn read(path: &Path, k: u32) -> std::result::Result<(usize, Vec<QExpansion>), String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let file: BasisFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if file.weight != k {
        return Err(format!("weight {} in file, expected {k}", file.weight));
    }
    let basis = file
        .basis
        .into_iter()
        .map(|q| QExpansion::try_from(q).map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if basis.iter().any(|q| q.weight() != k || q.prec() != file.prec) {
        return Err("inconsistent basis entries".into());
    }
    Ok((file.prec, basis))
}

fn write(path: &Path, k: u32, prec: usize, basis: &[QExpansion]) -> Result<()> {
    let file = BasisFile {
        weight: k,
        prec,
        basis: basis.iter().map(QExpansionJson::from).collect(),
    };
    let text = serde_json::to_string(&file).map_err(|e| Error::Serde(e.to_string()))?;
    fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))
        .and_then(|_| fs::write(path, text))
        .map_err(|e| Error::Dependency(format!("cannot write cache {}: {e}", path.display())))
}

/// Victor-Miller basis of `S_k` to precision `prec`, read from `dir` when a
/// file with at least that precision exists, otherwise computed and stored.
pub fn cache_expansions(k: u32, prec: usize, dir: &Path) -> Result<(Vec<QExpansion>, CacheOutcome)> {
    let path = cache_path(dir, k);
    let outcome = if path.exists() {
        match read(&path, k) {
            Ok((have, basis)) if have >= prec => {
                let basis = basis
                    .iter()
                    .map(|q| q.truncate(prec))
                    .collect::<Result<Vec<_>>>()?;
                return Ok((basis, CacheOutcome::Hit));
            }
            Ok(_) => CacheOutcome::Upgraded,
            Err(e) => {
                eprintln!("warning: corrupt cache file {}: {e}; recomputing", path.display());
                CacheOutcome::Repaired
            }
        }
    } else {
        CacheOutcome::Miss
    };
    let basis = victor_miller_basis(k, prec)?;
    write(&path, k, prec, &basis)?;
    Ok((basis, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lkernel::modforms::delta;

    #[test]
    fn delta_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let (first, o1) = cache_expansions(12, 64, dir.path()).unwrap();
        let (second, o2) = cache_expansions(12, 64, dir.path()).unwrap();
        assert_eq!(o1, CacheOutcome::Miss);
        assert_eq!(o2, CacheOutcome::Hit);
        assert_eq!(first, second);
        assert_eq!(second[0], delta(64).unwrap());
        assert_eq!(first[0].to_json(), second[0].to_json());
    }

    #[test]
    fn precision_upgrade_recomputes() {
        let dir = tempfile::tempdir().unwrap();
        let (small, _) = cache_expansions(24, 20, dir.path()).unwrap();
        let (big, outcome) = cache_expansions(24, 40, dir.path()).unwrap();
        assert_eq!(outcome, CacheOutcome::Upgraded);
        for (s, b) in small.iter().zip(&big) {
            assert_eq!(&b.truncate(20).unwrap(), s);
        }
        let (again, outcome) = cache_expansions(24, 30, dir.path()).unwrap();
        assert_eq!(outcome, CacheOutcome::Hit);
        assert_eq!(again[0], big[0].truncate(30).unwrap());
    }

    #[test]
    fn corrupt_file_is_rewritten() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(cache_path(dir.path(), 12), "{not json").unwrap();
        let (b, outcome) = cache_expansions(12, 16, dir.path()).unwrap();
        assert_eq!(outcome, CacheOutcome::Repaired);
        assert_eq!(b[0], delta(16).unwrap());
        let (_, outcome) = cache_expansions(12, 16, dir.path()).unwrap();
        assert_eq!(outcome, CacheOutcome::Hit);
    }
}
