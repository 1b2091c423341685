//! Profile persistence: `r,f,fprime` CSV plus a JSON sidecar with everything
//! needed to rebuild the [`Profile`] bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CoreModel, GridScheme, Profile, Provenance, RadialGrid, SolveInfo, TailModel};
use crate::error::{Error, Result};
use crate::field::{AzimuthConvention, Coupling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub scheme: GridScheme,
    pub r0: f64,
    pub rmax: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_bc: f64,
    pub tol_res: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub coupling: Coupling,
    pub provenance: Provenance,
    pub family_constant: Option<f64>,
    pub winding: u32,
    pub grid: GridSpec,
    pub core: CoreModel,
    pub tail: TailModel,
    pub tolerances: Tolerances,
    pub solve: Option<SolveInfo>,
    pub monotone: bool,
    pub convention: String,
    /// Effective run configuration of the tool that wrote the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl ProfileSidecar {
    pub fn of(profile: &Profile, tolerances: Tolerances) -> Self {
        let g = profile.grid();
        Self {
            coupling: *profile.coupling(),
            provenance: profile.provenance(),
            family_constant: profile.family_constant(),
            winding: profile.n(),
            grid: GridSpec {
                scheme: g.scheme(),
                r0: g.r0(),
                rmax: g.rmax(),
                nodes: g.len(),
            },
            core: *profile.core(),
            tail: *profile.tail(),
            tolerances,
            solve: profile.solve_info().cloned(),
            monotone: profile.is_monotone(),
            convention: AzimuthConvention::default().tag().to_string(),
            config: None,
        }
    }
}

/// `profile.csv` -> `profile.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Write the CSV to `path` and the sidecar next to it. Returns the sidecar path.
pub fn write_profile(profile: &Profile, path: &Path, tolerances: Tolerances) -> Result<PathBuf> {
    write_profile_with(profile, path, ProfileSidecar::of(profile, tolerances))
}

/// [`write_profile`] with a caller-built sidecar.
pub fn write_profile_with(profile: &Profile, path: &Path, meta: ProfileSidecar) -> Result<PathBuf> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "r,f,fprime")?;
    for ((r, f), d) in profile.r().iter().zip(profile.f()).zip(profile.fprime()) {
        writeln!(w, "{r:.16e},{f:.16e},{d:.16e}")?;
    }
    w.flush()?;
    let side = sidecar_path(path);
    std::fs::write(&side, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(side)
}

/// Columns of a profile CSV.
pub fn read_profile_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let want = ["r", "f", "fprime"];
    if headers.iter().map(str::trim).ne(want) {
        return Err(Error::Parse(format!(
            "{}: expected header r,f,fprime, found {}",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut r, mut f, mut fp) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
        };
        r.push(parse(0)?);
        f.push(parse(1)?);
        fp.push(parse(2)?);
    }
    Ok((r, f, fp))
}

/// Read a profile CSV and its sidecar back into a [`Profile`].
pub fn read_profile(path: &Path) -> Result<Profile> {
    let (r, f, fp) = read_profile_csv(path)?;
    let side = sidecar_path(path);
    let meta: ProfileSidecar = serde_json::from_str(&std::fs::read_to_string(&side)?)?;
    if meta.grid.nodes != r.len() {
        return Err(Error::Parse(format!(
            "sidecar declares {} nodes, CSV has {}",
            meta.grid.nodes,
            r.len()
        )));
    }
    let grid = RadialGrid::from_nodes(r, meta.grid.scheme)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(Profile::from_parts(
        grid,
        f,
        fp,
        meta.coupling,
        meta.provenance,
        meta.family_constant,
        meta.core,
        meta.tail,
        meta.solve,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{exact_sigma_profile, DEFAULT_TOL_BC, DEFAULT_TOL_RES};

    const TOL: Tolerances = Tolerances {
        tol_bc: DEFAULT_TOL_BC,
        tol_res: DEFAULT_TOL_RES,
    };

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let g = RadialGrid::log(1e-4, 40.0, 401).unwrap();
        let p = exact_sigma_profile(0.25, 2, &g).unwrap();
        write_profile(&p, &path, TOL).unwrap();
        let q = read_profile(&path).unwrap();
        assert_eq!(p, q);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("r,f,fprime\n"));
    }

    #[test]
    fn corrupt_files_are_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,y\n1,2\n").unwrap();
        let e = read_profile(&path).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = read_profile(&dir.path().join("missing.csv")).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
