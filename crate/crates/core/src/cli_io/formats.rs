//! On-disk formats: grid CSV, far-field matrix JSON, and atomic artifact
//! writes with content hashes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Component, Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::ComplexField2D;
use crate::geometry::{GridSpec, Point};
use crate::herglotz::{DirectionQuadrature, FarFieldMatrix};

pub const GRID_HEADER: &str = "# nx ny x0 y0 h k";
pub const GRID_COLUMNS: &str = "i,j,x,y,re,im,inside";
pub const FAR_FIELD_CONVENTION: &str = "entry(i,j)=u_inf(xhat_i,d_j)";
pub const FAR_FIELD_QUADRATURE: &str = "equispaced,weight=2pi/N";

/// Grid CSV: the header comment, a comment line with its values, the column
/// names, then one row per node in linear-index order. Floats use the
/// shortest round-trip representation, so reading back is bit-exact.
pub fn grid_csv(field: &ComplexField2D, k: f64) -> String {
    let s = field.spec;
    let mut out = String::with_capacity(64 * s.len());
    let _ = writeln!(out, "{GRID_HEADER}");
    let _ = writeln!(out, "# {} {} {} {} {} {}", s.nx, s.ny, s.origin.x, s.origin.y, s.h, k);
    let _ = writeln!(out, "{GRID_COLUMNS}");
    for idx in 0..s.len() {
        let (i, j) = s.coords(idx);
        let p = s.point(idx);
        let z = field.values[idx];
        let _ = writeln!(out, "{i},{j},{},{},{},{},{}", p.x, p.y, z.re, z.im, u8::from(field.mask[idx]));
    }
    out
}

/// Real-valued map written as a grid CSV with zero imaginary part.
pub fn real_grid_csv(spec: &GridSpec, values: &[f64], mask: &[bool], k: f64) -> Result<String> {
    let field = ComplexField2D::new(*spec, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), mask.to_vec())?;
    Ok(grid_csv(&field, k))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn parse_fields<T: std::str::FromStr>(text: &str, line: usize, start_col: usize, sep: char) -> Result<Vec<T>> {
    let mut out = Vec::new();
    let mut col = start_col;
    for tok in text.split(sep) {
        let t = tok.trim();
        out.push(t.parse().map_err(|_| parse_err(line, col, format!("cannot parse '{t}'")))?);
        col += tok.len() + 1;
    }
    Ok(out)
}

/// Inverse of [`grid_csv`]; returns the field and the recorded `k`.
pub fn parse_grid_csv(text: &str) -> Result<(ComplexField2D, f64)> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == GRID_HEADER => {}
        Some((n, _)) => return Err(parse_err(n, 1, format!("expected header '{GRID_HEADER}'"))),
        None => return Err(parse_err(1, 1, "empty file")),
    }
    let (n, l) = lines.next().ok_or_else(|| parse_err(2, 1, "missing header values"))?;
    let Some(rest) = l.strip_prefix('#') else {
        return Err(parse_err(n, 1, "header values must be a comment line"));
    };
    let vals: Vec<f64> = parse_fields(rest.trim(), n, 3, ' ')?;
    if vals.len() != 6 {
        return Err(parse_err(n, 1, format!("expected 6 header values, got {}", vals.len())));
    }
    if vals[0].fract() != 0.0 || vals[1].fract() != 0.0 || vals[0] < 1.0 || vals[1] < 1.0 {
        return Err(parse_err(n, 3, "nx and ny must be positive integers"));
    }
    let spec = GridSpec::new(Point::new(vals[2], vals[3]), vals[4], vals[0] as usize, vals[1] as usize)?;
    let k = vals[5];
    let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut mask = vec![false; spec.len()];
    let mut seen = vec![false; spec.len()];
    let mut last_line = n;
    for (n, l) in lines {
        last_line = n;
        if l.trim().is_empty() || l.starts_with('#') || l.trim() == GRID_COLUMNS {
            continue;
        }
        let toks: Vec<&str> = l.split(',').collect();
        if toks.len() != 7 {
            return Err(parse_err(n, l.len() + 1, format!("expected 7 columns, got {}", toks.len())));
        }
        let ij: Vec<usize> = parse_fields(&toks[..2].join(","), n, 1, ',')?;
        let offset = toks[0].len() + toks[1].len() + 3;
        let nums: Vec<f64> = parse_fields(&toks[2..6].join(","), n, offset, ',')?;
        let inside = match toks[6].trim() {
            "0" => false,
            "1" => true,
            t => return Err(parse_err(n, l.len() - toks[6].len() + 1, format!("inside flag must be 0 or 1, got '{t}'"))),
        };
        let (i, j) = (ij[0], ij[1]);
        if i >= spec.nx || j >= spec.ny {
            return Err(parse_err(n, 1, format!("node ({i}, {j}) lies outside the {}x{} grid", spec.nx, spec.ny)));
        }
        let idx = spec.index(i, j);
        if seen[idx] {
            return Err(parse_err(n, 1, format!("node ({i}, {j}) appears twice")));
        }
        seen[idx] = true;
        values[idx] = Complex64::new(nums[2], nums[3]);
        mask[idx] = inside;
    }
    let count = seen.iter().filter(|&&s| s).count();
    if count != spec.len() {
        return Err(parse_err(last_line + 1, 1, format!("file ends after {count} of {} rows", spec.len())));
    }
    Ok((ComplexField2D::new(spec, values, mask)?, k))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FarFieldFile {
    k: f64,
    n_dir: usize,
    convention: String,
    quadrature: String,
    entries: Vec<[f64; 2]>,
}

/// Far-field matrix as a JSON object, one entry pair per line.
pub fn far_field_json(f: &FarFieldMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"k\": {},", serde_json::to_string(&f.k).unwrap());
    let _ = writeln!(out, "  \"n_dir\": {},", f.n());
    let _ = writeln!(out, "  \"convention\": \"{FAR_FIELD_CONVENTION}\",");
    let _ = writeln!(out, "  \"quadrature\": \"{FAR_FIELD_QUADRATURE}\",");
    let _ = writeln!(out, "  \"entries\": [");
    let last = f.entries.len().saturating_sub(1);
    for (i, z) in f.entries.iter().enumerate() {
        let sep = if i == last { "" } else { "," };
        let _ = writeln!(out, "    [{}, {}]{sep}", serde_json::to_string(&z.re).unwrap(), serde_json::to_string(&z.im).unwrap());
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

/// Reads a far-field matrix. Syntax errors carry line and column; a wrong
/// convention or an entry count other than `n_dir²` is a validation error.
pub fn parse_far_field_json(text: &str) -> Result<FarFieldMatrix> {
    let file: FarFieldFile =
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.column(), e.to_string()))?;
    if file.convention != FAR_FIELD_CONVENTION {
        return Err(Error::Validation(format!("unsupported convention '{}'", file.convention)));
    }
    if file.quadrature != FAR_FIELD_QUADRATURE {
        return Err(Error::Validation(format!("unsupported quadrature '{}'", file.quadrature)));
    }
    if file.entries.len() != file.n_dir * file.n_dir {
        return Err(Error::Validation(format!(
            "n_dir = {} needs {} entries, file has {}",
            file.n_dir,
            file.n_dir * file.n_dir,
            file.entries.len()
        )));
    }
    let quad = DirectionQuadrature::new(file.n_dir).map_err(|e| Error::Validation(e.to_string()))?;
    let entries = file.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    FarFieldMatrix::new(file.k, quad, entries).map_err(|e| Error::Validation(e.to_string()))
}

/// One written file as listed in the run manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Rejects names that would escape the output directory.
fn confined(dir: &Path, name: &str) -> Result<PathBuf> {
    let rel = Path::new(name);
    let ok = !name.is_empty() && rel.components().all(|c| matches!(c, Component::Normal(_)));
    if !ok {
        return Err(Error::Validation(format!("artifact name '{name}' leaves the output directory")));
    }
    Ok(dir.join(rel))
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<Artifact> {
    let target = confined(dir, name)?;
    if let Some(parent) = target.parent() {
        fs::create_dir_all(parent)?;
    }
    let file_name = target.file_name().and_then(|s| s.to_str()).unwrap_or("artifact");
    let tmp = target.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, bytes)?;
    if let Err(e) = fs::rename(&tmp, &target) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(Artifact { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Validation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
