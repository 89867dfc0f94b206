//! Artifact formats: OBJ meshes, JSON documents, CSV tables. Every file is
//! written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use hyperleaf_core::mesh::{DiscreteSurface, Provenance};
use hyperleaf_core::Vec3;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Version of the JSON documents written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Config(format!("cannot write {}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// OBJ text of a leaf: `v` records with 17 significant digits, 1-based `f`
/// records, and the pinned boundary cycle as one `l` record.
pub fn obj_string(s: &DiscreteSurface) -> String {
    let mut out = String::with_capacity(60 * s.vertices.len() + 24 * s.triangles.len());
    let _ = writeln!(out, "# hyperleaf leaf H = {:e}, eps = {:e}", s.h, s.eps);
    for v in &s.vertices {
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    for t in &s.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out.push('l');
    for &b in s.boundary.iter().chain(s.boundary.first()) {
        let _ = write!(out, " {}", b + 1);
    }
    out.push('\n');
    out
}

/// Parses [`obj_string`] output back into a surface.
pub fn parse_obj(text: &str, h: f64, eps: f64) -> Result<DiscreteSurface, String> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut boundary = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = |what: &str| format!("line {}: {what}", n + 1);
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(str::parse).collect::<Result<_, _>>().map_err(|_| bad("bad coordinate"))?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx = indices(it).ok_or_else(|| bad("bad face index"))?;
                if idx.len() != 3 {
                    return Err(bad("only triangles are supported"));
                }
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            Some("l") => {
                let mut idx = indices(it).ok_or_else(|| bad("bad line index"))?;
                if idx.len() > 1 && idx.first() == idx.last() {
                    idx.pop();
                }
                boundary = idx;
            }
            Some(tag) if tag.starts_with('#') => {}
            None => {}
            Some(tag) => return Err(bad(&format!("unsupported record {tag:?}"))),
        }
    }
    let s = DiscreteSurface { vertices, triangles, boundary, h, eps, provenance: Provenance::Solved };
    s.audit().map_err(|e| e.to_string())?;
    Ok(s)
}

fn indices<'a>(it: impl Iterator<Item = &'a str>) -> Option<Vec<usize>> {
    it.map(|t| t.split('/').next()?.parse::<usize>().ok()?.checked_sub(1)).collect()
}
