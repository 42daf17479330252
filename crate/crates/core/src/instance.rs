//! Families, instances and the instance text format.
//!
//! Instance file layout: line 1 is `d k`; then for each of the `k`
//! families a line with the member count `n_i` followed by `n_i` lines,
//! each a length-`d` bitstring whose leftmost character is coordinate 1.

use std::fs;
use std::path::Path;

use crate::bitvec::{BitVector, MAX_DIM};
use crate::error::{Error, Result};

/// An ordered list of vectors over a shared universe; duplicates are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    dim: u32,
    members: Vec<BitVector>,
}

impl Family {
    pub fn new(dim: u32, members: Vec<BitVector>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimTooLarge(dim));
        }
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: m.dim(),
                });
            }
        }
        Ok(Family { dim, members })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn members(&self) -> &[BitVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A k-OV instance: `k >= 1` families over the same universe.
/// Family sizes may differ; reductions and universe restriction produce
/// unequal families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    dim: u32,
    families: Vec<Family>,
}

impl Instance {
    pub fn new(dim: u32, families: Vec<Family>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimTooLarge(dim));
        }
        if families.is_empty() {
            return Err(Error::InvalidArgument(
                "an instance needs at least one family".into(),
            ));
        }
        for f in &families {
            if f.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: f.dim(),
                });
            }
        }
        Ok(Instance { dim, families })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// Number of families (the `k` of k-OV).
    pub fn k(&self) -> usize {
        self.families.len()
    }
}

/// An instance built around a known orthogonal witness tuple.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub instance: Instance,
    /// One member per family; their common intersection is empty.
    pub witness: Vec<BitVector>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate();

    let (line_no, header) = next_content_line(&mut lines)?;
    let mut parts = header.split_whitespace();
    let d: u32 = parse_field(parts.next(), line_no, "dimension d")?;
    let k: usize = parse_field(parts.next(), line_no, "family count k")?;
    if parts.next().is_some() {
        return Err(fmt_err(line_no, "header must be exactly \"d k\""));
    }
    if d == 0 {
        return Err(fmt_err(line_no, "dimension d must be positive"));
    }
    if d > MAX_DIM {
        return Err(Error::DimTooLarge(d));
    }
    if k == 0 {
        return Err(fmt_err(line_no, "family count k must be positive"));
    }

    let mut families = Vec::with_capacity(k);
    for fam_idx in 0..k {
        let (line_no, count_line) = next_content_line(&mut lines).map_err(|_| {
            fmt_err(0, &format!("missing member count for family {}", fam_idx + 1))
        })?;
        let n: usize = parse_field(Some(count_line), line_no, "member count")?;
        let mut members = Vec::with_capacity(n);
        for _ in 0..n {
            let (line_no, row) = next_content_line(&mut lines).map_err(|_| {
                fmt_err(0, &format!("family {} is missing rows", fam_idx + 1))
            })?;
            let v: BitVector = row.parse().map_err(|e| {
                fmt_err(line_no, &format!("bad bitstring: {e}"))
            })?;
            if v.dim() != d {
                return Err(fmt_err(
                    line_no,
                    &format!("row length {} does not match d={d}", v.dim()),
                ));
            }
            members.push(v);
        }
        families.push(Family::new(d, members)?);
    }

    if let Ok((line_no, _)) = next_content_line(&mut lines) {
        return Err(fmt_err(line_no, "trailing content after the last family"));
    }

    Instance::new(d, families)
}

pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", instance.dim(), instance.k()));
    for family in instance.families() {
        out.push_str(&format!("{}\n", family.len()));
        for m in family.members() {
            out.push_str(&m.to_string());
            out.push('\n');
        }
    }
    out
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, format_instance(instance))?)
}

fn next_content_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<(usize, &'a str)> {
    for (idx, raw) in lines {
        let trimmed = raw.trim_end_matches('\r');
        if !trimmed.trim().is_empty() {
            return Ok((idx + 1, trimmed));
        }
    }
    Err(fmt_err(0, "unexpected end of file"))
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    field
        .ok_or_else(|| fmt_err(line, &format!("missing {what}")))?
        .trim()
        .parse()
        .map_err(|_| fmt_err(line, &format!("cannot parse {what}")))
}

fn fmt_err(line: usize, msg: &str) -> Error {
    Error::Format {
        line,
        msg: msg.to_string(),
    }
}
