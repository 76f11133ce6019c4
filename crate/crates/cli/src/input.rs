//! Plain-text sample files: one point per line, 1 or 3 whitespace-separated
//! columns, `#` starts a comment line.

use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use kdebw::{Sample1D, Sample3D};

use crate::experiment::SampleData;

pub fn parse_sample(text: &str, dimension: usize) -> Result<SampleData> {
    if dimension != 1 && dimension != 3 {
        bail!("dimension must be 1 or 3, got {dimension}");
    }
    let mut one = Vec::new();
    let mut three = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: f64 = f
                .parse()
                .with_context(|| format!("line {lineno}: cannot parse {f:?} as a number"))?;
            if !v.is_finite() {
                bail!("line {lineno}: value {f:?} is not finite");
            }
            values.push(v);
        }
        match (values.len(), dimension) {
            (1, 1) => one.push(values[0]),
            (3, 3) => three.push([values[0], values[1], values[2]]),
            (n @ (1 | 3), d) => bail!(
                "line {lineno}: dimension mismatch, found {n} column(s) but --dim is {d}"
            ),
            (n, _) => bail!("line {lineno}: expected 1 or 3 columns, found {n}"),
        }
    }
    if one.is_empty() && three.is_empty() {
        bail!("no data rows");
    }
    Ok(match dimension {
        1 => SampleData::OneD(Sample1D::new(one)?),
        _ => SampleData::ThreeD(Sample3D::new(three)?),
    })
}

pub fn read_sample(path: &std::path::Path, dimension: usize) -> Result<SampleData> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_sample(&text, dimension).with_context(|| format!("in {}", path.display()))
}

pub fn write_sample(out: &mut (impl Write + ?Sized), header: &[String], sample: &SampleData) -> io::Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    match sample {
        SampleData::OneD(s) => {
            for x in s.points() {
                writeln!(out, "{x}")?;
            }
        }
        SampleData::ThreeD(s) => {
            for p in s.points() {
                writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
            }
        }
    }
    Ok(())
}
