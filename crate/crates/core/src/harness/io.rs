use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::mrt::RaySample;

const BINARY_MAGIC: &[u8; 4] = b"STF1";

/// Header of a grid tensor field file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StfHeader {
    pub version: u32,
    pub n: usize,
    pub m: usize,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub component_order: String,
    pub scalar: String,
    /// Values run over grid points (row-major, last axis fastest) and,
    /// inside each point, over compressed components.
    pub layout: String,
}

impl StfHeader {
    fn for_field(f: &TensorField) -> Self {
        let d = f.domain();
        Self {
            version: 1,
            n: d.dim(),
            m: f.rank(),
            dims: d.shape().to_vec(),
            spacing: d.spacing().to_vec(),
            origin: d.origin().to_vec(),
            component_order: "lex-nondecreasing".into(),
            scalar: "complex".into(),
            layout: "point-major".into(),
        }
    }

    fn domain(&self) -> Result<GridDomain> {
        if self.version != 1 {
            return Err(Error::Format(format!("unsupported STF version {}", self.version)));
        }
        if self.component_order != "lex-nondecreasing" || self.scalar != "complex" || self.layout != "point-major" {
            return Err(Error::Format("unsupported STF layout".into()));
        }
        if self.dims.len() != self.n {
            return Err(Error::Format("dims do not match n".into()));
        }
        GridDomain::new(self.dims.clone(), self.spacing.clone(), self.origin.clone())
    }
}

/// Writes `bytes` through a temporary file in the target directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn point_major(f: &TensorField) -> Vec<Complex64> {
    let (np, nc) = (f.points(), f.num_components());
    let mut out = Vec::with_capacity(np * nc);
    for p in 0..np {
        for c in 0..nc {
            out.push(f.values()[c * np + p]);
        }
    }
    out
}

fn from_point_major(domain: &GridDomain, m: usize, flat: Vec<Complex64>) -> Result<TensorField> {
    let np = domain.len();
    let nc = crate::tensor::num_components(domain.dim(), m);
    if flat.len() != np * nc {
        return Err(Error::Format(format!("expected {} values, found {}", np * nc, flat.len())));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); np * nc];
    for p in 0..np {
        for c in 0..nc {
            values[c * np + p] = flat[p * nc + c];
        }
    }
    TensorField::from_values(domain, m, values)
}

/// Text STF: a JSON header line, then one `re im` line per value.
pub fn write_stf_text(path: &Path, f: &TensorField) -> Result<()> {
    let mut out = serde_json::to_string(&StfHeader::for_field(f)).map_err(|e| Error::Format(e.to_string()))?;
    out.push('\n');
    for v in point_major(f) {
        out.push_str(&format!("{:e} {:e}\n", v.re, v.im));
    }
    write_atomic(path, out.as_bytes())
}

/// Binary STF: magic, little-endian `u32` header length, JSON header, then
/// little-endian `f64` pairs.
pub fn write_stf_binary(path: &Path, f: &TensorField) -> Result<()> {
    let header = serde_json::to_vec(&StfHeader::for_field(f)).map_err(|e| Error::Format(e.to_string()))?;
    let len = u32::try_from(header.len()).map_err(|_| Error::Format("header too large".into()))?;
    let mut out = Vec::with_capacity(8 + header.len() + 16 * f.values().len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&header);
    for v in point_major(f) {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    write_atomic(path, &out)
}

/// Reads either STF flavour, detected by the magic bytes.
pub fn read_stf(path: &Path) -> Result<TensorField> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(BINARY_MAGIC) {
        return parse_binary(&bytes);
    }
    let mut lines = BufReader::new(bytes.as_slice()).lines();
    let head = lines.next().ok_or_else(|| Error::Format("empty STF file".into()))??;
    let header: StfHeader = serde_json::from_str(&head).map_err(|e| Error::Format(format!("bad STF header: {e}")))?;
    let domain = header.domain()?;
    let mut flat = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut num = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Format(format!("value line {} is incomplete", i + 2)))?
                .parse()
                .map_err(|_| Error::Format(format!("bad number on line {}", i + 2)))
        };
        let re = num()?;
        let im = num()?;
        flat.push(Complex64::new(re, im));
    }
    from_point_major(&domain, header.m, flat)
}

fn parse_binary(bytes: &[u8]) -> Result<TensorField> {
    let short = || Error::Format("truncated binary STF".into());
    let len = u32::from_le_bytes(bytes.get(4..8).ok_or_else(short)?.try_into().expect("four bytes")) as usize;
    let head = bytes.get(8..8 + len).ok_or_else(short)?;
    let header: StfHeader = serde_json::from_slice(head).map_err(|e| Error::Format(format!("bad STF header: {e}")))?;
    let domain = header.domain()?;
    let body = &bytes[8 + len..];
    if body.len() % 16 != 0 {
        return Err(short());
    }
    let flat = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("eight bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("eight bytes"));
            Complex64::new(re, im)
        })
        .collect();
    from_point_major(&domain, header.m, flat)
}

/// Ray table with columns `x_1..x_n, xi_1..xi_n, k, value_re, value_im`.
pub fn write_ray_csv(path: &Path, samples: &[RaySample]) -> Result<()> {
    let n = samples.first().map_or(0, |s| s.ray.base.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    header.extend((1..=n).map(|i| format!("xi_{i}")));
    header.extend(["k".to_string(), "value_re".into(), "value_im".into()]);
    w.write_record(&header).map_err(|e| Error::Format(e.to_string()))?;
    for s in samples {
        let mut rec: Vec<String> = s.ray.base.iter().chain(&s.ray.dir).map(|v| format!("{v:e}")).collect();
        rec.push(s.ray.k.to_string());
        rec.push(format!("{:e}", s.value.re));
        rec.push(format!("{:e}", s.value.im));
        w.write_record(&rec).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// One parsed ray-table row.
#[derive(Clone, Debug, PartialEq)]
pub struct RayRow {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
    pub k: usize,
    pub value: Complex64,
}

pub fn read_ray_csv(path: &Path) -> Result<Vec<RayRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    let cols = r.headers().map_err(|e| Error::Format(e.to_string()))?.len();
    if cols < 5 || (cols - 3) % 2 != 0 {
        return Err(Error::Format(format!("ray table has {cols} columns")));
    }
    let n = (cols - 3) / 2;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Format("short row".into()))?
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad number in column {}", i + 1)))
        };
        let base = (0..n).map(num).collect::<Result<Vec<_>>>()?;
        let dir = (n..2 * n).map(num).collect::<Result<Vec<_>>>()?;
        let k = rec.get(2 * n).unwrap_or("").trim().parse().map_err(|_| Error::Format("bad order k".into()))?;
        out.push(RayRow { base, dir, k, value: Complex64::new(num(2 * n + 1)?, num(2 * n + 2)?) });
    }
    Ok(out)
}

/// `key<TAB>value` lines, sorted by key.
pub fn format_report(metrics: &BTreeMap<String, String>) -> String {
    metrics.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
}

pub fn write_report(path: &Path, metrics: &BTreeMap<String, String>) -> Result<()> {
    write_atomic(path, format_report(metrics).as_bytes())
}

pub fn read_report(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once('\t').ok_or_else(|| Error::Format(format!("report line {} has no tab", i + 1)))?;
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}
