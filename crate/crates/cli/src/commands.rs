use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symtomo_core::algebra::{determinant_check, kernel_probe, SeparationMatrix};
use symtomo_core::decomposition::helmholtz_trace_free;
use symtomo_core::harness::io::{read_ray_csv, read_stf, write_ray_csv, write_stf_binary, write_stf_text};
use symtomo_core::harness::{
    ball_bump, cutoff_gauge, gauge_coefficients, gauge_experiment, hypothesis_check, integral_identity_with_jets,
    moment_recovery_demo, polynomial_jets, sample_polynomial, trace_free_bump, CoefficientSet, Hypothesis, Planted,
    RecoveryConfig,
};
use symtomo_core::mrt::rayset::fibonacci_rays;
use symtomo_core::mrt::{sample_rays, Ray};
use symtomo_core::symbolic::{cgo_jets, cgo_pair, CgoParams, Polynomial};
use symtomo_core::tensor::{trace_free_decompose, SymTensor};
use symtomo_core::{Error, GridDomain, Result, TensorField};

use crate::output::{emit_report, emit_table, sci};
use crate::Global;

pub fn parse_grid(text: &str) -> Result<GridDomain> {
    let shape = text
        .split('x')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad grid {text:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let shape = if shape.len() == 1 { vec![shape[0]; 2] } else { shape };
    if shape.iter().any(|&p| p < 2) {
        return Err(Error::GridTooSmall(format!("grid {text:?} needs at least 2 points per axis")));
    }
    let spacing = shape.iter().map(|&p| 2.0 / (p - 1) as f64).collect();
    GridDomain::new(shape.clone(), spacing, vec![-1.0; shape.len()])
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {p:?} in {text:?}"))))
        .collect()
}

/// `re` or `re:im`.
fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex value {text:?}"));
    match text.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?)),
        None => Ok(Complex64::new(text.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn require_out(g: &Global) -> Result<&Path> {
    g.out.as_deref().ok_or_else(|| Error::Invalid("--out is required for this command".into()))
}

fn write_field(path: &Path, f: &TensorField, binary: bool) -> Result<()> {
    if binary {
        write_stf_binary(path, f)
    } else {
        write_stf_text(path, f)
    }
}

fn output_dir(g: &Global) -> Result<PathBuf> {
    let dir = require_out(g)?.to_path_buf();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn to_strings(m: BTreeMap<String, f64>) -> BTreeMap<String, String> {
    m.into_iter().map(|(k, v)| (k, sci(v))).collect()
}

fn load_coefficients(paths: &[PathBuf]) -> Result<CoefficientSet> {
    if paths.is_empty() || paths.len() % 2 != 0 {
        return Err(Error::Invalid(format!("expected 2m coefficient files (ranks 0..2m-1), got {}", paths.len())));
    }
    let fields = paths.iter().map(|p| read_stf(p)).collect::<Result<Vec<_>>>()?;
    CoefficientSet::new(paths.len() / 2, fields)
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DecomposeMethod {
    /// Pointwise `f = Σ i_δ^k b_k` with trace-free `b_k`.
    TraceFree,
    /// `f = f̃ + i_δ v + d^m φ` on the grid.
    Helmholtz,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Input STF file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = DecomposeMethod::Helmholtz)]
    method: DecomposeMethod,
    /// Write binary STF outputs.
    #[arg(long)]
    binary: bool,
}

pub fn decompose(g: &Global, a: &DecomposeArgs) -> Result<()> {
    let f = read_stf(&a.input)?;
    let mut report = BTreeMap::new();
    report.insert("norm_f".to_string(), sci(f.norm_l2()));
    match a.method {
        DecomposeMethod::TraceFree => {
            let dom = f.domain().clone();
            let l = f.rank();
            let mut parts: Vec<TensorField> = (0..=l / 2).map(|k| TensorField::zeros(&dom, l - 2 * k)).collect();
            for q in 0..dom.len() {
                for (k, b) in trace_free_decompose(&f.at(q))?.iter().enumerate() {
                    parts[k].set_at(q, b);
                }
            }
            for (k, p) in parts.iter().enumerate() {
                report.insert(format!("norm_part_{k}"), sci(p.norm_l2()));
            }
            if g.out.is_some() {
                let dir = output_dir(g)?;
                for (k, p) in parts.iter().enumerate() {
                    write_field(&dir.join(format!("part_{k}.stf")), p, a.binary)?;
                }
            }
        }
        DecomposeMethod::Helmholtz => {
            let out = helmholtz_trace_free(&f, g.tol)?;
            report.extend(to_strings(out.to_metrics()));
            if g.out.is_some() {
                let dir = output_dir(g)?;
                write_field(&dir.join("f_tilde.stf"), &out.f_tilde, a.binary)?;
                write_field(&dir.join("phi.stf"), &out.phi, a.binary)?;
                if let Some(v) = &out.v {
                    write_field(&dir.join("v.stf"), v, a.binary)?;
                }
            }
        }
    }
    emit_report(g.format, &report, None)
}

#[derive(Args, Debug)]
pub struct MrtArgs {
    /// Field files; ranks may appear in any order, missing ranks are zero.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Ray table to evaluate (its value columns are ignored).
    #[arg(long, conflicts_with = "count")]
    rays: Option<PathBuf>,
    /// Number of generated rays.
    #[arg(long, default_value_t = 32)]
    count: usize,
    /// Momentum order of generated rays.
    #[arg(long, default_value_t = 0)]
    order: usize,
    /// Generated rays pass within this distance of the origin.
    #[arg(long, default_value_t = 0.8)]
    radius: f64,
}

fn load_mixed(paths: &[PathBuf]) -> Result<Vec<TensorField>> {
    let loaded = paths.iter().map(|p| read_stf(p)).collect::<Result<Vec<_>>>()?;
    let dom = loaded[0].domain().clone();
    let top = loaded.iter().map(TensorField::rank).max().unwrap_or(0);
    let mut fields: Vec<TensorField> = (0..=top).map(|r| TensorField::zeros(&dom, r)).collect();
    for f in loaded {
        let r = f.rank();
        fields[r] = fields[r].axpy(1.0, &f)?;
    }
    Ok(fields)
}

pub fn mrt(g: &Global, a: &MrtArgs) -> Result<()> {
    let fields = load_mixed(&a.inputs)?;
    let dom = fields[0].domain().clone();
    let rays = match &a.rays {
        Some(path) => read_ray_csv(path)?
            .into_iter()
            .map(|r| Ray::new(r.base, r.dir, r.k))
            .collect::<Result<Vec<_>>>()?,
        None => fibonacci_rays(&dom, a.count, a.order, a.radius, g.seed),
    };
    let samples = sample_rays(&fields, &rays)?;
    if let Some(path) = &g.out {
        write_ray_csv(path, &samples)?;
        eprintln!("wrote {} ray samples to {}", samples.len(), path.display());
        return Ok(());
    }
    let n = dom.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    header.extend((1..=n).map(|i| format!("xi_{i}")));
    header.extend(["k".into(), "value_re".into(), "value_im".into()]);
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            let mut r: Vec<String> = s.ray.base.iter().chain(&s.ray.dir).map(|v| format!("{v:.6}")).collect();
            r.extend([s.ray.k.to_string(), sci(s.value.re), sci(s.value.im)]);
            r
        })
        .collect();
    emit_table(g.format, &header, &rows, None)
}

#[derive(Args, Debug)]
pub struct SeparateArgs {
    /// Highest order `m`.
    #[arg(long)]
    m: usize,
    /// Constants `c_0,..,c_m`.
    #[arg(long)]
    constants: String,
    /// Data for `r = 0..m`, comma separated, each `re` or `re:im`.
    #[arg(long)]
    values: String,
}

pub fn separate(g: &Global, a: &SeparateArgs) -> Result<()> {
    let c = parse_list(&a.constants)?;
    let rhs = a.values.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    let sep = SeparationMatrix::new(a.m, &c)?.separate(&rhs)?;
    let det = determinant_check(a.m, &c)?;
    let header = vec!["order".to_string(), "value_re".into(), "value_im".into()];
    // unknowns run from the highest order down
    let rows: Vec<Vec<String>> =
        sep.iter().enumerate().map(|(i, v)| vec![(a.m - i).to_string(), sci(v.re), sci(v.im)]).collect();
    emit_table(g.format, &header, &rows, g.out.as_deref())?;
    eprintln!("determinant {} (closed form {}, relative error {:.2e})", sci(det.computed), sci(det.formula), det.rel_error);
    Ok(())
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 200)]
    rays: usize,
    #[arg(long, default_value_t = 5)]
    kernel_fields: usize,
    #[arg(long, default_value_t = 20)]
    random_fields: usize,
    #[arg(long, default_value_t = 0.9)]
    radius: f64,
}

pub fn kernel(g: &Global, a: &KernelArgs) -> Result<()> {
    let dom = parse_grid(&g.grid)?;
    let rays = fibonacci_rays(&dom, a.rays, a.m, a.radius, g.seed);
    let report = kernel_probe(a.m, &dom, &rays, a.kernel_fields, a.random_fields, g.seed)?;
    emit_report(g.format, &report.to_metrics(), g.out.as_deref())
}

#[derive(Args, Debug)]
pub struct GaugeArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Weight polynomial in `x1..xn`; multiplied by the boundary cutoff unless `--raw`.
    #[arg(long, default_value = "x1 - x2")]
    weight: String,
    /// Use the weight as given.
    #[arg(long)]
    raw: bool,
    #[arg(long, default_value_t = 20)]
    basis: usize,
    #[arg(long, default_value_t = 6)]
    degree: u32,
}

fn gauge_weight(dom: &GridDomain, text: &str, m: usize, raw: bool) -> Result<Polynomial> {
    let r = Polynomial::parse(text, dom.dim())?;
    Ok(if raw { r } else { cutoff_gauge(&r, m) })
}

pub fn gauge_check(g: &Global, a: &GaugeArgs) -> Result<()> {
    let dom = parse_grid(&g.grid)?;
    let phi = gauge_weight(&dom, &a.weight, a.m, a.raw)?;
    let report = gauge_experiment(a.m, &phi, &dom, a.basis, a.degree)?;
    emit_report(g.format, &report.to_metrics(), g.out.as_deref())
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    /// Coefficient files for ranks `0..2m-1`, in order.
    #[arg(long = "coeff", required = true)]
    coeffs: Vec<PathBuf>,
    /// Polynomial `u`; with `--h` it is the CGO amplitude `a_0` in frame coordinates.
    #[arg(long, default_value = "1")]
    u: String,
    /// Polynomial `v`; with `--h` the amplitude `b_0`.
    #[arg(long, default_value = "1")]
    v: String,
    /// Use the CGO pair with this `h`.
    #[arg(long)]
    h: Option<f64>,
    /// Direction `eta` of the CGO phase, comma separated.
    #[arg(long)]
    eta: Option<String>,
}

pub fn identity(g: &Global, a: &IdentityArgs) -> Result<()> {
    let coeffs = load_coefficients(&a.coeffs)?;
    let dom = coeffs.domain().clone();
    let n = dom.dim();
    let top = 2 * coeffs.half_order() - 1;
    let (u, v) = (Polynomial::parse(&a.u, n)?, Polynomial::parse(&a.v, n)?);
    let report = match a.h {
        Some(h) => {
            let eta = match &a.eta {
                Some(e) => parse_list(e)?,
                None => (0..n - 1).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            };
            let params = CgoParams::new(h, eta)?;
            let (_, vf) = cgo_pair(&params, coeffs.half_order(), &u, &v, &dom)?;
            let jets = cgo_jets(&params, &u, top, &dom)?;
            integral_identity_with_jets(&coeffs, &jets, &vf, "cgo")?
        }
        None => {
            let jets = polynomial_jets(&u, top, &dom)?;
            integral_identity_with_jets(&coeffs, &jets, &sample_polynomial(&v, &dom), "polynomial")?
        }
    };
    let mut m = BTreeMap::new();
    m.insert("value_re".to_string(), sci(report.value.re));
    m.insert("value_im".to_string(), sci(report.value.im));
    m.insert("scale".to_string(), sci(report.scale));
    m.insert("relative".to_string(), sci(report.relative()));
    m.insert("tolerance".to_string(), sci(report.tolerance));
    m.insert("within_tolerance".to_string(), report.within_tolerance().to_string());
    m.insert("solutions".to_string(), report.descriptor);
    emit_report(g.format, &m, g.out.as_deref())
}

#[derive(Subcommand, Debug)]
pub enum PhantomKind {
    /// Smooth ball bump times a unit tensor.
    Ball {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Compressed component carrying the bump.
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long)]
        center: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long)]
        binary: bool,
    },
    /// Random trace-free tensor times a ball bump.
    TraceFree {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long)]
        binary: bool,
    },
    /// Coefficients of `[(-Laplacian)^m, phi]`, one file per rank in the `--out` directory.
    Gauge {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value = "x1 - x2")]
        weight: String,
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        binary: bool,
    },
}

pub fn phantom(g: &Global, kind: &PhantomKind) -> Result<()> {
    let dom = parse_grid(&g.grid)?;
    let n = dom.dim();
    match kind {
        PhantomKind::Ball { rank, component, center, radius, binary } => {
            let center = match center {
                Some(c) => parse_list(c)?,
                None => vec![0.0; n],
            };
            let t = SymTensor::unit(n, *rank, *component);
            let f = ball_bump(&dom, &t, &center, *radius)?;
            write_field(require_out(g)?, &f, *binary)
        }
        PhantomKind::TraceFree { rank, binary } => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let f = trace_free_bump(&dom, *rank, &mut rng)?;
            write_field(require_out(g)?, &f, *binary)
        }
        PhantomKind::Gauge { m, weight, raw, binary } => {
            let phi = gauge_weight(&dom, weight, *m, *raw)?;
            let coeffs = gauge_coefficients(*m, &phi, &dom)?;
            let dir = output_dir(g)?;
            for (l, f) in coeffs.fields().iter().enumerate() {
                write_field(&dir.join(format!("a{l}.stf")), f, *binary)?;
            }
            Ok(())
        }
    }
}

#[derive(Args, Debug)]
pub struct HypothesesArgs {
    /// Coefficient files for ranks `0..2m-1`, in order.
    #[arg(long = "coeff", required = true)]
    coeffs: Vec<PathBuf>,
    /// `div-free`, `trace-free`, `boundary-jets` or `all`.
    #[arg(long, default_value = "all")]
    which: String,
}

pub fn hypotheses(g: &Global, a: &HypothesesArgs) -> Result<()> {
    let coeffs = load_coefficients(&a.coeffs)?;
    let which: Vec<Hypothesis> = if a.which == "all" { Hypothesis::ALL.to_vec() } else { vec![a.which.parse()?] };
    let header = vec!["hypothesis".to_string(), "passed".into(), "residual".into(), "threshold".into()];
    let mut rows = Vec::new();
    for h in which {
        let r = hypothesis_check(&coeffs, h)?;
        rows.push(vec![h.to_string(), r.passed.to_string(), sci(r.residual), sci(r.threshold)]);
    }
    emit_table(g.format, &header, &rows, g.out.as_deref())
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    /// `bump`, `gauge` or `zero`.
    #[arg(long, default_value = "bump")]
    planted: String,
    #[arg(long, default_value_t = 64)]
    directions: usize,
    #[arg(long)]
    offsets: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
}

/// The pipeline runs on a cube; `--grid` only sets its points per axis.
pub fn recover(g: &Global, a: &RecoverArgs) -> Result<()> {
    let planted: Planted = a.planted.parse()?;
    let points = parse_grid(&g.grid)?.shape()[0];
    let base = RecoveryConfig::default();
    let cfg = RecoveryConfig {
        points,
        directions: a.directions,
        offsets: a.offsets.unwrap_or(points),
        max_iterations: a.iterations.unwrap_or(base.max_iterations),
        seed: g.seed,
        ..base
    };
    let report = moment_recovery_demo(planted, &cfg)?;
    emit_report(g.format, &report.to_metrics(), g.out.as_deref())
}
