use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::mrt::{build_im_matrix, forward_ik, ray_scale, ColumnLayout, Ray};
use crate::tensor::{self, SymTensor};

/// Smooth random scalar on the box: a few Gaussian lobes times a cutoff
/// vanishing to second order on the faces.
pub fn random_smooth_scalar(domain: &GridDomain, rng: &mut ChaCha8Rng, lobes: usize) -> Vec<f64> {
    let n = domain.dim();
    let lo = domain.origin().to_vec();
    let hi = domain.upper();
    let params: Vec<(Vec<f64>, f64, f64)> = (0..lobes)
        .map(|_| {
            let c: Vec<f64> = (0..n).map(|a| {
                let mid = 0.5 * (lo[a] + hi[a]);
                let half = 0.5 * (hi[a] - lo[a]);
                mid + rng.gen_range(-0.5..0.5) * half
            }).collect();
            let width = rng.gen_range(0.2..0.45) * 0.5 * (hi[0] - lo[0]);
            (c, width, rng.gen_range(-1.0..1.0))
        })
        .collect();
    (0..domain.len())
        .map(|p| {
            let x = domain.coord(p);
            let mut cut = 1.0;
            for a in 0..n {
                let s = 2.0 * (x[a] - lo[a]) / (hi[a] - lo[a]) - 1.0;
                cut *= (1.0 - s * s).max(0.0).powi(2);
            }
            let v: f64 = params
                .iter()
                .map(|(c, w, amp)| {
                    let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                    amp * (-r2 / (2.0 * w * w)).exp()
                })
                .sum();
            v * cut
        })
        .collect()
}

/// Random smooth rank-`m` field; trace-free when `trace_free` is set.
pub fn random_smooth_field(domain: &GridDomain, m: usize, trace_free: bool, rng: &mut ChaCha8Rng) -> TensorField {
    let comps = tensor::num_components(domain.dim(), m);
    let mut values = Vec::with_capacity(comps * domain.len());
    for _ in 0..comps {
        values.extend(random_smooth_scalar(domain, rng, 3).into_iter().map(|v| Complex64::new(v, 0.0)));
    }
    let f = TensorField::from_values(domain, m, values).expect("sized to the layout");
    if trace_free {
        f.projection_p()
    } else {
        f
    }
}

/// Mixed field built from the kernel relations of `I^m` (`m ≤ 2`): for
/// `m = 2` the even part is `f⁽²⁾ = −i_δ f⁽⁰⁾` and the odd part is zero;
/// for `m ≤ 1` only `F = 0` qualifies.
pub fn kernel_field(domain: &GridDomain, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TensorField>> {
    let mut fields: Vec<TensorField> = (0..=m).map(|p| TensorField::zeros(domain, p)).collect();
    match m {
        0 | 1 => {}
        2 => {
            let f0 = random_smooth_field(domain, 0, false, rng);
            fields[2] = f0.i_delta().scale(-1.0);
            fields[0] = f0;
        }
        _ => return Err(Error::Unsupported(format!("kernel fields for m = {m}"))),
    }
    Ok(fields)
}

fn mixed_norm(fields: &[TensorField]) -> f64 {
    fields.iter().map(|f| f.norm_l2().powi(2)).sum::<f64>().sqrt()
}

/// Random unit-norm mixed field with trace-free top part.
pub fn random_unit_field(domain: &GridDomain, m: usize, rng: &mut ChaCha8Rng) -> Vec<TensorField> {
    let fields: Vec<TensorField> = (0..=m).map(|p| random_smooth_field(domain, p, p == m, rng)).collect();
    let s = 1.0 / mixed_norm(&fields);
    fields.iter().map(|f| f.scale(s)).collect()
}

/// `max_ray |I^m F| / max_ray ∫|t|^m Σ_p |⟨f⁽ᵖ⁾, ξ^p⟩|`.
pub fn residual_ratio(fields: &[TensorField], rays: &[Ray]) -> Result<f64> {
    let mut top: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ray in rays {
        top = top.max(forward_ik(fields, ray)?.norm());
        scale = scale.max(ray_scale(fields, ray)?);
    }
    Ok(if scale == 0.0 { 0.0 } else { top / scale })
}

/// Findings of a kernel probe of `I^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelReport {
    pub m: usize,
    pub n: usize,
    pub rays: usize,
    /// Residual ratios of fields satisfying the kernel relations.
    pub kernel_ratios: Vec<f64>,
    /// Residual ratios of random unit-norm fields with trace-free top part.
    pub random_ratios: Vec<f64>,
    /// `σ_min / σ_max` of the `I^m` matrix, for `m ≤ 1`.
    pub sigma_ratio: Option<f64>,
}

impl KernelReport {
    pub fn max_kernel_ratio(&self) -> f64 {
        self.kernel_ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_random_ratio(&self) -> f64 {
        self.random_ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_metrics(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("m".into(), self.m.to_string());
        out.insert("n".into(), self.n.to_string());
        out.insert("rays".into(), self.rays.to_string());
        out.insert("kernel_fields".into(), self.kernel_ratios.len().to_string());
        out.insert("kernel_max_ratio".into(), format!("{:.6e}", self.max_kernel_ratio()));
        out.insert("random_fields".into(), self.random_ratios.len().to_string());
        out.insert("random_min_ratio".into(), format!("{:.6e}", self.min_random_ratio()));
        if let Some(s) = self.sigma_ratio {
            out.insert("sigma_min_over_max".into(), format!("{s:.6e}"));
        }
        out
    }
}

/// Largest number of interior unknowns the probe accepts.
pub const MAX_PROBE_UNKNOWNS: usize = 4000;

/// Probes the kernel of `I^m` with fields built from the kernel relations,
/// random fields that violate them, and (for `m ≤ 1`) the singular values
/// of the transform matrix.
pub fn kernel_probe(
    m: usize,
    domain: &GridDomain,
    rays: &[Ray],
    kernel_fields: usize,
    random_fields: usize,
    seed: u64,
) -> Result<KernelReport> {
    let n = domain.dim();
    if m > 2 || n > 3 {
        return Err(Error::Unsupported(format!("kernel probe needs m <= 2 and n <= 3, got m = {m}, n = {n}")));
    }
    let unknowns = ColumnLayout::new(domain, m).len();
    if unknowns > MAX_PROBE_UNKNOWNS {
        return Err(Error::SizeGuard(format!("{unknowns} unknowns exceeds {MAX_PROBE_UNKNOWNS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kernel_ratios = Vec::new();
    for _ in 0..kernel_fields {
        kernel_ratios.push(residual_ratio(&kernel_field(domain, m, &mut rng)?, rays)?);
    }
    let mut random_ratios = Vec::new();
    for _ in 0..random_fields {
        random_ratios.push(residual_ratio(&random_unit_field(domain, m, &mut rng), rays)?);
    }
    let sigma_ratio = if m <= 1 {
        let a = build_im_matrix(domain, m, rays)?;
        let sv = a.singular_values();
        Some(sv.min() / sv.max())
    } else {
        None
    };
    Ok(KernelReport { m, n, rays: rays.len(), kernel_ratios, random_ratios, sigma_ratio })
}

/// Embeds a constant pointwise tensor into a field.
pub fn constant_field(domain: &GridDomain, t: &SymTensor) -> TensorField {
    TensorField::from_fn(domain, t.rank(), |_| t.clone()).expect("constant tensor matches dimension")
}
