//! Variation operators: blend crossover and Gaussian/structural mutation for
//! BS layouts, uniform crossover and single-flip mutation for FAP bits.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use super::{Chromosome, DimPolicy};
use crate::eval::Deployment;
use crate::geometry::{Point, Rect};

/// Placeholder gene for a W-BS whose FAP is chosen later.
pub(crate) const UNSET_GENE: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("parents have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("crossover needs non-empty parents")]
    EmptyParent,
}

/// Which block of the blend matrix is pinned to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverMode {
    WPreserve,
    UPreserve,
    FullBlend,
}

/// Random draws behind one crossover, exposed for statistical checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverTrace {
    pub mode: CrossoverMode,
    /// Blend weights `[μx, μy]` per aligned W-BS and U-BS.
    pub mu_w: Vec<[f64; 2]>,
    pub mu_u: Vec<[f64; 2]>,
}

fn random_point<R: Rng>(bounds: &Rect, rng: &mut R) -> Point {
    Point::new(
        rng.random_range(bounds.x_min..=bounds.x_max),
        rng.random_range(bounds.y_min..=bounds.y_max),
    )
}

/// Brings two position lists to a common length. Returns, per aligned slot,
/// the source index in each parent (`None` for a padded random slot).
fn align<R: Rng>(
    a: &[Point],
    b: &[Point],
    policy: DimPolicy,
    bounds: &Rect,
    rng: &mut R,
) -> (Vec<(Point, Option<usize>)>, Vec<(Point, Option<usize>)>) {
    let keep = |v: &[Point], n: usize, rng: &mut R| -> Vec<(Point, Option<usize>)> {
        if v.len() == n {
            return v.iter().copied().zip((0..).map(Some)).collect();
        }
        let mut idx = index::sample(rng, v.len(), n).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| (v[i], Some(i))).collect()
    };
    let pad = |v: &[Point], n: usize, rng: &mut R| -> Vec<(Point, Option<usize>)> {
        let mut out: Vec<(Point, Option<usize>)> =
            v.iter().copied().zip((0..).map(Some)).collect();
        while out.len() < n {
            out.push((random_point(bounds, rng), None));
        }
        out
    };
    match policy {
        DimPolicy::MinDim => {
            let n = a.len().min(b.len());
            (keep(a, n, rng), keep(b, n, rng))
        }
        DimPolicy::MaxDim => {
            let n = a.len().max(b.len());
            (pad(a, n, rng), pad(b, n, rng))
        }
    }
}

fn blend<R: Rng>(
    a: &[(Point, Option<usize>)],
    b: &[(Point, Option<usize>)],
    pinned: bool,
    epsilon: f64,
    bounds: &Rect,
    rng: &mut R,
) -> (Vec<Point>, Vec<Point>, Vec<[f64; 2]>) {
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    let mut mus = Vec::with_capacity(a.len());
    for ((p, _), (q, _)) in a.iter().zip(b) {
        let mu = if pinned {
            [1.0, 1.0]
        } else {
            [
                rng.random_range(-epsilon..1.0 + epsilon),
                rng.random_range(-epsilon..1.0 + epsilon),
            ]
        };
        let x1 = mu[0] * p.x + (1.0 - mu[0]) * q.x;
        let y1 = mu[1] * p.y + (1.0 - mu[1]) * q.y;
        let x2 = (1.0 - mu[0]) * p.x + mu[0] * q.x;
        let y2 = (1.0 - mu[1]) * p.y + mu[1] * q.y;
        c1.push(bounds.clamp(Point::new(x1, y1)));
        c2.push(bounds.clamp(Point::new(x2, y2)));
        mus.push(mu);
    }
    (c1, c2, mus)
}

fn carry_genes(slots: &[(Point, Option<usize>)], genes: &[usize]) -> Vec<usize> {
    if genes.is_empty() {
        return Vec::new();
    }
    slots
        .iter()
        .map(|(_, src)| src.and_then(|i| genes.get(i).copied()).unwrap_or(UNSET_GENE))
        .collect()
}

/// Blend crossover. W-BSs blend with W-BSs and U-BSs with U-BSs; FAP bits
/// are copied from the respective parent and left to [`binary_crossover`].
pub fn real_crossover_traced<R: Rng>(
    p1: &Chromosome,
    p2: &Chromosome,
    epsilon: f64,
    dim_policy: DimPolicy,
    bounds: &Rect,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome, CrossoverTrace), OperatorError> {
    if p1.n_total() == 0 || p2.n_total() == 0 {
        return Err(OperatorError::EmptyParent);
    }
    let mode = match rng.random_range(0..3u8) {
        0 => CrossoverMode::WPreserve,
        1 => CrossoverMode::UPreserve,
        _ => CrossoverMode::FullBlend,
    };
    let (d1, d2) = (&p1.deployment, &p2.deployment);
    let (w1, w2) = align(&d1.wbs, &d2.wbs, dim_policy, bounds, rng);
    let (u1, u2) = align(&d1.ubs, &d2.ubs, dim_policy, bounds, rng);
    let (cw1, cw2, mu_w) = blend(&w1, &w2, mode == CrossoverMode::WPreserve, epsilon, bounds, rng);
    let (cu1, cu2, mu_u) = blend(&u1, &u2, mode == CrossoverMode::UPreserve, epsilon, bounds, rng);

    let c1 = Chromosome {
        deployment: Deployment::new(cw1, cu1),
        z: p1.z.clone(),
        fap_genes: carry_genes(&w1, &p1.fap_genes),
    };
    let c2 = Chromosome {
        deployment: Deployment::new(cw2, cu2),
        z: p2.z.clone(),
        fap_genes: carry_genes(&w2, &p2.fap_genes),
    };
    Ok((c1, c2, CrossoverTrace { mode, mu_w, mu_u }))
}

pub fn real_crossover<R: Rng>(
    p1: &Chromosome,
    p2: &Chromosome,
    epsilon: f64,
    dim_policy: DimPolicy,
    bounds: &Rect,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome), OperatorError> {
    real_crossover_traced(p1, p2, epsilon, dim_policy, bounds, rng).map(|(a, b, _)| (a, b))
}

/// Moves one random BS by Gaussian noise with std `mu·extent` per axis, or,
/// with probability `structural_prob`, adds or removes one BS. Removal keeps
/// at least one W-BS and at least `min_total` BSs; when nothing can be
/// removed a BS is added instead.
pub fn real_mutation<R: Rng>(
    chromosome: &Chromosome,
    mu: f64,
    bounds: &Rect,
    structural_prob: f64,
    min_total: usize,
    rng: &mut R,
) -> Chromosome {
    let mut out = chromosome.clone();
    let total = out.n_total();
    let structural = total == 0 || rng.random_bool(structural_prob);
    if !structural {
        let j = rng.random_range(0..total);
        let nx = Normal::new(0.0, mu * bounds.width()).expect("finite non-negative std");
        let ny = Normal::new(0.0, mu * bounds.height()).expect("finite non-negative std");
        let n_w = out.deployment.wbs.len();
        let p = if j < n_w {
            &mut out.deployment.wbs[j]
        } else {
            &mut out.deployment.ubs[j - n_w]
        };
        let moved = Point::new(p.x + nx.sample(rng), p.y + ny.sample(rng));
        *p = bounds.clamp(moved);
        return out;
    }

    let n_w = out.deployment.wbs.len();
    let removable: Vec<usize> = if total > min_total.max(1) {
        (0..total).filter(|&i| i >= n_w || n_w > 1).collect()
    } else {
        Vec::new()
    };
    let remove = !removable.is_empty() && rng.random_bool(0.5);
    if remove {
        let i = removable[rng.random_range(0..removable.len())];
        if i < n_w {
            out.deployment.wbs.remove(i);
            if i < out.fap_genes.len() {
                out.fap_genes.remove(i);
            }
        } else {
            out.deployment.ubs.remove(i - n_w);
        }
    } else {
        let p = random_point(bounds, rng);
        if n_w == 0 || rng.random_bool(0.5) {
            out.deployment.wbs.push(p);
            if !out.fap_genes.is_empty() {
                out.fap_genes.push(UNSET_GENE);
            }
        } else {
            out.deployment.ubs.push(p);
        }
    }
    out
}

/// Uniform crossover: each bit comes from `z1` or `z2` by a fair coin.
pub fn binary_crossover<R: Rng>(
    z1: &[bool],
    z2: &[bool],
    rng: &mut R,
) -> Result<Vec<bool>, OperatorError> {
    if z1.len() != z2.len() {
        return Err(OperatorError::LengthMismatch {
            left: z1.len(),
            right: z2.len(),
        });
    }
    Ok(z1
        .iter()
        .zip(z2)
        .map(|(&a, &b)| if rng.random_bool(0.5) { a } else { b })
        .collect())
}

/// Flips exactly one uniformly chosen bit. Empty input is returned as is.
pub fn binary_mutation<R: Rng>(z: &[bool], rng: &mut R) -> Vec<bool> {
    let mut out = z.to_vec();
    if !out.is_empty() {
        let i = rng.random_range(0..out.len());
        out[i] = !out[i];
    }
    out
}
