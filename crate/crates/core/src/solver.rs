//! Constructive solution of `g∘φ - g = h`, regularity bookkeeping and
//! Birkhoff sums.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cohomology::{is_coboundary_class, ClassTower};
use crate::error::{Error, Result};
use crate::function::CylinderFunction;
use crate::martingale::{bumpy_constant, BumpProfile};
use crate::paths::LazyPath;
use crate::scalar::{format_rational, Scalar};
use crate::solenoid::{bilip_check, Conjugacy};
use crate::space::PathSpace;
use crate::Rational;

/// `g` with `g∘φ - g = h`, normalized to `ν`-mean zero.
#[derive(Clone, Debug)]
pub struct TransferSolution {
    pub g: CylinderFunction<Rational>,
    /// `sup |h - (g∘φ - g)|`, exact.
    pub residual: Rational,
    /// Level of the cochain certificate.
    pub level: usize,
}

pub fn solve(space: &PathSpace, h: &CylinderFunction<Rational>, tower: &ClassTower) -> Result<TransferSolution> {
    let cert = is_coboundary_class(space, h, tower)?;
    let Some(beta) = cert.potential else {
        return Err(Error::Obstructed(cert.distributions.values.iter().map(format_rational).collect()));
    };
    let level = cert.distributions.level;
    space.require(level)?;
    let classes = crate::cohomology::cochain_space(tower, level, &space.renorm)?;
    let lifted = h.lift(space, level)?;
    let lvl = space.table.level(level);
    let mut values = vec![Rational::zero(); lvl.len()];
    for v in 0..lvl.num_vertices() {
        let mut acc = beta[classes.class_of[2 * v]].clone();
        for (i, slot) in values.iter_mut().enumerate().take(lvl.block_start[v + 1]).skip(lvl.block_start[v]) {
            *slot = acc.clone();
            acc += lifted.value(i);
        }
    }
    let raw = CylinderFunction::new(space, level, values)?;
    let mean = raw.mean(space)?;
    let g = raw.map(|x| x - &mean).reduce(space);
    let image = g.compose_phi(space, 1)?.sub(space, &g)?;
    let diff = h.sub(space, &image)?;
    let residual = diff.values().iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a });
    Ok(TransferSolution { g, residual, level })
}

/// One row of [`regularity_report`].
#[derive(Clone, Debug, Serialize)]
pub struct RegularityRow {
    pub epsilon: f64,
    pub h_norm: f64,
    pub g_norm: f64,
    /// `‖g‖_{α-2-ε} / ‖h‖_α`, zero when both vanish.
    pub empirical_k: f64,
    pub bumpy: f64,
    pub poincare: f64,
    pub pullback: f64,
    /// Product of the three constants.
    pub chained: f64,
}

/// Levels of `Γ^k` swept for the Poincaré-type constant.
pub const POINCARE_LEVELS: usize = 10;
/// Path level for the bi-Lipschitz constant in the pullback estimate.
pub const PULLBACK_LEVEL: usize = 6;
/// Cap on the number of level paths whose pairs enter that constant.
pub const PULLBACK_PATHS: usize = 256;

/// Chained constants from the bumpified norm bound, the Poincaré-type
/// inequality and the pullback estimate, with `e = ε/3` split between them.
pub fn chained_constants(space: &PathSpace, conj: &Conjugacy, alpha: f64, epsilon: f64) -> Result<(f64, f64, f64)> {
    let lambda = space.lambda();
    let e = epsilon / 3.0;
    let bump = BumpProfile::for_space(space);
    let bumpy = bumpy_constant(1, alpha - 1.0 - e, alpha, lambda, &bump)?;
    let poincare = conj
        .complexes
        .iter()
        .enumerate()
        .map(|(k, c)| c.diameter * lambda.powf(-e * k as f64))
        .fold(0.0, f64::max);
    let mut level = PULLBACK_LEVEL.min(conj.complexes.len() - 1).min(space.depth());
    while level > 1 && space.table.count(level) > PULLBACK_PATHS {
        level -= 1;
    }
    let count = space.table.count(level);
    let pairs: Vec<(usize, usize)> = (0..count).flat_map(|i| ((i + 1)..count).map(move |j| (i, j))).collect();
    let report = bilip_check(space, conj, level, &pairs, e / 2.0)?;
    let c_x = if report.lower_constant > 0.0 { 1.0 / report.lower_constant } else { f64::INFINITY };
    let target = alpha - 2.0 - 2.0 * e;
    let pullback = 1.0 + c_x / (1.0 - lambda.powf(e - target));
    Ok((bumpy, poincare, pullback))
}

pub fn regularity_report(
    space: &PathSpace,
    h: &CylinderFunction<Rational>,
    g: &CylinderFunction<Rational>,
    alpha: f64,
    epsilons: &[f64],
) -> Result<Vec<RegularityRow>> {
    let lambda = space.lambda();
    let conj = Conjugacy::new(space, POINCARE_LEVELS.min(space.depth()))?;
    epsilons
        .iter()
        .map(|&epsilon| {
            let h_norm = h.holder_norm(space, alpha, lambda);
            let g_norm = g.holder_norm(space, alpha - 2.0 - epsilon, lambda);
            let empirical_k = if h_norm == 0.0 { 0.0 } else { g_norm / h_norm };
            let (bumpy, poincare, pullback) = chained_constants(space, &conj, alpha, epsilon)?;
            Ok(RegularityRow {
                epsilon,
                h_norm,
                g_norm,
                empirical_k,
                bumpy,
                poincare,
                pullback,
                chained: bumpy * poincare * pullback,
            })
        })
        .collect()
}

/// Partial sums `S_n = Σ_{j<n} h(φ^j x)` along one orbit.
#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffReport {
    pub n: u64,
    /// `(n, S_n)` at roughly geometric checkpoints.
    pub checkpoints: Vec<(u64, f64)>,
    /// `max_{n <= N} |S_n|`.
    pub sup_abs: f64,
    /// `S_N / N`.
    pub mean_rate: f64,
    /// Slope of `log max_{j<=n}|S_j|` against `log n` over `[N/100, N]`.
    pub exponent: f64,
    pub r_squared: f64,
    /// Whether the fit is good enough to report (`R^2 >= 0.9`).
    pub fit_accepted: bool,
}

fn is_checkpoint(n: u64) -> bool {
    if n <= 100 {
        return true;
    }
    // about forty points per decade
    let digits = n.ilog10();
    let step = 10u64.pow(digits.saturating_sub(1)) / 4;
    step == 0 || n.is_multiple_of(step.max(1))
}

/// Least-squares slope and `R^2`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

pub fn birkhoff<S: Scalar>(space: &PathSpace, h: &CylinderFunction<S>, start: &LazyPath, n: u64) -> Result<BirkhoffReport> {
    let mut x = start.clone();
    let mut sum = S::zero();
    let mut checkpoints = vec![(0, 0.0)];
    let mut sup_abs: f64 = 0.0;
    let mut running_max: f64 = 0.0;
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    for j in 1..=n {
        sum = sum + h.eval(space, &x)?;
        x = space.diagram.successor(&x)?;
        if x.prefix.len() > 4 * (h.level() + 64) {
            x = compact(space, &x)?;
        }
        let s = sum.to_real();
        sup_abs = sup_abs.max(s.abs());
        running_max = running_max.max(s.abs());
        if is_checkpoint(j) || j == n {
            checkpoints.push((j, s));
            if j * 100 >= n && running_max > 0.0 {
                fit_x.push((j as f64).ln());
                fit_y.push(running_max.ln());
            }
        }
    }
    let (exponent, r_squared) = fit_line(&fit_x, &fit_y);
    Ok(BirkhoffReport {
        n,
        checkpoints,
        sup_abs,
        mean_rate: if n > 0 { sum.to_real() / n as f64 } else { 0.0 },
        exponent,
        r_squared,
        fit_accepted: r_squared >= 0.9,
    })
}

/// Drops prefix edges that already agree with the tail.
fn compact(space: &PathSpace, x: &LazyPath) -> Result<LazyPath> {
    let mut keep = x.prefix.len();
    let bare = LazyPath::new(Vec::new(), x.tail.clone());
    while keep > 0 && space.diagram.edge_at(&bare, keep)? == x.prefix[keep - 1] {
        keep -= 1;
    }
    Ok(LazyPath::new(x.prefix[..keep].to_vec(), x.tail.clone()))
}
