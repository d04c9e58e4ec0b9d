//! Conditional expectations, martingale differences, Hölder and weighted norms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::CylinderFunction;
use crate::scalar::Scalar;
use crate::space::PathSpace;

/// `Π_k h`: the `ν`-conditional expectation onto level-`k` cylinders.
pub fn project<S: Scalar>(space: &PathSpace, h: &CylinderFunction<S>, k: usize) -> Result<CylinderFunction<S>> {
    let m = h.level();
    if k >= m {
        return Ok(h.clone());
    }
    let xi_m: Vec<S> = space.measure.level_as(m)?;
    let top = space.table.level(m);
    let mut sums: Vec<S> = h.values().iter().zip(&top.range).map(|(v, &r)| v.clone() * xi_m[r].clone()).collect();
    for j in ((k + 1)..=m).rev() {
        let lvl = space.table.level(j);
        let mut next = vec![S::zero(); space.table.count(j - 1)];
        for (i, s) in sums.into_iter().enumerate() {
            let p = lvl.parent[i];
            next[p] = next[p].clone() + s;
        }
        sums = next;
    }
    let xi_k: Vec<S> = space.measure.level_as(k)?;
    let ranges = &space.table.level(k).range;
    let values = sums.into_iter().zip(ranges).map(|(s, &r)| s / xi_k[r].clone()).collect();
    CylinderFunction::new(space, k, values)
}

/// `δ_k h = Π_k h - Π_{k-1} h`, with `Π_{-1} = 0`.
pub fn delta<S: Scalar>(space: &PathSpace, h: &CylinderFunction<S>, k: usize) -> Result<CylinderFunction<S>> {
    let upper = project(space, h, k)?;
    if k == 0 {
        return Ok(upper);
    }
    let lower = project(space, h, k - 1)?;
    upper.sub(space, &lower)
}

/// Polynomial bump `u(t) = c (1 - (t/R)^2)^4` on `|t| <= R = τ/5`, with unit
/// integral. Three continuous derivatives vanish at `±R`.
#[derive(Clone, Debug, Serialize)]
pub struct BumpProfile {
    pub tau: f64,
    pub radius: f64,
    pub c: f64,
    /// `‖u^{(j)}‖_∞` for `j = 0..=3`.
    pub sup: [f64; 4],
}

/// `sup |d^j/ds^j (1 - s^2)^4|` on `[-1, 1]`.
fn profile_sups() -> [f64; 4] {
    let s1 = (1.0f64 / 7.0).sqrt();
    let d1 = 8.0 * s1 * (6.0f64 / 7.0).powi(3);
    let d3 = |s: f64| (144.0 * s - 480.0 * s.powi(3) + 336.0 * s.powi(5)).abs();
    // critical points of the third derivative: 35 x^2 - 30 x + 3 = 0, x = s^2
    let disc = (900.0f64 - 420.0).sqrt();
    let x1 = (30.0 - disc) / 70.0;
    let x2 = (30.0 + disc) / 70.0;
    [1.0, d1, 8.0, d3(x1.sqrt()).max(d3(x2.sqrt()))]
}

impl BumpProfile {
    pub fn new(tau: f64) -> Self {
        let radius = tau / 5.0;
        let c = 315.0 / (256.0 * radius);
        let base = profile_sups();
        let mut sup = [0.0; 4];
        for (j, s) in sup.iter_mut().enumerate() {
            *s = c * radius.powi(-(j as i32)) * base[j];
        }
        BumpProfile { tau, radius, c, sup }
    }

    /// Bump for the shortest edge of `Γ^0`, whose lengths are the roof values.
    pub fn for_space(space: &PathSpace) -> Self {
        let tau = space.renorm.roof.iter().cloned().fold(f64::INFINITY, f64::min);
        BumpProfile::new(tau)
    }

    /// `u^{(j)}(t)` for `j <= 3`.
    pub fn derivative(&self, j: usize, t: f64) -> f64 {
        let s = t / self.radius;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - s * s;
        let p = match j {
            0 => q.powi(4),
            1 => -8.0 * s * q.powi(3),
            2 => q * q * (56.0 * s * s - 8.0),
            3 => 144.0 * s - 480.0 * s.powi(3) + 336.0 * s.powi(5),
            _ => f64::NAN,
        };
        self.c * self.radius.powi(-(j as i32)) * p
    }

    /// `‖u‖_{C^r} = Σ_{j<=r} ‖u^{(j)}‖_∞`.
    pub fn cr_norm(&self, r: usize) -> Result<f64> {
        if r > 3 {
            return Err(Error::BumpSmoothness(r));
        }
        Ok(self.sup[..=r].iter().sum())
    }

    /// `‖u(λ^k ·)‖_{C^r}`.
    pub fn rescaled_cr_norm(&self, r: usize, lambda: f64, k: usize) -> Result<f64> {
        if r > 3 {
            return Err(Error::BumpSmoothness(r));
        }
        Ok((0..=r).map(|j| lambda.powf((j * k) as f64) * self.sup[j]).sum())
    }
}

/// One term `g_k(y) = u(λ^k y) h_k(z_k)` of the bumpified decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct LevelComponent {
    pub level: usize,
    /// `max |δ_k h|`.
    pub amplitude: f64,
    /// `‖g_k‖_{C^r}`.
    pub cr_norm: f64,
}

/// Components of the bumpified `h` for levels `0..=h.level()`.
pub fn decompose<S: Scalar>(
    space: &PathSpace,
    h: &CylinderFunction<S>,
    r: usize,
    bump: &BumpProfile,
) -> Result<Vec<LevelComponent>> {
    let lambda = space.lambda();
    (0..=h.level())
        .map(|k| {
            let amplitude = delta(space, h, k)?.sup_norm();
            let cr_norm = bump.rescaled_cr_norm(r, lambda, k)? * amplitude;
            Ok(LevelComponent { level: k, amplitude, cr_norm })
        })
        .collect()
}

/// `Σ_k λ^{βk} ‖g_k‖_{C^r}`.
pub fn bumpified_norm<S: Scalar>(
    space: &PathSpace,
    h: &CylinderFunction<S>,
    r: usize,
    beta: f64,
    bump: &BumpProfile,
) -> Result<f64> {
    let lambda = space.lambda();
    Ok(decompose(space, h, r, bump)?
        .iter()
        .map(|c| lambda.powf(beta * c.level as f64) * c.cr_norm)
        .sum())
}

/// `2 r λ^α ‖u‖_{C^r} / ((λ - 1)(1 - λ^{β + r - α}))`, the factor in front of
/// `‖h‖_α` bounding the bumpified norm. Needs `α > β + r`.
pub fn bumpy_constant(r: usize, beta: f64, alpha: f64, lambda: f64, bump: &BumpProfile) -> Result<f64> {
    if alpha <= beta + r as f64 {
        return Err(Error::Invalid(format!("need alpha > beta + r, got {alpha} <= {}", beta + r as f64)));
    }
    let u = bump.cr_norm(r)?;
    Ok(2.0 * r as f64 * lambda.powf(alpha) * u / ((lambda - 1.0) * (1.0 - lambda.powf(beta + r as f64 - alpha))))
}

/// `‖g_k'‖_{C^{r-1}}` in closed form.
pub fn derivative_norm(bump: &BumpProfile, component: &LevelComponent, r: usize, lambda: f64) -> Result<f64> {
    if r == 0 || r > 3 {
        return Err(Error::BumpSmoothness(r));
    }
    let k = component.level;
    Ok((0..r)
        .map(|j| lambda.powf(((j + 1) * k) as f64) * bump.sup[j + 1])
        .sum::<f64>()
        * component.amplitude)
}

/// `‖·‖_{r,α}` and `|||·|||_{r,α,ε}` of a finite component list.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct WeightedNorms {
    pub sum_norm: f64,
    pub sup_norm: f64,
}

pub fn weighted_norms(components: &[LevelComponent], alpha: f64, epsilon: f64, lambda: f64) -> WeightedNorms {
    let mut sum_norm = 0.0;
    let mut sup_norm: f64 = 0.0;
    for c in components {
        let k = c.level as f64;
        sum_norm += lambda.powf(alpha * k) * c.cr_norm;
        sup_norm = sup_norm.max(lambda.powf((alpha - epsilon) * k) * c.cr_norm);
    }
    WeightedNorms { sum_norm, sup_norm }
}
