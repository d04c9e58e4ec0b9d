//! Renormalization cocycle, tail-invariant measure and Perron data.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::diagram::OrderedDiagram;
use crate::error::{Error, Result};
use crate::linalg::{int_from_counts, int_identity, int_mul, int_to_f64, perron, IntMatrix};
use crate::scalar::Scalar;
use crate::Rational;

/// Hilbert diameter threshold for the unique ergodicity certificate.
pub const CONE_THRESHOLD: f64 = 1e-8;
/// Levels a stationary diagram may be iterated for the certificate.
pub const STATIONARY_CONE_CAP: usize = 4000;

/// `A_n ... A_{m+1}`; entry `(v, w)` counts paths in `E_{m,n}` from `w` to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleProduct {
    pub m: usize,
    pub n: usize,
    pub matrix: IntMatrix,
}

pub fn cocycle_product(d: &OrderedDiagram, m: usize, n: usize) -> Result<CocycleProduct> {
    if m >= n {
        return Err(Error::Invalid(format!("need m < n, got {m} and {n}")));
    }
    let mut acc = int_identity(d.num_vertices(m)?);
    for k in (m + 1)..=n {
        acc = int_mul(&int_from_counts(&d.level(k)?.matrix()), &acc);
    }
    Ok(CocycleProduct { m, n, matrix: acc })
}

/// `|E_v|` for every `v` in `V_k` as exact integers.
pub fn path_counts(d: &OrderedDiagram, k: usize) -> Result<Vec<num_bigint::BigInt>> {
    if k == 0 {
        return Ok(vec![1.into(); d.num_vertices(0)?]);
    }
    let p = cocycle_product(d, 0, k)?;
    Ok(p.matrix.iter().map(|row| row.iter().sum()).collect())
}

/// `xi[k][v]`: mass of any cylinder of a path in `E_{0,k}` ending at `v`.
#[derive(Clone, Debug)]
pub struct MeasureVectors {
    pub xi: Vec<Vec<Rational>>,
    /// Hilbert-metric diameter of the cone image at `certified_at`.
    pub cone_diameter: f64,
    pub certified_at: usize,
}

impl MeasureVectors {
    pub fn horizon(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn level(&self, k: usize) -> Result<&[Rational]> {
        self.xi
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::LevelOverflow { level: k, materialized: self.horizon() })
    }

    pub fn level_f64(&self, k: usize) -> Result<Vec<f64>> {
        Ok(self.level(k)?.iter().map(Scalar::to_real).collect())
    }

    /// The measure as a vector over `V_k` in scalar type `S`.
    pub fn level_as<S: Scalar>(&self, k: usize) -> Result<Vec<S>> {
        Ok(self.level(k)?.iter().map(|x| rational_to::<S>(x)).collect())
    }
}

/// Exact conversion for rationals, nearest float otherwise.
pub fn rational_to<S: Scalar>(x: &Rational) -> S {
    if S::EXACT {
        let num = S::from_bigint(x.numer());
        let den = S::from_bigint(x.denom());
        num / den
    } else {
        S::from_real(x.to_real())
    }
}

fn hilbert_diameter(rows: &[Vec<f64>]) -> f64 {
    let mut diam: f64 = 0.0;
    for (i, x) in rows.iter().enumerate() {
        for y in &rows[i + 1..] {
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for (a, b) in x.iter().zip(y) {
                if *a <= 0.0 || *b <= 0.0 {
                    return f64::INFINITY;
                }
                let r = (a / b).ln();
                hi = hi.max(r);
                lo = lo.min(r);
            }
            diam = diam.max(hi - lo);
        }
    }
    diam
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Tail-invariant probability measure up to `horizon`, with a Hilbert-cone
/// certificate that the direction of `xi[horizon]` is unique.
pub fn tail_measure(d: &OrderedDiagram, horizon: usize) -> Result<MeasureVectors> {
    let cap = if d.is_stationary() { horizon + STATIONARY_CONE_CAP } else { d.materialized() };
    let size = d.num_vertices(horizon)?;
    // rows of A_T ... A_{h+1}, each a direction over V_h
    let mut rows: Vec<Vec<f64>> = (0..size).map(|v| (0..size).map(|w| f64::from(u8::from(v == w))).collect()).collect();
    let mut diameter = hilbert_diameter(&rows);
    let mut top = horizon;
    while diameter >= CONE_THRESHOLD {
        if top >= cap {
            return Err(Error::UniqueErgodicityNotCertified(diameter));
        }
        top += 1;
        let a = d.level(top)?.matrix();
        rows = a
            .iter()
            .map(|row| {
                let mut out = vec![0.0; size];
                for (w, &c) in row.iter().enumerate() {
                    if c > 0 {
                        for (o, x) in out.iter_mut().zip(&rows[w]) {
                            *o += c as f64 * x;
                        }
                    }
                }
                normalize(&mut out);
                out
            })
            .collect();
        diameter = hilbert_diameter(&rows);
    }
    let mut top_xi = vec![0.0; size];
    for row in &rows {
        for (t, x) in top_xi.iter_mut().zip(row) {
            *t += x / rows.len() as f64;
        }
    }
    let mut xi = vec![Vec::new(); horizon + 1];
    xi[horizon] = top_xi.iter().map(|&x| Rational::from_real(x)).collect();
    for k in (1..=horizon).rev() {
        let level = d.level(k)?;
        let mut below = vec![Rational::zero(); level.num_sources];
        for &(s, r) in &level.edges {
            below[s] += &xi[k][r];
        }
        xi[k - 1] = below;
    }
    let total: Rational = xi[0].iter().sum();
    for level in xi.iter_mut() {
        for x in level.iter_mut() {
            *x /= &total;
        }
    }
    Ok(MeasureVectors { xi, cone_diameter: diameter, certified_at: top })
}

/// Multiplier, roof vector and normalization residual.
#[derive(Clone, Debug, Serialize)]
pub struct RenormData {
    pub lambda_mu: f64,
    pub exponent: f64,
    pub roof: Vec<f64>,
    pub roof_residual: f64,
}

/// Perron multiplier `lambda_mu` and the roof `l` scaled so that
/// `sum_v l_v xi_0(v) = 1`.
pub fn renorm_data(d: &OrderedDiagram, measure: &MeasureVectors) -> Result<RenormData> {
    let n = d.materialized();
    let p = d.period();
    let v0 = d.num_vertices(0)?;
    let (lambda_mu, mut roof) = if d.is_stationary() {
        let base = n - p;
        let block = cocycle_product(d, base, n)?;
        let (root, right) = perron(&int_to_f64(&block.matrix), 1e-15, 1_000_000).ok_or(
            Error::LyapunovUnconverged { estimate: f64::NAN, error: f64::INFINITY },
        )?;
        let lambda = root.powf(1.0 / p as f64);
        let roof = if base == 0 { right } else { vec![1.0; v0] };
        (lambda, roof)
    } else {
        let full = cocycle_product(d, 0, n)?;
        let half = cocycle_product(d, 0, n / 2)?;
        let rate = |m: &IntMatrix, len: usize| {
            let total: num_bigint::BigInt = m.iter().flatten().sum();
            total.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / len as f64)
        };
        let est = rate(&full.matrix, n);
        let err = (est - rate(&half.matrix, (n / 2).max(1))).abs();
        if err > 1e-9 {
            return Err(Error::LyapunovUnconverged { estimate: est, error: err });
        }
        (est, vec![1.0; v0])
    };
    let xi0 = measure.level_f64(0)?;
    let scale: f64 = roof.iter().zip(&xi0).map(|(l, x)| l * x).sum();
    roof.iter_mut().for_each(|l| *l /= scale);
    let check: f64 = roof.iter().zip(&xi0).map(|(l, x)| l * x).sum();
    Ok(RenormData { lambda_mu, exponent: lambda_mu.ln(), roof, roof_residual: (check - 1.0).abs() })
}

/// `|V_k|` growth table with a coarse verdict.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub sizes: Vec<usize>,
    pub rate: f64,
    pub verdict: String,
}

pub fn condition1_report(d: &OrderedDiagram, horizon: usize) -> Result<GrowthReport> {
    let sizes: Vec<usize> = (0..=horizon).map(|k| d.num_vertices(k)).collect::<Result<_>>()?;
    let logs: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let h = horizon.max(1) as f64;
    let rate = (logs[horizon] - logs[0]) / h;
    let mid = horizon / 2;
    let verdict = if sizes.iter().all(|&s| s == sizes[0]) {
        "bounded"
    } else {
        let first = (logs[mid] - logs[0]) / mid.max(1) as f64;
        let second = (logs[horizon] - logs[mid]) / (horizon - mid).max(1) as f64;
        if second < 0.75 * first {
            "subexponential"
        } else {
            "exponential"
        }
    };
    Ok(GrowthReport { sizes, rate, verdict: verdict.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::diagram::{DiagramSpec, Level};
    use num_bigint::BigInt;

    fn big(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn products() {
        assert_eq!(cocycle_product(&builtin::odo2(), 0, 10).unwrap().matrix, big(&[&[1024]]));
        assert_eq!(cocycle_product(&builtin::fib(), 0, 5).unwrap().matrix, big(&[&[8, 5], &[5, 3]]));
        assert!(cocycle_product(&builtin::fib(), 3, 3).is_err());
    }

    #[test]
    fn odo2_measure_is_dyadic() {
        let m = tail_measure(&builtin::odo2(), 6).unwrap();
        for k in 0..=6 {
            assert_eq!(m.xi[k][0], Rational::new(1.into(), BigInt::from(1u64 << k)));
        }
        let r = renorm_data(&builtin::odo2(), &m).unwrap();
        assert!((r.lambda_mu - 2.0).abs() < 1e-12);
        assert!((r.roof[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn growth_verdicts() {
        let r = condition1_report(&builtin::odo2(), 5).unwrap();
        assert_eq!(r.sizes, vec![1; 6]);
        assert_eq!(r.verdict, "bounded");
        // |V_k| = k + 1
        let levels = (1..=12)
            .map(|k| {
                let mut edges = Vec::new();
                for v in 0..=k {
                    edges.push((v.min(k - 1), v));
                }
                for w in 0..k {
                    edges.push((w, 0));
                }
                let in_order = (0..=k)
                    .map(|v| (0..edges.len()).filter(|&e| edges[e].1 == v).collect())
                    .collect();
                Level { num_sources: k, num_ranges: k + 1, edges, in_order }
            })
            .collect();
        let d = OrderedDiagram::new(DiagramSpec { stationary: false, period: 1, levels }).unwrap();
        assert_eq!(condition1_report(&d, 12).unwrap().verdict, "subexponential");
    }
}
