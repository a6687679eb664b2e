//! Finite-difference stencils.
//!
//! Central stencils are the classic 5-point, 4th-order formulas. Arbitrary
//! (one-sided, shifted) stencils come from Fornberg's recursion.

use crate::error::{Error, Result};

/// Offsets of the 5-point central stencil, in units of the step.
pub const CENTRAL_OFFSETS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
/// First-derivative weights for [`CENTRAL_OFFSETS`], to be divided by `h`.
pub const CENTRAL_D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
/// Second-derivative weights for [`CENTRAL_OFFSETS`], to be divided by `h²`.
pub const CENTRAL_D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// Weights `w[k][j]` such that `f^(k)(z) ≈ Σ_j w[k][j] f(x[j])` for k = 0..=order.
pub fn fornberg_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mm = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mm).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mm).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")))
    }
}

/// First and second derivative of a scalar function at `x` by the 5-point central stencil.
pub fn d1_d2<F>(f: F, x: f64, h: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    check_step(h)?;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (k, off) in CENTRAL_OFFSETS.iter().enumerate() {
        let y = f(x + off * h)?;
        d1 += CENTRAL_D1[k] * y;
        d2 += CENTRAL_D2[k] * y;
    }
    Ok((d1 / h, d2 / (h * h)))
}

/// First derivative at `x` by the 5-point central stencil.
pub fn d1<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_step(h)?;
    let mut acc = 0.0;
    for (k, off) in CENTRAL_OFFSETS.iter().enumerate() {
        if CENTRAL_D1[k] != 0.0 {
            acc += CENTRAL_D1[k] * f(x + off * h)?;
        }
    }
    Ok(acc / h)
}

/// Partial derivatives of a scalar field of two variables.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Partials {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

/// All partials up to second order on the 5×5 tensor stencil (4th order in `h`).
///
/// `f` returns several fields at once so one stencil sweep serves all of them.
pub fn partials2<F, const N: usize>(f: F, u: f64, v: f64, h: f64) -> Result<[Partials; N]>
where
    F: Fn(f64, f64) -> Result<[f64; N]>,
{
    check_step(h)?;
    let mut out = [Partials::default(); N];
    for (i, du) in CENTRAL_OFFSETS.iter().enumerate() {
        for (j, dv) in CENTRAL_OFFSETS.iter().enumerate() {
            let on_u_axis = j == 2;
            let on_v_axis = i == 2;
            let mixed = CENTRAL_D1[i] * CENTRAL_D1[j];
            if !on_u_axis && !on_v_axis && mixed == 0.0 {
                continue;
            }
            let vals = f(u + du * h, v + dv * h)?;
            for (p, val) in out.iter_mut().zip(vals) {
                if on_u_axis && on_v_axis {
                    p.value = val;
                }
                if on_u_axis {
                    p.du += CENTRAL_D1[i] * val;
                    p.duu += CENTRAL_D2[i] * val;
                }
                if on_v_axis {
                    p.dv += CENTRAL_D1[j] * val;
                    p.dvv += CENTRAL_D2[j] * val;
                }
                p.duv += mixed * val;
            }
        }
    }
    for p in out.iter_mut() {
        p.du /= h;
        p.dv /= h;
        p.duu /= h * h;
        p.dvv /= h * h;
        p.duv /= h * h;
    }
    Ok(out)
}

/// First partials only (the two 5-point axis stencils).
pub fn partials1<F, const N: usize>(f: F, u: f64, v: f64, h: f64) -> Result<[(f64, f64); N]>
where
    F: Fn(f64, f64) -> Result<[f64; N]>,
{
    check_step(h)?;
    let mut out = [(0.0, 0.0); N];
    for (k, off) in CENTRAL_OFFSETS.iter().enumerate() {
        let w = CENTRAL_D1[k];
        if w == 0.0 {
            continue;
        }
        let au = f(u + off * h, v)?;
        let av = f(u, v + off * h)?;
        for n in 0..N {
            out[n].0 += w * au[n];
            out[n].1 += w * av[n];
        }
    }
    for o in out.iter_mut() {
        o.0 /= h;
        o.1 /= h;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_central_stencils() {
        let w = fornberg_weights(0.0, &CENTRAL_OFFSETS, 2);
        for j in 0..5 {
            assert!((w[1][j] - CENTRAL_D1[j]).abs() < 1e-14);
            assert!((w[2][j] - CENTRAL_D2[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn fornberg_one_sided_is_exact_on_quartics() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let w = fornberg_weights(0.0, &xs, 2);
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x - 0.1 * x.powi(4);
        let d1: f64 = xs.iter().zip(&w[1]).map(|(x, c)| c * p(*x)).sum();
        let d2: f64 = xs.iter().zip(&w[2]).map(|(x, c)| c * p(*x)).sum();
        assert!((d1 + 2.0).abs() < 1e-11);
        assert!(d2.abs() < 1e-10);
    }

    #[test]
    fn central_derivatives_fourth_order() {
        let f = |x: f64| Ok(x.sin());
        let e1 = (d1(f, 0.4, 0.1).unwrap() - 0.4f64.cos()).abs();
        let e2 = (d1(f, 0.4, 0.05).unwrap() - 0.4f64.cos()).abs();
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
        let (_, dd) = d1_d2(f, 0.4, 1e-2).unwrap();
        assert!((dd + 0.4f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn mixed_partials() {
        let f = |u: f64, v: f64| Ok([(u * v).exp(), u * u * v]);
        let [p, q] = partials2(f, 0.3, 0.5, 1e-2).unwrap();
        let e = (0.15f64).exp();
        assert!((p.value - e).abs() < 1e-15);
        assert!((p.du - 0.5 * e).abs() < 1e-9);
        assert!((p.duv - (1.0 + 0.15) * e).abs() < 1e-7);
        assert!((p.dvv - 0.09 * e).abs() < 1e-7);
        assert!((q.duu - 1.0).abs() < 1e-9);
        assert!((q.duv - 0.6).abs() < 1e-9);
    }

    #[test]
    fn zero_step_rejected() {
        assert!(d1(Ok, 0.0, 0.0).is_err());
        assert!(partials2(|u, v| Ok([u + v]), 0.0, 0.0, 0.0).is_err());
    }
}
