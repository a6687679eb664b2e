//! Numerical integration of the principal curvature along u-lines,
//!
//! ```text
//! λ' = sinθ cosθ − λ² cotθ,    β' = β λ cotθ,
//! ```
//!
//! with classic RK4, and comparison against the closed-form solutions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// |λ0| within this of sinθ is treated as the constant solution.
pub const CONST_EPS: f64 = 1e-12;
/// Integration stops once |λ| exceeds this.
pub const BLOWUP_LAMBDA: f64 = 1e3;
/// ... or grows by more than this factor in one step.
pub const BLOWUP_GROWTH: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Branch {
    /// |λ| < sinθ: λ = sinθ tanh(u cosθ + C).
    Tanh,
    /// |λ| = sinθ: fixed point.
    Const,
    /// |λ| > sinθ: λ = sinθ coth(u cosθ + C).
    Coth,
    /// The coth solution reached its pole; the solution is truncated at `u_star`.
    Blowup { u_star: f64 },
}

impl Branch {
    pub fn classify(theta: f64, lambda0: f64) -> Branch {
        let s = theta.sin();
        let gap = lambda0.abs() - s;
        if gap.abs() <= CONST_EPS {
            Branch::Const
        } else if gap < 0.0 {
            Branch::Tanh
        } else {
            Branch::Coth
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Branch::Tanh => "tanh",
            Branch::Const => "const",
            Branch::Coth => "coth",
            Branch::Blowup { .. } => "blowup",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub theta: f64,
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
    pub branch: Branch,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidAngle { theta, reason: "integration needs 0 < theta < pi/2" })
    }
}

/// Right-hand side, factored so that λ = ±sinθ are exact fixed points.
fn rhs(s: f64, cot: f64, lam: f64, beta: f64) -> (f64, f64) {
    (cot * (s - lam) * (s + lam), beta * lam * cot)
}

/// RK4 from `u_range.0` to `u_range.1`. The step is shrunk slightly so that an
/// integer number of steps lands exactly on the end of the range.
pub fn integrate(theta: f64, lambda0: f64, beta0: f64, u_range: (f64, f64), step: f64) -> Result<OdeSolution> {
    check_theta(theta)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta0 must be positive, got {beta0}")));
    }
    if !lambda0.is_finite() {
        return Err(Error::InvalidArgument("lambda0 must be finite".into()));
    }
    let (a, b) = u_range;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidArgument(format!("u range must satisfy a < b, got [{a}, {b}]")));
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let (s, c) = theta.sin_cos();
    let cot = c / s;

    let mut branch = Branch::classify(theta, lambda0);
    // snap onto the fixed point; the factored right-hand side then keeps it exactly
    let lambda0 = if branch == Branch::Const { s.copysign(lambda0) } else { lambda0 };
    let mut u = Vec::with_capacity(n + 1);
    let mut lam = Vec::with_capacity(n + 1);
    let mut beta = Vec::with_capacity(n + 1);
    u.push(a);
    lam.push(lambda0);
    beta.push(beta0);
    let (mut l, mut bt) = (lambda0, beta0);
    for i in 0..n {
        let (k1l, k1b) = rhs(s, cot, l, bt);
        let (k2l, k2b) = rhs(s, cot, l + 0.5 * h * k1l, bt + 0.5 * h * k1b);
        let (k3l, k3b) = rhs(s, cot, l + 0.5 * h * k2l, bt + 0.5 * h * k2b);
        let (k4l, k4b) = rhs(s, cot, l + h * k3l, bt + h * k3b);
        let nl = l + h / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
        let nb = bt + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        let ui = a + (i + 1) as f64 * h;
        let runaway = !nl.is_finite()
            || !nb.is_finite()
            || nl.abs() > BLOWUP_LAMBDA
            || (l.abs() > s && nl.abs() > BLOWUP_GROWTH * l.abs());
        if runaway {
            branch = Branch::Blowup { u_star: ui };
            break;
        }
        l = nl;
        bt = nb;
        u.push(ui);
        lam.push(l);
        beta.push(bt);
    }
    Ok(OdeSolution { theta, u, lambda: lam, beta, branch })
}

/// Closed-form λ and β through (u0, λ0, β0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    theta: f64,
    branch: Branch,
    c: f64,
    d: f64,
    lambda0: f64,
    u0: f64,
}

impl ClosedForm {
    pub fn fit(theta: f64, u0: f64, lambda0: f64, beta0: f64) -> Result<Self> {
        check_theta(theta)?;
        let (s, co) = theta.sin_cos();
        let branch = Branch::classify(theta, lambda0);
        let (c, d) = match branch {
            Branch::Tanh => {
                let c = (lambda0 / s).atanh() - u0 * co;
                (c, beta0 / (u0 * co + c).cosh())
            }
            Branch::Coth => {
                let c = (s / lambda0).atanh() - u0 * co;
                (c, beta0 / (u0 * co + c).sinh())
            }
            _ => (0.0, beta0),
        };
        Ok(ClosedForm { theta, branch, c, d, lambda0, u0 })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn lambda(&self, u: f64) -> f64 {
        let (s, co) = self.theta.sin_cos();
        match self.branch {
            Branch::Tanh => s * (u * co + self.c).tanh(),
            Branch::Coth => s / (u * co + self.c).tanh(),
            _ => s.copysign(self.lambda0),
        }
    }

    pub fn beta(&self, u: f64) -> f64 {
        let (s, co) = self.theta.sin_cos();
        match self.branch {
            Branch::Tanh => self.d * (u * co + self.c).cosh(),
            Branch::Coth => self.d * (u * co + self.c).sinh(),
            _ => self.d * (s.copysign(self.lambda0) * co / s * (u - self.u0)).exp(),
        }
    }

    /// Location of the pole of the coth solution, if any.
    pub fn pole(&self) -> Option<f64> {
        match self.branch {
            Branch::Coth => Some(-self.c / self.theta.cos()),
            _ => None,
        }
    }
}

/// max |λ − λ_closed| + max |β/β_closed − 1| over the solution grid.
pub fn compare_closed_form(sol: &OdeSolution) -> Result<f64> {
    if let Branch::Blowup { u_star } = sol.branch {
        return Err(Error::InvalidArgument(format!("solution blows up at u = {u_star}; nothing to compare")));
    }
    let cf = ClosedForm::fit(sol.theta, sol.u[0], sol.lambda[0], sol.beta[0])?;
    if cf.branch() != sol.branch {
        return Err(Error::InvalidArgument(format!(
            "branch mismatch: solution is {}, initial data gives {}",
            sol.branch.name(),
            cf.branch().name()
        )));
    }
    let mut el = 0.0f64;
    let mut eb = 0.0f64;
    for ((&u, &l), &b) in sol.u.iter().zip(&sol.lambda).zip(&sol.beta) {
        el = el.max((l - cf.lambda(u)).abs());
        eb = eb.max((b / cf.beta(u) - 1.0).abs());
    }
    Ok(el + eb)
}

/// Observed order of accuracy from two step sizes.
pub fn convergence_order(
    theta: f64,
    lambda0: f64,
    beta0: f64,
    u_range: (f64, f64),
    coarse: f64,
    fine: f64,
) -> Result<f64> {
    let e1 = compare_closed_form(&integrate(theta, lambda0, beta0, u_range, coarse)?)?;
    let e2 = compare_closed_form(&integrate(theta, lambda0, beta0, u_range, fine)?)?;
    Ok((e1 / e2).log10() / (coarse / fine).log10())
}

/// Writes `u,lambda,beta` rows.
pub fn write_csv<W: Write>(sol: &OdeSolution, mut w: W) -> Result<()> {
    writeln!(w, "u,lambda,beta")?;
    for ((u, l), b) in sol.u.iter().zip(&sol.lambda).zip(&sol.beta) {
        writeln!(w, "{u},{l},{b}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn zero_start_is_tanh() {
        let th = FRAC_PI_4;
        let sol = integrate(th, 0.0, 1.0, (0.0, 2.0), 1e-3).unwrap();
        assert_eq!(sol.branch, Branch::Tanh);
        assert_eq!(sol.u.len(), 2001);
        assert_eq!(*sol.u.last().unwrap(), 2.0);
        let (s, c) = th.sin_cos();
        for (u, l) in sol.u.iter().zip(&sol.lambda) {
            assert!((l - s * (u * c).tanh()).abs() < 1e-12);
        }
        assert!(compare_closed_form(&sol).unwrap() < 1e-10);
    }

    #[test]
    fn fixed_points() {
        let th: f64 = 0.7;
        for l0 in [th.sin(), -th.sin(), th.sin() * (1.0 + 1e-13)] {
            let sol = integrate(th, l0, 1.0, (0.0, 10.0), 1e-3).unwrap();
            assert_eq!(sol.branch, Branch::Const);
            assert!(sol.lambda.len() > 10_000);
            assert!(sol.lambda.iter().all(|&l| l == sol.lambda[0]));
            assert!(compare_closed_form(&sol).unwrap() < 1e-10);
        }
    }

    #[test]
    fn coth_branch_and_blowup() {
        let th = FRAC_PI_4;
        let s = th.sin();
        let sol = integrate(th, 1.5 * s, 1.0, (0.0, 2.0), 1e-3).unwrap();
        assert_eq!(sol.branch, Branch::Coth);
        let c0 = (1.0f64 / 1.5).atanh();
        for (u, l) in sol.u.iter().zip(&sol.lambda) {
            assert!((l - s / (u * th.cos() + c0).tanh()).abs() < 1e-9);
        }

        let sol = integrate(th, -1.5 * s, 1.0, (0.0, 5.0), 1e-3).unwrap();
        let Branch::Blowup { u_star } = sol.branch else { panic!("{:?}", sol.branch) };
        let pole = ClosedForm::fit(th, 0.0, -1.5 * s, 1.0).unwrap().pole().unwrap();
        assert!((u_star - pole).abs() < 0.05, "{u_star} vs {pole}");
        assert!(compare_closed_form(&sol).is_err());
    }

    #[test]
    fn rk4_order() {
        let p = convergence_order(FRAC_PI_4, 0.0, 1.0, (0.0, 2.0), 1e-1, 1e-2).unwrap();
        assert!((p - 4.0).abs() < 0.3, "{p}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate(0.0, 0.0, 1.0, (0.0, 1.0), 1e-2).is_err());
        assert!(integrate(0.5, 0.0, 1.0, (0.0, 1.0), 0.0).is_err());
        assert!(integrate(0.5, 0.0, -1.0, (0.0, 1.0), 1e-2).is_err());
        assert!(integrate(0.5, 0.0, 1.0, (1.0, 0.0), 1e-2).is_err());
    }

    #[test]
    fn csv_dump() {
        let sol = integrate(0.5, 0.1, 1.0, (0.0, 0.1), 0.05).unwrap();
        let mut buf = Vec::new();
        write_csv(&sol, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("u,lambda,beta\n0,0.1,1\n"));
    }
}
