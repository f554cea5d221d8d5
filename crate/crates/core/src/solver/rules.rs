//! Stepsize rules and the local quantities they read.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Point;

/// Largest stepsize ever returned.
pub const STEP_CLAMP: f64 = 1e308;

/// How the stepsize `alpha_k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", deny_unknown_fields)]
pub enum StepRule {
    /// `min{sqrt(1 + theta) alpha, 1 / (sqrt 2 L_k)}`.
    Adgd1,
    /// `min{sqrt(2/3 + theta) alpha, alpha / sqrt([2 alpha^2 L_k^2 - 1]_+)}`; with a
    /// nonzero `g` this is the adaptive proximal gradient method.
    #[serde(alias = "adproxgd")]
    Adgd2,
    Fixed { alpha: f64 },
    /// Backtracking from `s * alpha_{k-1}` with ratio `r`.
    Armijo { s: f64, r: f64 },
    /// `min{sqrt(1 + theta) alpha, 1 / (2 L_k)}`.
    OldAdgd,
    /// `1 / (c L_k)` with no growth control; diverges on the counterexample.
    BadGd { c: f64 },
}

impl StepRule {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            StepRule::Fixed { alpha } if !(alpha > 0.0 && alpha.is_finite()) => bad(format!("fixed step {alpha}")),
            StepRule::Armijo { s, r } if !(s > 1.0 && r > 0.0 && r < 1.0) => {
                bad(format!("armijo needs s > 1 and 0 < r < 1, got s={s}, r={r}"))
            }
            StepRule::BadGd { c } if !(c >= 1.0) => bad(format!("badgd needs c >= 1, got {c}")),
            _ => Ok(()),
        }
    }

    /// `theta_0` prescribed by the method.
    pub fn theta0(&self) -> f64 {
        match self {
            StepRule::Adgd2 => 1.0 / 3.0,
            StepRule::Fixed { .. } | StepRule::Armijo { .. } => 1.0,
            StepRule::Adgd1 | StepRule::OldAdgd | StepRule::BadGd { .. } => 0.0,
        }
    }

    /// True for rules driven by the curvature estimate `L_k`.
    pub fn uses_curvature(&self) -> bool {
        !matches!(self, StepRule::Fixed { .. } | StepRule::Armijo { .. })
    }

    /// Name used in file names and tables; `prox` selects the composite name for AdGD-2.
    pub fn name(&self, prox: bool) -> String {
        match *self {
            StepRule::Adgd1 => "adgd1".into(),
            StepRule::Adgd2 if prox => "adproxgd".into(),
            StepRule::Adgd2 => "adgd2".into(),
            StepRule::Fixed { alpha } => format!("fixed_{alpha}"),
            StepRule::Armijo { s, r } => format!("armijo_{s}_{r}"),
            StepRule::OldAdgd => "oldadgd".into(),
            StepRule::BadGd { c } => format!("badgd_{c}"),
        }
    }

    /// The nine `(s, r)` pairs of the benchmark comparison.
    pub fn armijo_grid() -> [StepRule; 9] {
        [
            (1.2, 0.5),
            (1.5, 0.8),
            (1.1, 0.5),
            (1.2, 0.9),
            (1.1, 0.9),
            (1.5, 0.5),
            (1.2, 0.8),
            (1.1, 0.8),
            (1.5, 0.9),
        ]
        .map(|(s, r)| StepRule::Armijo { s, r })
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name(false))
    }
}

/// Parses `adgd1`, `adgd2`, `adproxgd`, `oldadgd`, `fixed:A`, `armijo:S,R`, `badgd:C`.
impl FromStr for StepRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let nums = |a: Option<&str>, n: usize| -> Result<Vec<f64>> {
            let a = a.ok_or_else(|| Error::InvalidParameter(format!("rule '{s}' needs {n} parameter(s)")))?;
            let v: Vec<f64> = a
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("rule '{s}': {e}")))?;
            if v.len() != n {
                return Err(Error::InvalidParameter(format!("rule '{s}' needs {n} parameter(s)")));
            }
            Ok(v)
        };
        let rule = match head {
            "adgd1" => StepRule::Adgd1,
            "adgd2" | "adproxgd" => StepRule::Adgd2,
            "oldadgd" => StepRule::OldAdgd,
            "fixed" => StepRule::Fixed { alpha: nums(args, 1)?[0] },
            "armijo" => {
                let v = nums(args, 2)?;
                StepRule::Armijo { s: v[0], r: v[1] }
            }
            "badgd" => StepRule::BadGd { c: nums(args, 1)?[0] },
            _ => return Err(Error::InvalidParameter(format!("unknown rule '{s}'"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// `L_k = ||grad_curr - grad_prev|| / ||x_curr - x_prev||`.
pub fn curvature_estimate(x_curr: &Point, x_prev: &Point, grad_curr: &Point, grad_prev: &Point) -> Result<f64> {
    let dx = (x_curr - x_prev).norm();
    if dx == 0.0 {
        return Err(Error::StationaryDisplacement);
    }
    let dg = (grad_curr - grad_prev).norm();
    Ok(dg / dx)
}

fn clamp(v: f64) -> f64 {
    v.min(STEP_CLAMP)
}

/// `a / 0 = +inf`.
fn inverse(l: f64) -> f64 {
    if l == 0.0 {
        f64::INFINITY
    } else {
        1.0 / l
    }
}

pub fn stepsize_adgd1(alpha_prev: f64, theta_prev: f64, l_k: f64) -> f64 {
    let grow = (1.0 + theta_prev).sqrt() * alpha_prev;
    clamp(grow.min(inverse(SQRT_2 * l_k)))
}

/// Second bound of AdGD-2: `alpha / sqrt([2 t^2 - 1]_+)` with `t = alpha L_k`.
pub fn adgd2_second_bound(alpha_prev: f64, l_k: f64) -> f64 {
    let t = alpha_prev * l_k;
    if t <= std::f64::consts::FRAC_1_SQRT_2 {
        return f64::INFINITY;
    }
    if !(t < 1e150) {
        // 2 t^2 - 1 is 2 t^2 to machine precision and t itself may overflow
        return 1.0 / (SQRT_2 * l_k);
    }
    // fused, so that t = 1 gives exactly 1
    let denom = t.mul_add(2.0 * t, -1.0).sqrt();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        alpha_prev / denom
    }
}

pub fn stepsize_adgd2(alpha_prev: f64, theta_prev: f64, l_k: f64) -> f64 {
    let grow = (2.0 / 3.0 + theta_prev).sqrt() * alpha_prev;
    clamp(grow.min(adgd2_second_bound(alpha_prev, l_k)))
}

pub fn stepsize_old_adgd(alpha_prev: f64, theta_prev: f64, l_k: f64) -> f64 {
    let grow = (1.0 + theta_prev).sqrt() * alpha_prev;
    clamp(grow.min(inverse(2.0 * l_k)))
}

/// `1 / (c L_k)`; infinite when `L_k = 0`.
pub fn stepsize_bad_gd(c: f64, l_k: f64) -> f64 {
    inverse(c * l_k)
}

/// `v^{k+1} = (x^k - x^{k+1}) / alpha_k - grad f(x^k)`, a subgradient of `g` at `x^{k+1}`.
pub fn recover_subgradient(x_next: &Point, x_curr: &Point, grad_curr: &Point, alpha: f64) -> Point {
    (x_curr - x_next) / alpha - grad_curr
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn curvature_examples() {
        let l = curvature_estimate(&p(&[1.0, 0.0]), &p(&[0.0, 0.0]), &p(&[2.0, 0.0]), &p(&[0.0, 0.0])).unwrap();
        assert_eq!(l, 2.0);
        let l = curvature_estimate(&p(&[1.0]), &p(&[3.0]), &p(&[5.0]), &p(&[5.0])).unwrap();
        assert_eq!(l, 0.0);
        let err = curvature_estimate(&p(&[1.0]), &p(&[1.0]), &p(&[5.0]), &p(&[4.0])).unwrap_err();
        assert_eq!(err, Error::StationaryDisplacement);
    }

    #[test]
    fn curvature_on_counterexample_tail() {
        use crate::problems::counterexample_f;
        let (_, g12) = counterexample_f(12.0);
        let (_, g20) = counterexample_f(20.0);
        let l = curvature_estimate(&p(&[12.0]), &p(&[20.0]), &p(&[g12]), &p(&[g20])).unwrap();
        let closed = 2.0 / (13.0 * 21.0);
        assert!((l - closed).abs() < 1e-15, "{l} vs {closed}");
        assert!((l - 0.00733).abs() < 1e-5);
    }

    #[test]
    fn adgd1_examples() {
        assert_eq!(stepsize_adgd1(0.5, 0.0, 1.0), 0.5);
        assert_eq!(stepsize_adgd1(1.0, 0.0, 0.0), 1.0);
        let a = stepsize_adgd1(1.0, 1.0, 10.0);
        assert!((a - 1.0 / (10.0 * SQRT_2)).abs() < 1e-16);
    }

    #[test]
    fn adgd2_examples() {
        assert_eq!(stepsize_adgd2(0.5, 1.0 / 3.0, 1.0), 0.5);
        let l = 7.0;
        let a = stepsize_adgd2(1.0 / l, 1.0 / 3.0, l);
        assert!((a * l - 1.0).abs() < 1e-15);
        let a = stepsize_adgd2(1.0, 0.0, 2.0);
        assert!((a - 1.0 / 7f64.sqrt()).abs() < 1e-15);
        assert!((a - 0.37796).abs() < 1e-5);
    }

    #[test]
    fn old_adgd_example() {
        assert_eq!(stepsize_old_adgd(0.5, 0.0, 1.0), 0.5);
    }

    #[test]
    fn bad_gd_infinite_on_flat_gradient() {
        assert_eq!(stepsize_bad_gd(1.0, 0.0), f64::INFINITY);
        assert_eq!(stepsize_bad_gd(2.0, 0.25), 2.0);
    }

    #[test]
    fn huge_curvature_does_not_collapse_the_step() {
        let a = stepsize_adgd2(1e200, 0.5, 1e200);
        assert!(a > 0.0 && a.is_finite());
        assert!((a * 1e200 * SQRT_2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subgradient_of_zero_function_vanishes() {
        let x = p(&[1.0, -2.0]);
        let g = p(&[0.5, 0.25]);
        let next = &x - &g * 0.3;
        let v = recover_subgradient(&next, &x, &g, 0.3);
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn subgradient_orthant_interior_example() {
        let v = recover_subgradient(&p(&[1.0]), &p(&[-1.0]), &p(&[-2.0]), 1.0);
        assert_eq!(v[0], 0.0);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("adproxgd".parse::<StepRule>().unwrap(), StepRule::Adgd2);
        assert_eq!("armijo:1.2,0.5".parse::<StepRule>().unwrap(), StepRule::Armijo { s: 1.2, r: 0.5 });
        assert_eq!("badgd:2".parse::<StepRule>().unwrap(), StepRule::BadGd { c: 2.0 });
        assert!("armijo:0.9,0.5".parse::<StepRule>().is_err());
        assert!("armijo:1.2".parse::<StepRule>().is_err());
        assert!("newton".parse::<StepRule>().is_err());
    }

    proptest! {
        #[test]
        fn adgd2_bounds_hold(alpha in 1e-6f64..1e3, theta in 0.0f64..3.0, l in 0.0f64..1e4) {
            let a = stepsize_adgd2(alpha, theta, l);
            prop_assert!(a > 0.0);
            prop_assert!(a * a * l * l - a * a / (2.0 * alpha * alpha) <= 0.5 + 1e-12);
            prop_assert!(a <= (2.0 / 3.0 + theta).sqrt() * alpha * (1.0 + 1e-12));
        }

        #[test]
        fn adgd1_bounds_hold(alpha in 1e-6f64..1e3, theta in 0.0f64..3.0, l in 0.0f64..1e4) {
            let a = stepsize_adgd1(alpha, theta, l);
            prop_assert!(a > 0.0);
            prop_assert!(a * l <= std::f64::consts::FRAC_1_SQRT_2 + 1e-12);
            prop_assert!(a <= (1.0 + theta).sqrt() * alpha * (1.0 + 1e-12));
        }
    }
}
