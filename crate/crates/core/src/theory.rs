//! Limit functions and constants: hitting-before-exit limits, gambler's ruin
//! limits, the Dynkin–Lamperti overshoot law, and the growth constants of the
//! heavy-tailed aggregate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{gamma, integrate, jacobi_integral, Estimate, DEFAULT_TOLERANCE};

/// Probability with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Value {
    pub value: f64,
    pub error: f64,
}

impl Value {
    fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Accept a raw quadrature result as a probability: it must land in
/// `[-tol, 1 + tol]`, and is then rounded into `[0, 1]`.
fn probability(what: &str, e: Estimate, tol: f64) -> Result<Value> {
    let slack = tol.max(e.error);
    if !(e.value >= -slack && e.value <= 1.0 + slack) {
        return Err(Error::Numeric {
            what: format!("{what} outside [0, 1]"),
            estimate: e.value,
            error: e.error,
        });
    }
    Ok(Value {
        value: e.value.clamp(0.0, 1.0),
        error: e.error,
    })
}

fn check_alpha_open(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} must lie in (1, 2)")))
    }
}

fn check_unit(y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::Domain(format!("y = {y} must lie in [0, 1]")))
    }
}

/// Finite-variance hitting limit `1 - y`.
pub fn q2(y: f64, c: f64) -> Result<f64> {
    check_unit(y)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c = {c} must be positive")));
    }
    Ok(1.0 - y)
}

/// `q_α(y; c)`, the limit of `P_{yN}(T_0 < η_[-cN, N])`.
pub fn q_alpha(alpha: f64, y: f64, c: f64, tol: f64) -> Result<Value> {
    check_alpha_open(alpha)?;
    check_unit(y)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c = {c} must be positive")));
    }
    if y == 0.0 {
        return Ok(Value::exact(1.0));
    }
    if y == 1.0 {
        return Ok(Value::exact(0.0));
    }
    let a = alpha / 2.0;
    let pre = (alpha - 1.0) * c.powf(1.0 - a) * (1.0 + c).powf(alpha - 1.0) * (y + c).powf(a) * y.powf(alpha - 1.0);
    let inner_tol = tol / pre;
    let split = y.max(0.5);
    let mut value = 0.0;
    let mut error = 0.0;
    if y < split {
        // x = ln(y + cv) flattens the peak of (y+cv)^{-α} at small y
        let e = integrate(
            |x: f64| {
                let v = (x.exp() - y) / c;
                ((1.0 - alpha) * x).exp() / c * (1.0 - v).powf(a - 1.0)
            },
            ((1.0 + c) * y).ln(),
            (y + c * split).ln(),
            inner_tol / 2.0,
        )?;
        value += e.value;
        error += e.error;
    }
    // v = 1 - w^{2/α} turns (1-v)^{α/2-1} dv into (2/α) dw
    let ia = 1.0 / a;
    let e = integrate(
        |w: f64| (y + c * (1.0 - w.powf(ia))).powf(-alpha) * ia,
        0.0,
        (1.0 - split).powf(a),
        inner_tol / 2.0,
    )?;
    value += e.value;
    error += e.error;
    probability(
        "q_alpha",
        Estimate {
            value: pre * value,
            error: pre * error,
        },
        tol,
    )
}

/// Closed-form minorant `u_α(y; c) ≤ q_α(y; c)`.
pub fn u_alpha_yc(alpha: f64, y: f64, c: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    check_unit(y)?;
    if y == 0.0 {
        return Ok(1.0);
    }
    Ok(((c + y) / c).powf(alpha / 2.0) * (1.0 - ((1.0 + c) / (1.0 + c / y)).powf(alpha - 1.0)))
}

/// Lower bound `(α-1) c^{1-α/2} (c+y)^{α/2-1} (1-y)` on `q_α(y; c)`.
pub fn q_alpha_lower_bound(alpha: f64, y: f64, c: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    check_unit(y)?;
    let a = alpha / 2.0;
    Ok((alpha - 1.0) * c.powf(1.0 - a) * (c + y).powf(a - 1.0) * (1.0 - y))
}

/// `∫_{x0}^{x1} u^{α/2-1} (1-u)^{α/2-1} du`.
pub fn symmetric_beta_integral(alpha: f64, x0: f64, x1: f64, tol: f64) -> Result<Estimate> {
    let a = alpha / 2.0;
    jacobi_integral(a, a, x0, x1, |_| 1.0, tol)
}

/// `Γ(α/2)² / Γ(α)`.
pub fn symmetric_beta(alpha: f64) -> f64 {
    gamma(alpha / 2.0).powi(2) / gamma(alpha)
}

/// Limit of `P_0(S_{η_[-cN, N]} > N)`.
pub fn gambler_limit(alpha: f64, c: f64, tol: f64) -> Result<Value> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (1, 2]")));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("c = {c} must be a nonnegative real")));
    }
    if alpha == 2.0 {
        return Ok(Value::exact(c / (1.0 + c)));
    }
    let norm = 1.0 / symmetric_beta(alpha);
    let e = symmetric_beta_integral(alpha, 1.0 / (1.0 + c), 1.0, tol / norm)?;
    probability(
        "gambler_limit",
        Estimate {
            value: norm * e.value,
            error: norm * e.error,
        },
        tol,
    )
}

/// Dynkin–Lamperti density `f_α(v)`.
pub fn dynkin_lamperti_density(alpha: f64, v: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 2)")));
    }
    if !(v > 0.0) {
        return Err(Error::Domain(format!("v = {v} must be positive")));
    }
    Ok((PI * alpha / 2.0).sin() / PI * v.powf(-alpha / 2.0) / (1.0 + v))
}

/// `∫_u^∞ f_α(v) dv`, the limiting `P(Z_y / y > u)`.
pub fn dynkin_lamperti_tail(alpha: f64, u: f64, tol: f64) -> Result<Value> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 2)")));
    }
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("u = {u} must be nonnegative")));
    }
    if u.is_infinite() {
        return Ok(Value::exact(0.0));
    }
    // t = 1/(1+v) gives (sin(πa)/π) ∫_0^{1/(1+u)} t^{a-1} (1-t)^{-a} dt
    let a = alpha / 2.0;
    let k = (PI * a).sin() / PI;
    let e = jacobi_integral(a, 1.0 - a, 0.0, 1.0 / (1.0 + u), |_| 1.0, tol / k)?;
    probability(
        "dynkin_lamperti_tail",
        Estimate {
            value: k * e.value,
            error: k * e.error,
        },
        tol,
    )
}

/// `q̲_α(u, s) = ((α-1)/(1+u)) ((s-u)/s)^{1-α/2}`.
pub fn q_lower_envelope(alpha: f64, u: f64, s: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (1, 2]")));
    }
    if !(1.0 < u && u < s) {
        return Err(Error::Domain(format!("need 1 < u < s (u = {u}, s = {s})")));
    }
    Ok((alpha - 1.0) / (1.0 + u) * ((s - u) / s).powf(1.0 - alpha / 2.0))
}

/// `u_α(w)` for `w > 1`.
pub fn u_alpha_w(alpha: f64, w: f64, tol: f64) -> Result<Value> {
    check_alpha_open(alpha)?;
    if !(w > 1.0) {
        return Err(Error::Domain(format!("w = {w} must exceed 1")));
    }
    if w.is_infinite() {
        return Ok(Value::exact(0.0));
    }
    let a = alpha / 2.0;
    let k = 2f64.powf(a - 1.0) * (alpha - 1.0) * (PI * a).sin() / PI;
    // t = 1/(1+v): ∫_0^{1/w} t^{α-1} (1-t)^{-a} (1+t)^{-a} dt
    let e = jacobi_integral(alpha, 1.0 - a, 0.0, 1.0 / w, |t| (1.0 + t).powf(-a), tol / k)?;
    probability(
        "u_alpha",
        Estimate {
            value: k * e.value,
            error: k * e.error,
        },
        tol,
    )
}

/// `c_α = (α-1)(2-α)^{2-α} / ((4-α)(3-α)^3)`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    Ok((alpha - 1.0) * (2.0 - alpha).powf(2.0 - alpha) / ((4.0 - alpha) * (3.0 - alpha).powi(3)))
}

/// `C'_α = (α-1)^{-1} (4-α)(3-α)^3 (2-α)^{α-2}`.
pub fn c_alpha_dash(alpha: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    Ok((4.0 - alpha) * (3.0 - alpha).powi(3) * (2.0 - alpha).powf(alpha - 2.0) / (alpha - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub alpha: f64,
    pub c_alpha: f64,
    pub c_alpha_dash: f64,
    pub c_alpha_double_dash: f64,
    /// `1 / C''_α`.
    pub c_alpha_prime: f64,
    /// Maximiser of the `C''_α` objective.
    pub argmax: f64,
}

/// Objective `min(C-2, u_α(3(C-1)/2)) / (C+1)` of the `C''_α` supremum.
pub fn c_double_dash_objective(alpha: f64, big_c: f64, tol: f64) -> Result<f64> {
    let u = u_alpha_w(alpha, 1.5 * (big_c - 1.0), tol)?.value;
    Ok((big_c - 2.0).min(u) / (big_c + 1.0))
}

/// All four growth constants. The supremum defining `C''_α` is located by a
/// grid scan over `[C'_α + 1e-6, 10^3]` (geometric in the distance to
/// `C'_α`) followed by golden-section refinement to `1e-8`.
pub fn growth_constants(alpha: f64, tol: f64) -> Result<GrowthConstants> {
    let c = c_alpha(alpha)?;
    let cd = c_alpha_dash(alpha)?;
    let lo = cd + 1e-6;
    let hi = 1e3;
    if !(lo < hi) {
        return Err(Error::Numeric {
            what: "C''_alpha bracket is empty".into(),
            estimate: cd,
            error: f64::NAN,
        });
    }
    let f = |x: f64| c_double_dash_objective(alpha, x, tol);
    const GRID: usize = 400;
    let ratio = ((hi - cd) / (lo - cd)).powf(1.0 / (GRID - 1) as f64);
    let grid: Vec<f64> = (0..GRID).map(|i| cd + (lo - cd) * ratio.powi(i as i32)).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let best = (0..GRID).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty grid");
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut iters = 0;
    while b - a > 1e-8 {
        iters += 1;
        if iters > 500 {
            return Err(Error::Numeric {
                what: "golden-section search for C''_alpha did not converge".into(),
                estimate: f1.max(f2),
                error: b - a,
            });
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2)?;
        }
    }
    let mut arg = 0.5 * (a + b);
    let mut sup = f(arg)?;
    for (&x, &v) in [(&a, &f(a)?), (&b, &f(b)?), (&grid[best], &vals[best])] {
        if v > sup {
            sup = v;
            arg = x;
        }
    }
    let cdd = 2.0 + sup;
    Ok(GrowthConstants {
        alpha,
        c_alpha: c,
        c_alpha_dash: cd,
        c_alpha_double_dash: cdd,
        c_alpha_prime: 1.0 / cdd,
        argmax: arg,
    })
}

/// Upper bound on `sup_{δ ≤ y ≤ 1} q_α(y; c)`:
/// `1 - (Γ(α)/Γ(α/2)^2) ∫_{1-δ}^1 u^{α/2-1}(1-u)^{α/2-1} du`, independent of `c`.
pub fn q_upper_strict(alpha: f64, delta: f64, c: f64, tol: f64) -> Result<Value> {
    check_alpha_open(alpha)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, 1]")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c = {c} must be positive")));
    }
    let norm = 1.0 / symmetric_beta(alpha);
    let e = symmetric_beta_integral(alpha, 1.0 - delta, 1.0, tol / norm)?;
    probability(
        "q_upper_strict",
        Estimate {
            value: 1.0 - norm * e.value,
            error: norm * e.error,
        },
        tol,
    )
}

/// Default tolerance re-exported for callers that only need this module.
pub const TOLERANCE: f64 = DEFAULT_TOLERANCE;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_stream;
    use rand::Rng;

    const TOL: f64 = TOLERANCE;

    #[test]
    fn q2_examples() {
        assert_eq!(q2(0.0, 3.0).unwrap(), 1.0);
        assert_eq!(q2(1.0, 0.5).unwrap(), 0.0);
        assert!((q2(0.3, 1.0).unwrap() - 0.7).abs() < 1e-15);
        assert!(q2(1.2, 1.0).is_err());
    }

    #[test]
    fn q_alpha_endpoints() {
        for alpha in [1.1, 1.5, 1.9] {
            assert_eq!(q_alpha(alpha, 0.0, 0.7, TOL).unwrap().value, 1.0);
            assert_eq!(q_alpha(alpha, 1.0, 0.7, TOL).unwrap().value, 0.0);
            // approach to 1 as y ↓ 0, squeezed by the closed-form minorant
            let mut prev = 0.0;
            for y in [1e-3, 1e-6, 1e-9, 1e-12] {
                let q = q_alpha(alpha, y, 1.0, TOL).unwrap().value;
                assert!(q > prev && q >= u_alpha_yc(alpha, y, 1.0).unwrap() - 1e-9);
                prev = q;
            }
            assert!(1.0 - prev <= 1.0 - u_alpha_yc(alpha, 1e-12, 1.0).unwrap() + 1e-9);
        }
    }

    #[test]
    fn q_alpha_against_plain_quadrature() {
        // direct v-integral with an algebraic split of the singular endpoint:
        // ∫_y^1 g(v)(1-v)^{a-1} dv = g(1)(1-y)^a/a + ∫_y^1 (g(v)-g(1))(1-v)^{a-1} dv
        for &(alpha, y, c) in &[(1.5, 0.5, 1.0), (1.3, 0.2, 2.5), (1.8, 0.9, 0.4)] {
            let a: f64 = alpha / 2.0;
            let g = |v: f64| (y + c * v).powf(-alpha);
            let rest = integrate(|v| (g(v) - g(1.0)) * (1.0 - v).powf(a - 1.0), y, 1.0, 1e-13).unwrap();
            let inner = g(1.0) * (1.0 - y).powf(a) / a + rest.value;
            let pre = (alpha - 1.0) * c.powf(1.0 - a) * (1.0 + c).powf(alpha - 1.0) * (y + c).powf(a) * y.powf(alpha - 1.0);
            let q = q_alpha(alpha, y, c, TOL).unwrap();
            assert!((q.value - pre * inner).abs() < 1e-9, "{} vs {}", q.value, pre * inner);
            assert!(q.error <= TOL);
        }
    }

    #[test]
    fn q_alpha_bounds_and_monotonicity() {
        for alpha in [1.1, 1.5, 1.9] {
            for c in [0.25, 1.0, 4.0] {
                for y in [0.05, 0.25, 0.5, 0.75, 0.95] {
                    let q = q_alpha(alpha, y, c, TOL).unwrap().value;
                    assert!(q >= q_alpha_lower_bound(alpha, y, c).unwrap() - TOL);
                    assert!(q >= u_alpha_yc(alpha, y, c).unwrap() - 1e-9);
                    assert!(q <= q_alpha(alpha, y, 2.0 * c, TOL).unwrap().value + TOL);
                }
            }
        }
    }

    #[test]
    fn q_alpha_near_two() {
        for i in 1..=9 {
            let y = i as f64 / 10.0;
            assert!((q_alpha(1.99, y, 1.0, TOL).unwrap().value - (1.0 - y)).abs() <= 0.02);
        }
    }

    #[test]
    fn beta_identity() {
        for alpha in [1.1, 1.5, 1.9] {
            let full = symmetric_beta_integral(alpha, 0.0, 1.0, 1e-12).unwrap().value;
            let half = symmetric_beta_integral(alpha, 0.5, 1.0, 1e-12).unwrap().value;
            assert!((full - symmetric_beta(alpha)).abs() < 1e-8);
            assert!((2.0 * half - full).abs() < 1e-10);
        }
    }

    #[test]
    fn gambler_examples() {
        for alpha in [1.1, 1.5, 1.9, 2.0] {
            assert!((gambler_limit(alpha, 1.0, TOL).unwrap().value - 0.5).abs() < 1e-9);
            assert_eq!(gambler_limit(alpha, 0.0, TOL).unwrap().value, 0.0);
        }
        assert!((gambler_limit(2.0, 3.0, TOL).unwrap().value - 0.75).abs() < 1e-15);
        // α = 3/2: closed form via u = sin²θ is unavailable, so check symmetry P(c) + P(1/c) = 1
        for c in [0.3, 2.0, 7.0] {
            let s = gambler_limit(1.5, c, TOL).unwrap().value + gambler_limit(1.5, 1.0 / c, TOL).unwrap().value;
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dynkin_lamperti_examples() {
        for alpha in [0.5, 1.1, 1.5, 1.9] {
            assert!((dynkin_lamperti_tail(alpha, 0.0, TOL).unwrap().value - 1.0).abs() < 1e-9);
            let mut prev = f64::INFINITY;
            for v in [0.01, 0.1, 1.0, 10.0, 100.0] {
                let f = dynkin_lamperti_density(alpha, v).unwrap();
                assert!(f < prev);
                prev = f;
            }
        }
        // α = 1: f = 1/(π √v (1+v)), tail = 1 - (2/π) atan(√u)
        for u in [0.5, 1.0, 2.0] {
            let t = dynkin_lamperti_tail(1.0, u, TOL).unwrap().value;
            assert!((t - (1.0 - 2.0 / PI * u.sqrt().atan())).abs() < 1e-10);
        }
        // independent route for u = 1: v = 1/s gives k ∫_0^1 s^{a-1}/(1+s) ds
        let k = (PI * 0.75).sin() / PI;
        let direct = k * jacobi_integral(0.75, 1.0, 0.0, 1.0, |s| 1.0 / (1.0 + s), 1e-12).unwrap().value;
        assert!((dynkin_lamperti_tail(1.5, 1.0, TOL).unwrap().value - direct).abs() < 1e-9);
    }

    #[test]
    fn lower_envelope_examples() {
        let v = q_lower_envelope(1.5, 1.5, 1.75).unwrap();
        assert!((v - 0.2 * (0.25f64 / 1.75).powf(0.25)).abs() < 1e-15);
        assert!(q_lower_envelope(1.5, 1.5, 1.5 + 1e-12).unwrap() < 1e-2);
        let h: f64 = 1e-4;
        let v = q_lower_envelope(2.0 - 1e-9, 1.0 + h, 1.0 + h + h * h).unwrap();
        assert!((v - 0.5).abs() < 1e-3);
        assert!(q_lower_envelope(1.5, 0.5, 2.0).is_err());
    }

    #[test]
    fn u_alpha_shape_and_monte_carlo() {
        let mut prev = 1.0;
        for w in [1.001, 1.5, 3.0, 10.0, 1e3, 1e6] {
            let u = u_alpha_w(1.5, w, TOL).unwrap().value;
            assert!(u < prev && u > 0.0);
            prev = u;
        }
        assert!(prev < 1e-3);
        // Monte Carlo: v = 2 + Pareto(1) draw, importance weight 1/density
        let alpha: f64 = 1.5;
        let a = alpha / 2.0;
        let k = 2f64.powf(a - 1.0) * (alpha - 1.0) * (PI * a).sin() / PI;
        let mut rng = replica_stream(30, 0);
        let n = 200_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let v = 2.0 / u; // Pareto on [2, ∞), density 2/v²
                let g = 1.0 / (v.powf(a) * (2.0 + v).powf(a) * (1.0 + v));
                k * g * v * v / 2.0
            })
            .collect();
        let m = vals.iter().sum::<f64>() / n as f64;
        let se = (vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt();
        let q = u_alpha_w(alpha, 3.0, TOL).unwrap().value;
        assert!((m - q).abs() < 3.0 * se, "{m} ± {se} vs {q}");
    }

    #[test]
    fn growth_constant_identities() {
        for alpha in [1.1, 1.5, 1.9] {
            assert!((c_alpha(alpha).unwrap() * c_alpha_dash(alpha).unwrap() - 1.0).abs() < 1e-12);
        }
        let c15 = c_alpha(1.5).unwrap();
        assert!((c15 - 0.5 * 0.5f64.sqrt() / (2.5 * 3.375)).abs() < 1e-15);
        assert!((c15 - 0.04190).abs() < 1e-5);
        let (a, b) = (c_alpha(1.99).unwrap(), c_alpha(1.999).unwrap());
        assert!(a < b && b < 0.5);
        assert!((a - 0.456_535_985_762_679_4).abs() < 1e-12);
        assert!((b - 0.494_329_088_658_981_7).abs() < 1e-12);
        for alpha in [1.1, 1.5, 1.9, 1.99] {
            let g = growth_constants(alpha, 1e-10).unwrap();
            assert!(g.c_alpha_double_dash > 2.0 && g.c_alpha_prime < 0.5);
            assert!(g.c_alpha <= g.c_alpha_prime);
            assert!(g.argmax > g.c_alpha_dash);
        }
    }

    #[test]
    fn upper_strict_examples() {
        assert!(q_upper_strict(1.5, 1e-9, 1.0, TOL).unwrap().value > 0.999);
        assert!(q_upper_strict(1.5, 1.0, 1.0, TOL).unwrap().value.abs() < 1e-9);
        let b = q_upper_strict(1.5, 0.25, 1.0, TOL).unwrap().value;
        assert!(b < 1.0);
        for y in [0.25, 0.5, 0.75, 0.95] {
            assert!(q_alpha(1.5, y, 1.0, TOL).unwrap().value <= b);
        }
    }
}
