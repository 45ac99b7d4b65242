//! Dormand–Prince 5(4) explicit Runge–Kutta integrator with adaptive steps
//! for complex state vectors.

use crate::{Error, Result, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Tolerances and limits of one integration.
#[derive(Debug, Clone, Copy)]
pub struct DopriOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size.
    pub max_step: f64,
}

/// Work counters of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

fn lincomb(y: &[C64], h: f64, terms: &[(f64, &[C64])], out: &mut [C64]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        if a != 0.0 {
            let s = h * a;
            for (o, ki) in out.iter_mut().zip(k) {
                *o += ki * s;
            }
        }
    }
}

/// Integrate `dy/dt = f(t, y)` from `t_grid[0]`, calling `observe(i, t_i, y)`
/// at every grid time (including the first). Steps are clipped to land on
/// grid times exactly.
pub fn integrate(
    mut f: impl FnMut(f64, &[C64], &mut [C64]),
    t_grid: &[f64],
    y0: &[C64],
    opts: &DopriOptions,
    mut observe: impl FnMut(usize, f64, &[C64]) -> Result<()>,
) -> Result<StepStats> {
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut t = t_grid[0];
    observe(0, t, &y)?;
    if t_grid.len() == 1 {
        return Ok(stats);
    }
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];
    f(t, &y, &mut k[0]);
    stats.rhs_evals += 1;
    let scale = |a: &[C64], b: &[C64], i: usize| opts.atol + opts.rtol * a[i].norm().max(b[i].norm());
    // Initial step from the derivative magnitude.
    let d0 = (y.iter().enumerate().map(|(i, v)| (v.norm() / scale(&y, &y, i)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (k[0].iter().enumerate().map(|(i, v)| (v.norm() / scale(&y, &y, i)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(opts.max_step).min(t_grid[t_grid.len() - 1] - t);
    let mut steps = 0usize;
    for (gi, &target) in t_grid.iter().enumerate().skip(1) {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Solver(format!("exceeded {} integration steps at t = {t}", opts.max_steps)));
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let hs = if clipped { remaining } else { h };
            if hs < 1e-14 * t.abs().max(1.0) && !clipped {
                return Err(Error::Stiffness { t, h: hs });
            }
            {
                let (k0, rest) = k.split_at_mut(1);
                lincomb(&y, hs, &[(A21, &k0[0])], &mut tmp);
                f(t + C2 * hs, &tmp, &mut rest[0]);
            }
            lincomb(&y, hs, &[(A31, &k[0]), (A32, &k[1])], &mut tmp);
            f(t + C3 * hs, &tmp, &mut k[2]);
            lincomb(&y, hs, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])], &mut tmp);
            f(t + C4 * hs, &tmp, &mut k[3]);
            lincomb(&y, hs, &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])], &mut tmp);
            f(t + C5 * hs, &tmp, &mut k[4]);
            lincomb(&y, hs, &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])], &mut tmp);
            f(t + hs, &tmp, &mut k[5]);
            lincomb(&y, hs, &[(A71, &k[0]), (A73, &k[2]), (A74, &k[3]), (A75, &k[4]), (A76, &k[5])], &mut ynew);
            f(t + hs, &ynew, &mut k[6]);
            stats.rhs_evals += 6;
            steps += 1;
            let mut err2 = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * hs;
                err2 += (e.norm() / scale(&y, &ynew, i)).powi(2);
            }
            let err = (err2 / n as f64).sqrt();
            if err <= 1.0 {
                stats.accepted += 1;
                t = if clipped { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // Do not let a short clipped step shrink the next step.
                h = (hs.max(if clipped { h } else { 0.0 }) * fac).min(opts.max_step);
            } else {
                stats.rejected += 1;
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = hs * fac;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Stiffness { t, h });
                }
            }
        }
        observe(gi, t, &y)?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> DopriOptions {
        DopriOptions { rtol: 1e-10, atol: 1e-12, max_steps: 100_000, max_step: f64::INFINITY }
    }

    #[test]
    fn oscillating_decay_is_accurate() {
        let lam = C64::new(-0.3, 5.0);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let mut worst: f64 = 0.0;
        integrate(
            |_, y, dy| dy[0] = lam * y[0],
            &grid,
            &[C64::new(1.0, 0.0)],
            &opts(),
            |_, t, y| {
                worst = worst.max((y[0] - (lam * t).exp()).norm());
                Ok(())
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "max error {worst}");
    }

    #[test]
    fn time_dependent_forcing() {
        // y' = cos t → y = sin t.
        let grid = [0.0, 1.0, 2.0, 3.0];
        let mut last = C64::new(0.0, 0.0);
        integrate(|t, _, dy| dy[0] = C64::new(t.cos(), 0.0), &grid, &[C64::new(0.0, 0.0)], &opts(), |_, _, y| {
            last = y[0];
            Ok(())
        })
        .unwrap();
        assert!((last.re - 3.0f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn step_budget_is_enforced() {
        let o = DopriOptions { max_steps: 3, ..opts() };
        let r = integrate(|_, y, dy| dy[0] = y[0] * C64::new(0.0, 100.0), &[0.0, 10.0], &[C64::new(1.0, 0.0)], &o, |_, _, _| Ok(()));
        assert!(r.is_err());
    }
}
