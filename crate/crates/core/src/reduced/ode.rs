//! Adaptive Dormand-Prince 5(4) with fourth-order dense output.

use core::ops::ControlFlow;

use num_traits::Float;

use crate::error::{CoreError, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    r: [[f64; N]; 4],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        core::array::from_fn(|i| {
            let [r2, r3, r4, r5] = [self.r[0][i], self.r[1][i], self.r[2][i], self.r[3][i]];
            self.y0[i] + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_max: f64::INFINITY, max_steps: 5_000_000 }
    }
}

fn combine<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], a: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, c) in ks.iter().zip(a) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t_end`, handing each accepted step to
    /// `observe`. Returns the final time and state, which precede `t_end` when the
    /// observer breaks.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut observe: O,
    ) -> Result<(f64, [f64; N])>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
        O: FnMut(&DenseStep<N>) -> ControlFlow<()>,
    {
        let (mut t, mut y) = (t0, y0);
        if t_end <= t0 {
            return Ok((t, y));
        }
        let mut k1 = f(t, &y)?;
        let mut h = (1e-3 * (t_end - t0)).min(self.h_max).min(1e-2);
        let mut steps = 0usize;
        while t < t_end {
            steps += 1;
            if steps > self.max_steps {
                return Err(CoreError::Integration { t, reason: "step budget exhausted" });
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let stages = (|| -> Result<_> {
                let k2 = f(t + C[1] * h, &combine(&y, h, &[k1], &A2))?;
                let k3 = f(t + C[2] * h, &combine(&y, h, &[k1, k2], &A3))?;
                let k4 = f(t + C[3] * h, &combine(&y, h, &[k1, k2, k3], &A4))?;
                let k5 = f(t + C[4] * h, &combine(&y, h, &[k1, k2, k3, k4], &A5))?;
                let k6 = f(t + h, &combine(&y, h, &[k1, k2, k3, k4, k5], &A6))?;
                let y1 = combine(&y, h, &[k1, k2, k3, k4, k5, k6], &B);
                let k7 = f(t + h, &y1)?;
                Ok(([k1, k2, k3, k4, k5, k6, k7], y1))
            })();
            let (ks, y1) = match stages {
                Ok(v) => v,
                // A trial point left the domain: shrink and retry.
                Err(_) if h > 1e-14 * t.abs().max(1.0) => {
                    h *= 0.25;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut err = 0.0;
            for i in 0..N {
                let e: f64 = (0..7).map(|s| E[s] * ks[s][i]).sum::<f64>() * h;
                let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = Float::sqrt(err / N as f64);
            if !err.is_finite() {
                h *= 0.25;
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * Float::powf(err, -0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                let mut r = [[0.0; N]; 4];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = h * ks[0][i] - dy;
                    r[0][i] = dy;
                    r[1][i] = bspl;
                    r[2][i] = dy - h * ks[6][i] - bspl;
                    r[3][i] = h * (0..7).map(|s| D[s] * ks[s][i]).sum::<f64>();
                }
                let step = DenseStep { t0: t, h, y0: y, y1, r };
                t = if last { t_end } else { t + h };
                y = y1;
                k1 = ks[6];
                if observe(&step).is_break() {
                    return Ok((t, y));
                }
                h = (h * fac).min(self.h_max);
            } else {
                h *= fac.min(1.0);
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(CoreError::Integration { t, reason: "step size underflow" });
            }
        }
        Ok((t, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let tau = core::f64::consts::TAU;
        let mut max_dense_err: f64 = 0.0;
        let (t, y) = Dopri5::default()
            .integrate(
                |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
                0.0,
                [1.0, 0.0],
                tau,
                |s| {
                    let tm = s.t0 + 0.37 * s.h;
                    let v = s.eval(tm);
                    max_dense_err = max_dense_err.max((v[0] - tm.cos()).abs());
                    ControlFlow::Continue(())
                },
            )
            .unwrap();
        assert_eq!(t, tau);
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
        assert!(max_dense_err < 1e-9);
    }

    #[test]
    fn exponential_growth() {
        let (_, y) = Dopri5::default()
            .integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 2.0, |_| ControlFlow::Continue(()))
            .unwrap();
        assert!((y[0] - 2.0f64.exp()).abs() < 1e-10);
    }
}
