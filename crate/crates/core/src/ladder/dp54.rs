//! Adaptive Dormand–Prince 5(4) stepping between fixed stop times.

use crate::error::SolverError;

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
// fifth-order weights (also the last stage row)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 1_000_000;

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub atol: f64,
    pub rtol: f64,
    pub max_step: Option<f64>,
}

/// Scratch space for one system size.
#[derive(Debug, Clone)]
pub struct Dp54 {
    control: StepControl,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    /// Step size carried between calls.
    h: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Dp54 {
    pub fn new(dim: usize, control: StepControl) -> Self {
        Dp54 {
            control,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            y_new: vec![0.0; dim],
            h: None,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances `y` from `t0` to exactly `t1` under `dy/dt = f(t, y)`.
    ///
    /// `check` sees every accepted state and may abort the integration.
    pub fn integrate<F, C>(
        &mut self,
        mut f: F,
        t0: f64,
        t1: f64,
        y: &mut [f64],
        mut check: C,
    ) -> Result<(), SolverError>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        C: FnMut(f64, &[f64]) -> Result<(), SolverError>,
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let dim = y.len();
        let StepControl { atol, rtol, max_step } = self.control;
        let h_cap = max_step.unwrap_or(f64::INFINITY).min(span);
        let mut h = self.h.unwrap_or(span * 0.1).min(h_cap);
        let mut t = t0;
        f(t, y, &mut self.k[0]);
        let mut steps = 0;
        while t < t1 {
            let last = t + h >= t1 || (t1 - t - h) < 1e-12 * span;
            if last {
                h = t1 - t;
            }
            steps += 1;
            if steps > MAX_STEPS || h <= 1e-14 * t1.abs().max(1.0) {
                return Err(SolverError::StepFailure { t, h });
            }
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let tmp = &mut self.tmp;
            for i in 0..dim {
                tmp[i] = y[i] + h * A21 * k1[i];
            }
            f(t + C2 * h, tmp, k2);
            for i in 0..dim {
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, tmp, k3);
            for i in 0..dim {
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, tmp, k4);
            for i in 0..dim {
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, tmp, k5);
            for i in 0..dim {
                tmp[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let t_new = if last { t1 } else { t + h };
            f(t_new, tmp, k6);
            let y_new = &mut self.y_new;
            for i in 0..dim {
                y_new[i] = y[i]
                    + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            f(t_new, y_new, k7);
            let mut err = 0.0;
            for i in 0..dim {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / dim.max(1) as f64).sqrt();
            if !err.is_finite() {
                self.rejected += 1;
                h *= 0.2;
                continue;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.accepted += 1;
                t = t_new;
                y.copy_from_slice(y_new);
                std::mem::swap(k1, k7);
                check(t, y)?;
                if !last {
                    self.h = Some(h);
                }
                h = (h * factor).min(h_cap);
            } else {
                self.rejected += 1;
                h *= factor.min(1.0);
            }
        }
        Ok(())
    }
}
