//! Dormand-Prince 5(4) with the standard fourth-order continuous extension.

pub const DIM: usize = 3;
pub type State = [f64; DIM];

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
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..DIM {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
pub struct Step {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    rcont: [State; 5],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t0 + theta * h`, `theta` in [0, 1].
    pub fn dense(&self, theta: f64) -> State {
        let r = &self.rcont;
        let t1 = 1.0 - theta;
        let mut out = [0.0; DIM];
        for i in 0..DIM {
            out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        out
    }
}

pub struct Stepper<F: Fn(&State) -> State> {
    pub f: F,
    pub rtol: f64,
    pub atol: f64,
    pub h: f64,
    k1: Option<State>,
}

pub enum Attempt {
    Accepted(Step),
    Rejected,
}

impl<F: Fn(&State) -> State> Stepper<F> {
    pub fn new(f: F, tol: f64, h0: f64) -> Self {
        Stepper { f, rtol: tol, atol: tol, h: h0, k1: None }
    }

    /// Forget the cached first stage (after a discontinuous state change).
    pub fn reset(&mut self) {
        self.k1 = None;
    }

    pub fn attempt(&mut self, t: f64, y: &State, h_max: f64) -> Attempt {
        let h = self.h.min(h_max);
        let f = &self.f;
        let k1 = self.k1.unwrap_or_else(|| f(y));
        let k2 = f(&axpy(y, &[(A21, &k1)], h));
        let k3 = f(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(&axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = f(&axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y1 = axpy(y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
        let k7 = f(&y1);
        let mut err = 0.0f64;
        for i in 0..DIM {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
            let r = (e / sc).abs();
            // f64::max drops NaN operands
            err = if r.is_nan() || !y1[i].is_finite() { f64::INFINITY } else { err.max(r) };
        }
        if !err.is_finite() {
            self.h = h * 0.1;
            self.k1 = Some(k1);
            return Attempt::Rejected;
        }
        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        if err <= 1.0 {
            let mut rcont = [[0.0; DIM]; 5];
            for i in 0..DIM {
                let dy = y1[i] - y[i];
                let bspl = h * k1[i] - dy;
                rcont[0][i] = y[i];
                rcont[1][i] = dy;
                rcont[2][i] = bspl;
                rcont[3][i] = dy - h * k7[i] - bspl;
                rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            self.k1 = Some(k7);
            self.h = h * fac;
            Attempt::Accepted(Step { t0: t, h, y0: *y, y1, rcont })
        } else {
            self.k1 = Some(k1);
            self.h = h * fac.min(1.0);
            Attempt::Rejected
        }
    }
}
