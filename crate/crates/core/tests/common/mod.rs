//! Reference computations that share no code with the library: enumeration via
//! Stern's diatomic sequence, direct summation for φ, and a midpoint Nyström method
//! in `τ = √s` with prefix sums for the Green operator.

#![allow(dead_code)]

/// `fusc(n)`: `fusc(2n) = fusc(n)`, `fusc(2n + 1) = fusc(n) + fusc(n + 1)`.
pub fn fusc(mut n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    while n > 0 {
        if n & 1 == 1 {
            b += a;
        } else {
            a += b;
        }
        n >>= 1;
    }
    b
}

/// `q_1 = 0`, `q_{2k} = c_k`, `q_{2k+1} = -c_k` with `c_k = fusc(k)/fusc(k+1)`.
pub fn rationals(depth: usize) -> Vec<f64> {
    (1..=depth)
        .map(|n| {
            if n == 1 {
                0.0
            } else {
                let k = (n / 2) as u64;
                let c = fusc(k) as f64 / fusc(k + 1) as f64;
                if n % 2 == 0 {
                    c
                } else {
                    -c
                }
            }
        })
        .collect()
}

pub struct Phi {
    q: Vec<f64>,
}

impl Phi {
    pub fn new(depth: usize) -> Self {
        Self { q: rationals(depth) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut s = 0.0;
        let mut w = 1.0;
        for &q in &self.q {
            w *= 0.5;
            if q < x {
                s += w;
            }
        }
        s
    }
}

pub fn example_f(phi: &Phi, t: f64, u: f64, v: f64) -> f64 {
    (2.0 - phi.eval(u - t * t)) / t.sqrt() + phi.eval(v - t * t) * u.powi(3)
}

pub fn omega(t: f64) -> f64 {
    (1.0 + 2.0 * t).max(0.0).sqrt()
}

/// Vertex function of the delay problem: `ω` on `[-1/2, 0]`, `(1 - t) ω(0)` after.
pub fn vertex(t: f64) -> f64 {
    if t <= 0.0 {
        omega(t)
    } else {
        1.0 - t
    }
}

pub fn green(t: f64, s: f64) -> f64 {
    if t <= s {
        t * (1.0 - s)
    } else {
        (1.0 - t) * s
    }
}

/// Midpoint rule in `τ` on `[0, 1]` for `∫₀¹ g(s) ds = ∫₀¹ g(τ²) 2τ dτ`.
pub struct Nystrom {
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    phi: Phi,
}

impl Nystrom {
    pub fn new(cells: usize) -> Self {
        let h = 1.0 / cells as f64;
        let tau: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
        Self {
            s: tau.iter().map(|t| t * t).collect(),
            w: tau.iter().map(|t| 2.0 * t * h).collect(),
            phi: Phi::new(40),
        }
    }

    /// `u(s - 1/2)` from the history or by linear interpolation of `u` at the points.
    fn deviated(&self, u: &[f64], s: f64) -> f64 {
        let x = s - 0.5;
        if x <= 0.0 {
            return omega(x);
        }
        let k = self.s.partition_point(|&p| p < x);
        if k == 0 {
            // between t = 0 (u = 1) and the first point
            let a = self.s[0];
            return 1.0 + (u[0] - 1.0) * x / a;
        }
        if k == self.s.len() {
            let a = self.s[k - 1];
            return u[k - 1] * (1.0 - x) / (1.0 - a);
        }
        let (a, b) = (self.s[k - 1], self.s[k]);
        u[k - 1] + (u[k] - u[k - 1]) * (x - a) / (b - a)
    }

    /// Weighted integrand values `F_k w_k` for the state `u` at the points.
    pub fn weighted(&self, u: &[f64]) -> Vec<f64> {
        self.s
            .iter()
            .zip(&self.w)
            .enumerate()
            .map(|(k, (&s, &w))| example_f(&self.phi, s, u[k].max(0.0), self.deviated(u, s).max(0.0)) * w)
            .collect()
    }

    /// `Tu` at the points by prefix sums.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let fw = self.weighted(u);
        let n = self.s.len();
        let mut tail: f64 = self.s.iter().zip(&fw).map(|(s, f)| (1.0 - s) * f).sum();
        let mut head = 0.0;
        let mut out = vec![0.0; n];
        for j in 0..n {
            let t = self.s[j];
            out[j] = (1.0 - t) * head + t * tail;
            head += t * fw[j];
            tail -= (1.0 - t) * fw[j];
        }
        out
    }

    /// `Tu(t)` at an arbitrary `t` by the Nyström formula.
    pub fn apply_at(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        let fw = self.weighted(u);
        ts.iter()
            .map(|&t| self.s.iter().zip(&fw).map(|(&s, &f)| green(t, s) * f).sum())
            .collect()
    }

    pub fn vertex(&self) -> Vec<f64> {
        self.s.iter().map(|&s| vertex(s)).collect()
    }

    /// Picard iteration for `u = y + λTu` at the points.
    pub fn solve(&self, lambda: f64, tol: f64) -> Vec<f64> {
        let y = self.vertex();
        let mut u = y.clone();
        for _ in 0..500 {
            let tu = self.apply(&u);
            let mut step: f64 = 0.0;
            for k in 0..u.len() {
                let next = y[k] + lambda * tu[k];
                step = step.max((next - u[k]).abs());
                u[k] = next;
            }
            if step < tol {
                return u;
            }
        }
        panic!("oracle iteration did not converge");
    }

    /// Iteration on `‖u - y‖ = ρ` with `λ = ρ/‖Tu‖`; returns `(λ, u)`.
    pub fn fixed_radius(&self, rho: f64, tol: f64) -> (f64, Vec<f64>) {
        let y = self.vertex();
        let tu = self.apply(&y);
        let m = tu.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let mut u: Vec<f64> = y.iter().zip(&tu).map(|(a, b)| a + rho * b / m).collect();
        for _ in 0..5000 {
            let tu = self.apply(&u);
            let m = tu.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            let lambda = rho / m;
            let mut step: f64 = 0.0;
            for k in 0..u.len() {
                let p = y[k] + lambda * tu[k];
                step = step.max((p - u[k]).abs());
                u[k] = 0.5 * u[k] + 0.5 * p;
            }
            if step < tol {
                let tu = self.apply(&u);
                let m = tu.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
                return (rho / m, u);
            }
        }
        panic!("oracle fixed-radius iteration did not converge");
    }
}

/// Golden-section maximisation of a unimodal `g` on `[a, b]`.
pub fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while b - a > tol {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

/// `∫_{1/4}^{3/4} G(t, s) s^{-1/2} ds` in closed form.
pub fn delta_integral_sqrt(t: f64) -> f64 {
    let lo: f64 = 0.25;
    let hi: f64 = 0.75;
    let left = (1.0 - t) * (2.0 / 3.0) * (t.powf(1.5) - lo.powf(1.5));
    let right = t * ((2.0 * hi.sqrt() - 2.0 / 3.0 * hi.powf(1.5)) - (2.0 * t.sqrt() - 2.0 / 3.0 * t.powf(1.5)));
    left + right
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
