//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients `c[0..=order]` of a function around
//! a fixed expansion point. Seeding with `x + ε` and pushing the jet through an
//! expression yields every derivative of that expression at `x` to working
//! precision, which is how closed-form superpotentials, potentials and
//! wavefunctions obtain their derivatives without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<C64>,
}

impl Jet {
    /// The independent variable `x + ε`, truncated after `order`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = C64::new(x, 0.0);
        if order >= 1 {
            c[1] = C64::new(1.0, 0.0);
        }
        Jet { c }
    }

    pub fn constant(value: C64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = value;
        Jet { c }
    }

    pub fn from_coefficients(c: Vec<C64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.c
    }

    /// Derivatives `f, f', f'', ...` (coefficient `m` times `m!`).
    pub fn derivatives(&self) -> Vec<C64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(m, &a)| {
                if m > 0 {
                    fact *= m as f64;
                }
                a * fact
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { c: self.c.iter().map(|&a| a * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|&a| a * s).collect() }
    }

    pub fn add_const(&self, s: C64) -> Jet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    fn zeros_like(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.c.len()]
    }

    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut r = self.zeros_like();
        r[0] = a0.inv();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s / a0;
        }
        Jet { c: r }
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = self.zeros_like();
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut l = self.zeros_like();
        l[0] = a0.ln();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..k {
                s += l[j] * self.c[k - j] * j as f64;
            }
            l[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: l }
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = self.zeros_like();
        let mut c = self.zeros_like();
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let mut ss = C64::new(0.0, 0.0);
            let mut cc = C64::new(0.0, 0.0);
            for j in 1..=k {
                let ja = self.c[j] * j as f64;
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Jet {
        let (s, c) = self.sin_cos();
        &s / &c
    }

    pub fn sec(&self) -> Jet {
        self.cos().recip()
    }

    pub fn csc(&self) -> Jet {
        self.sin().recip()
    }

    pub fn cot(&self) -> Jet {
        let (s, c) = self.sin_cos();
        &c / &s
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(C64::new(1.0, 0.0), self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, slot) in out.iter_mut().enumerate() {
            for j in 0..=k {
                *slot += self.c[j] * rhs.c[k - j];
            }
        }
        Jet { c: out }
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let b0 = rhs.c[0];
        let mut q = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= rhs.c[j] * q[k - j];
            }
            q[k] = s / b0;
        }
        Jet { c: q }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|a| -a).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}
