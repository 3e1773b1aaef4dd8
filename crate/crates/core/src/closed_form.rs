//! Evaluable analytic expressions with exact derivatives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::jet::Jet;

/// A finite union of arithmetic progressions `offset + m·period` (or isolated
/// points), used for pole and zero sets of trigonometric expressions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoleSet {
    lattices: Vec<(f64, Option<f64>)>,
}

impl PoleSet {
    pub fn empty() -> Self {
        PoleSet::default()
    }

    pub fn point(x: f64) -> Self {
        PoleSet { lattices: vec![(x, None)] }
    }

    pub fn periodic(offset: f64, period: f64) -> Self {
        assert!(period > 0.0, "lattice period must be positive");
        PoleSet { lattices: vec![(offset, Some(period.abs()))] }
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn union(&self, other: &PoleSet) -> PoleSet {
        let mut lattices = self.lattices.clone();
        for l in &other.lattices {
            if !lattices.contains(l) {
                lattices.push(*l);
            }
        }
        PoleSet { lattices }
    }

    /// Pole set of `x ↦ f(x + a)` given the pole set of `f`.
    pub fn shifted(&self, a: f64) -> PoleSet {
        PoleSet { lattices: self.lattices.iter().map(|&(o, p)| (o - a, p)).collect() }
    }

    /// Members in the closed interval `[lo, hi]`, sorted and deduplicated.
    pub fn within(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &(offset, period) in &self.lattices {
            match period {
                None => {
                    if offset >= lo && offset <= hi {
                        out.push(offset);
                    }
                }
                Some(p) => {
                    let first = ((lo - offset) / p).ceil() as i64;
                    let last = ((hi - offset) / p).floor() as i64;
                    for m in first..=last {
                        out.push(offset + m as f64 * p);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        out
    }

    /// Members strictly inside `(lo, hi)`, ignoring those within `margin` of
    /// either end.
    pub fn interior(&self, lo: f64, hi: f64, margin: f64) -> Vec<f64> {
        self.within(lo + margin, hi - margin)
    }
}

type DerivFn = dyn Fn(f64, usize) -> Vec<C64> + Send + Sync;

/// A complex-valued function of a real variable that can report its value and
/// any number of derivatives at a point.
#[derive(Clone)]
pub struct ClosedFormFunction {
    f: Arc<DerivFn>,
    poles: PoleSet,
    zeros: PoleSet,
    primitive: Option<Arc<ClosedFormFunction>>,
}

impl fmt::Debug for ClosedFormFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormFunction")
            .field("poles", &self.poles)
            .field("zeros", &self.zeros)
            .field("has_primitive", &self.primitive.is_some())
            .finish()
    }
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0; m + 1];
    for i in 1..m {
        row[i] = row[i - 1] * (m - i + 1) as f64 / i as f64;
    }
    row
}

impl ClosedFormFunction {
    /// Wraps a routine returning `[f(x), f'(x), ..., f^(order)(x)]`.
    pub fn new(f: impl Fn(f64, usize) -> Vec<C64> + Send + Sync + 'static) -> Self {
        ClosedFormFunction { f: Arc::new(f), poles: PoleSet::empty(), zeros: PoleSet::empty(), primitive: None }
    }

    /// Builds a function from a jet expression in the seeded variable.
    pub fn from_jet(g: impl Fn(&Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self::new(move |x, order| g(&Jet::variable(x, order)).derivatives())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(move |_, order| {
            let mut d = vec![C64::new(0.0, 0.0); order + 1];
            d[0] = c;
            d
        })
    }

    pub fn identity() -> Self {
        Self::from_jet(|x| x.clone())
    }

    pub fn with_poles(mut self, poles: PoleSet) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_zeros(mut self, zeros: PoleSet) -> Self {
        self.zeros = zeros;
        self
    }

    /// Attaches an antiderivative `F` with `F' = self`.
    pub fn with_primitive(mut self, primitive: ClosedFormFunction) -> Self {
        self.primitive = Some(Arc::new(primitive));
        self
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    pub fn zeros(&self) -> &PoleSet {
        &self.zeros
    }

    pub fn primitive(&self) -> Option<&ClosedFormFunction> {
        self.primitive.as_deref()
    }

    pub fn derivatives(&self, x: f64, order: usize) -> Vec<C64> {
        (self.f)(x, order)
    }

    pub fn eval(&self, x: f64) -> C64 {
        (self.f)(x, 0)[0]
    }

    pub fn deriv1(&self, x: f64) -> C64 {
        (self.f)(x, 1)[1]
    }

    pub fn deriv2(&self, x: f64) -> C64 {
        (self.f)(x, 2)[2]
    }

    /// `f'` as a closed form.
    pub fn derivative(&self) -> ClosedFormFunction {
        let f = self.f.clone();
        ClosedFormFunction {
            f: Arc::new(move |x, order| {
                let mut d = f(x, order + 1);
                d.remove(0);
                d
            }),
            poles: self.poles.clone(),
            zeros: PoleSet::empty(),
            primitive: Some(Arc::new(self.clone())),
        }
    }

    /// `x ↦ f(x + a)`.
    pub fn shifted(&self, a: f64) -> ClosedFormFunction {
        let f = self.f.clone();
        ClosedFormFunction {
            f: Arc::new(move |x, order| f(x + a, order)),
            poles: self.poles.shifted(a),
            zeros: self.zeros.shifted(a),
            primitive: self.primitive.as_ref().map(|p| Arc::new(p.shifted(a))),
        }
    }

    /// Pointwise complex conjugate (the argument is real).
    pub fn conj(&self) -> ClosedFormFunction {
        let f = self.f.clone();
        ClosedFormFunction {
            f: Arc::new(move |x, order| f(x, order).into_iter().map(|v| v.conj()).collect()),
            poles: self.poles.clone(),
            zeros: self.zeros.clone(),
            primitive: self.primitive.as_ref().map(|p| Arc::new(p.conj())),
        }
    }

    pub fn scale(&self, s: C64) -> ClosedFormFunction {
        let f = self.f.clone();
        ClosedFormFunction {
            f: Arc::new(move |x, order| f(x, order).into_iter().map(|v| v * s).collect()),
            poles: self.poles.clone(),
            zeros: if s == C64::new(0.0, 0.0) { PoleSet::empty() } else { self.zeros.clone() },
            primitive: self.primitive.as_ref().map(|p| Arc::new(p.scale(s))),
        }
    }

    pub fn add_const(&self, c: C64) -> ClosedFormFunction {
        let f = self.f.clone();
        ClosedFormFunction {
            f: Arc::new(move |x, order| {
                let mut d = f(x, order);
                d[0] += c;
                d
            }),
            poles: self.poles.clone(),
            zeros: PoleSet::empty(),
            primitive: None,
        }
    }

    fn combine(
        &self,
        rhs: &ClosedFormFunction,
        op: impl Fn(&[C64], &[C64], usize) -> Vec<C64> + Send + Sync + 'static,
    ) -> ClosedFormFunction {
        let (f, g) = (self.f.clone(), rhs.f.clone());
        ClosedFormFunction {
            f: Arc::new(move |x, order| op(&f(x, order), &g(x, order), order)),
            poles: self.poles.union(&rhs.poles),
            zeros: PoleSet::empty(),
            primitive: None,
        }
    }
}

impl Add for &ClosedFormFunction {
    type Output = ClosedFormFunction;
    fn add(self, rhs: &ClosedFormFunction) -> ClosedFormFunction {
        let mut out = self.combine(rhs, |a, b, _| a.iter().zip(b).map(|(u, v)| u + v).collect());
        if let (Some(p), Some(q)) = (self.primitive(), rhs.primitive()) {
            out.primitive = Some(Arc::new(p + q));
        }
        out
    }
}

impl Sub for &ClosedFormFunction {
    type Output = ClosedFormFunction;
    fn sub(self, rhs: &ClosedFormFunction) -> ClosedFormFunction {
        let mut out = self.combine(rhs, |a, b, _| a.iter().zip(b).map(|(u, v)| u - v).collect());
        if let (Some(p), Some(q)) = (self.primitive(), rhs.primitive()) {
            out.primitive = Some(Arc::new(p - q));
        }
        out
    }
}

impl Mul for &ClosedFormFunction {
    type Output = ClosedFormFunction;
    fn mul(self, rhs: &ClosedFormFunction) -> ClosedFormFunction {
        let mut out = self.combine(rhs, |a, b, order| {
            (0..=order)
                .map(|m| {
                    let binom = binomial_row(m);
                    (0..=m).map(|i| a[i] * b[m - i] * binom[i]).sum()
                })
                .collect()
        });
        out.zeros = self.zeros.union(&rhs.zeros);
        out
    }
}

impl Neg for &ClosedFormFunction {
    type Output = ClosedFormFunction;
    fn neg(self) -> ClosedFormFunction {
        self.scale(C64::new(-1.0, 0.0))
    }
}
