//! Sparse multivariate polynomials with exact differentiation.
//!
//! Every eigenmode on the supported shrinkers is the restriction of an
//! ambient polynomial, so values, gradients and Hessians all come from here.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(nvars: usize, exponents: Vec<u32>, c: f64) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exponents, c);
        p
    }

    /// The coordinate function x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, 1.0)
    }

    /// |x|² over the given coordinate indices.
    pub fn norm_sq(nvars: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::zero(nvars);
        for i in indices {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(e, 1.0);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, exponents: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, 1.0), |acc, _| &acc * self)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * e[i] as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<Poly>> {
        let grad = self.gradient();
        grad.iter()
            .map(|g| (0..self.nvars).map(|j| g.derivative(j)).collect())
            .collect()
    }

    pub fn laplacian(&self) -> Self {
        (0..self.nvars).fold(Self::zero(self.nvars), |acc, i| {
            &acc + &self.derivative(i).derivative(i)
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Replaces x_i by s·x_i.
    pub fn rescale_vars(&self, s: f64) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * s.powi(e.iter().sum::<u32>() as i32)))
                .collect(),
        }
    }

    /// Embeds into a larger variable set, sending variable i to `targets[i]`.
    pub fn embed(&self, nvars: usize, targets: &[usize]) -> Self {
        assert_eq!(targets.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (e, &c) in &self.terms {
            let mut d = vec![0; nvars];
            for (k, &t) in e.iter().zip(targets) {
                d[t] += k;
            }
            out.add_term(d, c);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
