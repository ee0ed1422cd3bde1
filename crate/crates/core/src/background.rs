//! Analytic self-shrinkers at unit scale (t = −1) and the spectrum of their
//! drift Laplacian 𝓛₁ = Δ − ½⟨y, ∇·⟩.
//!
//! A shrinker M satisfies H = −y^⊥/2, and the flow is M_t = √(−t)·M. Writing
//! u(x, t) = v(x/√(−t), t) and following a point along the normal motion, the
//! self-similar coordinate y = x/√(−t) drifts tangentially with velocity
//! y^T/(2(−t)), while Δ_{M_t} = Δ_M/(−t). Together these give
//!
//! ```text
//! (∂_t − Δ_{M_t}) u = ∂_t v − 𝓛₁ v / (−t),
//! ```
//!
//! and the Gaussian measure dμ_t = (−4πt)^{−n/2} e^{|x|²/4t} dV_{g_t} pulls back
//! to dμ_{−1} for every t. Everything downstream therefore works with modes of
//! 𝓛₁ on the fixed unit-scale shrinker and a time-dependent 1/(−t) factor.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{binomial, unit_sphere_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    /// Static R^n.
    Plane { n: u32 },
    /// S^n of radius √(2n) in R^{n+1}.
    Sphere { n: u32 },
    /// S^k(√(2k)) × R^m in R^{k+1+m}; sphere coordinates come first.
    Cylinder { k: u32, m: u32 },
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Background::Plane { n } => write!(f, "Plane(n={n})"),
            Background::Sphere { n } => write!(f, "Sphere(n={n})"),
            Background::Cylinder { k, m } => write!(f, "Cylinder(k={k},m={m})"),
        }
    }
}

/// Spectral label of an eigenmode of 𝓛₁.
///
/// Ordering is lexicographic and is used as the tie-break between modes that
/// share an eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    /// Hermite degree per axis.
    Hermite(Vec<u32>),
    /// Spherical harmonic of the given degree; `label` indexes a basis of the
    /// degree-k harmonics (for S¹: 0 = cos, 1 = sin; for S²: 0 = zonal,
    /// 2m−1 = cos mφ, 2m = sin mφ).
    Harmonic { degree: u32, label: u32 },
    /// Sphere-factor harmonic times axial Hermite product.
    Product {
        degree: u32,
        label: u32,
        axial: Vec<u32>,
    },
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Hermite(d) => write!(f, "hermite{d:?}"),
            ModeLabel::Harmonic { degree, label } => write!(f, "harmonic(k={degree},#{label})"),
            ModeLabel::Product {
                degree,
                label,
                axial,
            } => write!(f, "product(k={degree},#{label},axial={axial:?})"),
        }
    }
}

/// An eigenmode together with μ, where 𝓛₁φ = −μφ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub label: ModeLabel,
    pub mu: f64,
}

/// Exact eigenvalue μ = num/den.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eigenvalue {
    pub num: u64,
    pub den: u64,
}

impl Eigenvalue {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Eigenvalue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Eigenvalue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dimension of the degree-k spherical harmonics on S^n.
pub fn harmonic_multiplicity(n: u32, k: u32) -> u64 {
    let total = |d: u32| binomial(n + d, n).round() as u64;
    if k < 2 {
        total(k)
    } else {
        total(k) - total(k - 2)
    }
}

impl Background {
    pub fn plane(n: u32) -> Result<Self> {
        Self::Plane { n }.validated()
    }

    pub fn sphere(n: u32) -> Result<Self> {
        Self::Sphere { n }.validated()
    }

    pub fn cylinder(k: u32, m: u32) -> Result<Self> {
        Self::Cylinder { k, m }.validated()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Background::Plane { n } | Background::Sphere { n } => n >= 1,
            Background::Cylinder { k, m } => k >= 1 && m >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBackground(format!(
                "{self}: dimensions must be positive"
            )))
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    /// Intrinsic dimension.
    pub fn n_total(&self) -> u32 {
        match *self {
            Background::Plane { n } | Background::Sphere { n } => n,
            Background::Cylinder { k, m } => k + m,
        }
    }

    /// Dimension of the ambient Euclidean space used for coordinates.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Background::Plane { n } => n as usize,
            Background::Sphere { n } => n as usize + 1,
            Background::Cylinder { k, m } => (k + 1 + m) as usize,
        }
    }

    /// Radius of the round factor at unit scale, forced by H = −y^⊥/2.
    pub fn sphere_radius(&self) -> Option<f64> {
        match *self {
            Background::Plane { .. } => None,
            Background::Sphere { n } => Some((2.0 * n as f64).sqrt()),
            Background::Cylinder { k, .. } => Some((2.0 * k as f64).sqrt()),
        }
    }

    /// Total mass of dμ_{−1}, i.e. the Gaussian density of the shrinker.
    pub fn gaussian_density(&self) -> f64 {
        let round = |d: u32| {
            let r2 = 2.0 * d as f64;
            (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0)
                * (-r2 / 4.0).exp()
                * unit_sphere_area(d)
                * r2.powf(d as f64 / 2.0)
        };
        match *self {
            Background::Plane { .. } => 1.0,
            Background::Sphere { n } => round(n),
            Background::Cylinder { k, .. } => round(k),
        }
    }

    /// Exact eigenvalue of a label, after checking it belongs to this background.
    pub fn eigenvalue(&self, label: &ModeLabel) -> Result<Eigenvalue> {
        self.check_label(label)?;
        Ok(match (*self, label) {
            (Background::Plane { .. }, ModeLabel::Hermite(d)) => Eigenvalue {
                num: d.iter().map(|&x| x as u64).sum(),
                den: 2,
            },
            (Background::Sphere { n }, ModeLabel::Harmonic { degree, .. }) => {
                let (k, n) = (*degree as u64, n as u64);
                Eigenvalue {
                    num: k * (k + n - 1),
                    den: 2 * n,
                }
            }
            (
                Background::Cylinder { k, .. },
                ModeLabel::Product {
                    degree, axial, ..
                },
            ) => {
                let (l, k) = (*degree as u64, k as u64);
                let axial: u64 = axial.iter().map(|&x| x as u64).sum();
                Eigenvalue {
                    num: l * (l + k - 1) + k * axial,
                    den: 2 * k,
                }
            }
            _ => unreachable!("check_label rejects mismatched variants"),
        })
    }

    pub fn mu(&self, label: &ModeLabel) -> Result<f64> {
        self.eigenvalue(label).map(Eigenvalue::value)
    }

    pub fn mode(&self, label: ModeLabel) -> Result<Mode> {
        let mu = self.mu(&label)?;
        Ok(Mode { label, mu })
    }

    pub fn constant_label(&self) -> ModeLabel {
        match *self {
            Background::Plane { n } => ModeLabel::Hermite(vec![0; n as usize]),
            Background::Sphere { .. } => ModeLabel::Harmonic {
                degree: 0,
                label: 0,
            },
            Background::Cylinder { m, .. } => ModeLabel::Product {
                degree: 0,
                label: 0,
                axial: vec![0; m as usize],
            },
        }
    }

    pub fn check_label(&self, label: &ModeLabel) -> Result<()> {
        let ok = match (*self, label) {
            (Background::Plane { n }, ModeLabel::Hermite(d)) => d.len() == n as usize,
            (Background::Sphere { n }, ModeLabel::Harmonic { degree, label }) => {
                (*label as u64) < harmonic_multiplicity(n, *degree)
            }
            (
                Background::Cylinder { k, m },
                ModeLabel::Product {
                    degree,
                    label,
                    axial,
                },
            ) => axial.len() == m as usize && (*label as u64) < harmonic_multiplicity(k, *degree),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                background: *self,
                label: label.to_string(),
            })
        }
    }

    /// Least κ with ⟨H, A(v,v)⟩ ≤ κ|v|² on the unit-scale shrinker.
    ///
    /// For a round factor of radius r and dimension d, A = −(g/r)ν and
    /// H = −(d/r)ν, so ⟨H, A⟩ = (d/r²)g = g/2 when r² = 2d. Flat directions
    /// contribute nothing.
    pub fn kappa(&self) -> f64 {
        match *self {
            Background::Plane { .. } => 0.0,
            Background::Sphere { n } => n as f64 / (2.0 * n as f64),
            Background::Cylinder { k, .. } => k as f64 / (2.0 * k as f64),
        }
    }

    /// Smallest nonzero μ.
    pub fn first_nonzero_mu(&self) -> f64 {
        match *self {
            Background::Plane { .. } => 0.5,
            Background::Sphere { n } => n as f64 / (2.0 * n as f64),
            // sphere degree 1 gives k/(2k); one axial degree gives 1/2
            Background::Cylinder { .. } => 0.5,
        }
    }

    /// All modes with μ ≤ `mu_cutoff`, sorted by (μ, label).
    pub fn enumerate_modes(&self, mu_cutoff: f64) -> Result<Vec<Mode>> {
        self.validate()?;
        if !(mu_cutoff >= 0.0) || !mu_cutoff.is_finite() {
            return Err(Error::InvalidArgument {
                name: "mu_cutoff",
                reason: format!("must be a finite nonnegative number, got {mu_cutoff}"),
            });
        }
        // slack so that cutoffs given as decimals still include exact boundary values
        let within = |e: Eigenvalue| (e.num as f64) <= mu_cutoff * e.den as f64 * (1.0 + 1e-12);
        let mut labels = Vec::new();
        match *self {
            Background::Plane { n } => {
                let max_total = (2.0 * mu_cutoff + 1e-9).floor() as u32;
                for d in multi_indices(n as usize, max_total) {
                    labels.push(ModeLabel::Hermite(d));
                }
            }
            Background::Sphere { n } => {
                let mut degree = 0;
                loop {
                    let label = ModeLabel::Harmonic { degree, label: 0 };
                    if !within(self.eigenvalue(&label)?) {
                        break;
                    }
                    for l in 0..harmonic_multiplicity(n, degree) {
                        labels.push(ModeLabel::Harmonic {
                            degree,
                            label: l as u32,
                        });
                    }
                    degree += 1;
                }
            }
            Background::Cylinder { k, m } => {
                let mut degree = 0;
                loop {
                    let base = ModeLabel::Product {
                        degree,
                        label: 0,
                        axial: vec![0; m as usize],
                    };
                    if !within(self.eigenvalue(&base)?) {
                        break;
                    }
                    let sphere_mu = (degree as f64) * (degree + k - 1) as f64 / (2.0 * k as f64);
                    let max_axial = (2.0 * (mu_cutoff - sphere_mu) + 1e-9).floor().max(0.0) as u32;
                    for l in 0..harmonic_multiplicity(k, degree) {
                        for axial in multi_indices(m as usize, max_axial) {
                            labels.push(ModeLabel::Product {
                                degree,
                                label: l as u32,
                                axial,
                            });
                        }
                    }
                    degree += 1;
                }
            }
        }
        let mut modes: Vec<(Eigenvalue, ModeLabel)> = labels
            .into_iter()
            .map(|l| Ok((self.eigenvalue(&l)?, l)))
            .filter(|r: &Result<(Eigenvalue, ModeLabel)>| r.as_ref().map_or(true, |(e, _)| within(*e)))
            .collect::<Result<_>>()?;
        modes.sort();
        Ok(modes
            .into_iter()
            .map(|(e, label)| Mode {
                label,
                mu: e.value(),
            })
            .collect())
    }
}

/// All multi-indices of length `len` with total degree ≤ `max_total`, in
/// lexicographic order.
fn multi_indices(len: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0; len];
    fn rec(pos: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for d in 0..=remaining {
            current[pos] = d;
            rec(pos + 1, remaining - d, current, out);
        }
        current[pos] = 0;
    }
    rec(0, max_total, &mut current, &mut out);
    out
}
