//! Closed-form extrinsic geometry of the unit-scale shrinkers, expressed as
//! ambient matrices acting on tangent vectors.

use nalgebra::{DMatrix, DVector};

use crate::background::Background;
use crate::error::{Error, Result};

/// Backgrounds on which pointwise evaluation, quadrature and geometry exist.
pub fn pointwise_supported(bg: &Background) -> bool {
    match *bg {
        Background::Plane { n } => (1..=3).contains(&n),
        Background::Sphere { n } => n == 1 || n == 2,
        Background::Cylinder { k, m } => k == 1 && m == 1,
    }
}

pub(crate) fn ensure_supported(bg: &Background) -> Result<()> {
    bg.validate()?;
    if pointwise_supported(bg) {
        Ok(())
    } else {
        Err(Error::Unsupported(*bg))
    }
}

/// One normal direction n_α of the second fundamental form, A = Σ_α form_α ⊗ n_α.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalComponent {
    pub normal: DVector<f64>,
    pub form: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryData {
    /// Orthogonal projector onto the tangent space; this is the metric.
    pub metric: DMatrix<f64>,
    pub ric: DMatrix<f64>,
    /// ⟨H, A(·,·)⟩.
    pub shape_pairing: DMatrix<f64>,
    pub h_norm: f64,
    pub mean_curvature: DVector<f64>,
    pub x_tan: DVector<f64>,
    pub x_perp: DVector<f64>,
    pub second_fundamental: Vec<NormalComponent>,
}

impl GeometryData {
    /// The symmetric form ⟨w, A(·,·)⟩ for an ambient vector w.
    pub fn pair_with(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let d = self.metric.nrows();
        self.second_fundamental
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, c| acc + &c.form * w.dot(&c.normal))
    }
}

/// Distance of a point from the unit-scale shrinker, in the squared-radius sense.
pub(crate) fn shrinker_defect(bg: &Background, point: &[f64]) -> Result<f64> {
    if point.len() != bg.ambient_dim() {
        return Err(Error::OffShrinker {
            point: point.to_vec(),
            defect: f64::INFINITY,
        });
    }
    Ok(match *bg {
        Background::Plane { .. } => 0.0,
        Background::Sphere { n } => {
            let r2 = 2.0 * n as f64;
            (point.iter().map(|x| x * x).sum::<f64>() - r2).abs() / r2
        }
        Background::Cylinder { k, .. } => {
            let r2 = 2.0 * k as f64;
            (point[..=k as usize].iter().map(|x| x * x).sum::<f64>() - r2).abs() / r2
        }
    })
}

pub(crate) fn ensure_on_shrinker(bg: &Background, point: &[f64]) -> Result<()> {
    let defect = shrinker_defect(bg, point)?;
    if defect > 1e-9 {
        return Err(Error::OffShrinker {
            point: point.to_vec(),
            defect,
        });
    }
    Ok(())
}

/// Exact tensors at a point of the unit-scale shrinker.
pub fn geometry_at(bg: &Background, point: &[f64]) -> Result<GeometryData> {
    ensure_supported(bg)?;
    ensure_on_shrinker(bg, point)?;
    let d = bg.ambient_dim();
    let y = DVector::from_column_slice(point);
    let identity = DMatrix::<f64>::identity(d, d);
    match *bg {
        Background::Plane { .. } => Ok(GeometryData {
            metric: identity,
            ric: DMatrix::zeros(d, d),
            shape_pairing: DMatrix::zeros(d, d),
            h_norm: 0.0,
            mean_curvature: DVector::zeros(d),
            x_tan: y,
            x_perp: DVector::zeros(d),
            second_fundamental: Vec::new(),
        }),
        Background::Sphere { n } | Background::Cylinder { k: n, .. } => {
            let r = bg.sphere_radius().expect("round factor");
            let round_dim = n as usize + 1;
            let mut radial = DVector::zeros(d);
            radial.rows_mut(0, round_dim).copy_from(&y.rows(0, round_dim));
            let nu = &radial / r;
            let normal_proj = &nu * nu.transpose();
            let metric = &identity - &normal_proj;
            let mut round_proj = metric.clone();
            for i in round_dim..d {
                round_proj[(i, i)] = 0.0;
            }
            let form = &round_proj * (-1.0 / r);
            let mean_curvature = &nu * (-(n as f64) / r);
            let shape_pairing = &form * mean_curvature.dot(&nu);
            let ric = &round_proj * ((n as f64 - 1.0) / (r * r));
            Ok(GeometryData {
                x_tan: &metric * &y,
                x_perp: &normal_proj * &y,
                metric,
                ric,
                shape_pairing,
                h_norm: n as f64 / r,
                mean_curvature,
                second_fundamental: vec![NormalComponent { normal: nu, form }],
            })
        }
    }
}
