//! The four constraint surfaces: unit sphere, unit cylinder about the z-axis,
//! unit cone about the z-axis, and the ellipsoid x² + a·y² + b·z² = 1.

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix3, Rotation3, Vector3};
use num_rational::Rational64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};

pub type Point = Vector3<f64>;

/// Points closer than this to the origin count as the cone apex.
pub const APEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Cylinder,
    Cone,
    Ellipsoid,
}

/// Per-surface integers: dimension of the infinitesimal isometry space,
/// the vertex offset above which congruence implies congruence on the
/// surface (n ≥ 4 + gamma), and the connectivity forced by global rigidity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceMeta {
    pub ell: usize,
    pub gamma: usize,
    pub k_conn: usize,
}

impl SurfaceKind {
    pub fn meta(self) -> SurfaceMeta {
        let (ell, gamma, k_conn) = match self {
            SurfaceKind::Sphere => (3, 0, 3),
            SurfaceKind::Cylinder => (2, 1, 2),
            SurfaceKind::Cone => (1, 2, 2),
            SurfaceKind::Ellipsoid => (0, 2, 1),
        };
        SurfaceMeta { ell, gamma, k_conn }
    }

    pub fn ell(self) -> usize {
        self.meta().ell
    }

    pub fn gamma(self) -> usize {
        self.meta().gamma
    }

    pub fn k_conn(self) -> usize {
        self.meta().k_conn
    }

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Cylinder => "cylinder",
            SurfaceKind::Cone => "cone",
            SurfaceKind::Ellipsoid => "ellipsoid",
        }
    }

    pub const ALL: [SurfaceKind; 4] = [
        SurfaceKind::Sphere,
        SurfaceKind::Cylinder,
        SurfaceKind::Cone,
        SurfaceKind::Ellipsoid,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceRepr", into = "SurfaceRepr")]
pub enum Surface {
    Sphere,
    Cylinder,
    Cone,
    Ellipsoid { a: Rational64, b: Rational64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SurfaceRepr {
    kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<[i64; 2]>,
}

fn ratio(pair: [i64; 2]) -> Result<Rational64> {
    if pair[1] == 0 {
        return Err(RigidityError::InvalidSurface("zero denominator".into()));
    }
    Ok(Rational64::new(pair[0], pair[1]))
}

impl TryFrom<SurfaceRepr> for Surface {
    type Error = RigidityError;

    fn try_from(repr: SurfaceRepr) -> Result<Self> {
        match repr.kind {
            SurfaceKind::Ellipsoid => {
                let a = repr.a.map(ratio).transpose()?.unwrap_or(Rational64::from(2));
                let b = repr.b.map(ratio).transpose()?.unwrap_or(Rational64::from(3));
                Surface::ellipsoid(a, b)
            }
            kind => {
                if repr.a.is_some() || repr.b.is_some() {
                    return Err(RigidityError::InvalidSurface(format!(
                        "{} takes no parameters",
                        kind.name()
                    )));
                }
                Ok(Surface::from_kind(kind))
            }
        }
    }
}

impl From<Surface> for SurfaceRepr {
    fn from(s: Surface) -> Self {
        let pair = |r: Rational64| [*r.numer(), *r.denom()];
        match s {
            Surface::Ellipsoid { a, b } => SurfaceRepr {
                kind: SurfaceKind::Ellipsoid,
                a: Some(pair(a)),
                b: Some(pair(b)),
            },
            other => SurfaceRepr {
                kind: other.kind(),
                a: None,
                b: None,
            },
        }
    }
}

impl std::str::FromStr for Surface {
    type Err = RigidityError;

    /// Accepts `sphere`, `cylinder`, `cone`, `ellipsoid` or
    /// `ellipsoid:A,B` with `A`, `B` integers or fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "sphere" => SurfaceKind::Sphere,
            "cylinder" => SurfaceKind::Cylinder,
            "cone" => SurfaceKind::Cone,
            "ellipsoid" => SurfaceKind::Ellipsoid,
            other => {
                return Err(RigidityError::InvalidSurface(format!(
                    "unknown surface '{other}'"
                )))
            }
        };
        match (kind, params) {
            (SurfaceKind::Ellipsoid, None) => Ok(Surface::default_ellipsoid()),
            (SurfaceKind::Ellipsoid, Some(p)) => {
                let parts: Vec<&str> = p.split(',').collect();
                if parts.len() != 2 {
                    return Err(RigidityError::InvalidSurface(
                        "expected ellipsoid:A,B".into(),
                    ));
                }
                Surface::ellipsoid(parse_ratio(parts[0])?, parse_ratio(parts[1])?)
            }
            (k, None) => Ok(Surface::from_kind(k)),
            (k, Some(_)) => Err(RigidityError::InvalidSurface(format!(
                "{} takes no parameters",
                k.name()
            ))),
        }
    }
}

fn parse_ratio(s: &str) -> Result<Rational64> {
    let bad = || RigidityError::InvalidSurface(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            ratio([p, q])
        }
        None => Ok(Rational64::from(s.parse::<i64>().map_err(|_| bad())?)),
    }
}

impl Surface {
    pub fn ellipsoid(a: Rational64, b: Rational64) -> Result<Self> {
        let one = Rational64::from(1);
        if !(one < a && a < b) {
            return Err(RigidityError::InvalidSurface(format!(
                "ellipsoid needs 1 < a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Surface::Ellipsoid { a, b })
    }

    pub fn default_ellipsoid() -> Self {
        Surface::Ellipsoid {
            a: Rational64::from(2),
            b: Rational64::from(3),
        }
    }

    /// Parameter-free surface for `kind`; the ellipsoid gets a = 2, b = 3.
    pub fn from_kind(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::Sphere => Surface::Sphere,
            SurfaceKind::Cylinder => Surface::Cylinder,
            SurfaceKind::Cone => Surface::Cone,
            SurfaceKind::Ellipsoid => Surface::default_ellipsoid(),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        match self {
            Surface::Sphere => SurfaceKind::Sphere,
            Surface::Cylinder => SurfaceKind::Cylinder,
            Surface::Cone => SurfaceKind::Cone,
            Surface::Ellipsoid { .. } => SurfaceKind::Ellipsoid,
        }
    }

    pub fn meta(&self) -> SurfaceMeta {
        self.kind().meta()
    }

    pub fn ell(&self) -> usize {
        self.kind().ell()
    }

    fn axes(&self) -> (f64, f64) {
        match self {
            Surface::Ellipsoid { a, b } => (a.to_f64().unwrap(), b.to_f64().unwrap()),
            _ => (1.0, 1.0),
        }
    }

    /// The defining polynomial; the surface is its zero set.
    pub fn h(&self, p: &Point) -> f64 {
        let (x, y, z) = (p.x, p.y, p.z);
        match self {
            Surface::Sphere => x * x + y * y + z * z - 1.0,
            Surface::Cylinder => x * x + y * y - 1.0,
            Surface::Cone => x * x + y * y - z * z,
            Surface::Ellipsoid { .. } => {
                let (a, b) = self.axes();
                x * x + a * y * y + b * z * z - 1.0
            }
        }
    }

    pub fn grad_h(&self, p: &Point) -> Point {
        match self {
            Surface::Sphere => 2.0 * p,
            Surface::Cylinder => Vector3::new(2.0 * p.x, 2.0 * p.y, 0.0),
            Surface::Cone => Vector3::new(2.0 * p.x, 2.0 * p.y, -2.0 * p.z),
            Surface::Ellipsoid { .. } => {
                let (a, b) = self.axes();
                Vector3::new(2.0 * p.x, 2.0 * a * p.y, 2.0 * b * p.z)
            }
        }
    }

    fn check_apex(&self, config: &[Point]) -> Result<()> {
        if self.kind() == SurfaceKind::Cone {
            if let Some(i) = config.iter().position(|p| p.norm() <= APEX_TOL) {
                return Err(RigidityError::ConeApex { vertex: i + 1 });
            }
        }
        Ok(())
    }

    /// Checks every point lies on the surface within `tol` and, on the
    /// cone, away from the apex.
    pub fn validate_config(&self, config: &[Point], tol: f64) -> Result<()> {
        for (i, p) in config.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(RigidityError::InvalidFramework(format!(
                    "vertex {} has a non-finite coordinate",
                    i + 1
                )));
            }
            let residual = self.h(p).abs();
            if residual > tol {
                return Err(RigidityError::OffSurface {
                    vertex: i + 1,
                    residual,
                });
            }
        }
        self.check_apex(config)
    }

    /// Infinitesimal isometries of the surface evaluated at `config`, one
    /// flattened velocity field per basis element.
    pub fn trivial_flex_basis(&self, config: &[Point]) -> Result<Vec<DVector<f64>>> {
        self.check_apex(config)?;
        let field = |f: &dyn Fn(&Point) -> Point| {
            let mut v = DVector::zeros(3 * config.len());
            for (i, p) in config.iter().enumerate() {
                v.fixed_rows_mut::<3>(3 * i).copy_from(&f(p));
            }
            v
        };
        let about_z = |p: &Point| Vector3::new(-p.y, p.x, 0.0);
        Ok(match self {
            Surface::Sphere => [Vector3::x(), Vector3::y(), Vector3::z()]
                .iter()
                .map(|axis| field(&|p: &Point| axis.cross(p)))
                .collect(),
            Surface::Cylinder => vec![field(&about_z), field(&|_: &Point| Vector3::z())],
            Surface::Cone => vec![field(&about_z)],
            Surface::Ellipsoid { .. } => Vec::new(),
        })
    }

    /// Flat coordinate indices fixed by standard position: (x₁, z₁, x₂) on
    /// the sphere, (x₁, z₁) on the cylinder, x₁ on the cone, none on the
    /// ellipsoid.
    pub fn pinned_coordinates(&self) -> &'static [usize] {
        match self {
            Surface::Sphere => &[0, 2, 3],
            Surface::Cylinder => &[0, 2],
            Surface::Cone => &[0],
            Surface::Ellipsoid { .. } => &[],
        }
    }

    pub fn is_standard_position(&self, config: &[Point], tol: f64) -> bool {
        let Some(p1) = config.first() else {
            return true;
        };
        match self {
            Surface::Sphere => {
                (p1 - Vector3::y()).norm() <= tol && config.get(1).is_none_or(|p2| p2.x.abs() <= tol)
            }
            Surface::Cylinder => (p1 - Vector3::y()).norm() <= tol,
            Surface::Cone => p1.x.abs() <= tol,
            Surface::Ellipsoid { .. } => true,
        }
    }

    /// Image of `config` under an isometry of the surface that puts it in
    /// standard position.
    ///
    /// Sphere: v₁ goes to (0, 1, 0) (an antipodal v₁ is turned by π about
    /// the x-axis), then a turn about the y-axis zeroes x₂ with z₂ ≥ 0.
    /// Cylinder: a turn about the z-axis and a z-translation send v₁ to
    /// (0, 1, 0). Cone: a turn about the z-axis gives x₁ = 0, y₁ > 0.
    /// Ellipsoid: identity.
    pub fn to_standard_position(&self, config: &[Point]) -> Result<Vec<Point>> {
        self.check_apex(config)?;
        let Some(&p1) = config.first() else {
            return Ok(Vec::new());
        };
        let iso = match self {
            Surface::Sphere => {
                if config.len() < 2 {
                    return Err(RigidityError::Degenerate(
                        "sphere standard position needs at least two vertices".into(),
                    ));
                }
                if p1.norm() == 0.0 {
                    return Err(RigidityError::Degenerate("v1 at the origin".into()));
                }
                let first = Rotation3::rotation_between(&p1, &Vector3::y())
                    .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), PI));
                let q2 = first * config[1];
                let turn = Rotation3::from_axis_angle(&Vector3::y_axis(), -q2.x.atan2(q2.z));
                Isometry::linear((turn * first).into_inner())
            }
            Surface::Cylinder | Surface::Cone => {
                let radius = p1.x.hypot(p1.y);
                if radius == 0.0 {
                    return Err(RigidityError::Degenerate(
                        "v1 lies on the z-axis".into(),
                    ));
                }
                let angle = PI / 2.0 - p1.y.atan2(p1.x);
                let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), angle).into_inner();
                let shift = if *self == Surface::Cylinder {
                    Vector3::new(0.0, 0.0, -p1.z)
                } else {
                    Vector3::zeros()
                };
                Isometry { linear: rot, shift }
            }
            Surface::Ellipsoid { .. } => return Ok(config.to_vec()),
        };
        let mut out: Vec<Point> = config.iter().map(|p| iso.apply(p)).collect();
        // snap the pinned coordinates to their exact values
        match self {
            Surface::Sphere => {
                out[0] = Vector3::y();
                out[1].x = 0.0;
            }
            Surface::Cylinder => out[0] = Vector3::y(),
            Surface::Cone => out[0].x = 0.0,
            Surface::Ellipsoid { .. } => {}
        }
        Ok(out)
    }

    /// Deterministic pseudo-random configuration of `n` points on the
    /// surface. Stands in for a generic configuration.
    pub fn sample_config(&self, n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample_point(&mut rng)).collect()
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Surface::Sphere | Surface::Ellipsoid { .. } => {
                let g = loop {
                    let g = Vector3::new(
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                    );
                    if g.norm() > 1e-6 {
                        break g;
                    }
                };
                let u = g / g.norm();
                let (a, b) = self.axes();
                Vector3::new(u.x, u.y / a.sqrt(), u.z / b.sqrt())
            }
            Surface::Cylinder => {
                let t = rng.random_range(0.0..2.0 * PI);
                Vector3::new(t.cos(), t.sin(), rng.random_range(-2.0..=2.0))
            }
            Surface::Cone => {
                let t = rng.random_range(0.0..2.0 * PI);
                let r = rng.random_range(0.5..=2.0);
                let z = if rng.random_bool(0.5) { r } else { -r };
                Vector3::new(r * t.cos(), r * t.sin(), z)
            }
        }
    }

    /// A random isometry of the surface: any rotation or reflection fixing
    /// the origin (sphere); a rotation about and translation along the
    /// z-axis, optionally composed with z ↦ −z (cylinder); a rotation about
    /// the z-axis, optionally composed with z ↦ −z (cone); a product of
    /// coordinate-plane reflections (ellipsoid).
    pub fn random_isometry<R: Rng + ?Sized>(&self, rng: &mut R) -> Isometry {
        let about_z = |rng: &mut R| {
            Rotation3::from_axis_angle(&Vector3::z_axis(), rng.random_range(0.0..2.0 * PI))
                .into_inner()
        };
        let flip_z = |rng: &mut R| {
            if rng.random_bool(0.5) {
                Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
            } else {
                Matrix3::identity()
            }
        };
        match self {
            Surface::Sphere => {
                let axis = Vector3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                );
                let rot = Rotation3::from_scaled_axis(axis).into_inner();
                Isometry::linear(rot * flip_z(rng))
            }
            Surface::Cylinder => Isometry {
                linear: about_z(rng) * flip_z(rng),
                shift: Vector3::new(0.0, 0.0, rng.random_range(-3.0..3.0)),
            },
            Surface::Cone => Isometry::linear(about_z(rng) * flip_z(rng)),
            Surface::Ellipsoid { .. } => {
                let mut sign = || if rng.random_bool(0.5) { -1.0 } else { 1.0 };
                Isometry::linear(Matrix3::from_diagonal(&Vector3::new(sign(), sign(), sign())))
            }
        }
    }
}

/// An affine isometry x ↦ linear·x + shift of R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub linear: Matrix3<f64>,
    pub shift: Vector3<f64>,
}

impl Isometry {
    pub fn linear(linear: Matrix3<f64>) -> Self {
        Isometry {
            linear,
            shift: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        self.linear * p + self.shift
    }

    pub fn apply_all(&self, config: &[Point]) -> Vec<Point> {
        config.iter().map(|p| self.apply(p)).collect()
    }
}
