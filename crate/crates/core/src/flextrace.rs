//! Tracing the one-parameter flex of a framework after deleting one edge.
//!
//! Deleting a non-redundant edge `e` from a rigid framework in standard
//! position leaves a curve of standard-position configurations with the
//! same lengths on G − e. Its component through the start is a closed loop.
//! The tracer walks it by pseudo-arclength continuation: an Euler predictor
//! along the unit null vector of the pinned Jacobian dF*(G − e), then Newton
//! corrections on the pinned constraints augmented with the hyperplane
//! through the predictor orthogonal to the tangent. Every sign change of
//! f_e − f_e(p₀) along the loop brackets a configuration equivalent to the
//! start; those that are not congruent to it witness non-global-rigidity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};
use crate::framework::{
    flatten, pinned_rigidity_map, pinned_rigidity_matrix, unflatten, Framework,
};
use crate::graph::Graph;
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::surface::{Point, Surface, SurfaceKind};

/// Standard-position pins must hold to this accuracy on entry.
const STANDARD_POSITION_TOL: f64 = 1e-9;
const MAX_NEWTON_ITERS: usize = 12;
const MAX_HALVINGS: usize = 10;
/// Minimum alignment with the initial tangent for accepting closure.
const CLOSURE_ALIGNMENT: f64 = 0.9;
/// Target accuracy for |f_e − f_e(p₀)| at a refined crossing.
const CROSSING_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;
/// Factor applied to `corrector_tol` to get the congruence tolerance.
const CONGRUENCE_FACTOR: f64 = 1e3;
/// A path vertex this close to the origin has reached the cone apex.
const APEX_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub step: f64,
    pub corrector_tol: f64,
    pub max_steps: usize,
    pub closure_tol: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            step: 0.02,
            corrector_tol: 1e-10,
            max_steps: 20_000,
            closure_tol: 1e-6,
        }
    }
}

impl TraceParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.step < 1.0
            && self.corrector_tol > 0.0
            && self.closure_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(RigidityError::InvalidFramework(format!(
                "trace parameters must be positive with step < 1: {self:?}"
            )))
        }
    }

    /// Pairwise-distance tolerance separating noise from a genuinely
    /// different realization.
    pub fn congruence_tol(&self) -> f64 {
        CONGRUENCE_FACTOR * self.corrector_tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlexPath {
    pub points: Vec<Vec<Point>>,
    /// Squared length of the removed edge at each point.
    pub edge_values: Vec<f64>,
    pub closed: bool,
}

impl FlexPath {
    /// Indices k with f_e − f_e(p₀) changing sign strictly between points
    /// k and k + 1.
    pub fn crossings(&self) -> Vec<usize> {
        let f0 = self.edge_values[0];
        self.edge_values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[0] - f0) * (w[1] - f0) < 0.0)
            .map(|(k, _)| k)
            .collect()
    }
}

/// The constraint system of G − e pinned in standard position, with the
/// right-hand side taken from the starting configuration.
struct Mechanism {
    reduced: Graph,
    surface: Surface,
    removed: (usize, usize),
    target: DVector<f64>,
    start: DVector<f64>,
}

impl Mechanism {
    fn new(fw: &Framework, removed_edge: (usize, usize)) -> Result<Self> {
        let (u, v) = removed_edge;
        let index = fw
            .graph()
            .edge_index(u, v)
            .ok_or(RigidityError::UnknownEdge(u + 1, v + 1))?;
        let surface = *fw.surface();
        if !surface.is_standard_position(fw.config(), STANDARD_POSITION_TOL) {
            return Err(RigidityError::NotStandardPosition(format!(
                "pins {:?} of the {} are not at their standard values",
                surface.pinned_coordinates(),
                surface.kind().name()
            )));
        }
        let reduced = fw.graph().without_edge(index);
        let target = pinned_rigidity_map(&reduced, &surface, fw.config());
        Ok(Mechanism {
            reduced,
            surface,
            removed: (u, v),
            target,
            start: flatten(fw.config()),
        })
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        pinned_rigidity_map(&self.reduced, &self.surface, &unflatten(x)) - &self.target
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        pinned_rigidity_matrix(&self.reduced, &self.surface, &unflatten(x))
    }

    fn f_e(&self, x: &DVector<f64>) -> f64 {
        let (u, v) = self.removed;
        let d = x.fixed_rows::<3>(3 * u) - x.fixed_rows::<3>(3 * v);
        d.norm_squared()
    }

    fn tangent(&self, x: &DVector<f64>, prev: Option<&DVector<f64>>) -> Result<DVector<f64>> {
        let null = linalg::null_space(&self.jacobian(x), DEFAULT_RANK_TOL);
        if null.ncols() != 1 {
            return Err(RigidityError::NotAMechanism {
                nullity: null.ncols(),
            });
        }
        let mut t = null.column(0).normalize();
        if prev.is_some_and(|p| t.dot(p) < 0.0) {
            t = -t;
        }
        Ok(t)
    }

    /// Newton on the pinned constraints plus ⟨x − anchor, normal⟩ = 0.
    fn correct(
        &self,
        predictor: &DVector<f64>,
        normal: &DVector<f64>,
        tol: f64,
    ) -> Option<DVector<f64>> {
        let mut x = predictor.clone();
        let rows = self.target.len();
        for _ in 0..MAX_NEWTON_ITERS {
            let res = self.residual(&x);
            let plane = (&x - predictor).dot(normal);
            if res.amax() <= tol && plane.abs() <= tol {
                self.snap_pins(&mut x);
                return Some(x);
            }
            let mut jac = self.jacobian(&x).insert_row(rows, 0.0);
            jac.row_mut(rows).copy_from(&normal.transpose());
            let rhs = -res.push(plane);
            let delta = linalg::least_squares(&jac, &rhs, DEFAULT_RANK_TOL);
            if !delta.iter().all(|d| d.is_finite()) {
                return None;
            }
            x += delta;
        }
        None
    }

    fn snap_pins(&self, x: &mut DVector<f64>) {
        for &k in self.surface.pinned_coordinates() {
            if k < x.len() {
                x[k] = self.start[k];
            }
        }
    }

    fn apex_vertex(&self, x: &DVector<f64>) -> Option<usize> {
        if self.surface.kind() != SurfaceKind::Cone {
            return None;
        }
        (0..x.len() / 3).find(|&i| x.fixed_rows::<3>(3 * i).norm() < APEX_GUARD)
    }
}

/// Unit tangent of the flex curve of G − `removed_edge` at the framework's
/// configuration, oriented to agree with `prev` when given.
pub fn tangent_direction(
    fw: &Framework,
    removed_edge: (usize, usize),
    prev: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let mech = Mechanism::new(fw, removed_edge)?;
    mech.tangent(&mech.start, prev)
}

/// Traces the flex curve from the framework's configuration until it closes
/// up or `max_steps` steps have been taken.
pub fn trace(fw: &Framework, removed_edge: (usize, usize), params: &TraceParams) -> Result<FlexPath> {
    trace_oriented(fw, removed_edge, params, false)
}

/// As [`trace`], starting against the default tangent when `reverse`.
pub fn trace_oriented(
    fw: &Framework,
    removed_edge: (usize, usize),
    params: &TraceParams,
    reverse: bool,
) -> Result<FlexPath> {
    params.validate()?;
    let mech = Mechanism::new(fw, removed_edge)?;
    let p0 = mech.start.clone();
    let mut t = mech.tangent(&p0, None)?;
    if reverse {
        t = -t;
    }
    let t0 = t.clone();

    let mut x = p0.clone();
    let mut points = vec![fw.config().to_vec()];
    let mut edge_values = vec![mech.f_e(&p0)];
    let mut closed = false;
    let mut left_start = false;
    let mut h = params.step;

    for k in 0..params.max_steps {
        if left_start && t.dot(&t0) > CLOSURE_ALIGNMENT {
            let d = &p0 - &x;
            let ahead = d.dot(&t);
            if d.norm() <= 2.0 * params.step && ahead > 0.0 && ahead <= h {
                if let Some(y) = mech.correct(&(&x + ahead * &t), &t, params.corrector_tol) {
                    if (&y - &p0).norm() <= params.closure_tol {
                        edge_values.push(mech.f_e(&y));
                        points.push(unflatten(&y));
                        closed = true;
                        break;
                    }
                }
            }
        }

        let mut halvings = 0;
        let y = loop {
            let predictor = &x + h * &t;
            let accepted = mech
                .correct(&predictor, &t, params.corrector_tol)
                .filter(|y| (y - &predictor).norm() <= h);
            if let Some(y) = accepted {
                break y;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(RigidityError::CorrectorDiverged { step: k });
            }
            h /= 2.0;
        };
        if let Some(i) = mech.apex_vertex(&y) {
            return Err(RigidityError::ApexCrossing {
                step: k,
                vertex: i + 1,
            });
        }
        t = mech.tangent(&y, Some(&t)).map_err(|_| {
            RigidityError::Degenerate(format!("flex curve is singular at step {k}"))
        })?;
        x = y;
        edge_values.push(mech.f_e(&x));
        points.push(unflatten(&x));
        if !left_start && (&x - &p0).norm() > 2.0 * params.step {
            left_start = true;
        }
        if halvings == 0 {
            h = (2.0 * h).min(params.step);
        }
    }

    Ok(FlexPath {
        points,
        edge_values,
        closed,
    })
}

/// Bisects the arc between path points `k` and `k + 1` for the point where
/// f_e returns to its starting value.
fn refine_crossing(mech: &Mechanism, path: &FlexPath, k: usize, tol: f64) -> Option<DVector<f64>> {
    let a = flatten(&path.points[k]);
    let b = flatten(&path.points[k + 1]);
    let t = mech.tangent(&a, Some(&(&b - &a))).ok()?;
    let f0 = path.edge_values[0];
    let g = |y: &DVector<f64>| mech.f_e(y) - f0;
    let point_at = |s: f64| mech.correct(&(&a + s * &t), &t, tol);

    let (mut lo, mut hi) = (0.0, (&b - &a).dot(&t));
    let g_lo = path.edge_values[k] - f0;
    let mut best = None;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let y = point_at(mid)?;
        let gm = g(&y);
        if gm.abs() <= CROSSING_TOL {
            return Some(y);
        }
        if (gm < 0.0) == (g_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        best = Some(y);
        if (hi - lo).abs() < f64::EPSILON {
            break;
        }
    }
    best.filter(|y| g(y).abs() <= CROSSING_TOL)
}

/// Returns a configuration equivalent to the framework's but not congruent
/// to it, found along the flex curve of G − `removed_edge`, if one exists
/// on the traced loop.
pub fn find_second_realization(
    fw: &Framework,
    removed_edge: (usize, usize),
    params: &TraceParams,
) -> Result<Option<Framework>> {
    let path = trace(fw, removed_edge, params)?;
    second_realization_on_path(fw, removed_edge, params, &path)
}

/// Scans an already traced path; `path` must come from tracing `fw` with
/// `removed_edge`.
pub fn second_realization_on_path(
    fw: &Framework,
    removed_edge: (usize, usize),
    params: &TraceParams,
    path: &FlexPath,
) -> Result<Option<Framework>> {
    let mech = Mechanism::new(fw, removed_edge)?;
    for k in path.crossings() {
        let Some(y) = refine_crossing(&mech, path, k, params.corrector_tol) else {
            continue;
        };
        let candidate = unflatten(&y);
        if !is_congruent(fw.config(), &candidate, params.congruence_tol()) {
            return fw.with_config(candidate).map(Some);
        }
    }
    Ok(None)
}

/// Largest absolute difference of a pairwise distance between `p` and `q`.
pub fn max_distance_deviation(p: &[Point], q: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let dp = (p[i] - p[j]).norm();
            let dq = (q[i] - q[j]).norm();
            worst = worst.max((dp - dq).abs());
        }
    }
    worst
}

/// All pairwise distances agree within `tol`. With at least 4 + γ vertices
/// on the surface this also implies congruence by an isometry of the
/// surface itself.
pub fn is_congruent(p: &[Point], q: &[Point], tol: f64) -> bool {
    p.len() == q.len() && max_distance_deviation(p, q) <= tol
}

/// Trajectory file record, one per accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub config: Vec<[f64; 3]>,
    pub f_e: f64,
}

/// Final trajectory-file record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub closed: bool,
    pub crossings: usize,
    pub witness: Option<Framework>,
}

impl FlexPath {
    pub fn records(&self) -> impl Iterator<Item = TrajectoryRecord> + '_ {
        self.points
            .iter()
            .zip(&self.edge_values)
            .enumerate()
            .map(|(t, (cfg, &f_e))| TrajectoryRecord {
                t,
                config: cfg.iter().map(|p| [p.x, p.y, p.z]).collect(),
                f_e,
            })
    }
}
