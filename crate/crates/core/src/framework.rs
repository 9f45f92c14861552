//! Frameworks on a surface: rigidity maps, rigidity matrices and the rank
//! based classification.
//!
//! For a framework with `m` edges on `n` vertices, the rigidity matrix dF
//! stacks `m` edge rows (2(p_u − p_v) in block u, 2(p_v − p_u) in block v)
//! on `n` vertex rows (∇h(p_i) in block i). Its pinned variant dF* appends
//! one unit row per standard-position coordinate.

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};
use crate::exact::{self, RationalPoint};
use crate::graph::Graph;
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::surface::{Point, Surface};

/// Largest |h(p_i)| accepted for a framework vertex.
pub const ON_SURFACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameworkRepr", into = "FrameworkRepr")]
pub struct Framework {
    graph: Graph,
    surface: Surface,
    config: Vec<Point>,
    rational_config: Option<Vec<RationalPoint>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FrameworkRepr {
    surface: Surface,
    graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rational_config: Option<Vec<[[i64; 2]; 3]>>,
}

impl TryFrom<FrameworkRepr> for Framework {
    type Error = RigidityError;

    fn try_from(repr: FrameworkRepr) -> Result<Self> {
        match (repr.config, repr.rational_config) {
            (_, Some(rational)) => {
                let mut pts = Vec::with_capacity(rational.len());
                for (i, p) in rational.iter().enumerate() {
                    let mut q = [Rational64::from(0); 3];
                    for k in 0..3 {
                        if p[k][1] == 0 {
                            return Err(RigidityError::InvalidFramework(format!(
                                "vertex {} has a zero denominator",
                                i + 1
                            )));
                        }
                        q[k] = Rational64::new(p[k][0], p[k][1]);
                    }
                    pts.push(q);
                }
                Framework::with_rational_config(repr.graph, repr.surface, pts)
            }
            (Some(config), None) => Framework::new(
                repr.graph,
                repr.surface,
                config.iter().map(|c| Point::new(c[0], c[1], c[2])).collect(),
            ),
            (None, None) => Err(RigidityError::InvalidFramework(
                "missing \"config\" (or \"rational_config\")".into(),
            )),
        }
    }
}

impl From<Framework> for FrameworkRepr {
    fn from(fw: Framework) -> Self {
        FrameworkRepr {
            surface: fw.surface,
            graph: fw.graph,
            config: Some(fw.config.iter().map(|p| [p.x, p.y, p.z]).collect()),
            rational_config: fw.rational_config.map(|pts| {
                pts.iter()
                    .map(|p| p.map(|c| [*c.numer(), *c.denom()]))
                    .collect()
            }),
        }
    }
}

impl Framework {
    pub fn new(graph: Graph, surface: Surface, config: Vec<Point>) -> Result<Self> {
        if config.len() != graph.n() {
            return Err(RigidityError::InvalidFramework(format!(
                "graph has {} vertices but the configuration has {} points",
                graph.n(),
                config.len()
            )));
        }
        surface.validate_config(&config, ON_SURFACE_TOL)?;
        Ok(Framework {
            graph,
            surface,
            config,
            rational_config: None,
        })
    }

    /// A framework carrying exact rational coordinates; the floating-point
    /// configuration is their nearest-double image.
    pub fn with_rational_config(
        graph: Graph,
        surface: Surface,
        rational: Vec<RationalPoint>,
    ) -> Result<Self> {
        if let Some(i) = rational.iter().position(|p| !exact::on_surface(&surface, p)) {
            return Err(RigidityError::InvalidFramework(format!(
                "rational vertex {} is not exactly on the surface",
                i + 1
            )));
        }
        let config = rational.iter().map(exact::to_f64_point).collect();
        let mut fw = Framework::new(graph, surface, config)?;
        fw.rational_config = Some(rational);
        Ok(fw)
    }

    /// A framework on a seeded random configuration.
    pub fn sample(graph: Graph, surface: Surface, seed: u64) -> Self {
        let config = surface.sample_config(graph.n(), seed);
        Framework::new(graph, surface, config).expect("sampler stays on the surface")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn config(&self) -> &[Point] {
        &self.config
    }

    pub fn rational_config(&self) -> Option<&[RationalPoint]> {
        self.rational_config.as_deref()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Same configuration, different graph on the same vertex set.
    pub fn with_graph(&self, graph: Graph) -> Result<Self> {
        if graph.n() != self.n() {
            return Err(RigidityError::InvalidFramework("vertex count changed".into()));
        }
        Ok(Framework {
            graph,
            ..self.clone()
        })
    }

    /// Same graph, new floating-point configuration.
    pub fn with_config(&self, config: Vec<Point>) -> Result<Self> {
        Framework::new(self.graph.clone(), self.surface, config)
    }

    pub fn to_standard_position(&self) -> Result<Self> {
        let config = self.surface.to_standard_position(&self.config)?;
        self.with_config(config)
    }
}

pub fn flatten(config: &[Point]) -> DVector<f64> {
    DVector::from_iterator(3 * config.len(), config.iter().flat_map(|p| p.iter().copied()))
}

pub fn unflatten(flat: &DVector<f64>) -> Vec<Point> {
    flat.as_slice()
        .chunks_exact(3)
        .map(|c| Point::new(c[0], c[1], c[2]))
        .collect()
}

/// Squared edge lengths in edge-list order.
pub fn squared_lengths(graph: &Graph, config: &[Point]) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .map(|&(u, v)| (config[u] - config[v]).norm_squared())
        .collect()
}

pub fn edge_lengths(fw: &Framework) -> Vec<f64> {
    squared_lengths(&fw.graph, &fw.config)
}

/// The surface rigidity map F_G = (f_G, θ_G).
pub fn rigidity_map(graph: &Graph, surface: &Surface, config: &[Point]) -> DVector<f64> {
    let values = squared_lengths(graph, config)
        .into_iter()
        .chain(config.iter().map(|p| surface.h(p)));
    DVector::from_iterator(graph.m() + graph.n(), values)
}

/// F*_G: the rigidity map followed by the standard-position coordinates.
pub fn pinned_rigidity_map(graph: &Graph, surface: &Surface, config: &[Point]) -> DVector<f64> {
    let flat = flatten(config);
    let base = rigidity_map(graph, surface, config);
    let pins = surface
        .pinned_coordinates()
        .iter()
        .map(|&k| flat.get(k).copied().unwrap_or(0.0));
    DVector::from_iterator(base.len() + surface.ell(), base.iter().copied().chain(pins))
}

/// Jacobian of [`rigidity_map`], (m + n) × 3n.
pub fn rigidity_matrix(graph: &Graph, surface: &Surface, config: &[Point]) -> DMatrix<f64> {
    let (n, m) = (graph.n(), graph.m());
    let mut df = DMatrix::zeros(m + n, 3 * n);
    for (row, &(u, v)) in graph.edges().iter().enumerate() {
        let d = 2.0 * (config[u] - config[v]);
        df.fixed_view_mut::<1, 3>(row, 3 * u).copy_from(&d.transpose());
        df.fixed_view_mut::<1, 3>(row, 3 * v).copy_from(&(-d).transpose());
    }
    for (i, p) in config.iter().enumerate() {
        df.fixed_view_mut::<1, 3>(m + i, 3 * i)
            .copy_from(&surface.grad_h(p).transpose());
    }
    df
}

/// Jacobian of [`pinned_rigidity_map`], (m + n + ℓ) × 3n. On the sphere
/// with a single vertex the pin on x₂ has no column and stays a zero row.
pub fn pinned_rigidity_matrix(graph: &Graph, surface: &Surface, config: &[Point]) -> DMatrix<f64> {
    let df = rigidity_matrix(graph, surface, config);
    let rows = df.nrows();
    let mut out = df.insert_rows(rows, surface.ell(), 0.0);
    for (i, &k) in surface.pinned_coordinates().iter().enumerate() {
        if k < out.ncols() {
            out[(rows + i, k)] = 1.0;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrices {
    pub df: DMatrix<f64>,
    pub df_star: DMatrix<f64>,
}

pub fn build_matrices(fw: &Framework) -> RigidityMatrices {
    RigidityMatrices {
        df: rigidity_matrix(&fw.graph, &fw.surface, &fw.config),
        df_star: pinned_rigidity_matrix(&fw.graph, &fw.surface, &fw.config),
    }
}

pub use crate::linalg::numeric_rank;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    #[serde(rename = "rank_dF")]
    pub rank_df: usize,
    pub nullity: usize,
    pub trivial_dim: usize,
    pub nontrivial_flex_dim: usize,
    pub is_infinitesimally_rigid: bool,
    pub is_independent: bool,
    pub is_isostatic: bool,
    /// Rigid in the sense that nearby equivalent frameworks are congruent.
    /// Complete graphs on at most 5 − ℓ vertices count as rigid even when
    /// they still slide along the surface.
    pub is_rigid_generic: bool,
    /// Some singular value sat close to the rank cutoff.
    #[serde(default)]
    pub borderline: bool,
    /// Resampled configurations disagreed on the rank.
    #[serde(default)]
    pub degenerate_sample: bool,
    /// Ranks were computed exactly over the rationals.
    #[serde(default)]
    pub exact: bool,
}

impl RigidityReport {
    fn assemble(graph: &Graph, ell: usize, rank: usize, trivial_dim: usize) -> Self {
        let (n, m) = (graph.n(), graph.m());
        let nullity = 3 * n - rank;
        let infinitesimally_rigid = rank + ell == 3 * n;
        let independent = rank == m + n;
        RigidityReport {
            rank_df: rank,
            nullity,
            trivial_dim,
            nontrivial_flex_dim: nullity.saturating_sub(trivial_dim),
            is_infinitesimally_rigid: infinitesimally_rigid,
            is_independent: independent,
            is_isostatic: infinitesimally_rigid && independent && m + ell == 2 * n,
            is_rigid_generic: (graph.is_complete() && n + ell <= 5) || infinitesimally_rigid,
            borderline: false,
            degenerate_sample: false,
            exact: false,
        }
    }
}

fn trivial_matrix(surface: &Surface, config: &[Point]) -> Result<DMatrix<f64>> {
    let basis = surface.trivial_flex_basis(config)?;
    if basis.is_empty() {
        return Ok(DMatrix::zeros(3 * config.len(), 0));
    }
    Ok(DMatrix::from_columns(&basis))
}

/// Classification of `graph` placed at `config`; the configuration is
/// trusted to be on the surface.
pub fn classify_config(
    graph: &Graph,
    surface: &Surface,
    config: &[Point],
    tol: f64,
) -> Result<RigidityReport> {
    let df = rigidity_matrix(graph, surface, config);
    let decision = linalg::rank_decision(&df, tol);
    let trivial = trivial_matrix(surface, config)?;
    let trivial_dim = linalg::numeric_rank(&trivial, tol);
    let mut report = RigidityReport::assemble(graph, surface.ell(), decision.rank, trivial_dim);
    report.borderline = decision.borderline;
    Ok(report)
}

pub fn classify(fw: &Framework) -> Result<RigidityReport> {
    classify_with_tol(fw, DEFAULT_RANK_TOL)
}

pub fn classify_with_tol(fw: &Framework, tol: f64) -> Result<RigidityReport> {
    classify_config(&fw.graph, &fw.surface, &fw.config, tol)
}

/// Classification using exact rational ranks; needs a rational
/// configuration.
pub fn classify_exact(fw: &Framework) -> Result<RigidityReport> {
    let rational = fw.rational_config.as_deref().ok_or_else(|| {
        RigidityError::InvalidFramework("exact mode needs a rational configuration".into())
    })?;
    if let Some(i) = exact::has_apex(rational).filter(|_| fw.surface == Surface::Cone) {
        return Err(RigidityError::ConeApex { vertex: i + 1 });
    }
    let rank = exact::rank(&exact::rigidity_matrix(&fw.graph, &fw.surface, rational));
    let trivial_dim = exact::rank(&exact::trivial_flex_rows(&fw.surface, rational));
    let mut report = RigidityReport::assemble(&fw.graph, fw.surface.ell(), rank, trivial_dim);
    report.exact = true;
    Ok(report)
}

/// SplitMix64 finalizer; derives independent child seeds.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_CLASSIFY: u64 = 1;
const STREAM_REDUNDANT: u64 = 2;

/// Classifies `graph` on a seeded random configuration. A borderline rank
/// triggers `trials` further samples; the report of the majority rank is
/// returned (ties go to the larger rank) and `degenerate_sample` is set
/// when the samples disagree.
pub fn classify_generic(
    graph: &Graph,
    surface: &Surface,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<RigidityReport> {
    let config = surface.sample_config(graph.n(), seed);
    let first = classify_config(graph, surface, &config, tol)?;
    if !first.borderline || trials == 0 {
        return Ok(first);
    }
    let mut reports = vec![first];
    for k in 0..trials as u64 {
        let c = surface.sample_config(graph.n(), derive_seed(seed, STREAM_CLASSIFY, k));
        reports.push(classify_config(graph, surface, &c, tol)?);
    }
    let votes = |rank: usize| reports.iter().filter(|r| r.rank_df == rank).count();
    let winner = reports
        .iter()
        .max_by_key(|r| (votes(r.rank_df), r.rank_df))
        .cloned()
        .expect("at least one report");
    let disagree = reports.iter().any(|r| r.rank_df != winner.rank_df);
    Ok(RigidityReport {
        degenerate_sample: disagree,
        ..winner
    })
}

/// Rigidity of `graph` at `config`, falling back to a majority vote over
/// fresh samples when the rank is borderline.
fn rigid_vote(
    graph: &Graph,
    surface: &Surface,
    config: &[Point],
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let report = classify_config(graph, surface, config, DEFAULT_RANK_TOL)?;
    if !report.borderline || trials == 0 {
        return Ok(report.is_rigid_generic);
    }
    let mut yes = usize::from(report.is_rigid_generic);
    for k in 0..trials as u64 {
        let c = surface.sample_config(graph.n(), derive_seed(seed, STREAM_REDUNDANT, k));
        yes += usize::from(classify_config(graph, surface, &c, DEFAULT_RANK_TOL)?.is_rigid_generic);
    }
    Ok(2 * yes > trials + 1)
}

/// True iff the framework is rigid and stays rigid after deleting any one
/// edge. A framework that is not rigid is reported as not redundantly
/// rigid. Borderline rank decisions are resampled up to `trials` times.
pub fn is_redundantly_rigid(fw: &Framework, trials: usize, seed: u64) -> Result<bool> {
    if !rigid_vote(&fw.graph, &fw.surface, &fw.config, trials, seed)? {
        return Ok(false);
    }
    let votes: Vec<Result<bool>> = (0..fw.graph.m())
        .into_par_iter()
        .map(|i| {
            let reduced = fw.graph.without_edge(i);
            let child = derive_seed(seed, STREAM_REDUNDANT, 1000 + i as u64);
            rigid_vote(&reduced, &fw.surface, &fw.config, trials, child)
        })
        .collect();
    let mut all = true;
    for v in votes {
        all &= v?;
    }
    Ok(all)
}

/// A unit infinitesimal flex orthogonal to the trivial ones, if any.
pub fn nontrivial_flex(fw: &Framework) -> Result<Option<DVector<f64>>> {
    nontrivial_flex_with_tol(fw, DEFAULT_RANK_TOL)
}

pub fn nontrivial_flex_with_tol(fw: &Framework, tol: f64) -> Result<Option<DVector<f64>>> {
    let report = classify_with_tol(fw, tol)?;
    if report.nontrivial_flex_dim == 0 {
        return Ok(None);
    }
    let df = rigidity_matrix(&fw.graph, &fw.surface, &fw.config);
    let null = linalg::null_space(&df, tol);
    let trivial = trivial_matrix(&fw.surface, &fw.config)?;
    let projected = if trivial.ncols() == 0 {
        null
    } else {
        // orthonormal basis of the trivial span
        let svd = trivial.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let top = svd.singular_values.max();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| top > 0.0 && svd.singular_values[i] > tol * top)
            .collect();
        let q = u.select_columns(&keep);
        &null - &q * (q.transpose() * &null)
    };
    let svd = projected.svd(true, false);
    let u = svd.u.expect("requested U");
    let best = svd.singular_values.imax();
    let flex = u.column(best).into_owned();
    Ok(Some(flex.normalize()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn fw(graph: Graph, surface: Surface, pts: &[[f64; 3]]) -> Framework {
        Framework::new(
            graph,
            surface,
            pts.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn edge_length_examples() {
        let f = fw(Graph::complete(2), Surface::Sphere, &[[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]);
        assert_eq!(edge_lengths(&f), vec![4.0]);
        let f = fw(Graph::new(1, []).unwrap(), Surface::Sphere, &[[0.0, 1.0, 0.0]]);
        assert!(edge_lengths(&f).is_empty());
        let s3 = 3f64.sqrt() / 2.0;
        let f = fw(
            Graph::complete(3),
            Surface::Cylinder,
            &[[1.0, 0.0, 0.0], [-0.5, s3, 0.0], [-0.5, -s3, 0.0]],
        );
        for l in edge_lengths(&f) {
            assert!((l - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_examples() {
        let f = fw(Graph::new(1, []).unwrap(), Surface::Sphere, &[[0.0, 1.0, 0.0]]);
        let mats = build_matrices(&f);
        assert_eq!(mats.df, DMatrix::from_row_slice(1, 3, &[0.0, 2.0, 0.0]));
        assert_eq!(mats.df_star.nrows(), 4);

        let f = fw(Graph::complete(2), Surface::Cylinder, &[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0]]);
        let mats = build_matrices(&f);
        let expected = DMatrix::from_row_slice(
            3,
            6,
            &[
                -2.0, 2.0, -2.0, 2.0, -2.0, 2.0, //
                0.0, 2.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 2.0, 0.0, 0.0,
            ],
        );
        assert_eq!(mats.df, expected);
        assert_eq!(mats.df_star.nrows(), 5);
        assert_eq!(mats.df_star[(3, 0)], 1.0);
        assert_eq!(mats.df_star[(4, 2)], 1.0);
    }

    #[test]
    fn k1_on_sphere() {
        let f = fw(Graph::new(1, []).unwrap(), Surface::Sphere, &[[0.0, 1.0, 0.0]]);
        let r = classify(&f).unwrap();
        assert_eq!(r.rank_df, 1);
        assert_eq!(r.nullity, 2);
        assert_eq!(r.trivial_dim, 2);
        assert!(r.is_rigid_generic);
        assert!(!r.is_infinitesimally_rigid);
    }

    #[test]
    fn rejects_bad_frameworks() {
        let g = Graph::complete(2);
        let off = Framework::new(
            g.clone(),
            Surface::Sphere,
            vec![Vector3::new(0.0, 1.0, 0.0), Vector3::new(0.0, 1.1, 0.0)],
        );
        assert!(matches!(off, Err(RigidityError::OffSurface { vertex: 2, .. })));
        let apex = Framework::new(
            g.clone(),
            Surface::Cone,
            vec![Vector3::new(1.0, 0.0, 1.0), Vector3::zeros()],
        );
        assert_eq!(apex, Err(RigidityError::ConeApex { vertex: 2 }));
        let short = Framework::new(g, Surface::Sphere, vec![Vector3::y()]);
        assert!(matches!(short, Err(RigidityError::InvalidFramework(_))));
    }

    #[test]
    fn framework_json() {
        let json = r#"{"surface": {"kind": "cylinder"}, "graph": {"n": 2, "edges": [[1, 2]]},
                       "config": [[0, 1, 0], [1, 0, 0.5]]}"#;
        let f: Framework = serde_json::from_str(json).unwrap();
        assert_eq!(f.config()[1], Vector3::new(1.0, 0.0, 0.5));
        let back: Framework = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);

        let json = r#"{"surface": {"kind": "cylinder"}, "graph": {"n": 1, "edges": []},
                       "rational_config": [[[3, 5], [4, 5], [7, 2]]]}"#;
        let f: Framework = serde_json::from_str(json).unwrap();
        assert_eq!(f.config()[0], Vector3::new(0.6, 0.8, 3.5));
        assert!(classify_exact(&f).unwrap().exact);

        let off = r#"{"surface": {"kind": "cylinder"}, "graph": {"n": 1, "edges": []},
                      "rational_config": [[[1, 2], [1, 2], [0, 1]]]}"#;
        assert!(serde_json::from_str::<Framework>(off).is_err());
    }

    #[test]
    fn k4_cylinder_is_isostatic_and_not_redundant() {
        let f = Framework::sample(Graph::complete(4), Surface::Cylinder, 4);
        let r = classify(&f).unwrap();
        assert!(r.is_isostatic);
        assert!(!is_redundantly_rigid(&f, 3, 1).unwrap());
        assert_eq!(nontrivial_flex(&f).unwrap(), None);
    }

    #[test]
    fn k5_cylinder_is_redundantly_rigid() {
        let f = Framework::sample(Graph::complete(5), Surface::Cylinder, 9);
        assert!(is_redundantly_rigid(&f, 3, 1).unwrap());
    }

    #[test]
    fn mechanism_has_a_unit_flex() {
        let f = Framework::sample(Graph::complete(4).without_edge(0), Surface::Cylinder, 2);
        let s = nontrivial_flex(&f).unwrap().expect("mechanism");
        let df = build_matrices(&f).df;
        assert!((&df * &s).norm() < 1e-9);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        for t in f.surface().trivial_flex_basis(f.config()).unwrap() {
            assert!(s.dot(&t).abs() < 1e-9);
        }
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 1, 1));
        assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
        assert_eq!(derive_seed(7, 3, 9), derive_seed(7, 3, 9));
    }
}
