//! Exact rank over the rationals for frameworks with rational coordinates.
//!
//! Rational points on each surface come from rational parametrizations:
//! inverse stereographic projection for the sphere, Pythagorean-triple
//! angles for the cylinder and cone, and lines through the rational point
//! (1, 0, 0) for the ellipsoid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::surface::{Point, Surface};

pub type RationalPoint = [Rational64; 3];

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn big_point(p: &RationalPoint) -> [BigRational; 3] {
    [big(p[0]), big(p[1]), big(p[2])]
}

pub fn to_f64_point(p: &RationalPoint) -> Point {
    Point::new(
        p[0].to_f64().unwrap(),
        p[1].to_f64().unwrap(),
        p[2].to_f64().unwrap(),
    )
}

fn h_exact(surface: &Surface, p: &[BigRational; 3]) -> BigRational {
    let [x, y, z] = p;
    let one = BigRational::one();
    match surface {
        Surface::Sphere => x * x + y * y + z * z - one,
        Surface::Cylinder => x * x + y * y - one,
        Surface::Cone => x * x + y * y - z * z,
        Surface::Ellipsoid { a, b } => x * x + big(*a) * y * y + big(*b) * z * z - one,
    }
}

fn grad_exact(surface: &Surface, p: &[BigRational; 3]) -> [BigRational; 3] {
    let two = BigRational::from_integer(BigInt::from(2));
    let [x, y, z] = p.clone();
    match surface {
        Surface::Sphere => [&two * x, &two * y, &two * z],
        Surface::Cylinder => [&two * x, &two * y, BigRational::zero()],
        Surface::Cone => [&two * x, &two * y, -(&two * z)],
        Surface::Ellipsoid { a, b } => [&two * x, &two * big(*a) * y, &two * big(*b) * z],
    }
}

/// True iff `p` lies exactly on the surface.
pub fn on_surface(surface: &Surface, p: &RationalPoint) -> bool {
    h_exact(surface, &big_point(p)).is_zero()
}

/// The rigidity matrix dF over Q, with the same row layout as the
/// floating-point one.
pub fn rigidity_matrix(graph: &Graph, surface: &Surface, config: &[RationalPoint]) -> Vec<Vec<BigRational>> {
    let n = graph.n();
    let pts: Vec<_> = config.iter().map(big_point).collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut rows = Vec::with_capacity(graph.m() + n);
    for &(u, v) in graph.edges() {
        let mut row = vec![BigRational::zero(); 3 * n];
        for k in 0..3 {
            let d = &pts[u][k] - &pts[v][k];
            row[3 * u + k] = &two * &d;
            row[3 * v + k] = -(&two * d);
        }
        rows.push(row);
    }
    for (i, p) in pts.iter().enumerate() {
        let mut row = vec![BigRational::zero(); 3 * n];
        for (k, g) in grad_exact(surface, p).into_iter().enumerate() {
            row[3 * i + k] = g;
        }
        rows.push(row);
    }
    rows
}

/// Trivial flex basis over Q, one row per basis field.
pub fn trivial_flex_rows(surface: &Surface, config: &[RationalPoint]) -> Vec<Vec<BigRational>> {
    let pts: Vec<_> = config.iter().map(big_point).collect();
    let zero = BigRational::zero;
    let field = |f: &dyn Fn(&[BigRational; 3]) -> [BigRational; 3]| {
        pts.iter().flat_map(f).collect::<Vec<_>>()
    };
    let about_z = |p: &[BigRational; 3]| [-p[1].clone(), p[0].clone(), zero()];
    match surface {
        Surface::Sphere => vec![
            field(&|p| [zero(), -p[2].clone(), p[1].clone()]),
            field(&|p| [p[2].clone(), zero(), -p[0].clone()]),
            field(&|p| [-p[1].clone(), p[0].clone(), zero()]),
        ],
        Surface::Cylinder => vec![
            field(&about_z),
            field(&|_| [zero(), zero(), BigRational::one()]),
        ],
        Surface::Cone => vec![field(&about_z)],
        Surface::Ellipsoid { .. } => Vec::new(),
    }
}

/// Rank of a rational matrix by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            for k in c + 1..ncols {
                let num = &pivot_row[c] * &row[k] - &row[c] * &pivot_row[k];
                row[k] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = top[r][c].clone();
        r += 1;
    }
    r
}

fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

fn small_ratio<R: Rng + ?Sized>(rng: &mut R, max: i64) -> Rational64 {
    let num = rng.random_range(-max..=max);
    let den = rng.random_range(1..=max);
    Rational64::new(num, den)
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> Rational64 {
    if rng.random_bool(0.5) {
        Rational64::one()
    } else {
        -Rational64::one()
    }
}

/// Rational cosine/sine pair from t: ((1 − t²)/(1 + t²), 2t/(1 + t²)).
fn circle_point(t: Rational64) -> (Rational64, Rational64) {
    let one = Rational64::one();
    let d = one + t * t;
    ((one - t * t) / d, Rational64::from(2) * t / d)
}

/// Deterministic pseudo-random configuration with exactly-on-surface
/// rational coordinates of small height. Never places a point at the cone
/// apex.
pub fn sample_rational_config(surface: &Surface, n: usize, seed: u64) -> Vec<RationalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Rational64::one();
    (0..n)
        .map(|_| match surface {
            Surface::Sphere => {
                let u = small_ratio(&mut rng, 5);
                let v = small_ratio(&mut rng, 5);
                let s = u * u + v * v;
                let d = s + one;
                let two = Rational64::from(2);
                [two * u / d, two * v / d, (s - one) / d]
            }
            Surface::Cylinder => {
                let (c, s) = circle_point(small_ratio(&mut rng, 6));
                [c * random_sign(&mut rng), s, small_ratio(&mut rng, 4)]
            }
            Surface::Cone => {
                let (c, s) = circle_point(small_ratio(&mut rng, 6));
                let r = Rational64::new(rng.random_range(2..=8), 4);
                [r * c * random_sign(&mut rng), r * s, r * random_sign(&mut rng)]
            }
            Surface::Ellipsoid { a, b } => {
                // second intersection of the line (1,0,0) + t·d with the ellipsoid
                let d1 = Rational64::from(rng.random_range(1..=4)) * random_sign(&mut rng);
                let d2 = small_ratio(&mut rng, 4);
                let d3 = small_ratio(&mut rng, 4);
                let t = -Rational64::from(2) * d1 / (d1 * d1 + a * d2 * d2 + b * d3 * d3);
                [
                    (one + t * d1) * random_sign(&mut rng),
                    t * d2,
                    t * d3,
                ]
            }
        })
        .collect()
}

/// Index of the first point sitting exactly at the origin.
pub fn has_apex(config: &[RationalPoint]) -> Option<usize> {
    config
        .iter()
        .position(|p| p.iter().all(|c| c.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceKind;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Plain Gaussian elimination over Q as an independent oracle.
    fn rank_by_gauss(rows: &[Vec<BigRational>]) -> usize {
        let mut a = rows.to_vec();
        let ncols = a.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[r][c];
                    for k in c..ncols {
                        let sub = &f * &a[r][k];
                        a[i][k] -= sub;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn bareiss_small() {
        let m = vec![
            vec![q(1, 2), q(1, 3), q(1, 1)],
            vec![q(1, 1), q(2, 3), q(2, 1)],
            vec![q(0, 1), q(0, 1), q(5, 7)],
        ];
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&m), rank_by_gauss(&m));
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![q(0, 1); 4]]), 0);
    }

    #[test]
    fn bareiss_matches_gauss_on_rigidity_matrices() {
        for (seed, kind) in SurfaceKind::ALL.iter().enumerate() {
            let s = Surface::from_kind(*kind);
            for n in 2..6 {
                let cfg = sample_rational_config(&s, n, seed as u64 * 31 + n as u64);
                let g = Graph::complete(n);
                let m = rigidity_matrix(&g, &s, &cfg);
                assert_eq!(rank(&m), rank_by_gauss(&m));
            }
        }
    }

    #[test]
    fn rational_samples_are_on_surface() {
        for kind in SurfaceKind::ALL {
            let s = Surface::from_kind(kind);
            let cfg = sample_rational_config(&s, 30, 5);
            assert!(cfg.iter().all(|p| on_surface(&s, p)), "{kind:?}");
            assert_eq!(has_apex(&cfg), None);
            assert_eq!(cfg, sample_rational_config(&s, 30, 5));
        }
    }
}
