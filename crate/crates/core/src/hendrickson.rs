//! Necessary conditions for generic global rigidity on a surface:
//! k-connectivity and redundant rigidity.
//!
//! The verdict only ever says whether the necessary conditions hold. It is
//! never a certificate of global rigidity.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::framework::{derive_seed, is_redundantly_rigid, Framework};
use crate::graph::{is_k_connected, Graph};
use crate::surface::{Surface, SurfaceKind};

pub const DEFAULT_TRIALS: usize = 3;

/// Connectivity is only forced once the graph has this many vertices.
const CONNECTIVITY_MIN_VERTICES: usize = 4;

const SPHERE_NOTE: &str = "On the sphere these necessary conditions are also sufficient for \
     generic global rigidity, by the equivalence of generic global rigidity on the sphere and \
     in the plane.";

const CONJECTURE_NOTE: &str = "Conjectured sufficient: a generic framework on the cylinder or \
     cone is believed to be globally rigid iff G is complete on at most four vertices, or G is \
     2-connected and the framework is redundantly rigid. Unproven.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FailsNecessary,
    PassesNecessary,
    TriviallyGloballyRigid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalRigidityVerdict {
    pub connectivity_ok: bool,
    pub required_k: usize,
    pub redundancy_ok: bool,
    pub small_complete_exception: bool,
    pub verdict: Verdict,
    pub conjecture_note: Option<String>,
    /// False when n < 4, where connectivity is not required.
    pub connectivity_checked: bool,
    /// n ≥ 4 + γ, where redundant rigidity is known to be necessary.
    pub redundancy_required: bool,
}

/// Evaluates the necessary conditions for `g` on `s` using seeded random
/// configurations as stand-ins for generic ones.
///
/// Complete graphs on at most 5 − ℓ vertices (rigid without being
/// infinitesimally rigid) are reported as trivially globally rigid.
pub fn check_necessary_conditions(
    g: &Graph,
    s: &Surface,
    trials: usize,
    seed: u64,
) -> Result<GlobalRigidityVerdict> {
    let meta = s.meta();
    let n = g.n();
    let small_complete_exception = g.is_complete() && n + meta.ell <= 5;

    let connectivity_checked = n >= CONNECTIVITY_MIN_VERTICES;
    let connectivity_ok = !connectivity_checked || is_k_connected(g, meta.k_conn);

    let fw = Framework::sample(g.clone(), *s, seed);
    let redundancy_ok = is_redundantly_rigid(&fw, trials, derive_seed(seed, 7, 0))?;

    let verdict = if small_complete_exception {
        Verdict::TriviallyGloballyRigid
    } else if connectivity_ok && redundancy_ok {
        Verdict::PassesNecessary
    } else {
        Verdict::FailsNecessary
    };

    let conjecture_note = match (verdict, s.kind()) {
        (Verdict::PassesNecessary, SurfaceKind::Sphere) => Some(SPHERE_NOTE.to_string()),
        (Verdict::PassesNecessary, SurfaceKind::Cylinder | SurfaceKind::Cone) => {
            Some(CONJECTURE_NOTE.to_string())
        }
        _ => None,
    };

    Ok(GlobalRigidityVerdict {
        connectivity_ok,
        required_k: meta.k_conn,
        redundancy_ok,
        small_complete_exception,
        verdict,
        conjecture_note,
        connectivity_checked,
        redundancy_required: n >= 4 + meta.gamma,
    })
}
