//! Extremal rays of the Mori cone, the fan surgeries they induce, and a
//! directed descent toward a minimal end model.
//!
//! On a complete simplicial toric variety the Mori cone is spanned by the
//! finitely many wall curves. This module groups walls into extremal rays,
//! reads the contraction type off the sign pattern of the generating class
//! (divisorial, flipping, or fibering), performs the corresponding surgery
//! exactly, and transports divisors and curve classes across each step.
//! Every surgery carries its own certificate and re-verifies it before
//! returning: a divisorial target must reproduce its source as a star
//! subdivision, the two sides of a flip must agree after subdividing at
//! the common center, pushforwards must satisfy the projection formula,
//! and a contracted divisor must pull back to the original coefficient by
//! coefficient.
//!
//! [`run_descent`] iterates contractions of extremal rays that are trivial
//! against a tracked nef divisor and negative against the log-canonical
//! class of a tracked ray set, preserving two inequalities along the way;
//! [`descent_witness`] then extracts from the end model an extremal class
//! whose pairings certify the decomposition the descent was run for.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::fan::{Fan, StarFan, Wall};
use crate::intersection::{self, pair, wall_curves, CurveClass, TorusDivisor};
use crate::linalg::{self, IntMat, IntVec, Rat, RatVec};
use crate::polytope::{phi_hull, sigma_d, GeneralizedFan};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Extremal rays
// ---------------------------------------------------------------------------

/// How contracting an extremal ray changes the variety.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionKind {
    /// Exactly one ray is met negatively; contracting removes that ray.
    Divisorial(usize),
    /// At least two rays are met negatively; contracting re-triangulates
    /// finitely many cone spans in place, keeping all rays.
    Flipping,
    /// No ray is met negatively; the variety fibers over a base of lower
    /// dimension.
    Fibering,
}

/// An extremal ray of the Mori cone together with the walls that lie on it.
#[derive(Debug, Clone)]
pub struct ExtremalRay {
    /// The generating class, normalized to a primitive integer degree
    /// vector.
    pub generator: CurveClass,
    /// Indices into `Fan::walls()` whose curve classes lie on this ray,
    /// sorted ascending.
    pub walls: Vec<usize>,
    pub kind: ContractionKind,
}

/// The extremal rays of the Mori cone. Wall classes are grouped by
/// positive proportionality; a group is extremal exactly when its class is
/// not a nonnegative combination of the remaining classes. Membership is
/// decided by an exact LP whose certificate is re-verified either way.
pub fn extremal_rays(fan: &Fan) -> Result<Vec<ExtremalRay>> {
    let wcs = wall_curves(fan)?;
    extremal_rays_from(&wcs)
}

fn classify(class: &CurveClass) -> ContractionKind {
    match class.j_minus().as_slice() {
        [] => ContractionKind::Fibering,
        [rho0] => ContractionKind::Divisorial(*rho0),
        _ => ContractionKind::Flipping,
    }
}

fn extremal_rays_from(wcs: &[(Wall, CurveClass)]) -> Result<Vec<ExtremalRay>> {
    let mut groups: BTreeMap<IntVec, Vec<usize>> = BTreeMap::new();
    for (wi, (_, c)) in wcs.iter().enumerate() {
        groups
            .entry(linalg::primitive_of_rational(&c.degrees)?)
            .or_default()
            .push(wi);
    }
    let keys: Vec<&IntVec> = groups.keys().collect();
    let mut out = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        let others: Vec<RatVec> = keys
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, k)| linalg::to_rat_vec(k))
            .collect();
        let target = linalg::to_rat_vec(key);
        if !others.is_empty() && linalg::cone_member(&others, &target)?.inside {
            continue;
        }
        let generator = CurveClass { degrees: target };
        let kind = classify(&generator);
        out.push(ExtremalRay { generator, walls: groups[*key].clone(), kind });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Span groups of an extremal ray
// ---------------------------------------------------------------------------

/// The maximal cones touching an extremal ray's walls, grouped by the
/// common (n+1)-ray span they triangulate.
struct SpanGroup {
    /// Sorted rays of the span; every cone of the group drops exactly one
    /// positively met ray from this set.
    delta: Vec<usize>,
    /// Indices of the group's maximal cones in the source fan.
    cones: Vec<usize>,
}

/// Group the cones adjacent to the ray's walls and verify the expected
/// local structure: each span has one more ray than the dimension, carries
/// the full support of the class, and is triangulated by exactly the cones
/// obtained by dropping one positively met ray.
fn span_groups(fan: &Fan, walls: &[Wall], ray: &ExtremalRay) -> Result<Vec<SpanGroup>> {
    let j_plus = ray.generator.j_plus();
    let j_minus = ray.generator.j_minus();
    let mut support = j_plus.clone();
    support.extend(&j_minus);
    support.sort_unstable();
    for cone in &fan.max_cones {
        if support.iter().all(|&r| cone.contains_ray(r)) {
            return Err(Error::Internal(
                "a maximal cone contains the full support of an extremal class".into(),
            ));
        }
    }
    let mut grouped: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
    for &wi in &ray.walls {
        let wall = walls.get(wi).ok_or_else(|| {
            Error::Internal("extremal ray references a wall that does not exist".into())
        })?;
        let (c1, c2) = wall.cones;
        let mut delta: BTreeSet<usize> = fan.max_cones[c1].rays.iter().copied().collect();
        delta.extend(fan.max_cones[c2].rays.iter().copied());
        let delta: Vec<usize> = delta.into_iter().collect();
        if delta.len() != fan.dim + 1 {
            return Err(Error::Internal("wall span of unexpected size".into()));
        }
        if !support.iter().all(|r| delta.binary_search(r).is_ok()) {
            return Err(Error::Internal("curve support escapes its wall span".into()));
        }
        let entry = grouped.entry(delta).or_default();
        entry.insert(c1);
        entry.insert(c2);
    }
    let cone_index: BTreeMap<&[usize], usize> = fan
        .max_cones
        .iter()
        .enumerate()
        .map(|(i, c)| (c.rays.as_slice(), i))
        .collect();
    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for (delta, adjacent) in grouped {
        let mut expected: BTreeSet<usize> = BTreeSet::new();
        for &rho in &j_plus {
            let cone: Vec<usize> = delta.iter().copied().filter(|&r| r != rho).collect();
            match cone_index.get(cone.as_slice()) {
                Some(&ci) => {
                    expected.insert(ci);
                }
                None => {
                    return Err(Error::Internal(
                        "a span is missing the complement of a positively met ray".into(),
                    ))
                }
            }
        }
        if expected != adjacent {
            return Err(Error::Internal(
                "span cones do not match the positive-ray complements".into(),
            ));
        }
        for &ci in &expected {
            if !claimed.insert(ci) {
                return Err(Error::Internal(
                    "a maximal cone is claimed by two wall spans".into(),
                ));
            }
        }
        out.push(SpanGroup { delta, cones: expected.into_iter().collect() });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Contractions
// ---------------------------------------------------------------------------

/// Which birational surgery a step performs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    DivisorialContraction,
    Flip,
}

/// One birational step: source and target fan, the contracted class, and
/// the combinatorial delta, plus the star-subdivision center that
/// certifies the surgery.
#[derive(Debug, Clone)]
pub struct BirationalStep {
    pub kind: StepKind,
    pub source: Fan,
    pub target: Fan,
    /// Degree vector of the contracted class, in source indices.
    pub contracted: CurveClass,
    /// The removed ray for a divisorial contraction, `None` for a flip.
    pub removed_ray: Option<usize>,
    /// Source ray index → target ray index.
    pub ray_map: Vec<Option<usize>>,
    /// Raysets of the removed maximal cones, in source indices.
    pub removed_cones: Vec<Vec<usize>>,
    /// Raysets of the added maximal cones, in source indices.
    pub added_cones: Vec<Vec<usize>>,
    /// Subdividing the target (divisorial) or both sides (flip) at this
    /// primitive point reproduces the source resp. a common refinement.
    pub center: IntVec,
}

/// A fiber-space contraction: the quotient by the span of the positively
/// met rays, together with the fiber that those rays form.
#[derive(Debug, Clone)]
pub struct FiberingContraction {
    /// Fan of the base; `None` when the base is a point.
    pub base: Option<Fan>,
    /// Rows project the source lattice onto the base lattice.
    pub projection: IntMat,
    /// Source ray index → base ray index; `None` on fiber rays.
    pub ray_map: Vec<Option<usize>>,
    /// The fiber: a complete fan with one more ray than its dimension.
    pub fiber: Fan,
    /// Source indices of the fiber rays, sorted.
    pub fiber_rays: Vec<usize>,
}

/// Result of contracting an extremal ray.
#[derive(Debug, Clone)]
pub enum Contraction {
    Birational(BirationalStep),
    Fibering(FiberingContraction),
}

/// Contract an extremal ray of the Mori cone. The returned surgery has
/// been re-verified against its certificate; see [`BirationalStep`] and
/// [`FiberingContraction`].
pub fn contract(fan: &Fan, ray: &ExtremalRay) -> Result<Contraction> {
    let walls = fan.walls()?;
    contract_with(fan, &walls, ray)
}

fn contract_with(fan: &Fan, walls: &[Wall], ray: &ExtremalRay) -> Result<Contraction> {
    if ray.generator.degrees.len() != fan.rays.len() {
        return Err(Error::DimensionMismatch(
            "extremal class arity differs from the ray count".into(),
        ));
    }
    if classify(&ray.generator) != ray.kind {
        return Err(Error::Hypothesis(
            "contraction kind disagrees with the class sign pattern".into(),
        ));
    }
    match ray.kind {
        ContractionKind::Divisorial(rho0) => {
            divisorial(fan, walls, ray, rho0).map(Contraction::Birational)
        }
        ContractionKind::Flipping => flip(fan, walls, ray).map(Contraction::Birational),
        ContractionKind::Fibering => fibering(fan, walls, ray).map(Contraction::Fibering),
    }
}

fn divisorial(
    fan: &Fan,
    walls: &[Wall],
    ray: &ExtremalRay,
    rho0: usize,
) -> Result<BirationalStep> {
    let groups = span_groups(fan, walls, ray)?;
    let removed: BTreeSet<usize> = groups.iter().flat_map(|g| g.cones.iter().copied()).collect();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        if cone.contains_ray(rho0) != removed.contains(&ci) {
            return Err(Error::Internal(
                "cones through the removed ray must be exactly the span cones".into(),
            ));
        }
    }
    let ray_map: Vec<Option<usize>> = (0..fan.rays.len())
        .map(|r| match r.cmp(&rho0) {
            Ordering::Less => Some(r),
            Ordering::Equal => None,
            Ordering::Greater => Some(r - 1),
        })
        .collect();
    let target_rays: Vec<IntVec> = fan
        .rays
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != rho0)
        .map(|(_, v)| v.clone())
        .collect();
    let mut target_cones: Vec<Vec<usize>> = Vec::new();
    let mut added: Vec<Vec<usize>> = Vec::new();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        if !removed.contains(&ci) {
            target_cones.push(map_rays(&cone.rays, &ray_map)?);
        }
    }
    for g in &groups {
        let new_cone: Vec<usize> = g.delta.iter().copied().filter(|&r| r != rho0).collect();
        target_cones.push(map_rays(&new_cone, &ray_map)?);
        added.push(new_cone);
    }
    let target = Fan::new(fan.dim, target_rays, target_cones)?;
    let center = fan.rays[rho0].clone();
    if !target.star_subdivision(&center)?.equivalent(fan) {
        return Err(Error::Internal(
            "divisorial contraction failed its star-subdivision round trip".into(),
        ));
    }
    Ok(BirationalStep {
        kind: StepKind::DivisorialContraction,
        source: fan.clone(),
        target,
        contracted: ray.generator.clone(),
        removed_ray: Some(rho0),
        ray_map,
        removed_cones: removed.iter().map(|&ci| fan.max_cones[ci].rays.clone()).collect(),
        added_cones: added,
        center,
    })
}

fn flip(fan: &Fan, walls: &[Wall], ray: &ExtremalRay) -> Result<BirationalStep> {
    let groups = span_groups(fan, walls, ray)?;
    let j_minus = ray.generator.j_minus();
    let removed: BTreeSet<usize> = groups.iter().flat_map(|g| g.cones.iter().copied()).collect();
    let mut target_cones: Vec<Vec<usize>> = fan
        .max_cones
        .iter()
        .enumerate()
        .filter(|(ci, _)| !removed.contains(ci))
        .map(|(_, c)| c.rays.clone())
        .collect();
    let mut added: Vec<Vec<usize>> = Vec::new();
    for g in &groups {
        for &rho in &j_minus {
            let cone: Vec<usize> = g.delta.iter().copied().filter(|&r| r != rho).collect();
            target_cones.push(cone.clone());
            added.push(cone);
        }
    }
    let target = Fan::new(fan.dim, fan.rays.clone(), target_cones)?;
    // The positively met rays meet in a single point class; subdividing
    // both sides there must give the same fan.
    let mut w = vec![Rat::zero(); fan.dim];
    for (rho, d) in ray.generator.degrees.iter().enumerate() {
        if d.is_positive() {
            for (wi, ui) in w.iter_mut().zip(&fan.rays[rho]) {
                *wi += d * Rat::from_integer(ui.clone());
            }
        }
    }
    let center = linalg::primitive_of_rational(&w)?;
    if !fan
        .star_subdivision(&center)?
        .equivalent(&target.star_subdivision(&center)?)
    {
        return Err(Error::Internal(
            "flip sides disagree after subdividing at the common center".into(),
        ));
    }
    Ok(BirationalStep {
        kind: StepKind::Flip,
        source: fan.clone(),
        target,
        contracted: ray.generator.clone(),
        removed_ray: None,
        ray_map: (0..fan.rays.len()).map(Some).collect(),
        removed_cones: removed.iter().map(|&ci| fan.max_cones[ci].rays.clone()).collect(),
        added_cones: added,
        center,
    })
}

fn fibering(fan: &Fan, walls: &[Wall], ray: &ExtremalRay) -> Result<FiberingContraction> {
    let groups = span_groups(fan, walls, ray)?;
    let covered: usize = groups.iter().map(|g| g.cones.len()).sum();
    if covered != fan.max_cones.len() {
        return Err(Error::Internal(
            "a fibering class must reach every maximal cone".into(),
        ));
    }
    let j_plus = ray.generator.j_plus();
    let n = fan.dim;
    // Columns are the positively met rays; the normal form splits the
    // lattice into the saturated span and the base lattice.
    let a: IntMat = (0..n)
        .map(|row| j_plus.iter().map(|&r| fan.rays[r][row].clone()).collect())
        .collect();
    let snf = linalg::smith_normal_form(&a)?;
    let n0 = snf.invariants().len();
    if j_plus.len() != n0 + 1 {
        return Err(Error::Internal(
            "fiber rays must exceed the fiber dimension by exactly one".into(),
        ));
    }
    let mut fiber_rays_vecs: Vec<IntVec> = Vec::new();
    for &r in &j_plus {
        let img = linalg::mat_vec_int(&snf.u, &fan.rays[r]);
        if img[n0..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Internal("fiber ray escapes the saturated span".into()));
        }
        fiber_rays_vecs.push(img[..n0].to_vec());
        let face: Vec<usize> = j_plus.iter().copied().filter(|&s| s != r).collect();
        if !fan
            .max_cones
            .iter()
            .any(|c| face.iter().all(|&s| c.contains_ray(s)))
        {
            return Err(Error::Internal("fiber cone is not a face of the fan".into()));
        }
    }
    let fiber = Fan::new(n0, fiber_rays_vecs, linalg::combinations(j_plus.len(), n0))?;
    let n_base = n - n0;
    if n_base == 0 {
        return Ok(FiberingContraction {
            base: None,
            projection: Vec::new(),
            ray_map: vec![None; fan.rays.len()],
            fiber,
            fiber_rays: j_plus,
        });
    }
    let projection: IntMat = snf.u[n0..n].to_vec();
    let jset: BTreeSet<usize> = j_plus.iter().copied().collect();
    let mut base_rays: Vec<IntVec> = Vec::new();
    let mut ray_map: Vec<Option<usize>> = vec![None; fan.rays.len()];
    for (r, slot) in ray_map.iter_mut().enumerate() {
        if jset.contains(&r) {
            continue;
        }
        let img = linalg::mat_vec_int(&projection, &fan.rays[r]);
        if img.iter().all(Zero::is_zero) {
            return Err(Error::Internal(
                "a ray outside the fiber projects to zero".into(),
            ));
        }
        let prim = linalg::primitive(&img)?;
        let idx = match base_rays.iter().position(|b| *b == prim) {
            Some(i) => i,
            None => {
                base_rays.push(prim);
                base_rays.len() - 1
            }
        };
        *slot = Some(idx);
    }
    let mut base_cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for g in &groups {
        let gamma: Vec<usize> = g.delta.iter().copied().filter(|r| !jset.contains(r)).collect();
        if gamma.len() != n_base {
            return Err(Error::Internal("base cone of unexpected dimension".into()));
        }
        let mut cone: Vec<usize> = Vec::new();
        for &r in &gamma {
            cone.push(ray_map[r].ok_or_else(|| {
                Error::Internal("base cone uses an unmapped ray".into())
            })?);
        }
        cone.sort_unstable();
        cone.dedup();
        if cone.len() != n_base {
            return Err(Error::Internal("base cone rays collide".into()));
        }
        base_cones.insert(cone);
    }
    if base_cones.len() != groups.len() {
        return Err(Error::Internal("two spans project to the same base cone".into()));
    }
    let base = Fan::new(n_base, base_rays, base_cones.into_iter().collect())?;
    Ok(FiberingContraction {
        base: Some(base),
        projection,
        ray_map,
        fiber,
        fiber_rays: j_plus,
    })
}

fn map_rays(rays: &[usize], ray_map: &[Option<usize>]) -> Result<Vec<usize>> {
    rays.iter()
        .map(|&r| {
            ray_map
                .get(r)
                .copied()
                .flatten()
                .ok_or_else(|| Error::Internal("a surviving cone uses a removed ray".into()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Transport across a birational step
// ---------------------------------------------------------------------------

/// Push a divisor forward: coefficients carry over ray by ray and the
/// removed ray's coefficient is dropped.
pub fn pushforward_divisor(step: &BirationalStep, d: &TorusDivisor) -> Result<TorusDivisor> {
    if d.coeffs.len() != step.source.rays.len() {
        return Err(Error::DimensionMismatch(
            "divisor arity differs from the source ray count".into(),
        ));
    }
    let mut out = vec![Rat::zero(); step.target.rays.len()];
    for (s, m) in step.ray_map.iter().enumerate() {
        if let Some(t) = *m {
            out[t] = d.coeffs[s].clone();
        }
    }
    Ok(TorusDivisor::new(out))
}

/// Pull a divisor back. Across a flip the coefficients are unchanged (the
/// step is an isomorphism away from codimension ≥ 2); across a divisorial
/// contraction the source refines the target, so the pullback evaluates
/// the target's support function on the source rays.
pub fn pullback_divisor(step: &BirationalStep, d: &TorusDivisor) -> Result<TorusDivisor> {
    if d.coeffs.len() != step.target.rays.len() {
        return Err(Error::DimensionMismatch(
            "divisor arity differs from the target ray count".into(),
        ));
    }
    match step.kind {
        StepKind::Flip => Ok(TorusDivisor::new(d.coeffs.clone())),
        StepKind::DivisorialContraction => {
            intersection::pullback(&step.target, d, &step.source)
        }
    }
}

/// Push a curve class forward. The image pairs against every target
/// divisor as the source class pairs against its pullback; this determines
/// the degrees uniquely because the contracted class, rescaled to meet the
/// removed ray's divisor in −1, spans the kernel.
pub fn pushforward_curve(step: &BirationalStep, c: &CurveClass) -> Result<CurveClass> {
    if c.degrees.len() != step.source.rays.len() {
        return Err(Error::DimensionMismatch(
            "curve arity differs from the source ray count".into(),
        ));
    }
    match step.kind {
        StepKind::Flip => Ok(c.clone()),
        StepKind::DivisorialContraction => {
            let rho0 = step
                .removed_ray
                .ok_or_else(|| Error::Internal("divisorial step lacks its removed ray".into()))?;
            let e0 = &step.contracted.degrees[rho0];
            if !e0.is_negative() {
                return Err(Error::Internal(
                    "contracted class must meet the removed ray negatively".into(),
                ));
            }
            let f = &c.degrees[rho0] / e0;
            let mut out = vec![Rat::zero(); step.target.rays.len()];
            for (s, m) in step.ray_map.iter().enumerate() {
                let adjusted = &c.degrees[s] - &f * &step.contracted.degrees[s];
                match *m {
                    Some(t) => out[t] = adjusted,
                    None => {
                        if !adjusted.is_zero() {
                            return Err(Error::Internal(
                                "pushforward must vanish on the removed ray".into(),
                            ));
                        }
                    }
                }
            }
            Ok(CurveClass { degrees: out })
        }
    }
}

/// Pull a curve class back numerically: degrees carry over on surviving
/// rays and vanish on the removed ray, whose prime divisor pushes forward
/// to zero.
pub fn pullback_curve(step: &BirationalStep, c: &CurveClass) -> Result<CurveClass> {
    if c.degrees.len() != step.target.rays.len() {
        return Err(Error::DimensionMismatch(
            "curve arity differs from the target ray count".into(),
        ));
    }
    let degrees = step
        .ray_map
        .iter()
        .map(|m| match *m {
            Some(t) => c.degrees[t].clone(),
            None => Rat::zero(),
        })
        .collect();
    Ok(CurveClass { degrees })
}

// ---------------------------------------------------------------------------
// Picard-rank-one torus-invariant subvarieties
// ---------------------------------------------------------------------------

/// All torus-invariant subvarieties of positive dimension (the variety
/// itself included, as the empty face) whose star fan has exactly one more
/// ray than its dimension. Faces are returned sorted.
pub fn picard_one_subvarieties(fan: &Fan) -> Result<Vec<(Vec<usize>, StarFan)>> {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for cone in &fan.max_cones {
        let m = cone.rays.len();
        for k in 0..fan.dim.min(m) {
            for idxs in linalg::combinations(m, k) {
                faces.insert(idxs.iter().map(|&i| cone.rays[i]).collect());
            }
        }
    }
    let mut out = Vec::new();
    for face in faces {
        let star = fan.star(&face)?;
        if star.fan.rays.len() == star.fan.dim + 1 {
            out.push((face, star));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Directed descent
// ---------------------------------------------------------------------------

/// Running data of a directed descent: the current fan, a tracked nef
/// Cartier divisor, a tracked curve class, and a tracked ray set, plus the
/// fixed context the invariants are checked against.
#[derive(Debug, Clone)]
pub struct MmpState {
    pub fan: Fan,
    pub divisor: TorusDivisor,
    pub curve: CurveClass,
    /// Tracked ray subset in current indices, sorted.
    pub index_set: Vec<usize>,
    /// Current ray index → ray index in the initial fan.
    pub ray_origin: Vec<usize>,
    /// Generalized fan of the initial divisor on the initial fan.
    pub ambient: GeneralizedFan,
    /// Rays (initial indices) of the fixed generalized cone containing the
    /// curve's negative support and avoiding the tracked rays.
    pub separating: Vec<usize>,
}

impl MmpState {
    /// Validate the descent hypotheses and build the initial state. The
    /// divisor must be nef and Cartier; the pairing of curve and divisor
    /// must be positive yet smaller than the curve's degree sum over the
    /// tracked rays; and some generalized cone of the divisor must contain
    /// the curve's negative support while avoiding every tracked ray.
    pub fn new(
        fan: &Fan,
        divisor: &TorusDivisor,
        curve: &CurveClass,
        index_set: &[usize],
    ) -> Result<MmpState> {
        if intersection::is_cartier(fan, divisor)?.is_none() {
            return Err(Error::NotCartier("the descent tracks a Cartier divisor".into()));
        }
        if !intersection::is_nef(fan, divisor)? {
            return Err(Error::NotNef("the descent tracks a nef divisor".into()));
        }
        if curve.degrees.len() != fan.rays.len() {
            return Err(Error::DimensionMismatch(
                "curve arity differs from the ray count".into(),
            ));
        }
        let mut iset = index_set.to_vec();
        iset.sort_unstable();
        iset.dedup();
        if iset.len() != index_set.len() {
            return Err(Error::Hypothesis("repeated tracked rays".into()));
        }
        if iset.is_empty() {
            return Err(Error::Hypothesis("the tracked ray set is empty".into()));
        }
        if let Some(&mx) = iset.last() {
            if mx >= fan.rays.len() {
                return Err(Error::RayIndexOutOfRange { index: mx, count: fan.rays.len() });
            }
        }
        let ambient = sigma_d(fan, divisor)?;
        let separating = phi_hull(&ambient, &curve.j_minus()).ok_or_else(|| {
            Error::Hypothesis(
                "no generalized cone contains the curve's negative support".into(),
            )
        })?;
        let state = MmpState {
            fan: fan.clone(),
            divisor: divisor.clone(),
            curve: curve.clone(),
            index_set: iset,
            ray_origin: (0..fan.rays.len()).collect(),
            ambient,
            separating,
        };
        state.check_invariants(true)?;
        Ok(state)
    }

    /// Sum of the prime divisors off the tracked ray set.
    pub fn boundary(&self) -> TorusDivisor {
        let iset: BTreeSet<usize> = self.index_set.iter().copied().collect();
        let coeffs = (0..self.fan.rays.len())
            .map(|r| if iset.contains(&r) { Rat::zero() } else { Rat::one() })
            .collect();
        TorusDivisor::new(coeffs)
    }

    /// The log-canonical class of the boundary: minus the sum of the
    /// tracked prime divisors.
    pub fn log_canonical(&self) -> TorusDivisor {
        let mut coeffs = vec![Rat::zero(); self.fan.rays.len()];
        for &r in &self.index_set {
            coeffs[r] = -Rat::one();
        }
        TorusDivisor::new(coeffs)
    }

    /// Sum of the tracked degree components of the tracked curve.
    pub fn tracked_sum(&self) -> Rat {
        self.index_set
            .iter()
            .fold(Rat::zero(), |acc, &r| acc + &self.curve.degrees[r])
    }

    /// The two descent inequalities. Violation is a hypothesis error on
    /// the initial state and an internal error afterwards, because the
    /// transports are supposed to preserve both.
    fn check_invariants(&self, initial: bool) -> Result<()> {
        let fail = |msg: &str| {
            if initial {
                Err(Error::Hypothesis(msg.into()))
            } else {
                Err(Error::Internal(msg.into()))
            }
        };
        let vd = pair(&self.curve, &self.divisor);
        if !vd.is_positive() {
            return fail("the tracked pairing must be positive");
        }
        if vd >= self.tracked_sum() {
            return fail("the tracked pairing must stay below the tracked degree sum");
        }
        for &r in &self.curve.j_minus() {
            if !self.separating.contains(&self.ray_origin[r]) {
                return fail("the curve's negative support left the separating cone");
            }
        }
        for &r in &self.index_set {
            if self.separating.contains(&self.ray_origin[r]) {
                return fail("a tracked ray entered the separating cone");
            }
        }
        Ok(())
    }
}

/// One performed step of the descent, with the data needed to audit it.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub step: BirationalStep,
    pub ray: ExtremalRay,
    /// Log-canonical pairing of the contracted class divided by the sum of
    /// its absolute degrees; the most negative score is contracted first.
    pub score: Rat,
    /// Initial-fan index of the removed ray, for divisorial steps.
    pub removed_origin: Option<usize>,
    pub divisor_after: TorusDivisor,
    pub curve_after: CurveClass,
    pub index_set_after: Vec<usize>,
}

/// Result of a completed descent.
#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub final_state: MmpState,
    pub trace: Vec<TraceEntry>,
}

/// Run the directed descent: while some wall class is trivial against the
/// tracked divisor yet negative against the log-canonical class, contract
/// the extremal ray with the most negative normalized pairing (ties fall
/// to the smallest wall list) and transport all tracked data across the
/// step. Fibering rays can never qualify, a step budget of ten times the
/// initial wall count guards against cycling, and the finished trace is
/// replayed once before returning.
pub fn run_descent(initial: &MmpState) -> Result<DescentOutcome> {
    let mut state = initial.clone();
    let budget = 10 * state.fan.walls()?.len();
    let mut trace: Vec<TraceEntry> = Vec::new();
    loop {
        let wcs = wall_curves(&state.fan)?;
        let kb = state.log_canonical();
        let blocking = wcs.iter().any(|(_, c)| {
            pair(c, &state.divisor).is_zero() && pair(c, &kb).is_negative()
        });
        if !blocking {
            break;
        }
        if trace.len() >= budget {
            return Err(Error::CapExceeded(
                "descent exceeded its step budget; the contraction order is cycling".into(),
            ));
        }
        let walls: Vec<Wall> = wcs.iter().map(|(w, _)| w.clone()).collect();
        let rays = extremal_rays_from(&wcs)?;
        let mut best: Option<(Rat, Vec<usize>, usize)> = None;
        for (ri, er) in rays.iter().enumerate() {
            let vd = pair(&er.generator, &state.divisor);
            if vd.is_negative() {
                return Err(Error::Internal(
                    "the tracked divisor went negative on an extremal class".into(),
                ));
            }
            if !vd.is_zero() {
                continue;
            }
            let vkb = pair(&er.generator, &kb);
            if !vkb.is_negative() {
                continue;
            }
            let norm = er
                .generator
                .degrees
                .iter()
                .fold(Rat::zero(), |acc, d| acc + d.abs());
            let cand = (vkb / norm, er.walls.clone(), ri);
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1) {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
        let Some((score, _, ri)) = best else {
            return Err(Error::Internal(
                "a blocking wall exists but no extremal ray qualifies".into(),
            ));
        };
        let er = rays[ri].clone();
        if er.kind == ContractionKind::Fibering {
            return Err(Error::Internal(
                "a fibering class cannot pair negatively against the tracked rays".into(),
            ));
        }
        let Contraction::Birational(step) = contract_with(&state.fan, &walls, &er)? else {
            return Err(Error::Internal("non-fibering ray produced a fibering".into()));
        };
        let old_j_minus: BTreeSet<usize> =
            state.curve.j_minus().iter().map(|&r| state.ray_origin[r]).collect();
        let removed_origin = step.removed_ray.map(|r| state.ray_origin[r]);
        let (divisor, curve, index_set, ray_origin) = match step.kind {
            StepKind::DivisorialContraction => {
                let rho0 = step.removed_ray.ok_or_else(|| {
                    Error::Internal("divisorial step lacks its removed ray".into())
                })?;
                if state.curve.degrees[rho0].is_negative() {
                    return Err(Error::Internal(
                        "the tracked curve meets the removed ray negatively".into(),
                    ));
                }
                let nd = pushforward_divisor(&step, &state.divisor)?;
                let nc = pushforward_curve(&step, &state.curve)?;
                if pair(&nc, &nd) != pair(&state.curve, &state.divisor) {
                    return Err(Error::Internal("the projection formula failed".into()));
                }
                if pullback_divisor(&step, &nd)? != state.divisor {
                    return Err(Error::Internal(
                        "the tracked divisor is not the pullback of its image".into(),
                    ));
                }
                if !intersection::is_nef(&step.target, &nd)? {
                    return Err(Error::Internal("the pushforward lost nefness".into()));
                }
                if intersection::is_cartier(&step.target, &nd)?.is_none() {
                    return Err(Error::Internal("the pushforward is no longer Cartier".into()));
                }
                let mut ni = Vec::new();
                for &r in &state.index_set {
                    if r == rho0 {
                        continue;
                    }
                    ni.push(step.ray_map[r].ok_or_else(|| {
                        Error::Internal("a tracked ray vanished without being removed".into())
                    })?);
                }
                let mut no = vec![0usize; step.target.rays.len()];
                for (s, m) in step.ray_map.iter().enumerate() {
                    if let Some(t) = *m {
                        no[t] = state.ray_origin[s];
                    }
                }
                (nd, nc, ni, no)
            }
            StepKind::Flip => {
                if !intersection::is_nef(&step.target, &state.divisor)? {
                    return Err(Error::Internal("the flip lost nefness".into()));
                }
                if intersection::is_cartier(&step.target, &state.divisor)?.is_none() {
                    return Err(Error::Internal("the flip lost the Cartier property".into()));
                }
                (
                    state.divisor.clone(),
                    state.curve.clone(),
                    state.index_set.clone(),
                    state.ray_origin.clone(),
                )
            }
        };
        state = MmpState {
            fan: step.target.clone(),
            divisor,
            curve,
            index_set,
            ray_origin,
            ambient: state.ambient,
            separating: state.separating,
        };
        let grew = state
            .curve
            .j_minus()
            .iter()
            .any(|&r| !old_j_minus.contains(&state.ray_origin[r]));
        if grew {
            return Err(Error::Internal("the curve's negative support grew".into()));
        }
        state.check_invariants(false)?;
        trace.push(TraceEntry {
            step,
            ray: er,
            score,
            removed_origin,
            divisor_after: state.divisor.clone(),
            curve_after: state.curve.clone(),
            index_set_after: state.index_set.clone(),
        });
    }
    replay(&initial.fan, &trace, &state.fan)?;
    Ok(DescentOutcome { final_state: state, trace })
}

/// Re-verify a finished trace: each step must start at the running fan,
/// pass its own surgery certificate again, and the chain must end at the
/// final fan.
pub fn replay(initial: &Fan, trace: &[TraceEntry], final_fan: &Fan) -> Result<()> {
    let mut key = initial.canonical_key();
    for entry in trace {
        if entry.step.source.canonical_key() != key {
            return Err(Error::Internal(
                "a trace step does not start at the running fan".into(),
            ));
        }
        let ok = match entry.step.kind {
            StepKind::DivisorialContraction => entry
                .step
                .target
                .star_subdivision(&entry.step.center)?
                .equivalent(&entry.step.source),
            StepKind::Flip => entry
                .step
                .source
                .star_subdivision(&entry.step.center)?
                .equivalent(&entry.step.target.star_subdivision(&entry.step.center)?),
        };
        if !ok {
            return Err(Error::Internal(
                "a replayed step fails its surgery certificate".into(),
            ));
        }
        key = entry.step.target.canonical_key();
    }
    if final_fan.canonical_key() != key {
        return Err(Error::Internal("the trace does not end at the final fan".into()));
    }
    Ok(())
}

/// Extract a witness from a terminal descent state: decompose the tracked
/// curve over the extremal classes and return one met positively by the
/// tracked divisor whose tracked degree sum strictly exceeds that pairing,
/// together with the tracked ray set.
pub fn descent_witness(state: &MmpState) -> Result<(ExtremalRay, Vec<usize>)> {
    let rays = extremal_rays(&state.fan)?;
    let gens: Vec<RatVec> = rays.iter().map(|r| r.generator.degrees.clone()).collect();
    let membership = linalg::cone_member(&gens, &state.curve.degrees)?;
    let lambda = membership.combination.ok_or_else(|| {
        Error::Internal("the tracked curve left the cone of extremal classes".into())
    })?;
    for (er, l) in rays.iter().zip(&lambda) {
        if !l.is_positive() {
            continue;
        }
        let vd = pair(&er.generator, &state.divisor);
        if !vd.is_positive() {
            continue;
        }
        let tracked = state
            .index_set
            .iter()
            .fold(Rat::zero(), |acc, &r| acc + &er.generator.degrees[r]);
        if tracked > vd {
            return Ok((er.clone(), state.index_set.clone()));
        }
    }
    Err(Error::Internal(
        "no extremal component satisfies the witness bounds".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Int;

    fn iv(xs: &[i64]) -> IntVec {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    fn rv(xs: &[i64]) -> RatVec {
        xs.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn p2() -> Fan {
        Fan::new(
            2,
            vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    fn p1p1() -> Fan {
        Fan::new(
            2,
            vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, 0]), iv(&[0, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap()
    }

    fn hexagon() -> Fan {
        Fan::new(
            2,
            vec![
                iv(&[1, 0]),
                iv(&[1, 1]),
                iv(&[0, 1]),
                iv(&[-1, 0]),
                iv(&[-1, -1]),
                iv(&[0, -1]),
            ],
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 5],
                vec![0, 5],
            ],
        )
        .unwrap()
    }

    /// Two triangulations of the cone over a quadrilateral, completed by a
    /// fifth ray: the smallest complete fan with a flipping wall.
    fn flip_fan() -> Fan {
        Fan::new(
            3,
            vec![
                iv(&[1, 0, 0]),
                iv(&[0, 1, 0]),
                iv(&[0, 0, 1]),
                iv(&[1, 1, -1]),
                iv(&[-1, -1, 0]),
            ],
            vec![
                vec![0, 1, 2],
                vec![0, 1, 3],
                vec![0, 2, 4],
                vec![1, 2, 4],
                vec![1, 3, 4],
                vec![0, 3, 4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn projective_plane_has_one_fibering_ray() {
        let fan = p2();
        let rays = extremal_rays(&fan).unwrap();
        assert_eq!(rays.len(), 1);
        assert_eq!(rays[0].generator.degrees, rv(&[1, 1, 1]));
        assert_eq!(rays[0].kind, ContractionKind::Fibering);
        assert_eq!(rays[0].walls, vec![0, 1, 2]);
        let Contraction::Fibering(fc) = contract(&fan, &rays[0]).unwrap() else {
            panic!("expected a fibering");
        };
        assert!(fc.base.is_none());
        assert!(fc.fiber.equivalent(&fan));
        assert_eq!(fc.fiber_rays, vec![0, 1, 2]);
        assert!(fc.ray_map.iter().all(Option::is_none));
    }

    #[test]
    fn quadric_surface_fibers_both_ways() {
        let fan = p1p1();
        let rays = extremal_rays(&fan).unwrap();
        assert_eq!(rays.len(), 2);
        for er in &rays {
            assert_eq!(er.kind, ContractionKind::Fibering);
        }
        let horizontal = rays
            .iter()
            .find(|er| er.generator.degrees == rv(&[1, 0, 1, 0]))
            .unwrap();
        let Contraction::Fibering(fc) = contract(&fan, horizontal).unwrap() else {
            panic!("expected a fibering");
        };
        assert_eq!(fc.fiber_rays, vec![0, 2]);
        let base = fc.base.unwrap();
        assert_eq!(base.dim, 1);
        assert_eq!(base.rays.len(), 2);
        assert!(fc.ray_map[0].is_none() && fc.ray_map[2].is_none());
        let b1 = fc.ray_map[1].unwrap();
        let b3 = fc.ray_map[3].unwrap();
        assert_ne!(b1, b3);
        assert_eq!(fc.fiber.rays.len(), 2);
        assert_eq!(fc.fiber.dim, 1);
    }

    #[test]
    fn hexagon_rays_are_all_divisorial() {
        let fan = hexagon();
        let rays = extremal_rays(&fan).unwrap();
        assert_eq!(rays.len(), 6);
        let mut removed: Vec<usize> = rays
            .iter()
            .map(|er| match er.kind {
                ContractionKind::Divisorial(r) => r,
                _ => panic!("expected divisorial"),
            })
            .collect();
        removed.sort_unstable();
        assert_eq!(removed, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn hexagon_divisorial_transport() {
        let fan = hexagon();
        let rays = extremal_rays(&fan).unwrap();
        let er = rays
            .iter()
            .find(|er| er.kind == ContractionKind::Divisorial(1))
            .unwrap();
        let Contraction::Birational(step) = contract(&fan, er).unwrap() else {
            panic!("expected a birational step");
        };
        assert_eq!(step.kind, StepKind::DivisorialContraction);
        assert_eq!(step.removed_ray, Some(1));
        assert_eq!(step.target.rays.len(), 5);
        assert_eq!(step.removed_cones, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(step.added_cones, vec![vec![0, 2]]);

        let d = TorusDivisor::new(rv(&[2, 2, 0, 0, 0, 2]));
        let dd = pushforward_divisor(&step, &d).unwrap();
        assert_eq!(dd.coeffs, rv(&[2, 0, 0, 0, 2]));
        assert_eq!(pullback_divisor(&step, &dd).unwrap(), d);

        let c = CurveClass { degrees: rv(&[1, 0, 1, 0, 1, 0]) };
        let cc = pushforward_curve(&step, &c).unwrap();
        assert_eq!(cc.degrees, rv(&[1, 1, 0, 1, 0]));
        assert_eq!(pair(&cc, &dd), pair(&c, &d));
        assert_eq!(pullback_curve(&step, &cc).unwrap().degrees, c.degrees);

        // A curve meeting the removed ray picks up the contracted class.
        let e = CurveClass { degrees: rv(&[0, 1, 0, 0, 0, 1]) };
        let ee = pushforward_curve(&step, &e).unwrap();
        assert_eq!(ee.degrees, rv(&[1, 1, 0, 0, 1]));
        assert_eq!(pair(&ee, &dd), pair(&e, &d));
    }

    #[test]
    fn flip_fan_has_flip_and_fibering() {
        let fan = flip_fan();
        let rays = extremal_rays(&fan).unwrap();
        assert_eq!(rays.len(), 2);
        assert_eq!(rays[0].kind, ContractionKind::Flipping);
        assert_eq!(rays[0].generator.degrees, rv(&[-1, -1, 1, 1, 0]));
        assert_eq!(rays[1].kind, ContractionKind::Fibering);
        assert_eq!(rays[1].generator.degrees, rv(&[1, 1, 0, 0, 1]));
    }

    #[test]
    fn flip_swaps_the_triangulation_and_flips_back() {
        let fan = flip_fan();
        let rays = extremal_rays(&fan).unwrap();
        let Contraction::Birational(step) = contract(&fan, &rays[0]).unwrap() else {
            panic!("expected a birational step");
        };
        assert_eq!(step.kind, StepKind::Flip);
        assert_eq!(step.removed_ray, None);
        assert_eq!(step.removed_cones, vec![vec![0, 1, 2], vec![0, 1, 3]]);
        let mut added = step.added_cones.clone();
        added.sort();
        assert_eq!(added, vec![vec![0, 2, 3], vec![1, 2, 3]]);
        assert_eq!(step.center, iv(&[1, 1, 0]));

        let back = extremal_rays(&step.target).unwrap();
        let flipping = back
            .iter()
            .find(|er| er.kind == ContractionKind::Flipping)
            .unwrap();
        assert_eq!(flipping.generator.degrees, rv(&[1, 1, -1, -1, 0]));
        let Contraction::Birational(inv) = contract(&step.target, flipping).unwrap() else {
            panic!("expected a birational step");
        };
        assert!(inv.target.equivalent(&fan));
    }

    #[test]
    fn flip_fan_fibering_has_line_base() {
        let fan = flip_fan();
        let rays = extremal_rays(&fan).unwrap();
        let Contraction::Fibering(fc) = contract(&fan, &rays[1]).unwrap() else {
            panic!("expected a fibering");
        };
        assert_eq!(fc.fiber_rays, vec![0, 1, 4]);
        assert_eq!(fc.fiber.dim, 2);
        assert_eq!(fc.fiber.rays.len(), 3);
        let base = fc.base.unwrap();
        assert_eq!(base.dim, 1);
        assert_eq!(base.rays.len(), 2);
        assert_ne!(fc.ray_map[2], fc.ray_map[3]);
    }

    #[test]
    fn picard_one_faces_of_plane_and_hexagon() {
        let plane = picard_one_subvarieties(&p2()).unwrap();
        assert_eq!(plane.len(), 4);
        assert_eq!(plane[0].0, Vec::<usize>::new());
        let hex = picard_one_subvarieties(&hexagon()).unwrap();
        assert_eq!(hex.len(), 6);
        assert!(hex.iter().all(|(face, star)| face.len() == 1
            && star.fan.dim == 1
            && star.fan.rays.len() == 2));
    }

    #[test]
    fn descent_contracts_hexagon_to_plane() {
        let fan = hexagon();
        let d = TorusDivisor::new(rv(&[2, 2, 0, 0, 0, 2]));
        let c = CurveClass { degrees: rv(&[1, 0, 1, 0, 1, 0]) };
        let state = MmpState::new(&fan, &d, &c, &[0, 2, 4]).unwrap();
        assert_eq!(state.separating, Vec::<usize>::new());
        let outcome = run_descent(&state).unwrap();
        assert_eq!(outcome.trace.len(), 3);
        for entry in &outcome.trace {
            assert_eq!(entry.step.kind, StepKind::DivisorialContraction);
            assert_eq!(entry.score, rat(-2, 3));
        }
        let removed: Vec<usize> = outcome
            .trace
            .iter()
            .map(|e| e.removed_origin.unwrap())
            .collect();
        assert_eq!(removed, vec![1, 3, 5]);
        let fin = &outcome.final_state;
        assert!(fin.fan.equivalent(&p2()));
        assert_eq!(fin.divisor.coeffs, rv(&[2, 0, 0]));
        assert_eq!(fin.curve.degrees, rv(&[1, 1, 1]));
        assert_eq!(fin.index_set, vec![0, 1, 2]);
        assert_eq!(fin.ray_origin, vec![0, 2, 4]);

        let (witness, iset) = descent_witness(fin).unwrap();
        assert_eq!(witness.generator.degrees, rv(&[1, 1, 1]));
        assert_eq!(pair(&witness.generator, &fin.divisor), rat(2, 1));
        assert_eq!(iset, vec![0, 1, 2]);
    }

    #[test]
    fn descent_with_nothing_to_contract_stops_immediately() {
        let fan = p2();
        let d = TorusDivisor::new(rv(&[1, 0, 0]));
        let c = CurveClass { degrees: rv(&[1, 1, 1]) };
        let state = MmpState::new(&fan, &d, &c, &[0, 1, 2]).unwrap();
        let outcome = run_descent(&state).unwrap();
        assert!(outcome.trace.is_empty());
        let (witness, _) = descent_witness(&outcome.final_state).unwrap();
        assert_eq!(pair(&witness.generator, &outcome.final_state.divisor), rat(1, 1));
    }

    #[test]
    fn descent_hypotheses_are_enforced() {
        let fan = p2();
        let d = TorusDivisor::new(rv(&[1, 0, 0]));
        let c = CurveClass { degrees: rv(&[1, 1, 1]) };
        // Pairing equals the tracked sum: not strictly below.
        assert!(matches!(
            MmpState::new(&fan, &d, &c, &[0]),
            Err(Error::Hypothesis(_))
        ));

        let hex = hexagon();
        let dd = TorusDivisor::new(rv(&[2, 2, 0, 0, 0, 2]));
        // Negative support {1} forces the separating cone [0, 1, 2], which
        // meets the tracked rays.
        let cc = CurveClass { degrees: rv(&[3, -1, 3, 0, 2, 0]) };
        assert!(matches!(
            MmpState::new(&hex, &dd, &cc, &[0, 2, 4]),
            Err(Error::Hypothesis(_))
        ));

        // A non-nef divisor is rejected outright.
        let bad = TorusDivisor::new(rv(&[1, 0, 0, 0, 0, 0]));
        let c6 = CurveClass { degrees: rv(&[1, 0, 1, 0, 1, 0]) };
        assert!(matches!(
            MmpState::new(&hex, &bad, &c6, &[0]),
            Err(Error::NotNef(_))
        ));
    }
}
