//! Complete simplicial fans.
//!
//! A fan is stored as a list of primitive rays in Z^n together with its
//! maximal cones, each given by the indices of its n spanning rays.
//! Construction validates everything: primitivity, simpliciality, the fan
//! axiom (pairwise intersections are common faces, certified by an exact
//! separating functional), and completeness (every facet of a maximal cone
//! lies in exactly two of them, which for a pure full-dimensional fan with
//! proper pairwise intersections forces the support to be all of R^n).
//!
//! On top of the raw structure sit the operations the rest of the crate
//! leans on: wall enumeration, cone multiplicities, star fans of subcones
//! with their lattice projections, star subdivisions, and resolution of
//! singularities by repeated subdivision.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::linalg::{
    self, det_bareiss, dot_int, primitive, smith_normal_form, to_rat_vec, Int, IntMat, IntVec,
    LinCon, Rat, RatVec,
};
use crate::{Error, Result};

/// A cone of a simplicial fan, recorded by the sorted indices of its rays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    pub rays: Vec<usize>,
}

impl Cone {
    /// Sorts and checks for repeats.
    pub fn new(mut rays: Vec<usize>) -> Result<Cone> {
        rays.sort_unstable();
        let before = rays.len();
        rays.dedup();
        if rays.len() != before {
            return Err(Error::InvalidFan("repeated ray in a cone".into()));
        }
        Ok(Cone { rays })
    }

    pub fn contains_ray(&self, ray: usize) -> bool {
        self.rays.binary_search(&ray).is_ok()
    }

    /// The (k-1)-subsets of the ray set, in drop-one order.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        (0..self.rays.len())
            .map(|skip| {
                self.rays
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &r)| r)
                    .collect()
            })
            .collect()
    }
}

/// A wall: a codimension-one cone shared by exactly two maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// Sorted ray indices of the wall itself (n-1 of them).
    pub rays: Vec<usize>,
    /// The two maximal cones, by index, smaller first.
    pub cones: (usize, usize),
    /// The ray of `cones.0` resp. `cones.1` that is not on the wall.
    pub opposite: (usize, usize),
}

/// A complete simplicial fan in Z^n.
#[derive(Debug, Clone)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub max_cones: Vec<Cone>,
}

/// An original ray adjacent to the center of a star fan, with its image.
#[derive(Debug, Clone)]
pub struct AdjacentRay {
    /// Index of the ray in the ambient fan.
    pub ray: usize,
    /// Index of its image in the star fan.
    pub star_ray: usize,
    /// Positive integer with `projection · u_ray = scale · star ray`.
    pub scale: Int,
}

/// The star fan of a cone: the quotient fan living on N / (span of the cone),
/// together with the lattice projection and the adjacent-ray dictionary.
#[derive(Debug, Clone)]
pub struct StarFan {
    pub fan: Fan,
    /// Rows form the projection Z^n → Z^(n-k).
    pub projection: IntMat,
    /// Sorted by ambient ray index.
    pub adjacent: Vec<AdjacentRay>,
}

impl Fan {
    /// Build and fully validate a fan.
    pub fn new(dim: usize, rays: Vec<IntVec>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let cones = max_cones
            .into_iter()
            .map(Cone::new)
            .collect::<Result<Vec<_>>>()?;
        let fan = Fan { dim, rays, max_cones: cones };
        fan.validate()?;
        Ok(fan)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidFan("dimension must be positive".into()));
        }
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidFan(format!(
                    "ray {i} has {} coordinates, expected {n}",
                    r.len()
                )));
            }
            if r.iter().all(Zero::is_zero) {
                return Err(Error::InvalidFan(format!("ray {i} is zero")));
            }
            if &primitive(r)? != r {
                return Err(Error::InvalidFan(format!("ray {i} is not primitive")));
            }
        }
        let distinct: BTreeSet<&IntVec> = self.rays.iter().collect();
        if distinct.len() != self.rays.len() {
            return Err(Error::InvalidFan("duplicate rays".into()));
        }
        if self.max_cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        let mut used = vec![false; self.rays.len()];
        for (i, cone) in self.max_cones.iter().enumerate() {
            if cone.rays.len() != n {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {i} has {} rays, expected {n}",
                    cone.rays.len()
                )));
            }
            for &r in &cone.rays {
                if r >= self.rays.len() {
                    return Err(Error::RayIndexOutOfRange { index: r, count: self.rays.len() });
                }
                used[r] = true;
            }
            let m: IntMat = cone.rays.iter().map(|&r| self.rays[r].clone()).collect();
            if det_bareiss(&m)?.is_zero() {
                return Err(Error::InvalidFan(format!(
                    "rays of maximal cone {i} are linearly dependent"
                )));
            }
        }
        let cone_sets: BTreeSet<&Vec<usize>> = self.max_cones.iter().map(|c| &c.rays).collect();
        if cone_sets.len() != self.max_cones.len() {
            return Err(Error::InvalidFan("duplicate maximal cones".into()));
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!("ray {i} lies in no maximal cone")));
        }
        self.check_pairwise_faces()?;
        self.check_complete()
    }

    /// Certify that every pair of maximal cones meets along the cone spanned
    /// by their shared rays: a functional vanishing on the shared rays and
    /// strictly separating the rest pins the intersection to that face.
    fn check_pairwise_faces(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..self.max_cones.len() {
            for j in i + 1..self.max_cones.len() {
                let a: BTreeSet<usize> = self.max_cones[i].rays.iter().copied().collect();
                let b: BTreeSet<usize> = self.max_cones[j].rays.iter().copied().collect();
                let shared: BTreeSet<usize> = a.intersection(&b).copied().collect();
                let mut cons = Vec::new();
                for &r in &shared {
                    cons.push(LinCon::eq(to_rat_vec(&self.rays[r]), Rat::zero()));
                }
                for &r in a.difference(&shared) {
                    cons.push(LinCon::ge(to_rat_vec(&self.rays[r]), Rat::one()));
                }
                for &r in b.difference(&shared) {
                    cons.push(LinCon::le(to_rat_vec(&self.rays[r]), -Rat::one()));
                }
                if linalg::lp_feasible(n, &cons)?.is_none() {
                    return Err(Error::InvalidFan(format!(
                        "maximal cones {i} and {j} do not meet along a common face"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every facet of a maximal cone must lie in exactly two maximal cones.
    fn check_complete(&self) -> Result<()> {
        for (facet, members) in self.facet_map() {
            if members.len() != 2 {
                return Err(Error::NotComplete(format!(
                    "facet {:?} of maximal cone {} lies in {} maximal cone(s), expected 2",
                    facet,
                    members[0].0,
                    members.len()
                )));
            }
        }
        Ok(())
    }

    /// facet rays → [(cone index, opposite ray index)], sorted.
    fn facet_map(&self) -> BTreeMap<Vec<usize>, Vec<(usize, usize)>> {
        let mut map: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for (skip, facet) in cone.facets().into_iter().enumerate() {
                map.entry(facet).or_default().push((ci, cone.rays[skip]));
            }
        }
        map
    }

    /// All walls, sorted by their ray sets.
    pub fn walls(&self) -> Result<Vec<Wall>> {
        let mut out = Vec::new();
        for (facet, mut members) in self.facet_map() {
            if members.len() != 2 {
                return Err(Error::Internal(
                    "facet of a validated fan not shared by exactly two cones".into(),
                ));
            }
            members.sort_unstable();
            out.push(Wall {
                rays: facet,
                cones: (members[0].0, members[1].0),
                opposite: (members[0].1, members[1].1),
            });
        }
        Ok(out)
    }

    /// Lattice multiplicity of the cone on the given rays: the index of the
    /// subgroup they generate inside its saturation (1 = smooth).
    pub fn mult(&self, ray_indices: &[usize]) -> Result<Int> {
        if ray_indices.is_empty() {
            return Ok(Int::from(1));
        }
        let m: IntMat = ray_indices
            .iter()
            .map(|&r| {
                self.rays
                    .get(r)
                    .cloned()
                    .ok_or(Error::RayIndexOutOfRange { index: r, count: self.rays.len() })
            })
            .collect::<Result<_>>()?;
        let snf = smith_normal_form(&m)?;
        let inv = snf.invariants();
        if inv.len() != ray_indices.len() {
            return Err(Error::Hypothesis(
                "multiplicity of linearly dependent rays".into(),
            ));
        }
        Ok(inv.iter().product())
    }

    /// Coordinates of `v` in the ray basis of a maximal cone, if `v` lies in
    /// its span (always, for full-dimensional cones).
    pub fn simplicial_coords(&self, cone_idx: usize, v: &[Rat]) -> Option<RatVec> {
        let cone = &self.max_cones[cone_idx];
        let n = self.dim;
        // Columns are the cone's rays.
        let a: Vec<RatVec> = (0..n)
            .map(|row| {
                cone.rays
                    .iter()
                    .map(|&r| Rat::from_integer(self.rays[r][row].clone()))
                    .collect()
            })
            .collect();
        linalg::solve_exact(&a, v)
    }

    /// Whether the given maximal cone contains the point.
    pub fn cone_contains(&self, cone_idx: usize, v: &[Rat]) -> bool {
        match self.simplicial_coords(cone_idx, v) {
            Some(coords) => coords.iter().all(|c| !c.is_negative()),
            None => false,
        }
    }

    /// First maximal cone containing the point. Complete fans always have one.
    pub fn cone_containing(&self, v: &[Rat]) -> Option<usize> {
        (0..self.max_cones.len()).find(|&i| self.cone_contains(i, v))
    }

    /// The star fan of the cone on the given (sorted) rays: quotient lattice,
    /// projected rays, and for every adjacent ray the positive integer scale
    /// relating its projection to the primitive star ray.
    pub fn star(&self, gamma: &[usize]) -> Result<StarFan> {
        let n = self.dim;
        let k = gamma.len();
        let mut sorted = gamma.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::Hypothesis("repeated rays in star center".into()));
        }
        for &r in &sorted {
            if r >= self.rays.len() {
                return Err(Error::RayIndexOutOfRange { index: r, count: self.rays.len() });
            }
        }
        if k >= n {
            return Err(Error::Hypothesis(
                "star of a full-dimensional cone is a point".into(),
            ));
        }
        if k == 0 {
            return Ok(StarFan {
                fan: self.clone(),
                projection: linalg::identity_int(n),
                adjacent: (0..self.rays.len())
                    .map(|i| AdjacentRay { ray: i, star_ray: i, scale: Int::from(1) })
                    .collect(),
            });
        }
        let supersets: Vec<usize> = (0..self.max_cones.len())
            .filter(|&ci| sorted.iter().all(|&r| self.max_cones[ci].contains_ray(r)))
            .collect();
        if supersets.is_empty() {
            return Err(Error::Hypothesis(
                "star center is not a cone of the fan".into(),
            ));
        }
        // Columns of `a` are the center's rays; the last n-k rows of u in
        // u·a·v = s kill exactly the saturated span of the center.
        let a: IntMat = (0..n)
            .map(|row| sorted.iter().map(|&r| self.rays[r][row].clone()).collect())
            .collect();
        let snf = smith_normal_form(&a)?;
        if snf.invariants().len() != k {
            return Err(Error::Hypothesis("star center rays are dependent".into()));
        }
        let projection: IntMat = snf.u[k..n].to_vec();

        let mut adjacent_set: BTreeSet<usize> = BTreeSet::new();
        for &ci in &supersets {
            for &r in &self.max_cones[ci].rays {
                if !sorted.contains(&r) {
                    adjacent_set.insert(r);
                }
            }
        }
        let mut star_rays: Vec<IntVec> = Vec::new();
        let mut adjacent: Vec<AdjacentRay> = Vec::new();
        for &r in &adjacent_set {
            let image = linalg::mat_vec_int(&projection, &self.rays[r]);
            let prim = primitive(&image)?;
            let mut scale = Int::zero();
            for (im, pr) in image.iter().zip(&prim) {
                if !pr.is_zero() {
                    scale = im / pr;
                    break;
                }
            }
            if !scale.is_positive() {
                return Err(Error::Internal("non-positive star ray scale".into()));
            }
            debug_assert_eq!(
                &scale * self.mult(&sorted)?,
                self.mult(&{
                    let mut g = sorted.clone();
                    g.push(r);
                    g.sort_unstable();
                    g
                })?,
                "star scale must match the multiplicity ratio"
            );
            if star_rays.contains(&prim) {
                return Err(Error::Internal(
                    "two adjacent rays project to the same star ray".into(),
                ));
            }
            star_rays.push(prim);
            adjacent.push(AdjacentRay { ray: r, star_ray: star_rays.len() - 1, scale });
        }
        let to_star: BTreeMap<usize, usize> =
            adjacent.iter().map(|ar| (ar.ray, ar.star_ray)).collect();
        let mut star_cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        for &ci in &supersets {
            let mut c: Vec<usize> = self.max_cones[ci]
                .rays
                .iter()
                .filter(|r| !sorted.contains(r))
                .map(|r| to_star[r])
                .collect();
            c.sort_unstable();
            star_cones.insert(c);
        }
        let fan = Fan::new(n - k, star_rays, star_cones.into_iter().collect())?;
        Ok(StarFan { fan, projection, adjacent })
    }

    /// Star subdivision at a primitive lattice point of the support. Cones
    /// containing the center split along its nonzero coordinates; the rest
    /// survive unchanged. Subdividing at an existing ray returns the fan
    /// unchanged.
    pub fn star_subdivision(&self, center: &[Int]) -> Result<Fan> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch(
                "subdivision center has wrong arity".into(),
            ));
        }
        if center.iter().all(Zero::is_zero) || primitive(center)? != center {
            return Err(Error::Hypothesis(
                "subdivision center must be primitive".into(),
            ));
        }
        let center_rat = to_rat_vec(center);
        let existing = self.rays.iter().position(|r| r == center);
        let mut rays = self.rays.clone();
        let center_idx = existing.unwrap_or_else(|| {
            rays.push(center.to_vec());
            rays.len() - 1
        });
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut hit = false;
        for ci in 0..self.max_cones.len() {
            let coords = self
                .simplicial_coords(ci, &center_rat)
                .filter(|c| c.iter().all(|x| !x.is_negative()));
            match coords {
                Some(coords) => {
                    hit = true;
                    for (slot, lambda) in coords.iter().enumerate() {
                        if lambda.is_positive() {
                            let mut c = self.max_cones[ci].rays.clone();
                            c[slot] = center_idx;
                            c.sort_unstable();
                            cones.insert(c);
                        }
                    }
                }
                None => {
                    cones.insert(self.max_cones[ci].rays.clone());
                }
            }
        }
        if !hit {
            return Err(Error::Hypothesis(
                "subdivision center lies outside the support".into(),
            ));
        }
        Fan::new(self.dim, rays, cones.into_iter().collect())
    }

    /// Whether every maximal cone is smooth.
    pub fn is_smooth(&self) -> Result<bool> {
        for cone in &self.max_cones {
            if self.mult(&cone.rays)? != Int::from(1) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sum over maximal cones of (multiplicity - 1); zero exactly when smooth.
    fn singularity_measure(&self) -> Result<Int> {
        let mut total = Int::zero();
        for cone in &self.max_cones {
            total += self.mult(&cone.rays)? - Int::from(1);
        }
        Ok(total)
    }

    /// Nonzero lattice points of the half-open ray parallelepiped of a
    /// maximal cone, made primitive, sorted by coordinate sum then
    /// lexicographically.
    fn parallelepiped_candidates(&self, cone_idx: usize) -> Result<Vec<IntVec>> {
        let n = self.dim;
        let cone = &self.max_cones[cone_idx];
        let a: IntMat = (0..n)
            .map(|row| cone.rays.iter().map(|&r| self.rays[r][row].clone()).collect())
            .collect();
        let snf = smith_normal_form(&a)?;
        let u_inv = unimodular_inverse(&snf.u)?;
        let diag: Vec<Int> = (0..n).map(|i| snf.s[i][i].clone()).collect();
        let mut reps: BTreeSet<IntVec> = BTreeSet::new();
        let mut r = vec![Int::zero(); n];
        loop {
            if r.iter().any(|x| !x.is_zero()) {
                let p = linalg::mat_vec_int(&u_inv, &r);
                // Shift into the half-open parallelepiped along the ray basis.
                let lambda = self
                    .simplicial_coords(cone_idx, &to_rat_vec(&p))
                    .ok_or_else(|| Error::Internal("parallelepiped solve failed".into()))?;
                let mut v = p;
                for (slot, l) in lambda.iter().enumerate() {
                    let f = l.numer().div_floor(l.denom());
                    if !f.is_zero() {
                        let ray = &self.rays[cone.rays[slot]];
                        for (vi, ri) in v.iter_mut().zip(ray) {
                            *vi -= &f * ri;
                        }
                    }
                }
                if v.iter().any(|x| !x.is_zero()) {
                    reps.insert(primitive(&v)?);
                }
            }
            // Odometer over the diagonal residues.
            let mut pos = 0;
            loop {
                if pos == n {
                    let mut out: Vec<(Rat, IntVec)> = Vec::new();
                    for v in reps {
                        let lambda = self
                            .simplicial_coords(cone_idx, &to_rat_vec(&v))
                            .ok_or_else(|| Error::Internal("candidate solve failed".into()))?;
                        out.push((lambda.iter().sum(), v));
                    }
                    out.sort();
                    return Ok(out.into_iter().map(|(_, v)| v).collect());
                }
                r[pos] += 1;
                if r[pos] < diag[pos] {
                    break;
                }
                r[pos] = Int::zero();
                pos += 1;
            }
        }
    }

    /// Resolve singularities by star subdivisions. Picks the most singular
    /// cone, subdivides at a parallelepiped point of smallest coordinate sum
    /// that strictly decreases the total singularity measure, and repeats.
    /// Returns the smooth fan and the centers used, in order.
    pub fn resolve(&self, cap: usize) -> Result<(Fan, Vec<IntVec>)> {
        let mut fan = self.clone();
        let mut centers: Vec<IntVec> = Vec::new();
        loop {
            let measure = fan.singularity_measure()?;
            if measure.is_zero() {
                return Ok((fan, centers));
            }
            if centers.len() >= cap {
                return Err(Error::CapExceeded(format!(
                    "resolution did not terminate within {cap} subdivisions"
                )));
            }
            let mut worst = 0;
            let mut worst_mult = Int::zero();
            for (ci, cone) in fan.max_cones.iter().enumerate() {
                let m = fan.mult(&cone.rays)?;
                if m > worst_mult {
                    worst_mult = m;
                    worst = ci;
                }
            }
            let mut next: Option<(Fan, IntVec)> = None;
            for cand in fan.parallelepiped_candidates(worst)? {
                let subdivided = fan.star_subdivision(&cand)?;
                if subdivided.singularity_measure()? < measure {
                    next = Some((subdivided, cand));
                    break;
                }
            }
            let Some((subdivided, cand)) = next else {
                return Err(Error::Internal(
                    "no subdivision center decreases the singularity measure".into(),
                ));
            };
            fan = subdivided;
            centers.push(cand);
        }
    }

    /// Whether the fan carries a strictly convex support function, i.e. the
    /// associated variety is projective. Decided by an exact feasibility
    /// problem in one linear functional per maximal cone.
    pub fn is_projective(&self) -> Result<bool> {
        let n = self.dim;
        let s = self.max_cones.len();
        let vars = n * s;
        let mut cons = Vec::new();
        for wall in self.walls()? {
            let (c1, c2) = wall.cones;
            // Equality on the wall; strict bend at the far ray of cone c2.
            for &r in &wall.rays {
                let mut coeffs = vec![Rat::zero(); vars];
                for j in 0..n {
                    let x = Rat::from_integer(self.rays[r][j].clone());
                    coeffs[c1 * n + j] = x.clone();
                    coeffs[c2 * n + j] = -x;
                }
                cons.push(LinCon::eq(coeffs, Rat::zero()));
            }
            let far = wall.opposite.1;
            let mut coeffs = vec![Rat::zero(); vars];
            for j in 0..n {
                let x = Rat::from_integer(self.rays[far][j].clone());
                coeffs[c1 * n + j] = x.clone();
                coeffs[c2 * n + j] = -x;
            }
            cons.push(LinCon::le(coeffs, -Rat::one()));
        }
        Ok(linalg::lp_feasible(vars, &cons)?.is_some())
    }

    /// Canonical form for structural comparison: rays sorted, cone indices
    /// remapped and sorted.
    pub fn canonical_key(&self) -> (usize, Vec<IntVec>, Vec<Vec<usize>>) {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut rank = vec![0usize; self.rays.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let rays: Vec<IntVec> = order.iter().map(|&i| self.rays[i].clone()).collect();
        let mut cones: Vec<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.rays.iter().map(|&r| rank[r]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        cones.sort();
        (self.dim, rays, cones)
    }

    /// Structural equality up to ray reordering.
    pub fn equivalent(&self, other: &Fan) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    // -- JSON ---------------------------------------------------------------

    /// Parse from a JSON object with fields `dim`, `rays`, `max_cones`.
    /// Coordinates may be numbers or decimal strings.
    pub fn from_json_value(value: &Value) -> Result<Fan> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("fan must be a JSON object".into()))?;
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("fan needs an integer \"dim\"".into()))?
            as usize;
        let rays_val = obj
            .get("rays")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("fan needs an array \"rays\"".into()))?;
        let mut rays = Vec::new();
        for (i, rv) in rays_val.iter().enumerate() {
            let arr = rv
                .as_array()
                .ok_or_else(|| Error::Parse(format!("ray {i} must be an array")))?;
            rays.push(
                arr.iter()
                    .map(int_from_json)
                    .collect::<Result<IntVec>>()
                    .map_err(|e| Error::Parse(format!("ray {i}: {e}")))?,
            );
        }
        let cones_val = obj
            .get("max_cones")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("fan needs an array \"max_cones\"".into()))?;
        let mut max_cones = Vec::new();
        for (i, cv) in cones_val.iter().enumerate() {
            let arr = cv
                .as_array()
                .ok_or_else(|| Error::Parse(format!("maximal cone {i} must be an array")))?;
            let mut cone = Vec::new();
            for x in arr {
                cone.push(
                    x.as_u64()
                        .ok_or_else(|| {
                            Error::Parse(format!("maximal cone {i} has a non-integer entry"))
                        })? as usize,
                );
            }
            max_cones.push(cone);
        }
        Fan::new(dim, rays, max_cones)
    }

    pub fn from_json_str(text: &str) -> Result<Fan> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        Fan::from_json_value(&value)
    }

    pub fn to_json_value(&self) -> Value {
        let rays: Vec<Value> = self
            .rays
            .iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect();
        let cones: Vec<Value> = self
            .max_cones
            .iter()
            .map(|c| Value::Array(c.rays.iter().map(|&r| Value::from(r as u64)).collect()))
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "rays": rays,
            "max_cones": cones,
        })
    }
}

/// Exact inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &[IntVec]) -> Result<IntMat> {
    let n = m.len();
    let a = linalg::to_rat_mat(m);
    let mut inv: IntMat = vec![vec![Int::zero(); n]; n];
    for col in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[col] = Rat::one();
        let x = linalg::solve_exact(&a, &e)
            .ok_or_else(|| Error::Internal("matrix is singular".into()))?;
        for (row, xi) in x.iter().enumerate() {
            if !xi.is_integer() {
                return Err(Error::Internal("matrix inverse is not integral".into()));
            }
            inv[row][col] = xi.to_integer();
        }
    }
    Ok(inv)
}

/// Integer from a JSON number or decimal string.
pub(crate) fn int_from_json(v: &Value) -> Result<Int> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else {
                Err(Error::Parse(format!("non-integer number {n}")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}"))),
        _ => Err(Error::Parse(format!("expected an integer, got {v}"))),
    }
}

/// Integer to a JSON number when it fits, else a decimal string.
pub(crate) fn int_to_json(x: &Int) -> Value {
    match i64::try_from(x.clone()) {
        Ok(i) => Value::from(i),
        Err(_) => Value::String(x.to_string()),
    }
}

/// Evaluate ⟨row i of m, v⟩ for all rows — re-export spot for callers that
/// work with ray matrices.
pub fn apply_rows(m: &[IntVec], v: &[Int]) -> IntVec {
    m.iter().map(|row| dot_int(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ivec};

    pub(crate) fn p2() -> Fan {
        Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    fn p121() -> Fan {
        Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn projective_plane_is_a_valid_fan() {
        let fan = p2();
        assert_eq!(fan.walls().unwrap().len(), 3);
        assert!(fan.is_smooth().unwrap());
        assert!(fan.is_projective().unwrap());
    }

    #[test]
    fn weighted_plane_has_one_singular_cone() {
        let fan = p121();
        assert_eq!(fan.mult(&[0, 2]).unwrap(), int(2));
        assert_eq!(fan.mult(&[0, 1]).unwrap(), int(1));
        assert!(!fan.is_smooth().unwrap());
    }

    #[test]
    fn torsion_fan_multiplicities() {
        let fan = Fan::new(
            2,
            vec![ivec(&[2, -1]), ivec(&[-1, 2]), ivec(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(fan.mult(&[0, 1]).unwrap(), int(3));
        assert_eq!(fan.mult(&[1, 2]).unwrap(), int(3));
        assert_eq!(fan.mult(&[0, 2]).unwrap(), int(3));
    }

    #[test]
    fn one_dimensional_complete_fan() {
        let fan = Fan::new(1, vec![ivec(&[1]), ivec(&[-1])], vec![vec![0], vec![1]]).unwrap();
        let walls = fan.walls().unwrap();
        assert_eq!(walls.len(), 1);
        assert!(walls[0].rays.is_empty());
        assert_eq!(walls[0].opposite, (0, 1));
    }

    #[test]
    fn rejects_bad_input() {
        // Non-primitive ray.
        assert!(matches!(
            Fan::new(2, vec![ivec(&[2, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
                     vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
            Err(Error::InvalidFan(_))
        ));
        // Overlapping cones: cone(e1, e2) contains cone(e1, e1+e2).
        assert!(matches!(
            Fan::new(2, vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])],
                     vec![vec![0, 1], vec![0, 2], vec![1, 2]]),
            Err(Error::InvalidFan(_))
        ));
        // A single quadrant is not complete.
        assert!(matches!(
            Fan::new(2, vec![ivec(&[1, 0]), ivec(&[0, 1])], vec![vec![0, 1]]),
            Err(Error::NotComplete(_))
        ));
        // Half-space cover with a dangling ray index.
        assert!(matches!(
            Fan::new(2, vec![ivec(&[1, 0]), ivec(&[0, 1])], vec![vec![0, 5]]),
            Err(Error::RayIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn star_of_a_ray_on_the_plane() {
        let fan = p2();
        let star = fan.star(&[0]).unwrap();
        assert_eq!(star.fan.dim, 1);
        assert_eq!(star.fan.rays.len(), 2);
        assert_eq!(star.adjacent.len(), 2);
        for ar in &star.adjacent {
            assert_eq!(ar.scale, int(1));
        }
    }

    #[test]
    fn star_scales_on_the_weighted_plane() {
        // Star of the middle ray of P(1,2,1)-like fan from the worked
        // four-ray example: rays (1,0),(1,2),(-1,2),(0,-1).
        let fan = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[1, 2]), ivec(&[-1, 2]), ivec(&[0, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let star = fan.star(&[1]).unwrap();
        assert_eq!(star.fan.dim, 1);
        let scales: Vec<(usize, Int)> = star
            .adjacent
            .iter()
            .map(|ar| (ar.ray, ar.scale.clone()))
            .collect();
        assert_eq!(scales, vec![(0, int(2)), (2, int(4))]);
    }

    #[test]
    fn empty_star_is_the_fan_itself() {
        let fan = p2();
        let star = fan.star(&[]).unwrap();
        assert!(star.fan.equivalent(&fan));
        assert_eq!(star.projection, linalg::identity_int(2));
    }

    #[test]
    fn star_subdivision_inserts_a_ray() {
        let fan = p2();
        let sub = fan.star_subdivision(&ivec(&[1, 1])).unwrap();
        assert_eq!(sub.rays.len(), 4);
        assert_eq!(sub.max_cones.len(), 4);
        assert!(sub.is_smooth().unwrap());
        // Subdividing at an existing ray changes nothing.
        let same = fan.star_subdivision(&ivec(&[1, 0])).unwrap();
        assert!(same.equivalent(&fan));
    }

    #[test]
    fn resolve_weighted_plane_in_one_step() {
        let fan = p121();
        let (smooth, centers) = fan.resolve(16).unwrap();
        assert!(smooth.is_smooth().unwrap());
        assert_eq!(centers, vec![ivec(&[0, -1])]);
        assert_eq!(smooth.rays.len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let fan = p121();
        let text = serde_json::to_string(&fan.to_json_value()).unwrap();
        let back = Fan::from_json_str(&text).unwrap();
        assert!(back.equivalent(&fan));
        assert!(Fan::from_json_str("{\"dim\": 2}").is_err());
    }
}
