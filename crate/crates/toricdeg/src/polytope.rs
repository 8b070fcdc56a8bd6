//! Divisor polytopes, their lattice points, and the ample model.
//!
//! The polytope of a divisor collects the lattice functionals bounded below
//! by the coefficients; its lattice points, homogenized into one nonnegative
//! coordinate per ray, are the monomial exponents of the sections. A nef
//! divisor also induces a coarsening of the fan: maximal cones sharing the
//! same local representative merge into the cones of a generalized fan, and
//! the quotient by the lineality space of that structure is the fan of the
//! ample model. The quotient fan need not be simplicial, so it is refined by
//! pulling subdivisions at its own rays before it is returned.
//!
//! Everything the construction claims is re-checked on the spot: the pulled
//! back model divisor must reproduce the input up to the principal divisor
//! of the base vertex, and walls of the refined quotient fan must pair
//! strictly positively with the model divisor exactly when they separate
//! different merged cones.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::fan::Fan;
use crate::intersection::{
    self, is_cartier, is_nef, local_representatives, wall_curve, CurveClass, TorusDivisor,
};
use crate::linalg::{
    self, combinations, dot_int, dot_int_rat, primitive, primitive_of_rational, to_rat_vec, Int,
    IntMat, IntVec, Rat, RatMat, RatVec,
};
use crate::{Error, Result};

/// One halfspace ⟨normal, x⟩ ≥ bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: IntVec,
    pub bound: Rat,
}

/// The polytope of a divisor in halfspace form, with its vertices when they
/// have been enumerated.
#[derive(Debug, Clone)]
pub struct HPolytope {
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Option<Vec<RatVec>>,
}

impl HPolytope {
    pub fn contains(&self, m: &[Rat]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot_int_rat(&h.normal, m) >= h.bound)
    }
}

/// The polytope {m : ⟨m, u_ρ⟩ ≥ -a_ρ for all rays}, vertices included.
/// Complete fans make it bounded, possibly empty.
pub fn polytope_of(fan: &Fan, divisor: &TorusDivisor) -> Result<HPolytope> {
    if divisor.coeffs.len() != fan.rays.len() {
        return Err(Error::DimensionMismatch(
            "divisor length differs from ray count".into(),
        ));
    }
    let halfspaces: Vec<Halfspace> = fan
        .rays
        .iter()
        .zip(&divisor.coeffs)
        .map(|(u, a)| Halfspace { normal: u.clone(), bound: -a.clone() })
        .collect();
    let n = fan.dim;
    let mut vertices: BTreeSet<RatVec> = BTreeSet::new();
    for subset in combinations(halfspaces.len(), n) {
        let a: RatMat = subset
            .iter()
            .map(|&i| to_rat_vec(&halfspaces[i].normal))
            .collect();
        let b: RatVec = subset.iter().map(|&i| halfspaces[i].bound.clone()).collect();
        if linalg::rank(&a) != n {
            continue;
        }
        let Some(m) = linalg::solve_exact(&a, &b) else {
            continue;
        };
        if halfspaces.iter().all(|h| dot_int_rat(&h.normal, &m) >= h.bound) {
            vertices.insert(m);
        }
    }
    Ok(HPolytope {
        halfspaces,
        vertices: Some(vertices.into_iter().collect()),
    })
}

/// Homogenize a lattice functional against a divisor: one coordinate
/// ⟨m, u_ρ⟩ + a_ρ per ray, nonnegative exactly on the polytope.
pub fn homogenize(fan: &Fan, divisor: &TorusDivisor, m: &[Rat]) -> RatVec {
    fan.rays
        .iter()
        .zip(&divisor.coeffs)
        .map(|(u, a)| dot_int_rat(u, m) + a)
        .collect()
}

/// The lattice points of a divisor polytope with their homogenizations and,
/// per maximal cone, the index of the point that vanishes on that cone (the
/// cone's local representative, when it is a lattice point of the polytope).
#[derive(Debug, Clone)]
pub struct LatticePointSet {
    /// Lattice points of the polytope, lexicographically sorted.
    pub points: Vec<IntVec>,
    /// Homogenized coordinates, aligned with `points`.
    pub homogenized: Vec<IntVec>,
    /// For each maximal cone, the index into `points` of its local
    /// representative, when that is integral and lies in the polytope.
    pub reference_vertex: Vec<Option<usize>>,
}

/// Enumerate the lattice points of the divisor polytope by scanning the
/// bounding box of its vertices. Integral divisors only; errors out past
/// `cap` points scanned.
pub fn lattice_points(fan: &Fan, divisor: &TorusDivisor, cap: usize) -> Result<LatticePointSet> {
    let int_coeffs = divisor.integral_coeffs()?;
    let poly = polytope_of(fan, divisor)?;
    let vertices = poly.vertices.as_ref().expect("polytope_of fills vertices");
    let n = fan.dim;
    let mut points: Vec<IntVec> = Vec::new();
    if !vertices.is_empty() {
        let mut lo: Vec<Int> = Vec::with_capacity(n);
        let mut hi: Vec<Int> = Vec::with_capacity(n);
        for j in 0..n {
            let mut min = vertices[0][j].clone();
            let mut max = vertices[0][j].clone();
            for v in vertices.iter().skip(1) {
                if v[j] < min {
                    min = v[j].clone();
                }
                if v[j] > max {
                    max = v[j].clone();
                }
            }
            lo.push(min.ceil().to_integer());
            hi.push(max.floor().to_integer());
        }
        let mut scanned: usize = 0;
        let mut cur = lo.clone();
        'scan: while cur.iter().zip(&hi).all(|(c, h)| c <= h) {
            scanned += 1;
            if scanned > cap {
                return Err(Error::CapExceeded(format!(
                    "lattice point enumeration exceeded {cap} box points"
                )));
            }
            let cur_rat = to_rat_vec(&cur);
            if poly.contains(&cur_rat) {
                points.push(cur.clone());
            }
            // Odometer from the last coordinate.
            let mut j = n;
            loop {
                if j == 0 {
                    break 'scan;
                }
                j -= 1;
                cur[j] += 1;
                if cur[j] <= hi[j] {
                    break;
                }
                cur[j] = lo[j].clone();
            }
        }
        points.sort();
    }
    let homogenized: Vec<IntVec> = points
        .iter()
        .map(|m| {
            fan.rays
                .iter()
                .zip(&int_coeffs)
                .map(|(u, a)| dot_int(u, m) + a)
                .collect()
        })
        .collect();
    let local = local_representatives(fan, divisor)?;
    let reference_vertex = local
        .iter()
        .map(|m| {
            if m.iter().all(|x| x.is_integer()) {
                let m_int: IntVec = m.iter().map(|x| x.to_integer()).collect();
                points.binary_search(&m_int).ok()
            } else {
                None
            }
        })
        .collect();
    Ok(LatticePointSet { points, homogenized, reference_vertex })
}

/// Indices of the lattice points whose homogenization vanishes on every ray
/// in `q`: the points of the face cut out by `q`.
pub fn face_q(lps: &LatticePointSet, q: &[usize]) -> Vec<usize> {
    (0..lps.points.len())
        .filter(|&i| q.iter().all(|&r| lps.homogenized[i][r].is_zero()))
        .collect()
}

/// A cone of the generalized fan of a nef divisor: the maximal cones sharing
/// one local representative, fused.
#[derive(Debug, Clone)]
pub struct GeneralizedCone {
    /// Union of the ray sets of the merged maximal cones, sorted.
    pub rays: Vec<usize>,
    /// Indices of the merged maximal cones.
    pub merged_from: Vec<usize>,
    /// The shared local representative — a vertex of the divisor polytope.
    pub vertex: RatVec,
}

/// The generalized fan of a nef divisor, together with a primitive basis of
/// the common lineality space of its cones.
#[derive(Debug, Clone)]
pub struct GeneralizedFan {
    /// Sorted by vertex.
    pub cones: Vec<GeneralizedCone>,
    pub u0_basis: Vec<IntVec>,
}

/// Merge maximal cones by equal local representatives. Requires nef; the
/// distinct representatives are then exactly the polytope's vertices.
pub fn sigma_d(fan: &Fan, divisor: &TorusDivisor) -> Result<GeneralizedFan> {
    if !is_nef(fan, divisor)? {
        return Err(Error::NotNef(
            "the generalized fan is defined for nef divisors".into(),
        ));
    }
    let local = local_representatives(fan, divisor)?;
    let mut groups: BTreeMap<RatVec, Vec<usize>> = BTreeMap::new();
    for (ci, m) in local.iter().enumerate() {
        groups.entry(m.clone()).or_default().push(ci);
    }
    let cones: Vec<GeneralizedCone> = groups
        .into_iter()
        .map(|(vertex, merged_from)| {
            let mut rays: BTreeSet<usize> = BTreeSet::new();
            for &ci in &merged_from {
                rays.extend(fan.max_cones[ci].rays.iter().copied());
            }
            GeneralizedCone { rays: rays.into_iter().collect(), merged_from, vertex }
        })
        .collect();
    // Lineality: the directions all vertices agree on. A single merged cone
    // means the divisor is numerically trivial and everything is lineality.
    let u0_basis = if cones.len() == 1 {
        (0..fan.dim)
            .map(|i| {
                let mut e = vec![Int::zero(); fan.dim];
                e[i] = Int::one();
                e
            })
            .collect()
    } else {
        let diffs: RatMat = cones
            .iter()
            .skip(1)
            .map(|c| {
                c.vertex
                    .iter()
                    .zip(&cones[0].vertex)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        linalg::nullspace(&diffs)
            .iter()
            .map(|v| primitive_of_rational(v))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(GeneralizedFan { cones, u0_basis })
}

/// The hull of a set of rays in the generalized fan: the intersection of
/// all merged-cone ray sets containing it, or `None` when no merged cone
/// contains the set.
pub fn phi_hull(gf: &GeneralizedFan, rays: &[usize]) -> Option<Vec<usize>> {
    let wanted: BTreeSet<usize> = rays.iter().copied().collect();
    let mut hull: Option<BTreeSet<usize>> = None;
    for cone in &gf.cones {
        let set: BTreeSet<usize> = cone.rays.iter().copied().collect();
        if wanted.is_subset(&set) {
            hull = Some(match hull {
                None => set,
                Some(acc) => acc.intersection(&set).copied().collect(),
            });
        }
    }
    hull.map(|s| s.into_iter().collect())
}

/// A curve is contracted by the map of the divisor exactly when the rays it
/// meets nontrivially have a hull in the generalized fan.
pub fn curve_contracted(gf: &GeneralizedFan, curve: &CurveClass) -> bool {
    let mut support: Vec<usize> = curve.j_plus();
    support.extend(curve.j_minus());
    support.sort_unstable();
    phi_hull(gf, &support).is_some()
}

/// The ample model of a nef Cartier divisor: the quotient fan on the
/// lattice modulo the lineality space (refined to a simplicial fan by
/// pulling subdivisions), the model divisor, and the bookkeeping to move
/// between the two fans.
#[derive(Debug, Clone)]
pub struct AmpleModel {
    /// Simplicial refinement of the normal fan of the divisor polytope.
    pub quotient_fan: Fan,
    /// Rows form the lattice projection Z^n → Z^(n - dim U₀).
    pub projection: IntMat,
    /// The model divisor on `quotient_fan`; ample on the unrefined normal
    /// fan, hence nef Cartier here.
    pub dbar: TorusDivisor,
    /// For each quotient ray: a source ray projecting onto it, with the
    /// positive scale relating the projection to the primitive quotient ray.
    pub ray_lift: Vec<(usize, Int)>,
    /// For each maximal cone of `quotient_fan`, the merged cone of the
    /// generalized fan it refines.
    pub cone_origin: Vec<usize>,
    /// The lexicographically smallest vertex of the divisor polytope; the
    /// model divisor corresponds to the polytope translated by its negative.
    pub base_vertex: IntVec,
}

/// Compute the ample model of a nef Cartier divisor.
pub fn ample_model(fan: &Fan, divisor: &TorusDivisor) -> Result<AmpleModel> {
    if is_cartier(fan, divisor)?.is_none() {
        return Err(Error::NotCartier(
            "the ample model is defined for Cartier divisors".into(),
        ));
    }
    let gf = sigma_d(fan, divisor)?; // checks nef
    let n = fan.dim;
    let k = gf.u0_basis.len();
    if k == n {
        return Err(Error::Hypothesis(
            "divisor is numerically trivial; its ample model is a point".into(),
        ));
    }
    // Lattice projection killing the lineality space, as in star fans.
    let projection: IntMat = if k == 0 {
        linalg::identity_int(n)
    } else {
        let a: IntMat = (0..n)
            .map(|row| gf.u0_basis.iter().map(|b| b[row].clone()).collect())
            .collect();
        let snf = linalg::smith_normal_form(&a)?;
        if snf.invariants().len() != k {
            return Err(Error::Internal("lineality basis is dependent".into()));
        }
        snf.u[k..n].to_vec()
    };
    let nbar = n - k;

    // Vertices are integral: the divisor is nef Cartier.
    let vertices: Vec<IntVec> = gf
        .cones
        .iter()
        .map(|c| {
            c.vertex
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(Error::Internal("non-integral vertex of a Cartier polytope".into()))
                    }
                })
                .collect::<Result<IntVec>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let base_vertex = vertices.iter().min().cloned().expect("at least one cone");

    // Quotient rays: extremal primitive projections, merged cone by cone.
    let mut bar_rays: Vec<IntVec> = Vec::new();
    let mut bar_cones: Vec<Vec<usize>> = Vec::new();
    for cone in &gf.cones {
        let mut gens: Vec<IntVec> = Vec::new();
        for &r in &cone.rays {
            let image = linalg::mat_vec_int(&projection, &fan.rays[r]);
            if image.iter().all(Zero::is_zero) {
                continue;
            }
            let prim = primitive(&image)?;
            if !gens.contains(&prim) {
                gens.push(prim);
            }
        }
        let gens_rat: Vec<RatVec> = gens.iter().map(|g| to_rat_vec(g)).collect();
        let mut extremal: Vec<usize> = Vec::new();
        for (i, g) in gens_rat.iter().enumerate() {
            let others: Vec<RatVec> = gens_rat
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, h)| h.clone())
                .collect();
            if !linalg::cone_member(&others, g)?.inside {
                extremal.push(i);
            }
        }
        let mut bar_cone: Vec<usize> = Vec::new();
        for i in extremal {
            let idx = match bar_rays.iter().position(|r| r == &gens[i]) {
                Some(idx) => idx,
                None => {
                    bar_rays.push(gens[i].clone());
                    bar_rays.len() - 1
                }
            };
            bar_cone.push(idx);
        }
        bar_cone.sort_unstable();
        bar_cones.push(bar_cone);
    }

    // Lift each quotient ray to the first source ray projecting onto it.
    let mut ray_lift: Vec<(usize, Int)> = Vec::with_capacity(bar_rays.len());
    for bar in &bar_rays {
        let mut found = None;
        for (r, u) in fan.rays.iter().enumerate() {
            let image = linalg::mat_vec_int(&projection, u);
            if image.iter().all(Zero::is_zero) {
                continue;
            }
            if &primitive(&image)? == bar {
                let scale = image
                    .iter()
                    .zip(bar)
                    .find(|(_, b)| !b.is_zero())
                    .map(|(im, b)| im / b)
                    .expect("nonzero primitive vector");
                found = Some((r, scale));
                break;
            }
        }
        ray_lift.push(found.ok_or_else(|| Error::Internal("quotient ray has no lift".into()))?);
    }

    // Refine to a simplicial fan by pulling at every quotient ray in order.
    let mut cones_with_origin: Vec<(Vec<usize>, usize)> = bar_cones
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    for r in 0..bar_rays.len() {
        let mut next: Vec<(Vec<usize>, usize)> = Vec::new();
        for (cone, origin) in cones_with_origin {
            if !cone.contains(&r) || cone.len() == nbar {
                next.push((cone, origin));
                continue;
            }
            for facet in cone_facets(&bar_rays, &cone, nbar)? {
                if !facet.contains(&r) {
                    let mut piece = facet;
                    piece.push(r);
                    piece.sort_unstable();
                    next.push((piece, origin));
                }
            }
        }
        cones_with_origin = next;
    }
    for (cone, _) in &cones_with_origin {
        if cone.len() != nbar {
            return Err(Error::Internal(
                "pulling subdivisions left a non-simplicial cone".into(),
            ));
        }
    }
    let cone_origin: Vec<usize> = cones_with_origin.iter().map(|&(_, o)| o).collect();
    let quotient_fan = Fan::new(
        nbar,
        bar_rays.clone(),
        cones_with_origin.into_iter().map(|(c, _)| c).collect(),
    )?;

    // Model divisor: support function of the translated polytope.
    let dbar_coeffs: RatVec = ray_lift
        .iter()
        .map(|(r, scale)| {
            let mut min: Option<Int> = None;
            for v in &vertices {
                let diff: IntVec = v.iter().zip(&base_vertex).map(|(a, b)| a - b).collect();
                let val = dot_int(&diff, &fan.rays[*r]);
                min = Some(match min {
                    Some(m) if m <= val => m,
                    _ => val,
                });
            }
            let min = min.expect("nonempty vertex set");
            let (q, rem) = (-min).div_rem(scale);
            if !rem.is_zero() {
                return Err(Error::Internal("model coefficient is not integral".into()));
            }
            Ok(Rat::from_integer(q))
        })
        .collect::<Result<RatVec>>()?;
    let dbar = TorusDivisor::new(dbar_coeffs);

    let model = AmpleModel {
        quotient_fan,
        projection,
        dbar,
        ray_lift,
        cone_origin,
        base_vertex,
    };
    verify_ample_model(fan, divisor, &vertices, &model)?;
    Ok(model)
}

/// Cross-checks run on every constructed ample model:
/// the model divisor must be nef and Cartier, its support function composed
/// with the projection must reproduce the input divisor shifted by the base
/// vertex, and walls of the refined quotient fan must pair with the model
/// divisor strictly positively exactly when they separate different merged
/// cones.
fn verify_ample_model(
    fan: &Fan,
    divisor: &TorusDivisor,
    vertices: &[IntVec],
    model: &AmpleModel,
) -> Result<()> {
    let bar = &model.quotient_fan;
    if is_cartier(bar, &model.dbar)?.is_none() {
        return Err(Error::Internal("model divisor is not Cartier".into()));
    }
    let local = local_representatives(bar, &model.dbar)?;
    for (r, u) in fan.rays.iter().enumerate() {
        let expected = vertices
            .iter()
            .map(|v| {
                let diff: IntVec = v.iter().zip(&model.base_vertex).map(|(a, b)| a - b).collect();
                dot_int(&diff, u)
            })
            .min()
            .expect("nonempty vertex set");
        // Pullback identity: -ψ̄(π(u_ρ)) = a_ρ + ⟨base vertex, u_ρ⟩.
        let pullback_coeff = -Rat::from_integer(expected.clone());
        let shifted =
            &divisor.coeffs[r] + Rat::from_integer(dot_int(&model.base_vertex, u));
        if pullback_coeff != shifted {
            return Err(Error::Internal(
                "model pullback does not reproduce the divisor".into(),
            ));
        }
        let image = linalg::mat_vec_int(&model.projection, u);
        if image.iter().all(Zero::is_zero) {
            if !expected.is_zero() {
                return Err(Error::Internal(
                    "lineality ray sees a nonconstant support function".into(),
                ));
            }
            continue;
        }
        let got = intersection::support_value(bar, &local, &to_rat_vec(&image))?;
        if got != Rat::from_integer(expected.clone()) {
            return Err(Error::Internal(format!(
                "support mismatch at source ray {r}: model gives {got}, polytope gives {expected}"
            )));
        }
    }
    for wall in bar.walls()? {
        let curve = wall_curve(bar, &wall)?;
        let deg = intersection::pair(&curve, &model.dbar);
        let same_origin =
            model.cone_origin[wall.cones.0] == model.cone_origin[wall.cones.1];
        if same_origin && !deg.is_zero() {
            return Err(Error::Internal(
                "wall inside one merged cone pairs nonzero with the model divisor".into(),
            ));
        }
        if !same_origin && !deg.is_positive() {
            return Err(Error::Internal(
                "wall between merged cones fails strict positivity".into(),
            ));
        }
    }
    Ok(())
}

/// Facets of a full-dimensional pointed cone given by extremal generators:
/// for every (dim-1)-subset spanning a hyperplane, orient its normal and
/// keep it when it supports the cone; the facet is the set of generators on
/// the hyperplane.
fn cone_facets(rays: &[IntVec], cone: &[usize], dim: usize) -> Result<Vec<Vec<usize>>> {
    let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for subset in combinations(cone.len(), dim - 1) {
        let rows: RatMat = subset
            .iter()
            .map(|&i| to_rat_vec(&rays[cone[i]]))
            .collect();
        if linalg::rank(&rows) != dim - 1 {
            continue;
        }
        let kernel = linalg::nullspace(&rows);
        if kernel.len() != 1 {
            continue;
        }
        let h = &kernel[0];
        let values: Vec<Rat> = cone.iter().map(|&r| linalg::dot(h, &to_rat_vec(&rays[r]))).collect();
        let any_pos = values.iter().any(|v| v.is_positive());
        let any_neg = values.iter().any(|v| v.is_negative());
        if any_pos && any_neg {
            continue;
        }
        let facet: Vec<usize> = cone
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_zero())
            .map(|(&r, _)| r)
            .collect();
        facets.insert(facet);
    }
    Ok(facets.into_iter().collect())
}

/// Inverse image of a quotient-fan point under the projection, as a point of
/// the source lattice: used to lift witnesses back. Returns a specific lift;
/// the projection applied to it reproduces the input.
pub fn lift_point(model: &AmpleModel, point: &[Int]) -> Result<IntVec> {
    let nbar = model.quotient_fan.dim;
    let n = model.projection[0].len();
    if point.len() != nbar {
        return Err(Error::DimensionMismatch("lift of a wrong-arity point".into()));
    }
    // The projection has a right inverse because it is onto: solve with the
    // pseudo-solution of the stacked square system via SNF-free route.
    let a = linalg::to_rat_mat(&model.projection);
    let b = to_rat_vec(point);
    let x = linalg::solve_exact(&a, &b)
        .ok_or_else(|| Error::Internal("projection is not surjective".into()))?;
    if x.iter().any(|c| !c.is_integer()) {
        // Correct by a lattice solve: the projection maps Z^n onto Z^nbar,
        // so an integral preimage exists; find it through the Smith form.
        // With u·P·v = s diagonal, x = v·y solves P·x = b when s·y = u·b.
        let snf = linalg::smith_normal_form(&model.projection)?;
        let ub = linalg::mat_vec_int(&snf.u, point);
        let mut y = vec![Int::zero(); n];
        for (i, ubi) in ub.iter().enumerate().take(nbar) {
            let d = &snf.s[i][i];
            let (q, r) = ubi.div_rem(d);
            if !r.is_zero() {
                return Err(Error::Internal("projection is not onto the lattice".into()));
            }
            y[i] = q;
        }
        let lift = linalg::mat_vec_int(&snf.v, &y);
        let check = linalg::mat_vec_int(&model.projection, &lift);
        if check != point {
            return Err(Error::Internal("lattice lift failed verification".into()));
        }
        return Ok(lift);
    }
    Ok(x.iter().map(|c| c.to_integer()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::wall_curves;
    use crate::linalg::{int, ivec, rat, rvec};

    fn hexagon() -> Fan {
        Fan::new(
            2,
            vec![
                ivec(&[1, 0]),
                ivec(&[1, 1]),
                ivec(&[0, 1]),
                ivec(&[-1, 0]),
                ivec(&[-1, -1]),
                ivec(&[0, -1]),
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

    fn two_line() -> TorusDivisor {
        TorusDivisor::from_integers(&[2, 2, 0, 0, 0, 2])
    }

    #[test]
    fn polytope_of_the_hexagon_divisor_is_a_triangle() {
        let fan = hexagon();
        let poly = polytope_of(&fan, &two_line()).unwrap();
        let verts = poly.vertices.unwrap();
        assert_eq!(verts, vec![rvec(&[-2, 0]), rvec(&[-2, 2]), rvec(&[0, 0])]);
    }

    #[test]
    fn lattice_points_of_the_triangle() {
        let fan = hexagon();
        let lps = lattice_points(&fan, &two_line(), 1_000_000).unwrap();
        assert_eq!(
            lps.points,
            vec![
                ivec(&[-2, 0]),
                ivec(&[-2, 1]),
                ivec(&[-2, 2]),
                ivec(&[-1, 0]),
                ivec(&[-1, 1]),
                ivec(&[0, 0]),
            ]
        );
        assert_eq!(lps.homogenized[0], ivec(&[0, 0, 0, 2, 2, 2]));
        // Cones 0 and 1 share the local representative (-2, 0): index 0.
        assert_eq!(lps.reference_vertex[0], Some(0));
        assert_eq!(lps.reference_vertex[1], Some(0));
        // Face at ray 0: the three points with first coordinate -2.
        assert_eq!(face_q(&lps, &[0]), vec![0, 1, 2]);
        assert_eq!(face_q(&lps, &[]).len(), 6);
    }

    #[test]
    fn plane_conic_lattice_points() {
        let p2 = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let d = TorusDivisor::from_integers(&[2, 0, 0]);
        let lps = lattice_points(&p2, &d, 1_000_000).unwrap();
        assert_eq!(lps.points.len(), 6);
        let idx = lps.points.binary_search(&ivec(&[-2, 0])).unwrap();
        assert_eq!(lps.homogenized[idx], ivec(&[0, 0, 2]));
    }

    #[test]
    fn generalized_fan_merges_the_hexagon() {
        let fan = hexagon();
        let gf = sigma_d(&fan, &two_line()).unwrap();
        assert!(gf.u0_basis.is_empty());
        let raysets: Vec<Vec<usize>> = gf.cones.iter().map(|c| c.rays.clone()).collect();
        assert_eq!(raysets, vec![vec![0, 1, 2], vec![0, 4, 5], vec![2, 3, 4]]);
        let merged: Vec<Vec<usize>> = gf.cones.iter().map(|c| c.merged_from.clone()).collect();
        assert_eq!(merged, vec![vec![0, 1], vec![4, 5], vec![2, 3]]);
    }

    #[test]
    fn hull_queries_on_the_merged_fan() {
        let fan = hexagon();
        let gf = sigma_d(&fan, &two_line()).unwrap();
        assert_eq!(phi_hull(&gf, &[1]), Some(vec![0, 1, 2]));
        assert_eq!(phi_hull(&gf, &[0]), Some(vec![0]));
        assert_eq!(phi_hull(&gf, &[0, 2]), Some(vec![0, 1, 2]));
        assert_eq!(phi_hull(&gf, &[1, 3]), None);
        assert_eq!(phi_hull(&gf, &[]), Some(vec![]));
    }

    #[test]
    fn contraction_matches_vanishing_degree() {
        let fan = hexagon();
        let d = two_line();
        let gf = sigma_d(&fan, &d).unwrap();
        for (_, curve) in wall_curves(&fan).unwrap() {
            let contracted = curve_contracted(&gf, &curve);
            let deg = intersection::pair(&curve, &d);
            assert_eq!(contracted, deg.is_zero());
        }
    }

    #[test]
    fn ample_model_of_the_hexagon_divisor_is_the_plane() {
        let fan = hexagon();
        let model = ample_model(&fan, &two_line()).unwrap();
        assert_eq!(model.quotient_fan.dim, 2);
        assert_eq!(model.quotient_fan.rays.len(), 3);
        assert_eq!(model.quotient_fan.max_cones.len(), 3);
        assert_eq!(model.base_vertex, ivec(&[-2, 0]));
        // The model divisor is an ample conic: degree 2 against every line.
        assert!(intersection::is_ample(&model.quotient_fan, &model.dbar).unwrap());
        let degs: Vec<Rat> = wall_curves(&model.quotient_fan)
            .unwrap()
            .iter()
            .map(|(_, c)| intersection::pair(c, &model.dbar))
            .collect();
        assert_eq!(degs, rvec(&[2, 2, 2]));
    }

    #[test]
    fn ample_model_with_lineality_is_a_line() {
        let fan = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[0, -1])],
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap();
        let d = TorusDivisor::from_integers(&[1, 0, 0, 0]);
        let gf = sigma_d(&fan, &d).unwrap();
        assert_eq!(gf.u0_basis, vec![ivec(&[0, 1])]);
        let model = ample_model(&fan, &d).unwrap();
        assert_eq!(model.quotient_fan.dim, 1);
        let total: Rat = model.dbar.coeffs.iter().sum();
        assert_eq!(total, rat(1));
        assert_eq!(model.base_vertex, ivec(&[-1, 0]));
    }

    #[test]
    fn ample_divisor_is_its_own_model() {
        let p121 = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let d = TorusDivisor::from_integers(&[2, 0, 0]);
        let model = ample_model(&p121, &d).unwrap();
        assert!(model.quotient_fan.equivalent(&p121));
        assert_eq!(model.dbar.coeffs.iter().sum::<Rat>(), rat(2));
    }

    #[test]
    fn numerically_trivial_divisor_has_no_model() {
        let fan = hexagon();
        let zero = TorusDivisor::from_integers(&[0, 0, 0, 0, 0, 0]);
        assert!(matches!(ample_model(&fan, &zero), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn pulling_simplicializes_an_octahedral_model() {
        // Cube-vertex rays, each square face cone split along a diagonal:
        // a simplicial fan whose anticanonical model is the octahedron's
        // normal fan, with six square cones to pull apart.
        let signs = [1i64, -1];
        let mut rays = Vec::new();
        for &x in &signs {
            for &y in &signs {
                for &z in &signs {
                    rays.push(ivec(&[x, y, z]));
                }
            }
        }
        // Ray index: (x,y,z) with +1→0, -1→1 gives idx = 4x' + 2y' + z'.
        let idx = |x: i64, y: i64, z: i64| -> usize {
            let b = |v: i64| if v > 0 { 0 } else { 1 };
            4 * b(x) + 2 * b(y) + b(z)
        };
        let mut cones = Vec::new();
        // Faces x = ±1, y = ±1, z = ±1, each as two triangles.
        for &s in &signs {
            // x = s: corners (s, ±1, ±1).
            cones.push(vec![idx(s, 1, 1), idx(s, 1, -1), idx(s, -1, 1)]);
            cones.push(vec![idx(s, -1, -1), idx(s, 1, -1), idx(s, -1, 1)]);
            // y = s.
            cones.push(vec![idx(1, s, 1), idx(1, s, -1), idx(-1, s, 1)]);
            cones.push(vec![idx(-1, s, -1), idx(1, s, -1), idx(-1, s, 1)]);
            // z = s.
            cones.push(vec![idx(1, 1, s), idx(1, -1, s), idx(-1, 1, s)]);
            cones.push(vec![idx(-1, -1, s), idx(1, -1, s), idx(-1, 1, s)]);
        }
        let fan = Fan::new(3, rays, cones).unwrap();
        let d = intersection::anticanonical(&fan);
        let model = ample_model(&fan, &d).unwrap();
        // Six square cones, each pulled into two triangles.
        assert_eq!(model.quotient_fan.max_cones.len(), 12);
        assert_eq!(model.quotient_fan.rays.len(), 8);
        let mut origins = model.cone_origin.clone();
        origins.sort_unstable();
        origins.dedup();
        assert_eq!(origins.len(), 6);
    }

    #[test]
    fn lifting_points_through_the_projection() {
        let fan = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[0, -1])],
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap();
        let d = TorusDivisor::from_integers(&[1, 0, 0, 0]);
        let model = ample_model(&fan, &d).unwrap();
        let lift = lift_point(&model, &[int(3)]).unwrap();
        assert_eq!(linalg::mat_vec_int(&model.projection, &lift), vec![int(3)]);
    }
}
