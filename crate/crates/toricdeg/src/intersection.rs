//! Divisors, curve classes, and their intersection pairing.
//!
//! Torus-invariant divisors are coefficient vectors indexed by the rays.
//! Each wall of the fan carries a curve class, pinned down by the lattice
//! multiplicities of the wall and its two cones together with the unique
//! linear relation among the rays involved; pairing a divisor against all
//! wall curves decides nef, and exact local solves decide Cartier and ample.
//!
//! The divisor class group is computed once as a Smith normal form of the
//! ray matrix and handed out as a projection to free and torsion parts.
//! Restriction to the subvariety of a cone goes through the star fan: pick
//! the local representative vanishing on the first maximal cone containing
//! the center, then rescale each adjacent coefficient by the lattice index
//! of its projected ray.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::fan::{int_from_json, Fan, StarFan, Wall};
use crate::linalg::{
    self, dot_int_rat, format_rat, parse_rat, to_rat_vec, Int, IntMat, IntVec, Rat, RatMat,
    RatVec,
};
use crate::{Error, Result};

/// A torus-invariant divisor Σ a_ρ·D_ρ, one coefficient per ray. Rational
/// coefficients appear naturally under restriction; most entry points insist
/// on integral ones and say so.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusDivisor {
    pub coeffs: RatVec,
}

impl TorusDivisor {
    pub fn new(coeffs: RatVec) -> Self {
        TorusDivisor { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        TorusDivisor { coeffs: linalg::rvec(coeffs) }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn integral_coeffs(&self) -> Result<IntVec> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NonIntegralDivisor(format!(
                        "coefficient {} is not an integer",
                        format_rat(c)
                    )))
                }
            })
            .collect()
    }

    /// Parse from a JSON array of integers, rationals, or their strings.
    pub fn from_json_value(value: &Value) -> Result<TorusDivisor> {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::Parse("divisor must be a JSON array".into()))?;
        let coeffs = arr
            .iter()
            .map(|v| match v {
                Value::String(s) => parse_rat(s),
                other => int_from_json(other).map(Rat::from_integer),
            })
            .collect::<Result<RatVec>>()?;
        Ok(TorusDivisor { coeffs })
    }

    pub fn from_json_str(text: &str) -> Result<TorusDivisor> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        TorusDivisor::from_json_value(&value)
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|c| Value::String(format_rat(c)))
                .collect(),
        )
    }
}

/// A curve class recorded by its intersection numbers with the ray divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub degrees: RatVec,
}

impl CurveClass {
    /// Rays met positively.
    pub fn j_plus(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    /// Rays met negatively.
    pub fn j_minus(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_negative())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Intersection number D·C from the ray degrees of the curve class.
pub fn pair(curve: &CurveClass, divisor: &TorusDivisor) -> Rat {
    linalg::dot(&curve.degrees, &divisor.coeffs)
}

/// The curve class of a wall. The two off-wall rays are met with degree
/// mult(wall)/mult(cone); the degrees on the wall rays are forced by the
/// relation Σ (C·D_ρ)·u_ρ = 0, which is re-checked before returning.
pub fn wall_curve(fan: &Fan, wall: &Wall) -> Result<CurveClass> {
    let n = fan.dim;
    let mult_wall = Rat::from_integer(fan.mult(&wall.rays)?);
    let c1 = &mult_wall / Rat::from_integer(fan.mult(&fan.max_cones[wall.cones.0].rays)?);
    let c2 = &mult_wall / Rat::from_integer(fan.mult(&fan.max_cones[wall.cones.1].rays)?);
    let (r1, r2) = wall.opposite;
    let mut degrees = vec![Rat::zero(); fan.rays.len()];
    degrees[r1] = c1.clone();
    degrees[r2] = c2.clone();
    if !wall.rays.is_empty() {
        // Solve Σ_{ρ on the wall} x_ρ·u_ρ = -(c1·u_1 + c2·u_2).
        let a: RatMat = (0..n)
            .map(|row| {
                wall.rays
                    .iter()
                    .map(|&r| Rat::from_integer(fan.rays[r][row].clone()))
                    .collect()
            })
            .collect();
        let b: RatVec = (0..n)
            .map(|row| {
                -(&c1 * Rat::from_integer(fan.rays[r1][row].clone())
                    + &c2 * Rat::from_integer(fan.rays[r2][row].clone()))
            })
            .collect();
        let x = linalg::solve_exact(&a, &b).ok_or_else(|| {
            Error::DegenerateWall(format!("wall {:?} has no curve relation", wall.rays))
        })?;
        for (slot, &r) in wall.rays.iter().enumerate() {
            degrees[r] = x[slot].clone();
        }
    }
    // Re-verify the defining relation.
    for row in 0..n {
        let mut acc = Rat::zero();
        for (r, deg) in degrees.iter().enumerate() {
            if !deg.is_zero() {
                acc += deg * Rat::from_integer(fan.rays[r][row].clone());
            }
        }
        if !acc.is_zero() {
            return Err(Error::Internal("wall relation failed verification".into()));
        }
    }
    Ok(CurveClass { degrees })
}

/// All wall curves, in the order of [`Fan::walls`].
pub fn wall_curves(fan: &Fan) -> Result<Vec<(Wall, CurveClass)>> {
    fan.walls()?
        .into_iter()
        .map(|w| wall_curve(fan, &w).map(|c| (w, c)))
        .collect()
}

/// Nef means nonnegative against every wall curve.
pub fn is_nef(fan: &Fan, divisor: &TorusDivisor) -> Result<bool> {
    check_divisor(fan, divisor)?;
    for (_, curve) in wall_curves(fan)? {
        if pair(&curve, divisor).is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local data of a Cartier divisor: one lattice point per maximal cone with
/// ⟨m_σ, u_ρ⟩ = -a_ρ on the cone's rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierData {
    pub m_sigma: IntMat,
}

/// The rational local representatives m_σ, one per maximal cone. These
/// always exist on a simplicial fan; the divisor is Cartier exactly when all
/// of them are lattice points.
pub fn local_representatives(fan: &Fan, divisor: &TorusDivisor) -> Result<RatMat> {
    check_divisor(fan, divisor)?;
    let n = fan.dim;
    let mut out = Vec::with_capacity(fan.max_cones.len());
    for cone in &fan.max_cones {
        let a: RatMat = cone
            .rays
            .iter()
            .map(|&r| to_rat_vec(&fan.rays[r]))
            .collect();
        let b: RatVec = cone.rays.iter().map(|&r| -divisor.coeffs[r].clone()).collect();
        let m = linalg::solve_exact(&a, &b)
            .ok_or_else(|| Error::Internal("local representative solve failed".into()))?;
        debug_assert_eq!(m.len(), n);
        out.push(m);
    }
    Ok(out)
}

/// `Some` with the lattice data when the divisor is Cartier, `None` when it
/// is merely Q-Cartier.
pub fn is_cartier(fan: &Fan, divisor: &TorusDivisor) -> Result<Option<CartierData>> {
    let local = local_representatives(fan, divisor)?;
    let mut m_sigma = Vec::with_capacity(local.len());
    for m in &local {
        if m.iter().any(|x| !x.is_integer()) {
            return Ok(None);
        }
        m_sigma.push(m.iter().map(|x| x.to_integer()).collect());
    }
    Ok(Some(CartierData { m_sigma }))
}

/// Ample = Cartier + strictly positive against every wall curve.
pub fn is_ample(fan: &Fan, divisor: &TorusDivisor) -> Result<bool> {
    if is_cartier(fan, divisor)?.is_none() {
        return Ok(false);
    }
    for (_, curve) in wall_curves(fan)? {
        if !pair(&curve, divisor).is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value of the support function of the divisor at a point: ⟨m_σ, v⟩ for any
/// maximal cone σ containing v.
pub fn support_value(fan: &Fan, local: &[RatVec], v: &[Rat]) -> Result<Rat> {
    let ci = fan
        .cone_containing(v)
        .ok_or_else(|| Error::Hypothesis("point outside the fan support".into()))?;
    Ok(linalg::dot(&local[ci], v))
}

/// Pull back a divisor along the identity of the torus to a refining fan:
/// the new coefficient at a ray w is -ψ(w) for the support function ψ.
/// Requires every ray of the refinement to lie in some cone of the source,
/// which holds whenever the refinement subdivides the source fan.
pub fn pullback(fan: &Fan, divisor: &TorusDivisor, refinement: &Fan) -> Result<TorusDivisor> {
    let local = local_representatives(fan, divisor)?;
    let coeffs = refinement
        .rays
        .iter()
        .map(|w| Ok(-support_value(fan, &local, &to_rat_vec(w))?))
        .collect::<Result<RatVec>>()?;
    Ok(TorusDivisor { coeffs })
}

/// Divisor of the character of a lattice point: coefficients ⟨m, u_ρ⟩.
pub fn divisor_of_monomial(fan: &Fan, m: &[Int]) -> TorusDivisor {
    let coeffs = fan
        .rays
        .iter()
        .map(|u| Rat::from_integer(linalg::dot_int(u, m)))
        .collect();
    TorusDivisor { coeffs }
}

/// The lattice point m with a - b = div(m), if one exists. Integral
/// divisors only.
pub fn linearly_equivalent(
    fan: &Fan,
    a: &TorusDivisor,
    b: &TorusDivisor,
) -> Result<Option<IntVec>> {
    check_divisor(fan, a)?;
    check_divisor(fan, b)?;
    a.integral_coeffs()?;
    b.integral_coeffs()?;
    let rays_rat = linalg::to_rat_mat(&fan.rays);
    let delta: RatVec = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x - y)
        .collect();
    let Some(m) = linalg::solve_exact(&rays_rat, &delta) else {
        return Ok(None);
    };
    if m.iter().all(|x| x.is_integer()) {
        Ok(Some(m.iter().map(|x| x.to_integer()).collect()))
    } else {
        Ok(None)
    }
}

/// The divisor class group, presented by a Smith normal form of the ray
/// matrix: free rank, torsion invariants, and the projection computing the
/// class of a divisor.
#[derive(Debug, Clone)]
pub struct ClassGroupData {
    pub free_rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion_invariants: IntVec,
    /// First one row per torsion invariant (read modulo it), then
    /// `free_rank` rows projecting onto the free part.
    pub quotient_map: IntMat,
}

impl ClassGroupData {
    /// (free part, torsion residues) of an integral divisor class.
    pub fn class_of(&self, coeffs: &[Int]) -> (IntVec, IntVec) {
        let t = self.torsion_invariants.len();
        let image = linalg::mat_vec_int(&self.quotient_map, coeffs);
        let torsion = image[..t]
            .iter()
            .zip(&self.torsion_invariants)
            .map(|(x, d)| x.mod_floor(d))
            .collect();
        (image[t..].to_vec(), torsion)
    }

    /// Free part of a rational divisor class.
    pub fn free_class(&self, coeffs: &[Rat]) -> RatVec {
        let t = self.torsion_invariants.len();
        self.quotient_map[t..]
            .iter()
            .map(|row| dot_int_rat(row, coeffs))
            .collect()
    }
}

/// Cokernel of the principal-divisor map m ↦ (⟨m, u_ρ⟩)_ρ.
pub fn class_group(fan: &Fan) -> Result<ClassGroupData> {
    let s = fan.rays.len();
    let snf = linalg::smith_normal_form(&fan.rays)?;
    let invariants = snf.invariants();
    let rank = invariants.len();
    if rank != fan.dim {
        return Err(Error::InvalidFan("rays do not span the lattice".into()));
    }
    // The ray matrix R (rows = rays) is the matrix of the principal-divisor
    // map Z^n → Z^s, so with u·R·v = s the row transform u identifies
    // Z^s / R·Z^n with ⊕ Z/d_i ⊕ Z^(s-rank).
    let mut torsion_invariants = IntVec::new();
    let mut quotient_map = IntMat::new();
    for (i, d) in invariants.iter().enumerate() {
        if !d.is_one() {
            torsion_invariants.push(d.clone());
            quotient_map.push(snf.u[i].clone());
        }
    }
    for row in rank..s {
        quotient_map.push(snf.u[row].clone());
    }
    Ok(ClassGroupData {
        free_rank: s - rank,
        torsion_invariants,
        quotient_map,
    })
}

/// Restriction of a divisor to the subvariety of a cone, expressed on the
/// star fan.
#[derive(Debug, Clone)]
pub struct RestrictionData {
    /// Sorted ray indices of the center.
    pub gamma: Vec<usize>,
    pub star: StarFan,
    /// The restricted divisor, with coefficients on the star rays.
    pub divisor: TorusDivisor,
    /// The local representative point used to kill the coefficients on the
    /// first maximal cone containing the center.
    pub local_point: RatVec,
}

/// Restrict a divisor to the subvariety of the cone on `gamma`: replace the
/// divisor by the linearly equivalent one vanishing on the first maximal
/// cone containing `gamma`, then push each adjacent coefficient down to the
/// star fan, divided by the lattice index of its projected ray.
pub fn restriction_data(fan: &Fan, divisor: &TorusDivisor, gamma: &[usize]) -> Result<RestrictionData> {
    check_divisor(fan, divisor)?;
    let star = fan.star(gamma)?;
    let mut sorted = gamma.to_vec();
    sorted.sort_unstable();
    let home = (0..fan.max_cones.len())
        .find(|&ci| sorted.iter().all(|&r| fan.max_cones[ci].contains_ray(r)))
        .ok_or_else(|| Error::Hypothesis("center is not a cone of the fan".into()))?;
    let cone = &fan.max_cones[home];
    let a: RatMat = cone.rays.iter().map(|&r| to_rat_vec(&fan.rays[r])).collect();
    let b: RatVec = cone.rays.iter().map(|&r| -divisor.coeffs[r].clone()).collect();
    let local_point = linalg::solve_exact(&a, &b)
        .ok_or_else(|| Error::Internal("local representative solve failed".into()))?;
    // a'_ρ = a_ρ + ⟨m, u_ρ⟩ vanishes on the home cone, in particular on gamma.
    let shifted: RatVec = divisor
        .coeffs
        .iter()
        .enumerate()
        .map(|(r, c)| c + dot_int_rat(&fan.rays[r], &local_point))
        .collect();
    for &r in &sorted {
        debug_assert!(shifted[r].is_zero());
    }
    let mut coeffs = vec![Rat::zero(); star.fan.rays.len()];
    for ar in &star.adjacent {
        coeffs[ar.star_ray] = &shifted[ar.ray] / Rat::from_integer(ar.scale.clone());
    }
    Ok(RestrictionData {
        gamma: sorted,
        star,
        divisor: TorusDivisor { coeffs },
        local_point,
    })
}

/// The anticanonical divisor: all coefficients one.
pub fn anticanonical(fan: &Fan) -> TorusDivisor {
    TorusDivisor { coeffs: vec![Rat::one(); fan.rays.len()] }
}

fn check_divisor(fan: &Fan, divisor: &TorusDivisor) -> Result<()> {
    if divisor.coeffs.len() != fan.rays.len() {
        return Err(Error::DimensionMismatch(format!(
            "divisor has {} coefficients for {} rays",
            divisor.coeffs.len(),
            fan.rays.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ivec, rat, rvec};

    fn p2() -> Fan {
        Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

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

    fn four_ray() -> Fan {
        Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[1, 2]), ivec(&[-1, 2]), ivec(&[0, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap()
    }

    #[test]
    fn hexagon_wall_curve_table() {
        let fan = hexagon();
        let curves = wall_curves(&fan).unwrap();
        assert_eq!(curves.len(), 6);
        for (wall, curve) in &curves {
            let w = wall.rays[0];
            for (r, deg) in curve.degrees.iter().enumerate() {
                let expected = if r == w {
                    rat(-1)
                } else if (r + 1) % 6 == w || (w + 1) % 6 == r {
                    rat(1)
                } else {
                    rat(0)
                };
                assert_eq!(*deg, expected, "wall {w}, ray {r}");
            }
        }
    }

    #[test]
    fn hexagon_double_line_is_nef_not_ample() {
        let fan = hexagon();
        let d = TorusDivisor::from_integers(&[2, 2, 0, 0, 0, 2]);
        assert!(is_nef(&fan, &d).unwrap());
        assert!(!is_ample(&fan, &d).unwrap());
        let cartier = is_cartier(&fan, &d).unwrap().unwrap();
        assert_eq!(cartier.m_sigma[0], ivec(&[-2, 0]));
        // Pairings alternate 2, 0 around the hexagon.
        let pairings: Vec<Rat> = wall_curves(&fan)
            .unwrap()
            .iter()
            .map(|(_, c)| pair(c, &d))
            .collect();
        assert_eq!(pairings, rvec(&[2, 0, 2, 0, 2, 0]));
        // The anticanonical divisor is ample here.
        assert!(is_ample(&fan, &anticanonical(&fan)).unwrap());
    }

    #[test]
    fn four_ray_wall_curves_and_degrees() {
        let fan = four_ray();
        let curves = wall_curves(&fan).unwrap();
        let rows: Vec<RatVec> = curves.iter().map(|(_, c)| c.degrees.clone()).collect();
        let half = |n: i64| Rat::new(int(n), int(2));
        let quarter = |n: i64| Rat::new(int(n), int(4));
        assert_eq!(rows[0], vec![half(-1), half(1), rat(0), rat(1)]);
        assert_eq!(rows[1], vec![half(1), quarter(-1), quarter(1), rat(0)]);
        assert_eq!(rows[2], vec![rat(0), quarter(1), quarter(1), rat(1)]);
        assert_eq!(rows[3], vec![rat(1), rat(0), rat(1), rat(2)]);
        let d = TorusDivisor::from_integers(&[0, 0, 4, 2]);
        let degs: Vec<Rat> = curves.iter().map(|(_, c)| pair(c, &d)).collect();
        assert_eq!(degs, rvec(&[2, 1, 3, 8]));
        assert!(is_nef(&fan, &d).unwrap());
    }

    #[test]
    fn j_sets_of_a_wall_curve() {
        let fan = hexagon();
        let curves = wall_curves(&fan).unwrap();
        let c0 = &curves[0].1; // wall at ray 0
        assert_eq!(c0.j_minus(), vec![0]);
        assert_eq!(c0.j_plus(), vec![1, 5]);
    }

    #[test]
    fn class_group_of_the_plane_and_the_torsion_fan() {
        let fan = p2();
        let cg = class_group(&fan).unwrap();
        assert_eq!(cg.free_rank, 1);
        assert!(cg.torsion_invariants.is_empty());
        let (free, _) = cg.class_of(&ivec(&[1, 0, 0]));
        assert_eq!(free.len(), 1);
        assert_eq!(free[0].abs(), int(1));

        let torsion = Fan::new(
            2,
            vec![ivec(&[2, -1]), ivec(&[-1, 2]), ivec(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let cg = class_group(&torsion).unwrap();
        assert_eq!(cg.free_rank, 1);
        assert_eq!(cg.torsion_invariants, vec![int(3)]);
        // D_1 is not Cartier there: m_σ = (-2/3, -1/3) on the first cone.
        let d1 = TorusDivisor::from_integers(&[1, 0, 0]);
        assert!(is_cartier(&torsion, &d1).unwrap().is_none());
        let local = local_representatives(&torsion, &d1).unwrap();
        assert_eq!(local[0], vec![Rat::new(int(-2), int(3)), Rat::new(int(-1), int(3))]);
    }

    #[test]
    fn linear_equivalence_on_the_plane() {
        let fan = p2();
        let d1 = TorusDivisor::from_integers(&[1, 0, 0]);
        let d2 = TorusDivisor::from_integers(&[0, 1, 0]);
        let m = linearly_equivalent(&fan, &d1, &d2).unwrap().unwrap();
        assert_eq!(divisor_of_monomial(&fan, &m).coeffs, vec![
            d1.coeffs[0].clone() - d2.coeffs[0].clone(),
            d1.coeffs[1].clone() - d2.coeffs[1].clone(),
            d1.coeffs[2].clone() - d2.coeffs[2].clone(),
        ]);
        // Divisors of different degree are not equivalent.
        let d3 = TorusDivisor::from_integers(&[2, 0, 0]);
        assert!(linearly_equivalent(&fan, &d1, &d3).unwrap().is_none());
    }

    #[test]
    fn principal_divisors_pair_to_zero() {
        let fan = hexagon();
        let principal = divisor_of_monomial(&fan, &ivec(&[1, 0]));
        for (_, curve) in wall_curves(&fan).unwrap() {
            assert!(pair(&curve, &principal).is_zero());
        }
    }

    #[test]
    fn ample_on_the_plane() {
        let fan = p2();
        let d = TorusDivisor::from_integers(&[1, 0, 0]);
        assert!(is_ample(&fan, &d).unwrap());
        assert!(is_nef(&fan, &d).unwrap());
        // All three wall curves are the line: degrees (1,1,1).
        for (_, c) in wall_curves(&fan).unwrap() {
            assert_eq!(c.degrees, rvec(&[1, 1, 1]));
        }
    }

    #[test]
    fn restriction_to_a_ray_of_the_four_ray_fan() {
        let fan = four_ray();
        let d = TorusDivisor::from_integers(&[0, 0, 4, 2]);
        let restriction = restriction_data(&fan, &d, &[1]).unwrap();
        assert_eq!(restriction.star.fan.dim, 1);
        // Adjacent rays 0 and 2 with scales 2 and 4; the local representative
        // at the first cone {0,1} is the origin, so only ray 2 contributes.
        assert_eq!(restriction.local_point, rvec(&[0, 0]));
        let coeff_sum: Rat = restriction.divisor.coeffs.iter().sum();
        assert_eq!(coeff_sum, rat(1));
        // Degree against the unique wall curve of the line: 1.
        let curves = wall_curves(&restriction.star.fan).unwrap();
        assert_eq!(curves.len(), 1);
        assert_eq!(pair(&curves[0].1, &restriction.divisor), rat(1));
    }

    #[test]
    fn pullback_to_a_resolution() {
        let p121 = Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let d = TorusDivisor::from_integers(&[2, 0, 0]);
        assert!(is_cartier(&p121, &d).unwrap().is_some());
        let (smooth, _) = p121.resolve(16).unwrap();
        let pulled = pullback(&p121, &d, &smooth).unwrap();
        assert!(pulled.is_integral());
        assert!(is_nef(&smooth, &pulled).unwrap());
        assert!(is_cartier(&smooth, &pulled).unwrap().is_some());
        // The new ray (0,-1) picks up coefficient 1.
        let new_ray = smooth.rays.iter().position(|r| r == &ivec(&[0, -1])).unwrap();
        assert_eq!(pulled.coeffs[new_ray], rat(1));
    }

    #[test]
    fn divisor_json_round_trip() {
        let d = TorusDivisor {
            coeffs: vec![rat(2), Rat::new(int(1), int(2)), rat(-3)],
        };
        let text = serde_json::to_string(&d.to_json_value()).unwrap();
        let back = TorusDivisor::from_json_str(&text).unwrap();
        assert_eq!(back, d);
        let plain = TorusDivisor::from_json_str("[2, \"1/2\", \"-3\"]").unwrap();
        assert_eq!(plain, d);
    }
}
