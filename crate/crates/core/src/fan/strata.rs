//! Compatible families of subdivisions over a strata poset: each stratum
//! carries a monoid cone in its own lattice, strata are linked by injective
//! lattice maps realizing face inclusions, and a family of subdivisions is
//! compatible when every inclusion restricts the bigger subdivision to the
//! smaller one.

use super::{Fan, FanError};
use crate::cone::Cone;
use crate::exactmath::{IntMatrix, LatticeVector};
use num_integer::Integer;
use std::collections::BTreeMap;
use std::fmt;

/// One stratum: its label, its codimension (which equals the rank of its
/// divisor lattice), and its monoid cone in that lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub label: String,
    pub codim: usize,
    pub support: Cone,
}

/// An inclusion of the lattice of a shallower stratum into the lattice of a
/// deeper one, carrying the shallow monoid cone onto a face of the deep one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataRelation {
    pub small: String,
    pub big: String,
    pub map: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataSystem {
    pub strata: Vec<Stratum>,
    pub relations: Vec<StrataRelation>,
}

/// One subdivision per stratum, keyed by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibleFamily {
    pub subdivisions: BTreeMap<String, Fan>,
}

/// First failure of a compatibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyViolation {
    pub small: String,
    pub big: String,
    pub reason: String,
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "restriction of `{}` to `{}` fails: {}",
            self.big, self.small, self.reason
        )
    }
}

impl StrataSystem {
    pub fn stratum(&self, label: &str) -> Result<&Stratum, FanError> {
        self.strata
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| FanError::UnknownStratum(label.to_string()))
    }

    /// Structural validity: lattice ranks match codimensions, maps are
    /// injective, every image cone is a face of its target support, and
    /// listed relations compose along the poset.
    pub fn validate(&self) -> Result<(), FanError> {
        for s in &self.strata {
            if s.support.rank() != s.codim {
                return Err(FanError::Precondition(format!(
                    "stratum `{}` has lattice rank {} but codimension {}",
                    s.label,
                    s.support.rank(),
                    s.codim
                )));
            }
        }
        for r in &self.relations {
            let small = self.stratum(&r.small)?;
            let big = self.stratum(&r.big)?;
            if r.map.rows() != big.codim || r.map.cols() != small.codim {
                return Err(FanError::Precondition(format!(
                    "relation `{}` -> `{}` carries a {}x{} map",
                    r.small,
                    r.big,
                    r.map.rows(),
                    r.map.cols()
                )));
            }
            if r.map.rank() != small.codim {
                return Err(FanError::Precondition(format!(
                    "relation `{}` -> `{}` is not injective",
                    r.small, r.big
                )));
            }
            let image = map_cone(&r.map, &small.support)?;
            if !image.is_face_of(&big.support) {
                return Err(FanError::Precondition(format!(
                    "image of `{}` is not a face of the support of `{}`",
                    r.small, r.big
                )));
            }
        }
        // Transitivity: chained relations must be listed and must compose.
        for first in &self.relations {
            for second in &self.relations {
                if first.big != second.small {
                    continue;
                }
                let composite = self
                    .relations
                    .iter()
                    .find(|r| r.small == first.small && r.big == second.big)
                    .ok_or_else(|| {
                        FanError::Precondition(format!(
                            "missing composite relation `{}` -> `{}`",
                            first.small, second.big
                        ))
                    })?;
                let product = second.map.mul(&first.map)?;
                if product != composite.map {
                    return Err(FanError::Precondition(format!(
                        "maps along `{}` -> `{}` -> `{}` do not compose",
                        first.small, first.big, second.big
                    )));
                }
            }
        }
        Ok(())
    }
}

fn map_vector(map: &IntMatrix, v: &LatticeVector) -> Result<LatticeVector, FanError> {
    Ok(map.mul_vector(v)?)
}

fn map_cone(map: &IntMatrix, cone: &Cone) -> Result<Cone, FanError> {
    let rays: Result<Vec<LatticeVector>, FanError> =
        cone.rays().iter().map(|r| map_vector(map, r)).collect();
    Ok(Cone::from_generators(map.rows(), rays?)?)
}

/// Unique rational preimage of a vector under an injective lattice map,
/// scaled to a primitive lattice vector. `None` when outside the image span.
fn pull_back_ray(map: &IntMatrix, v: &LatticeVector) -> Result<Option<LatticeVector>, FanError> {
    let Some(solution) = map.solve_rational(v)? else {
        return Ok(None);
    };
    // Verify the solve really inverts (solve_rational pins free variables,
    // but an injective map has none).
    let mut lcm = crate::exactmath::BigInt::from(1);
    for q in &solution {
        lcm = lcm.lcm(q.denom());
    }
    let ints: Vec<crate::exactmath::BigInt> =
        solution.iter().map(|q| (q * &lcm).to_integer()).collect();
    let candidate = LatticeVector::new(ints);
    if candidate.is_zero() {
        return Ok(None);
    }
    let primitive = candidate.primitive()?;
    let image = map.mul_vector(&primitive)?;
    let back = image.primitive()?;
    let forward = v.primitive()?;
    Ok((back == forward).then_some(primitive))
}

/// Restriction of a subdivision to a face presented through an inclusion of
/// lattices: intersect every cone with the image of the face, pull the
/// pieces back, and keep the maximal ones.
pub fn restrict_subdivision(
    big: &Fan,
    inclusion: &IntMatrix,
    small_support: &Cone,
) -> Result<Fan, FanError> {
    let big_support = big.support().ok_or(FanError::MissingSupport)?;
    let image = map_cone(inclusion, small_support)?;
    if !image.is_face_of(big_support) {
        return Err(FanError::Precondition(
            "image of the small support is not a face of the big support".into(),
        ));
    }
    let mut pulled: Vec<Cone> = Vec::new();
    for cone in big.cones() {
        let piece = cone.intersect(&image)?;
        if piece.rays().is_empty() {
            continue;
        }
        let mut rays = Vec::with_capacity(piece.rays().len());
        for r in piece.rays() {
            let Some(p) = pull_back_ray(inclusion, r)? else {
                return Err(FanError::Precondition(format!(
                    "piece ray {:?} has no preimage under the inclusion",
                    r
                )));
            };
            rays.push(p);
        }
        pulled.push(Cone::from_generators(small_support.rank(), rays)?);
    }
    if pulled.is_empty() {
        pulled.push(Cone::zero(small_support.rank()));
    }
    Fan::new(
        small_support.rank(),
        pulled,
        Some(small_support.clone()),
    )
}

/// Checks every listed relation: the restriction of the big stratum's
/// subdivision must equal the small stratum's subdivision on the nose.
pub fn check_compatible_family(
    system: &StrataSystem,
    family: &CompatibleFamily,
) -> Result<Result<(), FamilyViolation>, FanError> {
    system.validate()?;
    for s in &system.strata {
        if !family.subdivisions.contains_key(&s.label) {
            return Err(FanError::Precondition(format!(
                "family is missing a subdivision for stratum `{}`",
                s.label
            )));
        }
    }
    for r in &system.relations {
        let small = system.stratum(&r.small)?;
        let big_fan = &family.subdivisions[&r.big];
        let small_fan = &family.subdivisions[&r.small];
        let restricted = restrict_subdivision(big_fan, &r.map, &small.support)?;
        if restricted.cones() != small_fan.cones() {
            return Ok(Err(FamilyViolation {
                small: r.small.clone(),
                big: r.big.clone(),
                reason: format!(
                    "restriction has cones {:?} but the family carries {:?}",
                    restricted.cones(),
                    small_fan.cones()
                ),
            }));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::barycentric_subdivision;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    fn orthant(rank: usize) -> Cone {
        let rays: Vec<LatticeVector> = (0..rank)
            .map(|i| {
                let mut e = vec![0i64; rank];
                e[i] = 1;
                lv(&e)
            })
            .collect();
        Cone::new(rank, rays).unwrap()
    }

    /// x -> (x, 0, ...) padded to `rows` coordinates.
    fn face_inclusion(rows: usize, cols: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols);
        for i in 0..cols {
            m.set(i, i, crate::exactmath::int(1));
        }
        m
    }

    fn chain_system() -> StrataSystem {
        StrataSystem {
            strata: vec![
                Stratum {
                    label: "c".into(),
                    codim: 1,
                    support: orthant(1),
                },
                Stratum {
                    label: "b".into(),
                    codim: 2,
                    support: orthant(2),
                },
                Stratum {
                    label: "a".into(),
                    codim: 3,
                    support: orthant(3),
                },
            ],
            relations: vec![
                StrataRelation {
                    small: "c".into(),
                    big: "b".into(),
                    map: face_inclusion(2, 1),
                },
                StrataRelation {
                    small: "b".into(),
                    big: "a".into(),
                    map: face_inclusion(3, 2),
                },
                StrataRelation {
                    small: "c".into(),
                    big: "a".into(),
                    map: face_inclusion(3, 1),
                },
            ],
        }
    }

    fn barycentric_family(system: &StrataSystem) -> CompatibleFamily {
        let subdivisions = system
            .strata
            .iter()
            .map(|s| {
                let fan = barycentric_subdivision(&Fan::from_cone(s.support.clone())).unwrap();
                (s.label.clone(), fan)
            })
            .collect();
        CompatibleFamily { subdivisions }
    }

    #[test]
    fn chain_validates() {
        chain_system().validate().unwrap();
    }

    #[test]
    fn restriction_of_identity_inclusion_is_identity() {
        let support = orthant(2);
        let fan = barycentric_subdivision(&Fan::from_cone(support.clone())).unwrap();
        let restricted =
            restrict_subdivision(&fan, &face_inclusion(2, 2), &support).unwrap();
        assert_eq!(restricted.cones(), fan.cones());
    }

    #[test]
    fn restriction_to_a_ray_face() {
        let fan = barycentric_subdivision(&Fan::from_cone(orthant(2))).unwrap();
        let restricted =
            restrict_subdivision(&fan, &face_inclusion(2, 1), &orthant(1)).unwrap();
        assert_eq!(restricted.cones(), &[orthant(1)]);
    }

    #[test]
    fn restriction_of_barycentric_three_orthant_to_a_facet() {
        let fan = barycentric_subdivision(&Fan::from_cone(orthant(3))).unwrap();
        let restricted =
            restrict_subdivision(&fan, &face_inclusion(3, 2), &orthant(2)).unwrap();
        let expected = barycentric_subdivision(&Fan::from_cone(orthant(2))).unwrap();
        assert_eq!(restricted.cones(), expected.cones());
    }

    #[test]
    fn barycentric_family_is_compatible() {
        let system = chain_system();
        let family = barycentric_family(&system);
        assert!(check_compatible_family(&system, &family).unwrap().is_ok());
    }

    #[test]
    fn trivial_level_breaks_compatibility() {
        let system = chain_system();
        let mut family = barycentric_family(&system);
        family
            .subdivisions
            .insert("b".into(), Fan::from_cone(orthant(2)));
        let violation = check_compatible_family(&system, &family)
            .unwrap()
            .unwrap_err();
        assert!(violation.small == "b" || violation.small == "c");
    }

    #[test]
    fn single_stratum_is_trivially_compatible() {
        let system = StrataSystem {
            strata: vec![Stratum {
                label: "only".into(),
                codim: 2,
                support: orthant(2),
            }],
            relations: vec![],
        };
        let family = barycentric_family(&system);
        assert!(check_compatible_family(&system, &family).unwrap().is_ok());
    }

    #[test]
    fn missing_composite_relation_is_invalid() {
        let mut system = chain_system();
        system.relations.retain(|r| !(r.small == "c" && r.big == "a"));
        assert!(matches!(
            system.validate(),
            Err(FanError::Precondition(_))
        ));
    }
}
