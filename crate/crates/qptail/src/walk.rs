//! Walk ingestion and characterization: the four region transition
//! distributions, drift vectors, the ergodicity trichotomy, and the
//! X-shaped classification.
//!
//! Irreducibility and aperiodicity are required model assumptions and are
//! not decided algorithmically; callers assert them by supplying the model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validation tolerance for each region's probability sum.
pub const SUM_TOL: f64 = 1e-12;
/// Both drift components at or below this magnitude put the walk in the
/// excluded heavy-tailed class.
pub const ZERO_DRIFT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    Interior,
    Horizontal,
    Vertical,
    Origin,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Horizontal => "horizontal",
            Region::Vertical => "vertical",
            Region::Origin => "origin",
        }
    }

    /// Allowed step supports, per region.
    pub fn step_allowed(self, di: i32, dj: i32) -> bool {
        match self {
            Region::Interior => (-1..=1).contains(&di) && (-1..=1).contains(&dj),
            Region::Horizontal => (-1..=1).contains(&di) && (0..=1).contains(&dj),
            Region::Vertical => (0..=1).contains(&di) && (-1..=1).contains(&dj),
            Region::Origin => (0..=1).contains(&di) && (0..=1).contains(&dj),
        }
    }
}

pub const REGIONS: [Region; 4] = [
    Region::Interior,
    Region::Horizontal,
    Region::Vertical,
    Region::Origin,
];

/// A validated quarter-plane walk: transition distributions for the
/// interior, the two boundary axes, and the origin. Each table is indexed
/// by `[di + 1][dj + 1]`; entries outside a region's support are zero.
#[derive(Clone, Debug, Serialize)]
pub struct WalkSpec {
    interior: [[f64; 3]; 3],
    horizontal: [[f64; 3]; 3],
    vertical: [[f64; 3]; 3],
    origin: [[f64; 3]; 3],
}

/// Raw model document: four sections of `"di,dj" -> probability`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub interior: BTreeMap<String, f64>,
    pub horizontal: BTreeMap<String, f64>,
    pub vertical: BTreeMap<String, f64>,
    pub origin: BTreeMap<String, f64>,
}

fn parse_step(region: Region, key: &str) -> Result<(i32, i32)> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::BadStepKey {
            region: region.name(),
            key: key.to_string(),
        });
    }
    let parse = |s: &str| -> Result<i32> {
        s.trim().parse::<i32>().map_err(|_| Error::BadStepKey {
            region: region.name(),
            key: key.to_string(),
        })
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn build_table(region: Region, map: &BTreeMap<String, f64>) -> Result<[[f64; 3]; 3]> {
    let mut table = [[0.0; 3]; 3];
    let mut sum = 0.0;
    for (key, &value) in map {
        let (di, dj) = parse_step(region, key)?;
        if !region.step_allowed(di, dj) {
            return Err(Error::UnsupportedStep {
                region: region.name(),
                di,
                dj,
            });
        }
        if value < 0.0 || value > 1.0 {
            return Err(Error::NegativeProbability {
                region: region.name(),
                di,
                dj,
                value,
            });
        }
        table[(di + 1) as usize][(dj + 1) as usize] = value;
        sum += value;
    }
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::SumNotOne {
            region: region.name(),
            sum,
        });
    }
    // Normalize away the residual decimal-to-binary error.
    for row in table.iter_mut() {
        for p in row.iter_mut() {
            *p /= sum;
        }
    }
    Ok(table)
}

/// Validate a raw model document into a `WalkSpec`, enforcing supports,
/// non-negativity, and unit sums (within `SUM_TOL`, then renormalized).
pub fn validate_spec(raw: &RawModel) -> Result<WalkSpec> {
    Ok(WalkSpec {
        interior: build_table(Region::Interior, &raw.interior)?,
        horizontal: build_table(Region::Horizontal, &raw.horizontal)?,
        vertical: build_table(Region::Vertical, &raw.vertical)?,
        origin: build_table(Region::Origin, &raw.origin)?,
    })
}

impl WalkSpec {
    /// Construct directly from `(di, dj, p)` lists; used by tests and the
    /// regression corpus.
    pub fn from_steps(
        interior: &[(i32, i32, f64)],
        horizontal: &[(i32, i32, f64)],
        vertical: &[(i32, i32, f64)],
        origin: &[(i32, i32, f64)],
    ) -> Result<WalkSpec> {
        let to_map = |steps: &[(i32, i32, f64)]| {
            steps
                .iter()
                .map(|(di, dj, p)| (format!("{di},{dj}"), *p))
                .collect::<BTreeMap<String, f64>>()
        };
        validate_spec(&RawModel {
            interior: to_map(interior),
            horizontal: to_map(horizontal),
            vertical: to_map(vertical),
            origin: to_map(origin),
        })
    }

    pub fn p(&self, region: Region, di: i32, dj: i32) -> f64 {
        if !(-1..=1).contains(&di) || !(-1..=1).contains(&dj) {
            return 0.0;
        }
        let table = match region {
            Region::Interior => &self.interior,
            Region::Horizontal => &self.horizontal,
            Region::Vertical => &self.vertical,
            Region::Origin => &self.origin,
        };
        table[(di + 1) as usize][(dj + 1) as usize]
    }

    /// The (x <-> y)-mirrored walk: interior transposed, horizontal and
    /// vertical swapped. The y-direction analysis of a walk is the
    /// x-direction analysis of its transpose.
    pub fn transpose(&self) -> WalkSpec {
        let t = |table: &[[f64; 3]; 3]| {
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    out[j][i] = table[i][j];
                }
            }
            out
        };
        WalkSpec {
            interior: t(&self.interior),
            horizontal: t(&self.vertical),
            vertical: t(&self.horizontal),
            origin: t(&self.origin),
        }
    }

    pub fn to_raw(&self) -> RawModel {
        let to_map = |region: Region, table: &[[f64; 3]; 3]| {
            let mut map = BTreeMap::new();
            for di in -1..=1 {
                for dj in -1..=1 {
                    let p = table[(di + 1) as usize][(dj + 1) as usize];
                    if region.step_allowed(di, dj) && p != 0.0 {
                        map.insert(format!("{di},{dj}"), p);
                    }
                }
            }
            map
        };
        RawModel {
            interior: to_map(Region::Interior, &self.interior),
            horizontal: to_map(Region::Horizontal, &self.horizontal),
            vertical: to_map(Region::Vertical, &self.vertical),
            origin: to_map(Region::Origin, &self.origin),
        }
    }
}

/// Mean step vectors for the interior and the two boundary regions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DriftVectors {
    pub m: (f64, f64),
    pub m1: (f64, f64),
    pub m2: (f64, f64),
}

pub fn drift_vectors(spec: &WalkSpec) -> DriftVectors {
    let mean = |region: Region| {
        let mut mx = 0.0;
        let mut my = 0.0;
        for di in -1..=1 {
            for dj in -1..=1 {
                let p = spec.p(region, di, dj);
                mx += di as f64 * p;
                my += dj as f64 * p;
            }
        }
        (mx, my)
    };
    DriftVectors {
        m: mean(Region::Interior),
        m1: mean(Region::Horizontal),
        m2: mean(Region::Vertical),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ergodicity {
    /// Ergodic under the stated condition number (1, 2, or 3).
    Ergodic(u8),
    NotErgodic,
    /// Interior drift vanishes; heavy-tailed case, excluded.
    OutOfScopeZeroDrift,
}

/// The drift-based ergodicity trichotomy for walks with nonzero interior
/// drift. A pure function of the drift vectors.
pub fn check_ergodic(drift: &DriftVectors) -> Ergodicity {
    let (mx, my) = drift.m;
    let (mx1, my1) = drift.m1;
    let (mx2, my2) = drift.m2;
    if mx.abs() <= ZERO_DRIFT_TOL && my.abs() <= ZERO_DRIFT_TOL {
        return Ergodicity::OutOfScopeZeroDrift;
    }
    let cross1 = mx * my1 - my * mx1;
    let cross2 = my * mx2 - mx * my2;
    if mx < 0.0 && my < 0.0 {
        if cross1 < 0.0 && cross2 < 0.0 {
            return Ergodicity::Ergodic(1);
        }
    } else if mx < 0.0 && my >= 0.0 {
        if cross2 < 0.0 && (my1 != 0.0 || mx1 < 0.0) {
            return Ergodicity::Ergodic(2);
        }
    } else if mx >= 0.0 && my < 0.0 && cross1 < 0.0 && (mx2 != 0.0 || my2 < 0.0) {
        return Ergodicity::Ergodic(3);
    }
    Ergodicity::NotErgodic
}

/// X-shaped flags: a map is X-shaped when every probability with
/// |di + dj| = 1 is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeClass {
    pub interior_x_shaped: bool,
    pub h1_x_shaped: bool,
    pub h2_x_shaped: bool,
}

pub fn classify_shape(spec: &WalkSpec) -> ShapeClass {
    let x_shaped = |region: Region| {
        for di in -1..=1 {
            for dj in -1..=1 {
                if (di + dj as i32).abs() == 1 && spec.p(region, di, dj) != 0.0 {
                    return false;
                }
            }
        }
        true
    };
    ShapeClass {
        interior_x_shaped: x_shaped(Region::Interior),
        h1_x_shaped: x_shaped(Region::Horizontal),
        h2_x_shaped: x_shaped(Region::Vertical),
    }
}

/// The reference walk used across the test suite and shipped as
/// `models/w1.json`.
pub fn reference_walk_w1() -> WalkSpec {
    WalkSpec::from_steps(
        &[
            (1, 0, 0.1),
            (-1, 0, 0.3),
            (0, 1, 0.1),
            (0, -1, 0.3),
            (0, 0, 0.2),
        ],
        &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
        &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
        &[(1, 0, 0.5), (0, 1, 0.5)],
    )
    .expect("W1 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w1_validates_and_has_expected_drifts() {
        let w1 = reference_walk_w1();
        let d = drift_vectors(&w1);
        assert!((d.m.0 - -0.2).abs() < 1e-15);
        assert!((d.m.1 - -0.2).abs() < 1e-15);
        assert!((d.m1.0 - -0.1).abs() < 1e-15);
        assert!((d.m1.1 - 0.3).abs() < 1e-15);
        assert!((d.m2.0 - 0.3).abs() < 1e-15);
        assert!((d.m2.1 - -0.1).abs() < 1e-15);
    }

    #[test]
    fn w1_is_ergodic_by_condition_1() {
        let d = drift_vectors(&reference_walk_w1());
        // Condition 1 cross terms are both -0.08.
        assert!((d.m.0 * d.m1.1 - d.m.1 * d.m1.0 - -0.08).abs() < 1e-15);
        assert!((d.m.1 * d.m2.0 - d.m.0 * d.m2.1 - -0.08).abs() < 1e-15);
        assert_eq!(check_ergodic(&d), Ergodicity::Ergodic(1));
    }

    #[test]
    fn sum_not_one_rejected() {
        let r = WalkSpec::from_steps(
            &[
                (1, 0, 0.1),
                (-1, 0, 0.3),
                (0, 1, 0.1),
                (0, -1, 0.3),
                (0, 0, 0.19),
            ],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        );
        match r {
            Err(Error::SumNotOne { region, sum }) => {
                assert_eq!(region, "interior");
                assert!((sum - 0.99).abs() < 1e-12);
            }
            other => panic!("expected SumNotOne, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_step_rejected() {
        let mut raw = reference_walk_w1().to_raw();
        raw.interior.insert("2,0".to_string(), 0.0);
        match validate_spec(&raw) {
            Err(Error::UnsupportedStep { region, di, dj }) => {
                assert_eq!((region, di, dj), ("interior", 2, 0));
            }
            other => panic!("expected UnsupportedStep, got {other:?}"),
        }
        let mut raw = reference_walk_w1().to_raw();
        raw.horizontal.insert("0,-1".to_string(), 0.0);
        assert!(matches!(
            validate_spec(&raw),
            Err(Error::UnsupportedStep { .. })
        ));
    }

    #[test]
    fn negative_probability_rejected() {
        let mut raw = reference_walk_w1().to_raw();
        raw.interior.insert("1,1".to_string(), -0.1);
        *raw.interior.get_mut("-1,0").unwrap() = 0.4;
        assert!(matches!(
            validate_spec(&raw),
            Err(Error::NegativeProbability { .. })
        ));
    }

    #[test]
    fn zero_drift_is_out_of_scope() {
        let spec = WalkSpec::from_steps(
            &[(1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25)],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let d = drift_vectors(&spec);
        assert_eq!(d.m, (0.0, 0.0));
        assert_eq!(check_ergodic(&d), Ergodicity::OutOfScopeZeroDrift);
    }

    #[test]
    fn condition_2_negation_is_not_ergodic() {
        // M_x < 0, M_y >= 0 but the vertical cross term is >= 0.
        let d = DriftVectors {
            m: (-0.2, 0.1),
            m1: (0.0, 0.1),
            m2: (0.1, 0.3), // M_y M_x^(2) - M_x M_y^(2) = -0.02 + 0.06 = 0.04 >= 0
        };
        assert_eq!(check_ergodic(&d), Ergodicity::NotErgodic);
    }

    #[test]
    fn shape_flags() {
        let w1 = reference_walk_w1();
        let s = classify_shape(&w1);
        assert!(!s.interior_x_shaped && !s.h1_x_shaped && !s.h2_x_shaped);

        let diag = WalkSpec::from_steps(
            &[
                (1, 1, 0.2),
                (1, -1, 0.2),
                (-1, 1, 0.2),
                (-1, -1, 0.2),
                (0, 0, 0.2),
            ],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let s = classify_shape(&diag);
        assert!(s.interior_x_shaped && !s.h1_x_shaped && !s.h2_x_shaped);
    }

    #[test]
    fn transpose_mirrors_regions() {
        let w1 = reference_walk_w1();
        let t = w1.transpose();
        assert_eq!(w1.p(Region::Interior, 1, 0), t.p(Region::Interior, 0, 1));
        assert_eq!(w1.p(Region::Horizontal, -1, 0), t.p(Region::Vertical, 0, -1));
        assert_eq!(w1.p(Region::Vertical, 1, -1), t.p(Region::Horizontal, -1, 1));
        // W1 is its own transpose up to the sum renormalization.
        for region in REGIONS {
            for di in -1..=1 {
                for dj in -1..=1 {
                    let d = (w1.p(region, di, dj) - t.p(region, di, dj)).abs();
                    assert!(d < 1e-15, "{region:?} ({di},{dj})");
                }
            }
        }
    }
}
