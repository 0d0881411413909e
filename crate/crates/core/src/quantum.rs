//! Exact outcome distributions of measurements on `|Phi+>` and on `n`
//! copies of it. These are the targets every protocol has to reproduce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slots::Angle;

/// Largest `n` for which [`dj_joint`] will build the `2^{2n}` table.
pub const DJ_JOINT_MAX_N: u32 = 6;

/// Measurement with respect to the real reflection operator `R(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealMeasurement {
    pub x: Angle,
}

/// General von Neumann measurement `S(x, x')`: `x` sets the polar angle and
/// `phase` the relative phase `x'` of the eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralMeasurement {
    pub x: Angle,
    pub phase: Angle,
}

/// Outcome table of a two-qubit measurement, `p[a][b] = Pr[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution2 {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl JointDistribution2 {
    /// Table with `Pr[a=b] = equal` spread so both marginals are uniform.
    pub fn from_pr_equal(equal: f64) -> Self {
        let eq = equal / 2.0;
        let ne = (1.0 - equal) / 2.0;
        JointDistribution2 {
            p00: eq,
            p01: ne,
            p10: ne,
            p11: eq,
        }
    }

    pub fn pr_equal(&self) -> f64 {
        self.p00 + self.p11
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, 0) => self.p00,
            (0, 1) => self.p01,
            (1, 0) => self.p10,
            (1, 1) => self.p11,
            _ => 0.0,
        }
    }

    /// Cells in `(a, b)` row-major order.
    pub fn cells(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }
}

/// Joint distribution for real measurements `x`, `y` on `|Phi+>`.
pub fn bell_joint_real(x: RealMeasurement, y: RealMeasurement) -> JointDistribution2 {
    let half = (x.x.value() - y.x.value()) / 2.0;
    let c2 = half.cos().powi(2);
    let s2 = half.sin().powi(2);
    JointDistribution2 {
        p00: c2 / 2.0,
        p01: s2 / 2.0,
        p10: s2 / 2.0,
        p11: c2 / 2.0,
    }
}

/// `Pr[a=b]` for general measurements on `|Phi+>`.
pub fn general_pr_equal(a: GeneralMeasurement, b: GeneralMeasurement) -> f64 {
    let phase = (a.phase.value() + b.phase.value()) / 2.0;
    let diff = (a.x.value() - b.x.value()) / 2.0;
    let sum = (a.x.value() + b.x.value()) / 2.0;
    phase.cos().powi(2) * diff.cos().powi(2) + phase.sin().powi(2) * sum.cos().powi(2)
}

/// Joint distribution for general measurements. Both marginals are uniform,
/// which together with `Pr[a=b]` pins down the whole table.
pub fn bell_joint_general(a: GeneralMeasurement, b: GeneralMeasurement) -> JointDistribution2 {
    JointDistribution2::from_pr_equal(general_pr_equal(a, b))
}

/// A Deutsch-Jozsa measurement on `n` qubits: phase flips `(-1)^{z_i}`,
/// an `n`-fold Hadamard, then a computational-basis readout.
///
/// `z` is indexed by `i` in `{0,1}^n` read as an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DjMeasurement {
    n: u32,
    z: Vec<bool>,
}

impl DjMeasurement {
    pub fn new(n: u32, z: Vec<bool>) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::InvalidArgument(format!("n must be in 1..=30, got {n}")));
        }
        if z.len() != 1usize << n {
            return Err(Error::Dimension(format!(
                "z must have 2^{n} = {} bits, got {}",
                1usize << n,
                z.len()
            )));
        }
        Ok(DjMeasurement { n, z })
    }

    /// Builds the measurement whose bit `i` is bit `i` of `code`
    /// (little-endian), for `2^n <= 64`.
    pub fn from_code(n: u32, code: u64) -> Result<Self> {
        if n == 0 || n > DJ_JOINT_MAX_N {
            return Err(Error::InvalidArgument(format!(
                "from_code supports 1 <= n <= {DJ_JOINT_MAX_N}, got {n}"
            )));
        }
        let len = 1usize << n;
        if len < 64 && code >> len != 0 {
            return Err(Error::Dimension(format!("code {code} has more than {len} bits")));
        }
        Ok(DjMeasurement {
            n,
            z: (0..len).map(|i| (code >> i) & 1 == 1).collect(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.z
    }

    pub fn hamming(&self, other: &DjMeasurement) -> Result<usize> {
        check_same_n(self, other)?;
        Ok(self.z.iter().zip(&other.z).filter(|(a, b)| a != b).count())
    }
}

fn check_same_n(a: &DjMeasurement, b: &DjMeasurement) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Dimension(format!(
            "measurements act on {} and {} qubits",
            a.n, b.n
        )));
    }
    Ok(())
}

/// Outcome distribution over `(j, k)` in `{0,1}^n x {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjJoint {
    pub n: u32,
    /// Row-major, `probs[j * 2^n + k]`.
    pub probs: Vec<f64>,
}

impl DjJoint {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.probs[j * self.dim() + k]
    }

    pub fn diagonal_mass(&self) -> f64 {
        (0..self.dim()).map(|j| self.get(j, j)).sum()
    }
}

/// Brute-force outcome distribution of two Deutsch-Jozsa measurements on
/// `n` Bell pairs, by direct summation of the `2^n`-term amplitude of every
/// `|j>|k>`.
pub fn dj_joint(a: &DjMeasurement, b: &DjMeasurement) -> Result<DjJoint> {
    check_same_n(a, b)?;
    let n = a.n;
    if n > DJ_JOINT_MAX_N {
        return Err(Error::ResourceLimit(format!(
            "dj_joint builds a 2^(2n) table; n = {n} exceeds the cap of {DJ_JOINT_MAX_N}"
        )));
    }
    let dim = 1usize << n;
    // Sign of (-1)^{x_i + y_i}.
    let sign: Vec<f64> = a
        .z
        .iter()
        .zip(&b.z)
        .map(|(&p, &q)| if p ^ q { -1.0 } else { 1.0 })
        .collect();
    let norm = 2f64.powi(-3 * n as i32);
    let mut probs = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            let jk = j ^ k;
            let amp: f64 = (0..dim)
                .map(|i| {
                    if (i & jk).count_ones() % 2 == 1 {
                        -sign[i]
                    } else {
                        sign[i]
                    }
                })
                .sum();
            probs[j * dim + k] = norm * amp * amp;
        }
    }
    Ok(DjJoint { n, probs })
}

/// Closed-form `Pr[a=b]` for two Deutsch-Jozsa measurements:
/// `(1 - 2d / 2^n)^2` with `d` the Hamming distance of the parameters.
pub fn dj_pr_equal(a: &DjMeasurement, b: &DjMeasurement) -> Result<f64> {
    let d = a.hamming(b)? as f64;
    let t = 1.0 - 2.0 * d / 2f64.powi(a.n as i32);
    Ok(t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn real(v: f64) -> RealMeasurement {
        RealMeasurement { x: Angle::new(v).unwrap() }
    }

    fn general(x: f64, phase: f64) -> GeneralMeasurement {
        GeneralMeasurement {
            x: Angle::new(x).unwrap(),
            phase: Angle::new(phase).unwrap(),
        }
    }

    fn assert_valid(t: &JointDistribution2) {
        for p in t.cells() {
            assert!((0.0..=1.0).contains(&p));
        }
        assert!((t.cells().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((t.p00 + t.p01 - 0.5).abs() < 1e-12);
        assert!((t.p00 + t.p10 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equal_settings_are_perfectly_correlated() {
        let t = bell_joint_real(real(0.0), real(0.0));
        assert_eq!(t.cells(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn orthogonal_settings_are_independent() {
        let t = bell_joint_real(real(0.0), real(PI / 2.0));
        for p in t.cells() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn chsh_setting() {
        let t = bell_joint_real(real(3.0 * PI / 8.0), real(-3.0 * PI / 8.0));
        let target = (PI / 8.0).sin().powi(2);
        assert!((t.pr_equal() - target).abs() < 1e-12);
        assert!((t.pr_equal() - 0.146447).abs() < 1e-6);
    }

    #[test]
    fn general_examples() {
        for (x, y) in [(0.3, 1.9), (4.0, 0.1)] {
            let g = bell_joint_general(general(x, 0.0), general(y, 0.0));
            let r = bell_joint_real(real(x), real(y));
            for (p, q) in g.cells().iter().zip(r.cells()) {
                assert!((p - q).abs() < 1e-15);
            }
        }
        let t = bell_joint_general(general(0.0, 1.2), general(0.0, 2.9));
        assert!((t.pr_equal() - 1.0).abs() < 1e-15);
        let t = bell_joint_general(general(PI / 2.0, 1.0), general(PI / 2.0, PI - 1.0));
        assert!(t.pr_equal().abs() < 1e-15);
    }

    #[test]
    fn dj_examples() {
        let m = |n, code| DjMeasurement::from_code(n, code).unwrap();
        // z = (0, 1): bit 1 set.
        let j = dj_joint(&m(1, 0b10), &m(1, 0b10)).unwrap();
        assert!((j.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((j.get(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(j.get(0, 1), 0.0);
        assert_eq!(j.get(1, 0), 0.0);

        let j = dj_joint(&m(1, 0b00), &m(1, 0b10)).unwrap();
        assert_eq!(j.get(0, 0), 0.0);
        assert_eq!(j.get(1, 1), 0.0);

        // z_B = 1000 read as the string (z_0 .. z_3), so bit 0 is set.
        let j = dj_joint(&m(2, 0), &m(2, 0b0001)).unwrap();
        assert!((j.diagonal_mass() - 0.25).abs() < 1e-15);
        assert!((dj_pr_equal(&m(2, 0), &m(2, 1)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dj_errors() {
        let a = DjMeasurement::from_code(1, 0).unwrap();
        let b = DjMeasurement::from_code(2, 0).unwrap();
        assert!(matches!(dj_joint(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(dj_pr_equal(&a, &b), Err(Error::Dimension(_))));
        let big = DjMeasurement::new(7, vec![false; 128]).unwrap();
        assert!(matches!(dj_joint(&big, &big), Err(Error::ResourceLimit(_))));
        assert_eq!(dj_pr_equal(&big, &big).unwrap(), 1.0);
        assert!(DjMeasurement::new(2, vec![false; 3]).is_err());
    }

    #[test]
    fn dj_closed_form_matches_brute_force_exhaustively() {
        for n in 1..=2u32 {
            let count = 1u64 << (1 << n);
            for p in 0..count {
                for q in 0..count {
                    let a = DjMeasurement::from_code(n, p).unwrap();
                    let b = DjMeasurement::from_code(n, q).unwrap();
                    let j = dj_joint(&a, &b).unwrap();
                    let closed = dj_pr_equal(&a, &b).unwrap();
                    assert!((j.diagonal_mass() - closed).abs() < 1e-10);
                    assert!((j.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn real_table_depends_only_on_difference(x in 0.0..7.0f64, y in 0.0..7.0f64, s in -20.0..20.0f64) {
            let t = bell_joint_real(real(x), real(y));
            let u = bell_joint_real(real(x + s), real(y + s));
            assert_valid(&t);
            for (p, q) in t.cells().iter().zip(u.cells()) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }

        #[test]
        fn general_table_is_symmetric(x in 0.0..7.0f64, xp in 0.0..7.0f64, y in 0.0..7.0f64, yp in 0.0..7.0f64) {
            let a = general(x, xp);
            let b = general(y, yp);
            let t = bell_joint_general(a, b);
            assert_valid(&t);
            prop_assert!((t.pr_equal() - bell_joint_general(b, a).pr_equal()).abs() < 1e-15);
        }

        #[test]
        fn dj_n3_marginals_and_diagonal(p in any::<u8>(), q in any::<u8>()) {
            let a = DjMeasurement::from_code(3, u64::from(p)).unwrap();
            let b = DjMeasurement::from_code(3, u64::from(q)).unwrap();
            let j = dj_joint(&a, &b).unwrap();
            prop_assert!((j.diagonal_mass() - dj_pr_equal(&a, &b).unwrap()).abs() < 1e-10);
            for r in 0..8 {
                let row: f64 = (0..8).map(|k| j.get(r, k)).sum();
                let col: f64 = (0..8).map(|k| j.get(k, r)).sum();
                prop_assert!((row - 0.125).abs() < 1e-10);
                prop_assert!((col - 0.125).abs() < 1e-10);
            }
        }
    }
}
