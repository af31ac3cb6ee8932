use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Minimal gap between branch points, relative to their spread.
pub const MIN_RELATIVE_GAP: f64 = 1e-10;

/// `y^2 = prod (x - b_k)` over the finite branch points, with `x = inf` an
/// additional branch point when their number is odd.
///
/// Real branch points are stored in ascending order. Non-real branch points
/// are accepted for genus 1 only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub struct HyperellipticCurve {
    points: Vec<C64>,
    real: bool,
    label: Option<String>,
}

impl HyperellipticCurve {
    /// Curve with real branch points (sorted on construction). An odd count
    /// means the point at infinity is also a branch point.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        Self::from_complex(points.into_iter().map(|p| C64::new(p, 0.0)).collect())
    }

    pub fn from_complex(mut points: Vec<C64>) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::InvalidCurve(format!(
                "need at least 3 finite branch points, got {n}"
            )));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidCurve("non-finite branch point".into()));
        }
        let real = points.iter().all(|p| p.im == 0.0);
        points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut spread = 0.0f64;
        let mut gap = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let d = (points[i] - points[j]).norm();
                spread = spread.max(d);
                gap = gap.min(d);
            }
        }
        if gap <= MIN_RELATIVE_GAP * spread {
            return Err(Error::InvalidCurve(format!(
                "branch points collide: gap {gap:e} vs spread {spread:e}"
            )));
        }
        let curve = Self {
            points,
            real,
            label: None,
        };
        if !real && curve.genus() != 1 {
            return Err(Error::InvalidCurve(
                "non-real branch points are supported for genus 1 only".into(),
            ));
        }
        Ok(curve)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn genus(&self) -> usize {
        (self.points.len() - 1) / 2
    }

    pub fn at_infinity(&self) -> bool {
        self.points.len() % 2 == 1
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Finite branch points when all of them are real.
    pub fn real_points(&self) -> Option<Vec<f64>> {
        self.real.then(|| self.points.iter().map(|p| p.re).collect())
    }

    pub fn spread(&self) -> f64 {
        let mut s = 0.0f64;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                s = s.max((a - b).norm());
            }
        }
        s
    }

    /// Image under `x -> s x + c` with real `s != 0`.
    pub fn affine_image(&self, s: f64, c: f64) -> Result<Self> {
        let mut out = Self::from_complex(self.points.iter().map(|p| p * s + c).collect())?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// `|P(x)|`.
    pub fn abs_poly(&self, x: C64) -> f64 {
        self.points.iter().map(|b| (x - b).norm()).product()
    }

    /// Smallest distance from `x` to a finite branch point.
    pub fn distance_to_branch_points(&self, x: C64) -> f64 {
        self.points.iter().fold(f64::INFINITY, |m, b| m.min((x - b).norm()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchPointJson {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub branch_points: Vec<BranchPointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TryFrom<CurveJson> for HyperellipticCurve {
    type Error = Error;

    fn try_from(j: CurveJson) -> Result<Self> {
        let points = j
            .branch_points
            .into_iter()
            .map(|b| match b {
                BranchPointJson::Real(r) => C64::new(r, 0.0),
                BranchPointJson::Complex([re, im]) => C64::new(re, im),
            })
            .collect();
        let curve = Self::from_complex(points)?;
        Ok(match j.label {
            Some(l) => curve.with_label(l),
            None => curve,
        })
    }
}

impl From<HyperellipticCurve> for CurveJson {
    fn from(c: HyperellipticCurve) -> Self {
        let real = c.real;
        CurveJson {
            branch_points: c
                .points
                .into_iter()
                .map(|p| {
                    if real {
                        BranchPointJson::Real(p.re)
                    } else {
                        BranchPointJson::Complex([p.re, p.im])
                    }
                })
                .collect(),
            label: c.label,
        }
    }
}
