//! Implicit bounded regions of `R^m`.
//!
//! A [`Domain`] is an indicator function together with an axis-aligned box
//! that contains it. Balls and boxes carry their exact volume; composite
//! regions (set differences, user predicates) are measured by seeded Monte
//! Carlo over the bounding box.
//!
//! Boundary points are measure-zero and may be classified either way.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::gamma_fn;

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of `R^m`, `m ≥ 2`, with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return domain(format!("points need dimension >= 2, got {}", coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("point coordinates must be finite");
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Volume `ω_m = 2 π^{m/2} / (m Γ(m/2))` of the unit ball in `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    let half = m as f64 / 2.0;
    // m >= 1 so Γ(m/2) is always defined
    2.0 * PI.powf(half) / (m as f64 * gamma_fn(half).expect("m >= 1"))
}

/// Radius of the ball in `R^m` with the given volume.
pub fn radius_for_volume(m: usize, volume: f64) -> Result<f64> {
    if !(volume > 0.0) || !volume.is_finite() {
        return domain(format!("volume must be positive, got {volume}"));
    }
    Ok((volume / unit_ball_volume(m)).powf(1.0 / m as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl BoundingBox {
    pub fn volume(&self) -> f64 {
        self.low.iter().zip(&self.high).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.low.iter().zip(&self.high))
            .all(|(x, (l, h))| *x >= *l && *x <= *h)
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            low: self.low.iter().zip(&other.low).map(|(a, b)| a.min(*b)).collect(),
            high: self.high.iter().zip(&other.high).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    /// Fill `out` with a uniform sample.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        for (i, x) in out.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            *x = self.low[i] + (self.high[i] - self.low[i]) * u;
        }
    }
}

type Indicator = dyn Fn(&[f64]) -> bool + Send + Sync;

#[derive(Clone)]
enum Shape {
    Ball { center: Vec<f64>, r: f64 },
    Box { low: Vec<f64>, high: Vec<f64> },
    Difference(Arc<Domain>, Arc<Domain>),
    Translate { of: Arc<Domain>, by: Vec<f64> },
    Custom { indicator: Arc<Indicator>, volume: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Ball,
    Box,
    Difference,
    Translate,
    Custom,
}

/// A bounded region of `R^m` given by its indicator.
#[derive(Clone)]
pub struct Domain {
    dim: usize,
    shape: Shape,
    bbox: BoundingBox,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_spec() {
            Some(spec) => write!(f, "Domain({})", serde_json::to_string(&spec).unwrap_or_default()),
            None => write!(f, "Domain(custom, dim={})", self.dim),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return domain(format!("dimension must be >= 2, got {dim}"));
    }
    Ok(())
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return domain(format!("{what} must be finite"));
    }
    Ok(())
}

/// Open ball `B_r(center)`.
pub fn ball(center: &[f64], r: f64) -> Result<Domain> {
    check_dim(center.len())?;
    check_finite(center, "ball centre")?;
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("ball radius must be positive, got {r}"));
    }
    let bbox = BoundingBox {
        low: center.iter().map(|c| c - r).collect(),
        high: center.iter().map(|c| c + r).collect(),
    };
    Ok(Domain { dim: center.len(), shape: Shape::Ball { center: center.to_vec(), r }, bbox })
}

/// Open axis-aligned box `Π (low_i, high_i)`.
pub fn cuboid(low: &[f64], high: &[f64]) -> Result<Domain> {
    check_dim(low.len())?;
    if low.len() != high.len() {
        return domain("box corners have different dimensions");
    }
    check_finite(low, "box corner")?;
    check_finite(high, "box corner")?;
    if low.iter().zip(high).any(|(l, h)| !(l < h)) {
        return domain("box must satisfy low < high componentwise");
    }
    let bbox = BoundingBox { low: low.to_vec(), high: high.to_vec() };
    Ok(Domain {
        dim: low.len(),
        shape: Shape::Box { low: low.to_vec(), high: high.to_vec() },
        bbox,
    })
}

/// `a \ b`. Only `a`'s bounding box is kept.
pub fn difference(a: &Domain, b: &Domain) -> Result<Domain> {
    if a.dim != b.dim {
        return domain(format!("dimension mismatch: {} vs {}", a.dim, b.dim));
    }
    Ok(Domain {
        dim: a.dim,
        bbox: a.bbox.clone(),
        shape: Shape::Difference(Arc::new(a.clone()), Arc::new(b.clone())),
    })
}

/// `of + by`.
pub fn translate(of: &Domain, by: &[f64]) -> Result<Domain> {
    if by.len() != of.dim {
        return domain("translation vector has the wrong dimension");
    }
    check_finite(by, "translation")?;
    let bbox = BoundingBox {
        low: of.bbox.low.iter().zip(by).map(|(l, b)| l + b).collect(),
        high: of.bbox.high.iter().zip(by).map(|(h, b)| h + b).collect(),
    };
    Ok(Domain {
        dim: of.dim,
        bbox,
        shape: Shape::Translate { of: Arc::new(of.clone()), by: by.to_vec() },
    })
}

/// A user predicate. The indicator must be false outside `bbox`; points
/// outside the box are reported as outside regardless.
pub fn custom<F>(bbox: BoundingBox, volume: Option<f64>, indicator: F) -> Result<Domain>
where
    F: Fn(&[f64]) -> bool + Send + Sync + 'static,
{
    check_dim(bbox.low.len())?;
    if bbox.low.len() != bbox.high.len() || bbox.low.iter().zip(&bbox.high).any(|(l, h)| !(l < h)) {
        return domain("invalid bounding box");
    }
    if let Some(v) = volume {
        if !(v > 0.0) {
            return domain("analytic volume must be positive");
        }
    }
    Ok(Domain {
        dim: bbox.low.len(),
        bbox,
        shape: Shape::Custom { indicator: Arc::new(indicator), volume },
    })
}

impl Domain {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DomainKind {
        match self.shape {
            Shape::Ball { .. } => DomainKind::Ball,
            Shape::Box { .. } => DomainKind::Box,
            Shape::Difference(..) => DomainKind::Difference,
            Shape::Translate { .. } => DomainKind::Translate,
            Shape::Custom { .. } => DomainKind::Custom,
        }
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        match &self.shape {
            Shape::Ball { center, r } => {
                center.iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum::<f64>() < r * r
            }
            Shape::Box { low, high } => {
                p.iter().zip(low.iter().zip(high)).all(|(x, (l, h))| *x > *l && *x < *h)
            }
            Shape::Difference(a, b) => a.contains(p) && !b.contains(p),
            Shape::Translate { of, by } => {
                let shifted: Vec<f64> = p.iter().zip(by).map(|(x, b)| x - b).collect();
                of.contains(&shifted)
            }
            Shape::Custom { indicator, .. } => indicator(p),
        }
    }

    pub fn analytic_volume(&self) -> Option<f64> {
        match &self.shape {
            Shape::Ball { r, .. } => Some(unit_ball_volume(self.dim) * r.powi(self.dim as i32)),
            Shape::Box { low, high } => Some(low.iter().zip(high).map(|(l, h)| h - l).product()),
            Shape::Difference(..) => None,
            Shape::Translate { of, .. } => of.analytic_volume(),
            Shape::Custom { volume, .. } => *volume,
        }
    }

    /// Centre and radius if this domain is a (translated) ball.
    pub fn as_ball(&self) -> Option<(Vec<f64>, f64)> {
        match &self.shape {
            Shape::Ball { center, r } => Some((center.clone(), *r)),
            Shape::Translate { of, by } => of
                .as_ball()
                .map(|(c, r)| (c.iter().zip(by).map(|(c, b)| c + b).collect(), r)),
            _ => None,
        }
    }

    /// Corners if this domain is a (translated) box.
    pub fn as_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.shape {
            Shape::Box { low, high } => Some((low.clone(), high.clone())),
            Shape::Translate { of, by } => of.as_box().map(|(l, h)| {
                (
                    l.iter().zip(by).map(|(l, b)| l + b).collect(),
                    h.iter().zip(by).map(|(h, b)| h + b).collect(),
                )
            }),
            _ => None,
        }
    }

    /// Exact `sup_{y ∈ D} |y − x0|` for balls and boxes.
    pub fn max_distance_from(&self, x0: &[f64]) -> Option<f64> {
        if let Some((c, r)) = self.as_ball() {
            return Some(distance(&c, x0) + r);
        }
        let (low, high) = self.as_box()?;
        let far: f64 = x0
            .iter()
            .zip(low.iter().zip(&high))
            .map(|(x, (l, h))| {
                let d = (x - l).abs().max((h - x).abs());
                d * d
            })
            .sum();
        Some(far.sqrt())
    }

    /// Serializable description, unless the domain holds a user predicate.
    pub fn to_spec(&self) -> Option<DomainSpec> {
        Some(match &self.shape {
            Shape::Ball { center, r } => DomainSpec::Ball { center: center.clone(), r: *r },
            Shape::Box { low, high } => DomainSpec::Box { low: low.clone(), high: high.clone() },
            Shape::Difference(a, b) => {
                DomainSpec::Difference { a: Box::new(a.to_spec()?), b: Box::new(b.to_spec()?) }
            }
            Shape::Translate { of, by } => {
                DomainSpec::Translate { of: Box::new(of.to_spec()?), by: by.clone() }
            }
            Shape::Custom { .. } => return None,
        })
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Domain> {
        match spec {
            DomainSpec::Ball { center, r } => ball(center, *r),
            DomainSpec::Box { low, high } => cuboid(low, high),
            DomainSpec::Difference { a, b } => {
                difference(&Domain::from_spec(a)?, &Domain::from_spec(b)?)
            }
            DomainSpec::Translate { of, by } => translate(&Domain::from_spec(of)?, by),
        }
    }

    pub fn from_json(json: &str) -> Result<Domain> {
        let spec: DomainSpec =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("domain: {e}")))?;
        Domain::from_spec(&spec)
    }
}

/// JSON composition grammar for domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball { center: Vec<f64>, r: f64 },
    Box { low: Vec<f64>, high: Vec<f64> },
    Difference { a: Box<DomainSpec>, b: Box<DomainSpec> },
    Translate { of: Box<DomainSpec>, by: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// One standard error; zero for analytic volumes.
    pub std_error: f64,
    pub analytic: bool,
    pub samples: u64,
}

/// Exact volume when known, otherwise seeded Monte Carlo over the bounding box.
pub fn estimate_volume(d: &Domain, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if let Some(v) = d.analytic_volume() {
        return Ok(VolumeEstimate { value: v, std_error: 0.0, analytic: true, samples: 0 });
    }
    if samples == 0 {
        return Err(Error::Estimation("volume estimate needs samples > 0".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut p = vec![0.0; d.dim];
    let mut hits = 0u64;
    for _ in 0..samples {
        d.bbox.sample_into(&mut rng, &mut p);
        if d.contains(&p) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let frac = hits as f64 / n;
    let box_vol = d.bbox.volume();
    Ok(VolumeEstimate {
        value: frac * box_vol,
        std_error: box_vol * (frac * (1.0 - frac) / n).sqrt(),
        analytic: false,
        samples,
    })
}

/// Radius `r` with `|B_r| = |D|`.
pub fn equivalent_radius(d: &Domain, samples: u64, seed: u64) -> Result<f64> {
    let vol = estimate_volume(d, samples, seed)?;
    radius_for_volume(d.dim, vol.value)
}

/// Sampled lower bound for `sup_{y ∈ D} |y − x0|`: the largest distance from
/// `x0` among `budget` uniform bounding-box samples that land in `D`.
pub fn circumradius_about(d: &Domain, x0: &[f64], budget: u64, seed: u64) -> Result<f64> {
    if x0.len() != d.dim {
        return domain("x0 has the wrong dimension");
    }
    let mut rng = seeded_rng(seed);
    let mut p = vec![0.0; d.dim];
    let mut best: Option<f64> = None;
    for _ in 0..budget {
        d.bbox.sample_into(&mut rng, &mut p);
        if d.contains(&p) {
            let dist = distance(&p, x0);
            best = Some(best.map_or(dist, |b| b.max(dist)));
        }
    }
    best.ok_or_else(|| Error::Estimation(format!("no point of the domain found in {budget} samples")))
}

/// `D_r = D ∪ ⋃_{x ∈ ∂D} B_r(x)`: every point closer than `r` to `D`.
#[derive(Debug, Clone)]
pub struct DilatedCopy {
    pub base: Domain,
    pub r: f64,
}

impl DilatedCopy {
    pub fn new(base: Domain, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return domain("dilation radius must be positive");
        }
        Ok(Self { base, r })
    }

    /// Membership. Balls and boxes are decided exactly; other domains by
    /// whether any of `samples` seeded points of the base lies within `r`.
    pub fn contains(&self, p: &[f64], samples: u64, seed: u64) -> bool {
        if self.base.contains(p) {
            return true;
        }
        if let Some((c, radius)) = self.base.as_ball() {
            return distance(&c, p) < radius + self.r;
        }
        if let Some((low, high)) = self.base.as_box() {
            let d2: f64 = p
                .iter()
                .zip(low.iter().zip(&high))
                .map(|(x, (l, h))| {
                    let gap = (l - x).max(x - h).max(0.0);
                    gap * gap
                })
                .sum();
            return d2.sqrt() < self.r;
        }
        let mut rng = seeded_rng(seed);
        let mut q = vec![0.0; self.base.dim];
        for _ in 0..samples {
            self.base.bbox.sample_into(&mut rng, &mut q);
            if self.base.contains(&q) && distance(&q, p) < self.r {
                return true;
            }
        }
        false
    }
}
