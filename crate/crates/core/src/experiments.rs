//! Cayley balls, central distortion profiles and coarse-embedding reports.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cocycle::{Cocycle, Extension};
use crate::groups::{GroupError, GroupModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("model `{0}` does not support Cayley enumeration")]
    NotEnumerable(String),
    #[error("ball exceeded the cap of {cap} elements at radius {radius}")]
    CapExceeded { cap: usize, radius: u32 },
    #[error("element {0} is not central")]
    NotCentral(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Breadth-first ball in the word metric of the model's generators.
///
/// Elements are stored in BFS order; within a sphere, in order of
/// (parent index, generator index) of their first discovery.
#[derive(Debug, Clone)]
pub struct CayleyBall<E> {
    pub model: String,
    pub radius: u32,
    pub generator_names: Vec<String>,
    pub elements: Vec<E>,
    pub lengths: Vec<u32>,
    /// `(parent, generator)` with `element = parent · generator`; `None` for the identity.
    pub parents: Vec<Option<(usize, usize)>>,
    pub sphere_sizes: Vec<usize>,
    buckets: HashMap<u64, Vec<usize>>,
}

impl<E> CayleyBall<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// A geodesic word for element `i`, as generator names.
    pub fn word(&self, mut i: usize) -> Vec<String> {
        let mut out = Vec::new();
        while let Some((p, g)) = self.parents[i] {
            out.push(self.generator_names[g].clone());
            i = p;
        }
        out.reverse();
        out
    }

    pub fn find<M: GroupModel<Element = E>>(&self, model: &M, e: &E) -> Option<usize> {
        self.buckets
            .get(&model.digest(e))?
            .iter()
            .copied()
            .find(|&i| model.eq(&self.elements[i], e))
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::SCHEMA,
            "model": self.model,
            "radius": self.radius,
            "size": self.len(),
            "sphere_sizes": self.sphere_sizes,
        })
    }

    /// DOT export of the Cayley graph restricted to the ball (one edge per generator step).
    pub fn to_dot<M: GroupModel<Element = E>>(&self, model: &M) -> String {
        let gens = model.generators();
        let mut s = String::from("graph cayley {\n");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label=\"{}\"];", model.format(e).replace('"', "'"));
        }
        for (i, e) in self.elements.iter().enumerate() {
            for g in &gens {
                if let Some(j) = self.find(model, &model.mul(e, &g.element)) {
                    if i < j {
                        let _ = writeln!(s, "  {i} -- {j} [label=\"{}\"];", g.name);
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Exact ball of radius `radius`; fails with `CapExceeded` instead of truncating.
pub fn cayley_ball<M: GroupModel>(model: &M, radius: u32, cap: usize) -> Result<CayleyBall<M::Element>, ExperimentError> {
    if !model.is_enumerable() {
        return Err(ExperimentError::NotEnumerable(model.name()));
    }
    let gens = model.generators();
    let id = model.identity();
    let mut ball = CayleyBall {
        model: model.name(),
        radius,
        generator_names: gens.iter().map(|g| g.name.clone()).collect(),
        elements: Vec::new(),
        lengths: Vec::new(),
        parents: Vec::new(),
        sphere_sizes: vec![1],
        buckets: HashMap::new(),
    };
    ball.buckets.insert(model.digest(&id), vec![0]);
    ball.elements.push(id);
    ball.lengths.push(0);
    ball.parents.push(None);
    let mut frontier = 0..1;
    for r in 1..=radius {
        let els = &ball.elements;
        let candidates: Vec<(usize, usize, M::Element, u64)> = frontier
            .clone()
            .into_par_iter()
            .flat_map_iter(|i| {
                gens.iter().enumerate().map(move |(gi, g)| {
                    let y = model.mul(&els[i], &g.element);
                    let d = model.digest(&y);
                    (i, gi, y, d)
                })
            })
            .collect();
        let start = ball.elements.len();
        for (parent, gi, y, d) in candidates {
            let bucket = ball.buckets.entry(d).or_default();
            if bucket.iter().any(|&j| model.eq(&ball.elements[j], &y)) {
                continue;
            }
            if ball.elements.len() >= cap {
                return Err(ExperimentError::CapExceeded { cap, radius: r });
            }
            bucket.push(ball.elements.len());
            ball.elements.push(y);
            ball.lengths.push(r);
            ball.parents.push(Some((parent, gi)));
        }
        ball.sphere_sizes.push(ball.elements.len() - start);
        frontier = start..ball.elements.len();
    }
    Ok(ball)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionPoint {
    pub k: u64,
    pub length: u32,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionProfile {
    pub model: String,
    pub central: String,
    pub radius: u32,
    pub ball_size: usize,
    pub points: Vec<DistortionPoint>,
    /// Least-squares slope of `log length` against `log k` over `k >= 2`.
    pub exponent: Option<f64>,
    pub fit: String,
}

impl DistortionProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,length,word\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{}", p.k, p.length, p.word);
        }
        s
    }
}

/// Least-squares line `y = slope·x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Minimum number of `k >= 2` points for an exponent fit.
pub const MIN_FIT_POINTS: usize = 5;

/// Word lengths of the central powers `zᵏ` that lie in `B(radius)`, for
/// `k = 1..=|B|` (stopping early when `zᵏ = 1`), and the log–log exponent.
pub fn distortion_profile<M: GroupModel>(
    model: &M,
    central: &M::Element,
    radius: u32,
    cap: usize,
) -> Result<DistortionProfile, ExperimentError> {
    for g in model.generators() {
        let left = model.mul(central, &g.element);
        let right = model.mul(&g.element, central);
        if !model.eq(&left, &right) {
            return Err(ExperimentError::NotCentral(model.format(central)));
        }
    }
    let ball = cayley_ball(model, radius, cap)?;
    let mut points = Vec::new();
    let mut zk = central.clone();
    for k in 1..=ball.len() as u64 {
        if model.is_identity(&zk) {
            break;
        }
        if let Some(i) = ball.find(model, &zk) {
            points.push(DistortionPoint { k, length: ball.lengths[i], word: ball.word(i).join(" ") });
        }
        zk = model.mul(&zk, central);
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.k >= 2)
        .map(|p| ((p.k as f64).ln(), f64::from(p.length).ln()))
        .collect();
    let (exponent, fit) = if logs.len() >= MIN_FIT_POINTS {
        match least_squares(&logs) {
            Some((slope, _)) => (Some(slope), "ok".to_string()),
            None => (None, "insufficient data".to_string()),
        }
    } else {
        (None, "insufficient data".to_string())
    };
    Ok(DistortionProfile {
        model: model.name(),
        central: model.format(central),
        radius,
        ball_size: ball.len(),
        points,
        exponent,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingRow {
    /// Word length `|g|_E`.
    pub length: u32,
    pub count: usize,
    /// Range of `|φ(g)| + |q|_Q` over the sphere.
    pub min_image: i64,
    pub max_image: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub model: String,
    pub radius: u32,
    pub rows: Vec<EmbeddingRow>,
    /// Least-squares fit of `min_image` against `|g|_E` over radii `>= 1`.
    pub lower: Option<Envelope>,
    /// Least-squares fit of `max_image` against `|g|_E` over radii `>= 1`.
    pub upper: Option<Envelope>,
    /// `max | (|φ(g)| + |q|_Q) − |g|_E |` over the ball.
    pub max_additive_gap: i64,
}

/// Measures `g ↦ (φ(g), q)` on `B_E(radius)` against the word length in `E`.
///
/// Base lengths come from the base ball of the same radius, which contains
/// every projection since generators project to generators or the identity.
pub fn coarse_embedding_report<C: Cocycle>(ext: &Extension<C>, radius: u32, cap: usize) -> Result<EmbeddingReport, ExperimentError>
where
    <C::Base as GroupModel>::Element: PartialEq,
{
    let ball = cayley_ball(ext, radius, cap)?;
    let base = ext.base();
    let base_ball = cayley_ball(base, radius, cap)?;
    let images: Vec<i64> = ball
        .elements
        .par_iter()
        .map(|e| {
            let ql = match base.length_oracle(&e.q) {
                Some(l) => l as i64,
                None => i64::from(base_ball.lengths[base_ball.find(base, &e.q).expect("projection lies in base ball")]),
            };
            ext.phi(e).abs() + ql
        })
        .collect();
    let mut rows: Vec<EmbeddingRow> = (0..=radius)
        .map(|r| EmbeddingRow { length: r, count: 0, min_image: i64::MAX, max_image: i64::MIN })
        .collect();
    let mut gap = 0;
    for (len, img) in ball.lengths.iter().zip(&images) {
        let row = &mut rows[*len as usize];
        row.count += 1;
        row.min_image = row.min_image.min(*img);
        row.max_image = row.max_image.max(*img);
        gap = gap.max((img - i64::from(*len)).abs());
    }
    rows.retain(|r| r.count > 0);
    let fit = |f: fn(&EmbeddingRow) -> i64| {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.length >= 1).map(|r| (f64::from(r.length), f(r) as f64)).collect();
        least_squares(&pts).map(|(slope, intercept)| Envelope { slope, intercept })
    };
    Ok(EmbeddingReport {
        model: ext.name(),
        radius,
        lower: fit(|r| r.min_image),
        upper: fit(|r| r.max_image),
        rows,
        max_additive_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{HeisenbergCocycle, TrivialCocycle, TwistCocycle};
    use crate::groups::{FreeAbelian, FreeGroup, Heisenberg, HeisenbergElement, SurfaceGroup, ThompsonT, TwistedLamplighter};

    #[test]
    fn ball_sizes() {
        let z2 = FreeAbelian::new(2).unwrap();
        let b = cayley_ball(&z2, 2, 1000).unwrap();
        assert_eq!(b.len(), 13);
        assert_eq!(b.sphere_sizes, vec![1, 4, 8]);

        let f2 = FreeGroup::new(2).unwrap();
        let b = cayley_ball(&f2, 3, 1000).unwrap();
        assert_eq!(b.len(), 53);

        let s = SurfaceGroup::new(2).unwrap();
        let b = cayley_ball(&s, 2, 1000).unwrap();
        assert_eq!(b.len(), 65);

        assert!(matches!(cayley_ball(&ThompsonT, 1, 10), Err(ExperimentError::NotEnumerable(_))));
        assert!(matches!(cayley_ball(&f2, 3, 20), Err(ExperimentError::CapExceeded { cap: 20, radius: 3 })));
    }

    #[test]
    fn ball_words_are_geodesic_witnesses() {
        let h = Heisenberg;
        let b = cayley_ball(&h, 5, 100_000).unwrap();
        for i in 0..b.len() {
            let w = b.word(i);
            assert_eq!(w.len() as u32, b.lengths[i]);
            let e = crate::groups::parse_word(&h, &w.join(" ")).unwrap();
            assert_eq!(e, b.elements[i]);
        }
    }

    #[test]
    fn heisenberg_distortion() {
        let p = distortion_profile(&Heisenberg, &HeisenbergElement::new(0, 0, 1), 8, 1_000_000).unwrap();
        assert_eq!(p.points[0].length, 4);
        // z^4 = [a², b²] has length 8.
        let four = p.points.iter().find(|q| q.k == 4).unwrap();
        assert_eq!(four.length, 8);
    }

    #[test]
    fn split_extension_lengths_are_exact() {
        let split = Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2).unwrap() });
        let p = distortion_profile(&split, &split.central(), 8, 1_000_000).unwrap();
        assert!(p.points.iter().all(|q| u64::from(q.length) == q.k));
        assert_eq!(p.points.len(), 8);
        assert!((p.exponent.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_center_has_insufficient_data() {
        let gi = TwistedLamplighter::new(crate::groups::TwistSet::empty());
        // z = (a t a T)² and no shorter word reaches it.
        let p = distortion_profile(&gi, &gi.z(), 6, 1_000_000).unwrap();
        assert!(p.points.is_empty());
        let p = distortion_profile(&gi, &gi.z(), 8, 1_000_000).unwrap();
        assert_eq!(p.points.len(), 1);
        assert_eq!(p.points[0].length, 8);
        assert_eq!(p.exponent, None);
        assert_eq!(p.fit, "insufficient data");
        let a = gi.a();
        assert!(matches!(distortion_profile(&gi, &a, 2, 1000), Err(ExperimentError::NotCentral(_))));
    }

    #[test]
    fn embedding_reports() {
        let split = Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2).unwrap() });
        let r = coarse_embedding_report(&split, 4, 1_000_000).unwrap();
        assert_eq!(r.max_additive_gap, 0);
        assert!(r.rows.iter().all(|row| row.min_image == i64::from(row.length) && row.max_image == row.min_image));

        let heis = Extension::new_unchecked(HeisenbergCocycle::default());
        let r = coarse_embedding_report(&heis, 8, 1_000_000).unwrap();
        let last = r.rows.last().unwrap();
        assert!(last.max_image > 2 * i64::from(last.length));

        let twist = Extension::new_unchecked(TwistCocycle::new(crate::groups::TwistSet::empty()));
        let r = coarse_embedding_report(&twist, 5, 1_000_000).unwrap();
        assert!(r.lower.unwrap().slope > 0.0);
    }
}
