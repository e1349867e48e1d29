//! Thompson's group T as dyadic piecewise-linear circle maps, and its lift
//! to homeomorphisms of the line commuting with integer translation.
//!
//! Both are stored as a lift `F: ℝ → ℝ` with `F(x + 1) = F(x) + 1`, given
//! by its nodes on `[0, 1]`: `xs[0] = 0 < … < xs[k] = 1`, strictly
//! increasing values `ys` with `ys[k] = ys[0] + 1`, and power-of-two slopes.
//! Interior nodes where the slope does not change are dropped, so the node
//! list is a canonical form. A [`CircleMap`] is the lift with `F(0) ∈ [0, 1)`;
//! a [`LineMap`] may carry any value at 0.

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use super::{stable_digest, Generator, GroupError, GroupModel};
use crate::dyadic::Dyadic;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct PlLift {
    xs: Vec<Dyadic>,
    ys: Vec<Dyadic>,
    log_slopes: Vec<i64>,
}

fn slopes_of(xs: &[Dyadic], ys: &[Dyadic]) -> Result<Vec<i64>, GroupError> {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| {
            let dx = &x[1] - &x[0];
            let dy = &y[1] - &y[0];
            if dx <= Dyadic::zero() || dy <= Dyadic::zero() {
                return Err(GroupError::InvalidMap("nodes must be strictly increasing".into()));
            }
            dy.log2_ratio(&dx).ok_or_else(|| {
                GroupError::NonDyadicInput(format!("slope ({dy})/({dx}) is not a power of two"))
            })
        })
        .collect()
}

/// Exact linear interpolation on a node window containing `x`.
fn interpolate(xs: &[Dyadic], ys: &[Dyadic], slopes: &[i64], x: &Dyadic) -> Dyadic {
    let i = match xs.binary_search(x) {
        Ok(i) => return ys[i].clone(),
        Err(i) => i - 1,
    };
    &ys[i] + &(x - &xs[i]).mul_pow2(slopes[i])
}

impl PlLift {
    fn from_nodes(xs: Vec<Dyadic>, ys: Vec<Dyadic>) -> Result<Self, GroupError> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(GroupError::InvalidMap("need at least two nodes".into()));
        }
        if xs[0] != Dyadic::zero() || xs[xs.len() - 1] != Dyadic::one() {
            return Err(GroupError::InvalidMap("nodes must span [0, 1]".into()));
        }
        if ys[ys.len() - 1] != &ys[0] + &Dyadic::one() {
            return Err(GroupError::InvalidMap("map must have degree one".into()));
        }
        let slopes = slopes_of(&xs, &ys)?;
        let mut out = PlLift {
            xs: vec![xs[0].clone()],
            ys: vec![ys[0].clone()],
            log_slopes: vec![slopes[0]],
        };
        for i in 1..xs.len() - 1 {
            if slopes[i] != slopes[i - 1] {
                out.xs.push(xs[i].clone());
                out.ys.push(ys[i].clone());
                out.log_slopes.push(slopes[i]);
            }
        }
        out.xs.push(xs[xs.len() - 1].clone());
        out.ys.push(ys[ys.len() - 1].clone());
        Ok(out)
    }

    fn value_at_zero(&self) -> &Dyadic {
        &self.ys[0]
    }

    fn eval(&self, x: &Dyadic) -> Dyadic {
        let n = Dyadic::from(x.floor());
        let f = x - &n;
        &interpolate(&self.xs, &self.ys, &self.log_slopes, &f) + &n
    }

    fn eval_inv(&self, y: &Dyadic) -> Dyadic {
        let m = Dyadic::from((y - &self.ys[0]).floor());
        let y0 = y - &m;
        let neg: Vec<i64> = self.log_slopes.iter().map(|s| -s).collect();
        &interpolate(&self.ys, &self.xs, &neg, &y0) + &m
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PlLift) -> PlLift {
        let g0 = other.value_at_zero();
        let mut xs: Vec<Dyadic> = other.xs.clone();
        for b in &self.xs[..self.xs.len() - 1] {
            let t = g0 + &(b - g0).fract();
            xs.push(other.eval_inv(&t));
        }
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| self.eval(&other.eval(x))).collect();
        PlLift::from_nodes(xs, ys).expect("composition of PL lifts is a PL lift")
    }

    fn inverse(&self) -> PlLift {
        let mut xs = vec![Dyadic::zero(), Dyadic::one()];
        xs.extend(self.ys.iter().map(Dyadic::fract));
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|y| self.eval_inv(y)).collect();
        PlLift::from_nodes(xs, ys).expect("inverse of a PL lift is a PL lift")
    }

    fn translate(&self, k: &BigInt) -> PlLift {
        let shift = Dyadic::from(k.clone());
        PlLift {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| y + &shift).collect(),
            log_slopes: self.log_slopes.clone(),
        }
    }

    fn normalized(&self) -> PlLift {
        let k = self.ys[0].floor();
        self.translate(&-k)
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut s = String::new();
        for (x, y) in self.xs.iter().zip(&self.ys) {
            s.push_str(&format!("{x}:{y};"));
        }
        s.into_bytes()
    }
}

/// Element of Thompson's group T.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircleMap(PlLift);

/// Element of the lifted group: a PL homeomorphism of ℝ commuting with `x ↦ x + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineMap(PlLift);

fn dyadic_pair(v: &Value, what: &str) -> Result<Dyadic, GroupError> {
    let bad = || GroupError::NonDyadicInput(format!("{what} must be [numerator, exponent], got {v}"));
    let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
    let num: BigInt = match &arr[0] {
        Value::Number(n) if n.is_i64() => BigInt::from(n.as_i64().unwrap()),
        Value::String(s) => s.parse().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    let exp = arr[1].as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(bad)?;
    Ok(Dyadic::new(num, exp))
}

fn dyadic_json(d: &Dyadic) -> Value {
    let num = match d.to_pair() {
        Some((n, _)) => json!(n),
        None => json!(d.numerator().to_string()),
    };
    json!([num, d.exponent()])
}

impl CircleMap {
    pub fn identity() -> Self {
        CircleMap(PlLift::from_nodes(vec![Dyadic::zero(), Dyadic::one()], vec![Dyadic::zero(), Dyadic::one()]).unwrap())
    }

    /// Builds a map from its breakpoints on `[0, 1)` and their images in `[0, 1)`.
    pub fn from_points(points: &[(Dyadic, Dyadic)]) -> Result<Self, GroupError> {
        if points.is_empty() {
            return Err(GroupError::InvalidMap("no breakpoints".into()));
        }
        let unit = Dyadic::one();
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        for (p, im) in &pts {
            let in_unit = |d: &Dyadic| *d >= Dyadic::zero() && *d < unit;
            if !in_unit(p) || !in_unit(im) {
                return Err(GroupError::InvalidMap("breakpoints and images must lie in [0, 1)".into()));
            }
        }
        if pts.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(GroupError::InvalidMap("repeated breakpoint".into()));
        }
        // Unwrap the images into an increasing sequence over one period.
        let mut px: Vec<Dyadic> = Vec::with_capacity(pts.len() + 1);
        let mut py: Vec<Dyadic> = Vec::with_capacity(pts.len() + 1);
        for (p, im) in &pts {
            let mut y = im.clone();
            if let Some(prev) = py.last() {
                y = &y + &Dyadic::from(prev.floor());
                if y <= *prev {
                    y = &y + &unit;
                }
            }
            px.push(p.clone());
            py.push(y);
        }
        let closing = &py[0] + &unit;
        if py[py.len() - 1] >= closing {
            return Err(GroupError::InvalidMap("images are not cyclically increasing".into()));
        }
        px.push(&px[0] + &unit);
        py.push(closing);
        let slopes = slopes_of(&px, &py)?;
        let mut xs = vec![Dyadic::zero(), unit.clone()];
        xs.extend(px[..px.len() - 1].iter().cloned());
        xs.sort();
        xs.dedup();
        let ys = xs
            .iter()
            .map(|x| {
                if *x >= px[0] {
                    interpolate(&px, &py, &slopes, x)
                } else {
                    &interpolate(&px, &py, &slopes, &(x + &unit)) - &unit
                }
            })
            .collect();
        Ok(CircleMap(PlLift::from_nodes(xs, ys)?.normalized()))
    }

    /// Parses `[{"bp": [num, exp], "im": [num, exp]}, …]`.
    pub fn from_json(v: &Value) -> Result<Self, GroupError> {
        let arr = v
            .as_array()
            .ok_or_else(|| GroupError::InvalidMap("expected a list of breakpoints".into()))?;
        let points = arr
            .iter()
            .map(|p| Ok((dyadic_pair(&p["bp"], "bp")?, dyadic_pair(&p["im"], "im")?)))
            .collect::<Result<Vec<_>, GroupError>>()?;
        Self::from_points(&points)
    }

    pub fn to_json(&self) -> Value {
        let nodes = &self.0;
        Value::Array(
            nodes.xs[..nodes.xs.len() - 1]
                .iter()
                .zip(&nodes.ys)
                .map(|(x, y)| json!({"bp": dyadic_json(x), "im": dyadic_json(&y.fract())}))
                .collect(),
        )
    }

    /// Value of the map on the circle, in `[0, 1)`.
    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        self.0.eval(x).fract()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CircleMap) -> CircleMap {
        CircleMap(self.0.compose(&other.0).normalized())
    }

    pub fn inverse(&self) -> CircleMap {
        CircleMap(self.0.inverse().normalized())
    }

    pub fn is_identity(&self) -> bool {
        *self == CircleMap::identity()
    }

    /// Breakpoints (with slope change) in `[0, 1)`, always including 0.
    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.0.xs[..self.0.xs.len() - 1]
    }

    pub fn log_slopes(&self) -> &[i64] {
        &self.0.log_slopes
    }
}

impl LineMap {
    /// Canonical lift: the one with value at 0 in `[0, 1)`.
    pub fn lift(c: &CircleMap) -> LineMap {
        LineMap(c.0.clone())
    }

    pub fn translation(k: i64) -> LineMap {
        LineMap(CircleMap::identity().0.translate(&BigInt::from(k)))
    }

    pub fn project(&self) -> CircleMap {
        CircleMap(self.0.normalized())
    }

    pub fn eval(&self, x: &Dyadic) -> Dyadic {
        self.0.eval(x)
    }

    pub fn value_at_zero(&self) -> &Dyadic {
        self.0.value_at_zero()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LineMap) -> LineMap {
        LineMap(self.0.compose(&other.0))
    }

    pub fn inverse(&self) -> LineMap {
        LineMap(self.0.inverse())
    }

    /// `τ^k ∘ self`.
    pub fn translate(&self, k: &BigInt) -> LineMap {
        LineMap(self.0.translate(k))
    }

    /// If `self` is an integer translation `x ↦ x + k`, returns `k`.
    pub fn as_translation(&self) -> Option<BigInt> {
        let n = self.0.normalized();
        (CircleMap(n).is_identity()).then(|| self.0.ys[0].floor())
    }
}

impl fmt::Display for CircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.xs.iter().zip(&self.0.ys).map(|(x, y)| format!("{x}->{y}")).collect();
        write!(f, "T[{}]", parts.join(", "))
    }
}

impl fmt::Display for LineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.xs.iter().zip(&self.0.ys).map(|(x, y)| format!("{x}->{y}")).collect();
        write!(f, "Tbar[{}]", parts.join(", "))
    }
}

fn lift_from(xs: &[(i64, u32)], ys: &[(i64, u32)]) -> CircleMap {
    let xs = xs.iter().map(|&(n, e)| Dyadic::new(n, e)).collect();
    let ys = ys.iter().map(|&(n, e)| Dyadic::new(n, e)).collect();
    CircleMap(PlLift::from_nodes(xs, ys).expect("built-in map").normalized())
}

/// Rotation by `num / 2^exp`.
pub fn rotation(num: i64, exp: u32) -> CircleMap {
    let r = Dyadic::new(num, exp).fract();
    let rn = r.numerator().clone();
    let re = r.exponent();
    let one = Dyadic::one();
    let ys = vec![r.clone(), &r + &one];
    let _ = (rn, re);
    CircleMap(PlLift::from_nodes(vec![Dyadic::zero(), one], ys).expect("rotation"))
}

/// `A`: slopes 1/2, 1, 2 on `[0,1/2]`, `[1/2,3/4]`, `[3/4,1]`; fixes 0.
pub fn generator_a() -> CircleMap {
    lift_from(&[(0, 0), (1, 1), (3, 2), (1, 0)], &[(0, 0), (1, 2), (1, 1), (1, 0)])
}

/// `B`: identity on `[0,1/2]`, then `A` rescaled onto `[1/2,1]`.
pub fn generator_b() -> CircleMap {
    lift_from(
        &[(0, 0), (1, 1), (3, 2), (7, 3), (1, 0)],
        &[(0, 0), (1, 1), (5, 3), (3, 2), (1, 0)],
    )
}

/// `C`: the order-three element sending `0 ↦ 3/4`, `1/2 ↦ 0`, `3/4 ↦ 1/2`.
pub fn generator_c() -> CircleMap {
    lift_from(&[(0, 0), (1, 1), (3, 2), (1, 0)], &[(3, 2), (1, 0), (3, 1), (7, 2)])
}

/// Resolves `id`, `A`, `B`, `C`, `r_half`, or `r:<num>/<2^exp>` (e.g. `r:1/4`).
pub fn named_map(name: &str) -> Result<CircleMap, GroupError> {
    match name {
        "id" | "1" => Ok(CircleMap::identity()),
        "A" => Ok(generator_a()),
        "B" => Ok(generator_b()),
        "C" => Ok(generator_c()),
        "r_half" => Ok(rotation(1, 1)),
        other => {
            let err = || GroupError::Parse { text: other.to_string(), message: "unknown circle map".into() };
            let body = other.strip_prefix("r:").ok_or_else(err)?;
            let (n, d) = body.split_once('/').unwrap_or((body, "1"));
            let num: i64 = n.trim().parse().map_err(|_| err())?;
            let den: u64 = d.trim().parse().map_err(|_| err())?;
            if !den.is_power_of_two() {
                return Err(GroupError::NonDyadicInput(format!("denominator {den} is not a power of two")));
            }
            Ok(rotation(num, den.trailing_zeros()))
        }
    }
}

/// Thompson's group T, generated by `A`, `B`, `C` and their inverses.
///
/// No word metric is attached to T, so the model is not enumerable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThompsonT;

impl GroupModel for ThompsonT {
    type Element = CircleMap;

    fn name(&self) -> String {
        "T".into()
    }

    fn identity(&self) -> CircleMap {
        CircleMap::identity()
    }

    fn mul(&self, a: &CircleMap, b: &CircleMap) -> CircleMap {
        a.compose(b)
    }

    fn inv(&self, a: &CircleMap) -> CircleMap {
        a.inverse()
    }

    fn eq(&self, a: &CircleMap, b: &CircleMap) -> bool {
        a == b
    }

    fn digest(&self, a: &CircleMap) -> u64 {
        stable_digest(&a.0.canonical_bytes())
    }

    fn generators(&self) -> Vec<Generator<CircleMap>> {
        [("A", generator_a()), ("B", generator_b()), ("C", generator_c())]
            .into_iter()
            .flat_map(|(n, g)| {
                let gi = g.inverse();
                [Generator::new(n, g), Generator::new(format!("{n}i"), gi)]
            })
            .collect()
    }

    fn format(&self, a: &CircleMap) -> String {
        a.to_string()
    }

    fn is_enumerable(&self) -> bool {
        false
    }
}

/// The lift of T: canonical lifts of `A`, `B`, `C`, their inverses, and `τ^{±1}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LiftedThompson;

impl GroupModel for LiftedThompson {
    type Element = LineMap;

    fn name(&self) -> String {
        "Tbar".into()
    }

    fn identity(&self) -> LineMap {
        LineMap::lift(&CircleMap::identity())
    }

    fn mul(&self, a: &LineMap, b: &LineMap) -> LineMap {
        a.compose(b)
    }

    fn inv(&self, a: &LineMap) -> LineMap {
        a.inverse()
    }

    fn eq(&self, a: &LineMap, b: &LineMap) -> bool {
        a == b
    }

    fn digest(&self, a: &LineMap) -> u64 {
        stable_digest(&a.0.canonical_bytes())
    }

    fn generators(&self) -> Vec<Generator<LineMap>> {
        let mut gens: Vec<Generator<LineMap>> = [("A", generator_a()), ("B", generator_b()), ("C", generator_c())]
            .into_iter()
            .flat_map(|(n, g)| {
                let l = LineMap::lift(&g);
                let li = l.inverse();
                [Generator::new(n, l), Generator::new(format!("{n}i"), li)]
            })
            .collect();
        gens.push(Generator::new("tau", LineMap::translation(1)));
        gens.push(Generator::new("taui", LineMap::translation(-1)));
        gens
    }

    fn format(&self, a: &LineMap) -> String {
        a.to_string()
    }

    fn is_enumerable(&self) -> bool {
        false
    }
}
