//! Group models addressable by name, shared by the CLI and the Python bindings.

use crate::cocycle::{
    parse_circle_word, EulerCocycle, Extension, HeisenbergCocycle, TrivialCocycle, TwistCocycle,
};
use crate::groups::thompson::named_map;
use crate::groups::{
    parse_word, FreeAbelian, FreeGroup, GroupError, GroupModel, Heisenberg, Lamplighter, LiftedThompson, LineMap,
    SurfaceGroup, ThompsonT, TwistedLamplighter,
};

pub const MODEL_GRAMMAR: &str = "\
models: zn:<k> (z2 = zn:2), free:<k> (f2), heisenberg, lamplighter, GI:I=<set>,
        surface:<g>, T, T~ (lifts of T), split (Z^2 x Z), ext:<cocycle>
        where <cocycle> is trivial | heisenberg | euler:T | twist:I=<set>
sets:   {}, {1,3}, all, all\\{2}";

/// Element parsing and a default central element, per model.
pub trait CliModel: GroupModel + Sized {
    fn parse_element(&self, text: &str) -> Result<Self::Element, GroupError> {
        parse_word(self, text)
    }

    fn default_central(&self) -> Option<&'static str> {
        None
    }
}

impl CliModel for FreeAbelian {}
impl CliModel for FreeGroup {}
impl CliModel for Lamplighter {}
impl CliModel for SurfaceGroup {}

impl CliModel for Heisenberg {
    fn default_central(&self) -> Option<&'static str> {
        Some("a b A B")
    }
}

impl CliModel for TwistedLamplighter {
    /// Words may use `z` even when it is not a generator.
    fn parse_element(&self, text: &str) -> Result<Self::Element, GroupError> {
        let mut acc = self.identity();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
            let g = if tok == "z" { self.z() } else { parse_word(self, tok)? };
            acc = self.mul(&acc, &g);
        }
        Ok(acc)
    }

    fn default_central(&self) -> Option<&'static str> {
        Some("z")
    }
}

impl CliModel for ThompsonT {
    fn parse_element(&self, text: &str) -> Result<Self::Element, GroupError> {
        parse_circle_word(text)
    }
}

impl CliModel for LiftedThompson {
    fn default_central(&self) -> Option<&'static str> {
        Some("tau")
    }

    /// Generator names, or `lift(<map>)` for the normalised lift of a named circle map.
    fn parse_element(&self, text: &str) -> Result<Self::Element, GroupError> {
        let gens = self.generators();
        let mut acc = self.identity();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
            let g = if let Some(g) = gens.iter().find(|g| g.name == tok) {
                g.element.clone()
            } else if let Some(inner) = tok.strip_prefix("lift(").and_then(|t| t.strip_suffix(')')) {
                LineMap::lift(&named_map(inner)?)
            } else {
                return Err(GroupError::Parse { text: text.into(), message: format!("unknown token `{tok}`") });
            };
            acc = self.mul(&acc, &g);
        }
        Ok(acc)
    }
}

macro_rules! extension_model {
    ($c:ty) => {
        impl CliModel for Extension<$c> {
            fn default_central(&self) -> Option<&'static str> {
                Some("zeta")
            }
        }
    };
}

extension_model!(TrivialCocycle<FreeAbelian>);
extension_model!(HeisenbergCocycle);
extension_model!(TwistCocycle);

impl CliModel for Extension<EulerCocycle> {
    fn default_central(&self) -> Option<&'static str> {
        Some("zeta")
    }
}

pub enum AnyModel {
    FreeAbelian(FreeAbelian),
    Free(FreeGroup),
    Heisenberg(Heisenberg),
    Lamplighter(Lamplighter),
    Twisted(TwistedLamplighter),
    Surface(SurfaceGroup),
    Thompson(ThompsonT),
    Lifted(LiftedThompson),
    Split(Extension<TrivialCocycle<FreeAbelian>>),
    HeisenbergExt(Extension<HeisenbergCocycle>),
    EulerExt(Extension<EulerCocycle>),
    TwistExt(Extension<TwistCocycle>),
}

/// Runs `$body` with `$m` bound to the concrete model.
#[macro_export]
macro_rules! with_model {
    ($model:expr, $m:ident => $body:expr) => {
        match $model {
            $crate::registry::AnyModel::FreeAbelian($m) => $body,
            $crate::registry::AnyModel::Free($m) => $body,
            $crate::registry::AnyModel::Heisenberg($m) => $body,
            $crate::registry::AnyModel::Lamplighter($m) => $body,
            $crate::registry::AnyModel::Twisted($m) => $body,
            $crate::registry::AnyModel::Surface($m) => $body,
            $crate::registry::AnyModel::Thompson($m) => $body,
            $crate::registry::AnyModel::Lifted($m) => $body,
            $crate::registry::AnyModel::Split($m) => $body,
            $crate::registry::AnyModel::HeisenbergExt($m) => $body,
            $crate::registry::AnyModel::EulerExt($m) => $body,
            $crate::registry::AnyModel::TwistExt($m) => $body,
        }
    };
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, GroupError> {
    s.trim().parse().map_err(|_| GroupError::InvalidParam(format!("bad {what} `{s}`")))
}

pub fn parse_model(name: &str) -> Result<AnyModel, GroupError> {
    let n = name.trim();
    Ok(match n {
        "z2" => AnyModel::FreeAbelian(FreeAbelian::new(2)?),
        "f2" => AnyModel::Free(FreeGroup::new(2)?),
        "heisenberg" => AnyModel::Heisenberg(Heisenberg),
        "lamplighter" => AnyModel::Lamplighter(Lamplighter),
        "T" => AnyModel::Thompson(ThompsonT),
        "T~" => AnyModel::Lifted(LiftedThompson),
        "split" | "ext:trivial" => AnyModel::Split(Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2)? })),
        "ext:heisenberg" => AnyModel::HeisenbergExt(Extension::new_unchecked(HeisenbergCocycle::default())),
        "ext:euler:T" | "ext:euler" => AnyModel::EulerExt(Extension::new_unchecked(EulerCocycle::default())),
        _ => {
            if let Some(k) = n.strip_prefix("zn:") {
                AnyModel::FreeAbelian(FreeAbelian::new(number(k, "rank")?)?)
            } else if let Some(k) = n.strip_prefix("free:") {
                AnyModel::Free(FreeGroup::new(number(k, "rank")?)?)
            } else if let Some(set) = n.strip_prefix("GI:") {
                AnyModel::Twisted(TwistedLamplighter::new(set.parse()?))
            } else if let Some(g) = n.strip_prefix("surface:") {
                AnyModel::Surface(SurfaceGroup::new(number(g, "genus")?)?)
            } else if let Some(set) = n.strip_prefix("ext:twist:") {
                AnyModel::TwistExt(Extension::new_unchecked(TwistCocycle::new(set.parse()?)))
            } else {
                return Err(GroupError::InvalidParam(format!("unknown model `{n}`")));
            }
        }
    })
}
