//! Variable universes: which propositions and which DBM variables a set
//! ranges over.

use std::collections::HashMap;

use crate::model::Ident;

/// Largest number of propositions one universe can hold (cubes are `u128`).
pub const MAX_PROPS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// The zero reference, always index 0.
    Zero,
    /// A real clock: non-negative, advances with time.
    Clock,
    /// A static displacement (`−δ`, `−t`, `−t′`): may be negative, never
    /// advances.
    Displacement,
    /// The `z−δ` clock: advances with time but may be negative.
    AuxClock,
}

impl VarKind {
    /// True for variables whose value grows as time passes.
    pub fn advances(self) -> bool {
        matches!(self, VarKind::Clock | VarKind::AuxClock)
    }
}

pub const ND_NAME: &str = "_nd";
pub const NT_NAME: &str = "_nt";
pub const NTP_NAME: &str = "_ntp";
pub const ZD_NAME: &str = "_zd";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    props: Vec<Ident>,
    vars: Vec<(Ident, VarKind)>,
    prop_index: HashMap<Ident, usize>,
    var_index: HashMap<Ident, usize>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("more than {MAX_PROPS} propositions")]
    TooManyProps,
    #[error("name `{0}` is used twice")]
    Duplicate(Ident),
    #[error("name `{0}` is reserved")]
    Reserved(Ident),
}

impl Universe {
    /// A universe over `props` and the real clocks `clocks`, followed by the
    /// four auxiliary variables.
    pub fn new(props: &[Ident], clocks: &[Ident]) -> Result<Universe, UniverseError> {
        if props.len() > MAX_PROPS {
            return Err(UniverseError::TooManyProps);
        }
        let mut vars = vec![("0".to_string(), VarKind::Zero)];
        vars.extend(clocks.iter().map(|c| (c.clone(), VarKind::Clock)));
        vars.push((ND_NAME.into(), VarKind::Displacement));
        vars.push((NT_NAME.into(), VarKind::Displacement));
        vars.push((NTP_NAME.into(), VarKind::Displacement));
        vars.push((ZD_NAME.into(), VarKind::AuxClock));
        let mut prop_index = HashMap::new();
        let mut var_index = HashMap::new();
        for (i, p) in props.iter().enumerate() {
            if p.starts_with('_') || p == "0" {
                return Err(UniverseError::Reserved(p.clone()));
            }
            if prop_index.insert(p.clone(), i).is_some() {
                return Err(UniverseError::Duplicate(p.clone()));
            }
        }
        for (i, (v, kind)) in vars.iter().enumerate() {
            if *kind == VarKind::Clock && (v.starts_with('_') || v == "0") {
                return Err(UniverseError::Reserved(v.clone()));
            }
            if prop_index.contains_key(v) || var_index.insert(v.clone(), i).is_some() {
                return Err(UniverseError::Duplicate(v.clone()));
            }
        }
        Ok(Universe {
            props: props.to_vec(),
            vars,
            prop_index,
            var_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn props(&self) -> &[Ident] {
        &self.props
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    pub fn prop(&self, name: &str) -> Option<usize> {
        self.prop_index.get(name).copied()
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn kind(&self, i: usize) -> VarKind {
        self.vars[i].1
    }

    pub fn clock_count(&self) -> usize {
        self.dim() - 5
    }

    /// Indices of the real clocks.
    pub fn clocks(&self) -> std::ops::Range<usize> {
        1..self.dim() - 4
    }

    pub fn clock_names(&self) -> impl Iterator<Item = &Ident> {
        self.clocks().map(|i| &self.vars[i].0)
    }

    /// `−δ`.
    pub fn nd(&self) -> usize {
        self.dim() - 4
    }

    /// `−t`.
    pub fn nt(&self) -> usize {
        self.dim() - 3
    }

    /// `−t′`.
    pub fn ntp(&self) -> usize {
        self.dim() - 2
    }

    /// `z−δ`.
    pub fn zd(&self) -> usize {
        self.dim() - 1
    }

    pub fn is_aux(&self, i: usize) -> bool {
        i >= self.nd()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let u = Universe::new(&["a".into()], &["x".into(), "y".into()]).unwrap();
        assert_eq!(u.dim(), 7);
        assert_eq!(u.clocks(), 1..3);
        assert_eq!(u.var("y"), Some(2));
        assert_eq!(u.var_name(u.nd()), "_nd");
        assert_eq!(u.kind(u.zd()), VarKind::AuxClock);
        assert!(u.kind(u.zd()).advances());
        assert!(!u.kind(u.nt()).advances());
    }

    #[test]
    fn rejects_clashes() {
        assert!(Universe::new(&["x".into()], &["x".into()]).is_err());
        assert!(Universe::new(&[], &["_nd".into()]).is_err());
    }
}
