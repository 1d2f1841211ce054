//! Closure and interior operators compatible with multiplication, and the
//! quotient/subalgebra constructions they induce.

use thiserror::Error;

use crate::algebra::{Elem, FinitePomonoid, StructuralError, ValidationReport, Violation};

/// A tabulated unary map on an algebra's carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryMap {
    pub name: String,
    pub map: Vec<Elem>,
}

impl UnaryMap {
    pub fn new(name: impl Into<String>, map: Vec<Elem>) -> Self {
        UnaryMap { name: name.into(), map }
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NucleusError {
    #[error("map table has {got} entries for a carrier of {want}")]
    BadLength { got: usize, want: usize },
    #[error("map sends {id} outside the carrier 0..{n}")]
    OutOfRange { id: Elem, n: usize },
    #[error("map violates the {0} law")]
    LawViolated(&'static str),
}

fn check_shape(a: &FinitePomonoid, g: &UnaryMap) -> Result<(), NucleusError> {
    if g.map.len() != a.n() {
        return Err(NucleusError::BadLength { got: g.map.len(), want: a.n() });
    }
    if let Some(&id) = g.map.iter().find(|&&v| v >= a.n()) {
        return Err(NucleusError::OutOfRange { id, n: a.n() });
    }
    Ok(())
}

/// Check the nucleus laws: monotone, increasing, idempotent, and
/// g(x)·g(y) ≤ g(x·y).
pub fn validate_nucleus(a: &FinitePomonoid, g: &UnaryMap) -> Result<ValidationReport, NucleusError> {
    check_shape(a, g)?;
    let mut rep = ValidationReport::default();
    let mut push = |law: &str, w: &[Elem]| {
        rep.violations.push(Violation { law: law.to_string(), witness: w.to_vec() });
    };
    for x in a.elems() {
        if !a.le(x, g.apply(x)) {
            push("nucleus.increasing", &[x]);
        }
        if g.apply(g.apply(x)) != g.apply(x) {
            push("nucleus.idempotent", &[x]);
        }
        for y in a.elems() {
            if a.le(x, y) && !a.le(g.apply(x), g.apply(y)) {
                push("nucleus.monotone", &[x, y]);
            }
            if !a.le(a.mul(g.apply(x), g.apply(y)), g.apply(a.mul(x, y))) {
                push("nucleus.multiplicative", &[x, y]);
            }
        }
    }
    Ok(rep)
}

/// Check the interior-operator laws: monotone, decreasing, idempotent,
/// s(x)·s(y) ≤ s(x·y), and (on monoids) s(1) = 1.
pub fn validate_conucleus(
    a: &FinitePomonoid,
    s: &UnaryMap,
) -> Result<ValidationReport, NucleusError> {
    check_shape(a, s)?;
    let mut rep = ValidationReport::default();
    let mut push = |law: &str, w: &[Elem]| {
        rep.violations.push(Violation { law: law.to_string(), witness: w.to_vec() });
    };
    for x in a.elems() {
        if !a.le(s.apply(x), x) {
            push("conucleus.decreasing", &[x]);
        }
        if s.apply(s.apply(x)) != s.apply(x) {
            push("conucleus.idempotent", &[x]);
        }
        for y in a.elems() {
            if a.le(x, y) && !a.le(s.apply(x), s.apply(y)) {
                push("conucleus.monotone", &[x, y]);
            }
            if !a.le(a.mul(s.apply(x), s.apply(y)), s.apply(a.mul(x, y))) {
                push("conucleus.multiplicative", &[x, y]);
            }
        }
    }
    // unit preservation is part of the monoidal definition; posemigroups skip it
    if let Some(u) = a.unit() {
        if s.apply(u) != u {
            push("conucleus.unit", &[u]);
        }
    }
    Ok(rep)
}

/// Does the closure operator fix the unit? `None` when no unit is designated.
pub fn is_unital(a: &FinitePomonoid, g: &UnaryMap) -> Option<bool> {
    a.unit().map(|u| g.apply(u) == u)
}

/// All nuclei on `a`, enumerated through their sets of closed elements.
///
/// A candidate subset C induces a closure operator iff every element has a
/// least element of C above it; the induced map is then filtered through the
/// multiplicativity law.
pub fn enumerate_nuclei(a: &FinitePomonoid) -> Vec<UnaryMap> {
    let n = a.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let closed: Vec<Elem> = (0..n).filter(|&x| mask & (1 << x) != 0).collect();
        let Some(map) = closure_map(a, &closed) else { continue };
        let g = UnaryMap::new(format!("c{}", set_label(&closed)), map);
        if validate_nucleus(a, &g).map(|r| r.ok()).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}

/// All conuclei on `a`, enumerated through their sets of open elements.
pub fn enumerate_conuclei(a: &FinitePomonoid) -> Vec<UnaryMap> {
    let n = a.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let open: Vec<Elem> = (0..n).filter(|&x| mask & (1 << x) != 0).collect();
        let Some(map) = interior_map(a, &open) else { continue };
        let s = UnaryMap::new(format!("o{}", set_label(&open)), map);
        if validate_conucleus(a, &s).map(|r| r.ok()).unwrap_or(false) {
            out.push(s);
        }
    }
    out
}

fn set_label(xs: &[Elem]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("")
}

fn closure_map(a: &FinitePomonoid, closed: &[Elem]) -> Option<Vec<Elem>> {
    let mut map = Vec::with_capacity(a.n());
    for x in a.elems() {
        let above: Vec<Elem> = closed.iter().copied().filter(|&c| a.le(x, c)).collect();
        let least = above.iter().copied().find(|&c| above.iter().all(|&d| a.le(c, d)))?;
        map.push(least);
    }
    Some(map)
}

fn interior_map(a: &FinitePomonoid, open: &[Elem]) -> Option<Vec<Elem>> {
    let mut map = Vec::with_capacity(a.n());
    for x in a.elems() {
        let below: Vec<Elem> = open.iter().copied().filter(|&o| a.le(o, x)).collect();
        let greatest = below.iter().copied().find(|&o| below.iter().all(|&p| a.le(p, o)))?;
        map.push(greatest);
    }
    Some(map)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("map is not a valid nucleus/conucleus: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Structural(#[from] StructuralError),
}

/// The quotient algebra on closed elements: product of x and y is g(x·y),
/// unit is g(1), join (when present) is g(x∨y); meets and residuals restrict.
pub fn nuclear_image(a: &FinitePomonoid, g: &UnaryMap) -> Result<FinitePomonoid, ImageError> {
    let rep = validate_nucleus(a, g).map_err(|e| ImageError::InvalidMap(e.to_string()))?;
    if !rep.ok() {
        return Err(ImageError::InvalidMap(rep.violations[0].to_string()));
    }
    let closed: Vec<Elem> = a.elems().filter(|&x| g.apply(x) == x).collect();
    let index = |x: Elem| closed.iter().position(|&c| c == x).expect("image element is closed");
    let m = closed.len();
    let mut le = vec![false; m * m];
    let mut mult = vec![0; m * m];
    for (i, &x) in closed.iter().enumerate() {
        for (j, &y) in closed.iter().enumerate() {
            le[i * m + j] = a.le(x, y);
            mult[i * m + j] = index(g.apply(a.mul(x, y)));
        }
    }
    let unit = a.unit().map(|u| index(g.apply(u)));
    let join = a.join_table().map(|_| {
        let mut t = vec![0; m * m];
        for (i, &x) in closed.iter().enumerate() {
            for (j, &y) in closed.iter().enumerate() {
                t[i * m + j] = index(g.apply(a.join(x, y).unwrap()));
            }
        }
        t
    });
    let mut out = FinitePomonoid::from_tables(
        format!("{}/{}", a.name, g.name),
        a.signature,
        m,
        le,
        mult,
        unit,
        join,
    )?;
    // meets and residuals of closed elements stay closed, so the tables restrict
    let meet = a.meet_table().map(|_| {
        restrict_table(&closed, |x, y| a.meet(x, y).unwrap(), index)
    });
    let res = a.residual_tables().map(|_| {
        (
            restrict_table(&closed, |x, y| a.lres(x, y).unwrap(), index),
            restrict_table(&closed, |x, y| a.rres(x, y).unwrap(), index),
        )
    });
    let (lres, rres) = match res {
        Some((l, r)) => (Some(l), Some(r)),
        None => (None, None),
    };
    out.set_tables(meet, lres, rres);
    Ok(out)
}

/// The subalgebra on open elements: order and product restrict, the unit stays,
/// meets (when present) become s(x∧y), residuals s(x\y).
pub fn conuclear_image(a: &FinitePomonoid, s: &UnaryMap) -> Result<FinitePomonoid, ImageError> {
    let rep = validate_conucleus(a, s).map_err(|e| ImageError::InvalidMap(e.to_string()))?;
    if !rep.ok() {
        return Err(ImageError::InvalidMap(rep.violations[0].to_string()));
    }
    let open: Vec<Elem> = a.elems().filter(|&x| s.apply(x) == x).collect();
    let index = |x: Elem| open.iter().position(|&o| o == x).expect("image element is open");
    let m = open.len();
    let mut le = vec![false; m * m];
    let mut mult = vec![0; m * m];
    for (i, &x) in open.iter().enumerate() {
        for (j, &y) in open.iter().enumerate() {
            le[i * m + j] = a.le(x, y);
            mult[i * m + j] = index(a.mul(x, y));
        }
    }
    let unit = a.unit().map(index);
    let join = a.join_table().map(|_| restrict_table(&open, |x, y| a.join(x, y).unwrap(), index));
    let mut out = FinitePomonoid::from_tables(
        format!("{}\\{}", a.name, s.name),
        a.signature,
        m,
        le,
        mult,
        unit,
        join,
    )?;
    let meet =
        a.meet_table().map(|_| restrict_table(&open, |x, y| s.apply(a.meet(x, y).unwrap()), index));
    let res = a.residual_tables().map(|_| {
        (
            restrict_table(&open, |x, y| s.apply(a.lres(x, y).unwrap()), index),
            restrict_table(&open, |x, y| s.apply(a.rres(x, y).unwrap()), index),
        )
    });
    let (lres, rres) = match res {
        Some((l, r)) => (Some(l), Some(r)),
        None => (None, None),
    };
    out.set_tables(meet, lres, rres);
    Ok(out)
}

fn restrict_table(
    carrier: &[Elem],
    f: impl Fn(Elem, Elem) -> Elem,
    index: impl Fn(Elem) -> usize,
) -> Vec<Elem> {
    let m = carrier.len();
    let mut t = vec![0; m * m];
    for (i, &x) in carrier.iter().enumerate() {
        for (j, &y) in carrier.iter().enumerate() {
            t[i * m + j] = index(f(x, y));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate, AlgebraKind, Signature};

    fn chain(n: usize) -> FinitePomonoid {
        let mut le = vec![false; n * n];
        let mut mult = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                le[x * n + y] = x <= y;
                mult[x * n + y] = x.min(y);
            }
        }
        FinitePomonoid::from_tables(
            format!("chain{n}"),
            Signature::Pomonoid,
            n,
            le,
            mult,
            Some(n - 1),
            None,
        )
        .unwrap()
    }

    #[test]
    fn identity_and_constant_top_are_nuclei_on_chains() {
        let a = chain(3);
        let id = UnaryMap::new("id", vec![0, 1, 2]);
        assert!(validate_nucleus(&a, &id).unwrap().ok());
        assert_eq!(is_unital(&a, &id), Some(true));
        let top = UnaryMap::new("top", vec![2, 2, 2]);
        assert!(validate_nucleus(&a, &top).unwrap().ok());
        assert_eq!(is_unital(&a, &top), Some(true));
        // collapsing the middle: closed set {0,2}
        let mid = UnaryMap::new("c02", vec![0, 2, 2]);
        assert!(validate_nucleus(&a, &mid).unwrap().ok());
        let img = nuclear_image(&a, &mid).unwrap();
        assert_eq!(img.n(), 2);
        assert!(validate(&img, AlgebraKind::new(Signature::Pomonoid)).unwrap().ok());
    }

    #[test]
    fn non_monotone_map_is_rejected() {
        let a = chain(2);
        let g = UnaryMap::new("bad", vec![1, 0]);
        let rep = validate_nucleus(&a, &g).unwrap();
        assert!(rep.violations.iter().any(|v| v.law == "nucleus.increasing"));
    }

    /// Oracle: nuclei by filtering every map through the law checker directly.
    fn all_maps_oracle(a: &FinitePomonoid) -> Vec<Vec<Elem>> {
        let n = a.n();
        let mut out = Vec::new();
        for code in 0..(n as u32).pow(n as u32) {
            let mut c = code;
            let mut map = vec![0; n];
            for cell in map.iter_mut() {
                *cell = (c % n as u32) as Elem;
                c /= n as u32;
            }
            let g = UnaryMap::new("", map.clone());
            if validate_nucleus(a, &g).map(|r| r.ok()).unwrap_or(false) {
                out.push(map);
            }
        }
        out
    }

    #[test]
    fn closure_system_enumeration_matches_all_maps_oracle() {
        use crate::enumerate::enumerate_algebras;
        let cat = enumerate_algebras(3, AlgebraKind::new(Signature::Pomonoid)).unwrap();
        for a in &cat {
            let mut fast: Vec<Vec<Elem>> =
                enumerate_nuclei(a).into_iter().map(|g| g.map).collect();
            let mut slow = all_maps_oracle(a);
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "nucleus sets differ on {a:?}");
        }
    }

    #[test]
    fn conucleus_meet_with_unit_gives_negative_cone() {
        // chain 0 < 1 < 2 with unit 1 in the middle, product = truncated addition
        // around the unit is awkward; instead use min-mult with unit at top and
        // s(x) = x (identity) plus s = const-bottom-below-unit style maps.
        let a = chain(3);
        let s = UnaryMap::new("id", vec![0, 1, 2]);
        assert!(validate_conucleus(&a, &s).unwrap().ok());
        // opens {0,2}: 1 maps to greatest open below it = 0
        let s = UnaryMap::new("o02", vec![0, 0, 2]);
        assert!(validate_conucleus(&a, &s).unwrap().ok());
        let img = conuclear_image(&a, &s).unwrap();
        assert_eq!(img.n(), 2);
        assert!(validate(&img, AlgebraKind::new(Signature::Pomonoid)).unwrap().ok());
        // dropping the unit from the open set must fail the unit law
        let s = UnaryMap::new("o0", vec![0, 0, 0]);
        let rep = validate_conucleus(&a, &s).unwrap();
        assert!(rep.violations.iter().any(|v| v.law == "conucleus.unit"));
    }

    #[test]
    fn conuclei_enumeration_respects_unit_law() {
        let a = chain(3);
        for s in enumerate_conuclei(&a) {
            assert_eq!(s.apply(2), 2, "unit must stay open in {}", s.name);
        }
    }
}
