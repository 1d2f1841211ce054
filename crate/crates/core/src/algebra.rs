//! Finite partially ordered semigroups/monoids with fully tabulated structure.
//!
//! Elements are dense ids `0..n`. The order and multiplication are stored as
//! `n x n` tables; joins, meets, and residuals are optional tables that can be
//! derived from `le`/`mult` when they exist.

use std::fmt;
use thiserror::Error;

/// Element id inside a [`FinitePomonoid`].
pub type Elem = usize;

/// Which structure a table claims to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    /// Ordered semigroup: no designated unit.
    Posemigroup,
    /// Ordered monoid: designated unit element.
    Pomonoid,
    /// Ordered monoid whose order is a join semilattice and whose
    /// multiplication distributes over binary joins on both sides.
    SlMonoid,
}

impl Signature {
    pub fn keyword(self) -> &'static str {
        match self {
            Signature::Posemigroup => "posemigroup",
            Signature::Pomonoid => "pomonoid",
            Signature::SlMonoid => "slmonoid",
        }
    }
}

/// What to demand of an algebra during validation and enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgebraKind {
    pub signature: Signature,
    /// Require both residual tables to exist.
    pub residuated: bool,
    /// Require commutative multiplication.
    pub commutative: bool,
}

impl AlgebraKind {
    pub fn new(signature: Signature) -> Self {
        AlgebraKind { signature, residuated: false, commutative: false }
    }

    pub fn residuated(mut self) -> Self {
        self.residuated = true;
        self
    }

    pub fn commutative(mut self) -> Self {
        self.commutative = true;
        self
    }
}

/// Structural (shape-level) problems that make axiom checking meaningless.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructuralError {
    #[error("table `{table}` has {got} entries, expected {want}")]
    BadTableSize { table: &'static str, got: usize, want: usize },
    #[error("table `{table}` contains element id {id} out of range 0..{n}")]
    ElemOutOfRange { table: &'static str, id: usize, n: usize },
    #[error("carrier must be non-empty")]
    EmptyCarrier,
    #[error("signature `{0}` requires a unit element")]
    MissingUnit(&'static str),
    #[error("signature `posemigroup` must not designate a unit")]
    UnexpectedUnit,
    #[error("signature `slmonoid` requires a join table")]
    MissingJoin,
    #[error("kind requires residual tables that are absent")]
    MissingResiduals,
}

/// One violated axiom together with a witnessing tuple of elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<Elem>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.law, self.witness)
    }
}

/// Outcome of axiom checking: empty means the algebra satisfies the kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, law: &str, witness: &[Elem]) {
        self.violations.push(Violation { law: law.to_string(), witness: witness.to_vec() });
    }
}

/// Errors from operations on otherwise well-formed algebras.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no element x satisfies the constraint {0}")]
    EmptySolutionSet(String),
    #[error("operation requires a unit element")]
    NoUnit,
    #[error("operation requires a join table")]
    NoJoins,
    #[error("enumeration supports at most {max} elements, requested {got}")]
    SizeTooLarge { max: usize, got: usize },
}

/// A finite ordered semigroup/monoid with tabulated structure.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePomonoid {
    pub name: String,
    pub signature: Signature,
    n: usize,
    le: Vec<bool>,
    mult: Vec<Elem>,
    unit: Option<Elem>,
    join: Option<Vec<Elem>>,
    meet: Option<Vec<Elem>>,
    /// `lres[a][c]` = largest x with a·x ≤ c.
    lres: Option<Vec<Elem>>,
    /// `rres[a][c]` = largest x with x·a ≤ c.
    rres: Option<Vec<Elem>>,
}

impl fmt::Debug for FinitePomonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePomonoid({} `{}`, n={})", self.signature.keyword(), self.name, self.n)
    }
}

impl FinitePomonoid {
    /// Build an algebra from raw tables, checking only shape (not axioms).
    pub fn from_tables(
        name: impl Into<String>,
        signature: Signature,
        n: usize,
        le: Vec<bool>,
        mult: Vec<Elem>,
        unit: Option<Elem>,
        join: Option<Vec<Elem>>,
    ) -> Result<Self, StructuralError> {
        if n == 0 {
            return Err(StructuralError::EmptyCarrier);
        }
        let want = n * n;
        if le.len() != want {
            return Err(StructuralError::BadTableSize { table: "le", got: le.len(), want });
        }
        check_elem_table("mult", &mult, n)?;
        if let Some(j) = &join {
            check_elem_table("join", j, n)?;
        }
        match signature {
            Signature::Posemigroup => {
                if unit.is_some() {
                    return Err(StructuralError::UnexpectedUnit);
                }
            }
            Signature::Pomonoid | Signature::SlMonoid => {
                let u = unit.ok_or(StructuralError::MissingUnit(signature.keyword()))?;
                if u >= n {
                    return Err(StructuralError::ElemOutOfRange { table: "unit", id: u, n });
                }
            }
        }
        if signature == Signature::SlMonoid && join.is_none() {
            return Err(StructuralError::MissingJoin);
        }
        Ok(FinitePomonoid {
            name: name.into(),
            signature,
            n,
            le,
            mult,
            unit,
            join,
            meet: None,
            lres: None,
            rres: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.n
    }

    #[inline]
    pub fn le(&self, a: Elem, b: Elem) -> bool {
        self.le[a * self.n + b]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mult[a * self.n + b]
    }

    pub fn unit(&self) -> Option<Elem> {
        self.unit
    }

    pub fn join_table(&self) -> Option<&[Elem]> {
        self.join.as_deref()
    }

    pub fn meet_table(&self) -> Option<&[Elem]> {
        self.meet.as_deref()
    }

    pub fn residual_tables(&self) -> Option<(&[Elem], &[Elem])> {
        match (&self.lres, &self.rres) {
            (Some(l), Some(r)) => Some((l, r)),
            _ => None,
        }
    }

    pub fn join(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.join.as_ref().map(|t| t[a * self.n + b])
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.meet.as_ref().map(|t| t[a * self.n + b])
    }

    /// Largest x with a·x ≤ c, from the stored table.
    pub fn lres(&self, a: Elem, c: Elem) -> Option<Elem> {
        self.lres.as_ref().map(|t| t[a * self.n + c])
    }

    /// Largest x with x·a ≤ c, from the stored table.
    pub fn rres(&self, a: Elem, c: Elem) -> Option<Elem> {
        self.rres.as_ref().map(|t| t[a * self.n + c])
    }

    pub fn product_of(&self, xs: &[Elem]) -> Option<Elem> {
        match xs.split_first() {
            None => self.unit,
            Some((&h, rest)) => Some(rest.iter().fold(h, |acc, &x| self.mul(acc, x))),
        }
    }

    /// Least upper bound of `a` and `b` in the tabulated order, if it exists.
    pub fn lub(&self, a: Elem, b: Elem) -> Option<Elem> {
        let ubs: Vec<Elem> =
            self.elems().filter(|&c| self.le(a, c) && self.le(b, c)).collect();
        ubs.iter().copied().find(|&c| ubs.iter().all(|&d| self.le(c, d)))
    }

    /// Greatest lower bound of `a` and `b` in the tabulated order, if it exists.
    pub fn glb(&self, a: Elem, b: Elem) -> Option<Elem> {
        let lbs: Vec<Elem> =
            self.elems().filter(|&c| self.le(c, a) && self.le(c, b)).collect();
        lbs.iter().copied().find(|&c| lbs.iter().all(|&d| self.le(d, c)))
    }

    /// Derive the join table if every pair has a least upper bound.
    pub fn derive_joins(&self) -> Option<Vec<Elem>> {
        let mut t = Vec::with_capacity(self.n * self.n);
        for a in self.elems() {
            for b in self.elems() {
                t.push(self.lub(a, b)?);
            }
        }
        Some(t)
    }

    /// Derive the meet table if every pair has a greatest lower bound.
    pub fn derive_meets(&self) -> Option<Vec<Elem>> {
        let mut t = Vec::with_capacity(self.n * self.n);
        for a in self.elems() {
            for b in self.elems() {
                t.push(self.glb(a, b)?);
            }
        }
        Some(t)
    }

    /// Derive both residual tables if every solution set has a greatest element.
    pub fn derive_residuals(&self) -> Option<(Vec<Elem>, Vec<Elem>)> {
        let mut l = Vec::with_capacity(self.n * self.n);
        let mut r = Vec::with_capacity(self.n * self.n);
        for a in self.elems() {
            for c in self.elems() {
                l.push(self.greatest(|x| self.le(self.mul(a, x), c))?);
                r.push(self.greatest(|x| self.le(self.mul(x, a), c))?);
            }
        }
        Some((l, r))
    }

    fn greatest(&self, pred: impl Fn(Elem) -> bool) -> Option<Elem> {
        let sols: Vec<Elem> = self.elems().filter(|&x| pred(x)).collect();
        sols.iter().copied().find(|&x| sols.iter().all(|&y| self.le(y, x)))
    }

    /// Attach a join table (derived if not supplied). Fails if some pair has no lub.
    pub fn with_joins(mut self) -> Result<Self, AlgebraError> {
        if self.join.is_none() {
            self.join =
                Some(self.derive_joins().ok_or(AlgebraError::EmptySolutionSet("lub".into()))?);
        }
        Ok(self)
    }

    pub fn with_meets(mut self) -> Result<Self, AlgebraError> {
        if self.meet.is_none() {
            self.meet =
                Some(self.derive_meets().ok_or(AlgebraError::EmptySolutionSet("glb".into()))?);
        }
        Ok(self)
    }

    pub fn with_residuals(mut self) -> Result<Self, AlgebraError> {
        if self.lres.is_none() || self.rres.is_none() {
            let (l, r) = self
                .derive_residuals()
                .ok_or(AlgebraError::EmptySolutionSet("residual".into()))?;
            self.lres = Some(l);
            self.rres = Some(r);
        }
        Ok(self)
    }

    pub(crate) fn set_tables(
        &mut self,
        meet: Option<Vec<Elem>>,
        lres: Option<Vec<Elem>>,
        rres: Option<Vec<Elem>>,
    ) {
        self.meet = meet;
        self.lres = lres;
        self.rres = rres;
    }

    /// Relabel all elements by the permutation `p` (element `a` becomes `p[a]`).
    pub fn relabel(&self, p: &[Elem]) -> Self {
        let n = self.n;
        let perm_bool = |t: &[bool]| {
            let mut out = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    out[p[a] * n + p[b]] = t[a * n + b];
                }
            }
            out
        };
        let perm_elem = |t: &[Elem]| {
            let mut out = vec![0; n * n];
            for a in 0..n {
                for b in 0..n {
                    out[p[a] * n + p[b]] = p[t[a * n + b]];
                }
            }
            out
        };
        FinitePomonoid {
            name: self.name.clone(),
            signature: self.signature,
            n,
            le: perm_bool(&self.le),
            mult: perm_elem(&self.mult),
            unit: self.unit.map(|u| p[u]),
            join: self.join.as_ref().map(|t| perm_elem(t)),
            meet: self.meet.as_ref().map(|t| perm_elem(t)),
            lres: self.lres.as_ref().map(|t| perm_elem(t)),
            rres: self.rres.as_ref().map(|t| perm_elem(t)),
        }
    }

    /// Canonical comparison key: order bits then multiplication entries.
    pub(crate) fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(2 * self.n * self.n);
        key.extend(self.le.iter().map(|&b| b as u8));
        key.extend(self.mult.iter().map(|&e| e as u8));
        key
    }
}

fn check_elem_table(table: &'static str, t: &[Elem], n: usize) -> Result<(), StructuralError> {
    if t.len() != n * n {
        return Err(StructuralError::BadTableSize { table, got: t.len(), want: n * n });
    }
    if let Some(&id) = t.iter().find(|&&id| id >= n) {
        return Err(StructuralError::ElemOutOfRange { table, id, n });
    }
    Ok(())
}

/// Check every axiom demanded by `kind`; structural problems error out first.
pub fn validate(a: &FinitePomonoid, kind: AlgebraKind) -> Result<ValidationReport, StructuralError> {
    match kind.signature {
        Signature::Posemigroup if a.unit.is_some() => return Err(StructuralError::UnexpectedUnit),
        Signature::Pomonoid | Signature::SlMonoid if a.unit.is_none() => {
            return Err(StructuralError::MissingUnit(kind.signature.keyword()))
        }
        _ => {}
    }
    if kind.signature == Signature::SlMonoid && a.join.is_none() {
        return Err(StructuralError::MissingJoin);
    }
    if kind.residuated && (a.lres.is_none() || a.rres.is_none()) {
        return Err(StructuralError::MissingResiduals);
    }

    let mut rep = ValidationReport::default();
    let n = a.n;
    for x in 0..n {
        if !a.le(x, x) {
            rep.push("order.reflexive", &[x]);
        }
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && a.le(x, y) && a.le(y, x) {
                rep.push("order.antisymmetric", &[x, y]);
            }
            for z in 0..n {
                if a.le(x, y) && a.le(y, z) && !a.le(x, z) {
                    rep.push("order.transitive", &[x, y, z]);
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if a.mul(a.mul(x, y), z) != a.mul(x, a.mul(y, z)) {
                    rep.push("mult.associative", &[x, y, z]);
                }
                if a.le(x, y) {
                    if !a.le(a.mul(x, z), a.mul(y, z)) {
                        rep.push("mult.isotone-right", &[x, y, z]);
                    }
                    if !a.le(a.mul(z, x), a.mul(z, y)) {
                        rep.push("mult.isotone-left", &[x, y, z]);
                    }
                }
            }
        }
    }
    if let Some(u) = a.unit {
        for x in 0..n {
            if a.mul(u, x) != x || a.mul(x, u) != x {
                rep.push("mult.unit", &[u, x]);
            }
        }
    }
    if let Some(jt) = &a.join {
        for x in 0..n {
            for y in 0..n {
                let j = jt[x * n + y];
                if !a.le(x, j) || !a.le(y, j) {
                    rep.push("join.upper-bound", &[x, y, j]);
                } else if a.lub(x, y) != Some(j) {
                    rep.push("join.least", &[x, y, j]);
                }
            }
        }
        if kind.signature == Signature::SlMonoid {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let j = jt[x * n + y];
                        let lhs = a.mul(j, z);
                        let rhs = jt[a.mul(x, z) * n + a.mul(y, z)];
                        if lhs != rhs {
                            rep.push("join.mult-distributes-right", &[x, y, z]);
                        }
                        let lhs = a.mul(z, j);
                        let rhs = jt[a.mul(z, x) * n + a.mul(z, y)];
                        if lhs != rhs {
                            rep.push("join.mult-distributes-left", &[x, y, z]);
                        }
                    }
                }
            }
        }
    }
    if let Some(mt) = &a.meet {
        for x in 0..n {
            for y in 0..n {
                let m = mt[x * n + y];
                if a.glb(x, y) != Some(m) {
                    rep.push("meet.greatest-lower-bound", &[x, y, m]);
                }
            }
        }
    }
    if let (Some(lt), Some(rt)) = (&a.lres, &a.rres) {
        for x in 0..n {
            for c in 0..n {
                let l = lt[x * n + c];
                for y in 0..n {
                    if a.le(y, l) != a.le(a.mul(x, y), c) {
                        rep.push("residual.left-adjoint", &[x, y, c]);
                    }
                }
                let r = rt[x * n + c];
                for y in 0..n {
                    if a.le(y, r) != a.le(a.mul(y, x), c) {
                        rep.push("residual.right-adjoint", &[x, y, c]);
                    }
                }
            }
        }
    }
    if kind.commutative {
        for x in 0..n {
            for y in x + 1..n {
                if a.mul(x, y) != a.mul(y, x) {
                    rep.push("mult.commutative", &[x, y]);
                }
            }
        }
    }
    Ok(rep)
}

/// True if the multiplication is commutative.
pub fn is_commutative(a: &FinitePomonoid) -> bool {
    a.elems().all(|x| a.elems().all(|y| a.mul(x, y) == a.mul(y, x)))
}

/// True if some element is simultaneously a two-sided unit and the top element.
pub fn is_integral(a: &FinitePomonoid) -> bool {
    let unit_candidates: Vec<Elem> = match a.unit {
        Some(u) => vec![u],
        None => a
            .elems()
            .filter(|&u| a.elems().all(|x| a.mul(u, x) == x && a.mul(x, u) == x))
            .collect(),
    };
    unit_candidates.iter().any(|&u| a.elems().all(|x| a.le(x, u)))
}

/// a·x ≤ a forces x to act decreasingly everywhere (x ≤ 1 when a unit exists),
/// checked on both sides.
pub fn is_integrally_closed(a: &FinitePomonoid) -> bool {
    if let Some(u) = a.unit {
        a.elems().all(|p| {
            a.elems().all(|x| {
                (!a.le(a.mul(p, x), p) || a.le(x, u)) && (!a.le(a.mul(x, p), p) || a.le(x, u))
            })
        })
    } else {
        a.elems().all(|p| {
            a.elems().all(|x| {
                (!a.le(a.mul(p, x), p) || a.elems().all(|b| a.le(a.mul(x, b), b)))
                    && (!a.le(a.mul(x, p), p) || a.elems().all(|b| a.le(a.mul(b, x), b)))
            })
        })
    }
}

/// Order cancellativity: a·x ≤ b·x implies a ≤ b, and dually on the left.
pub fn is_cancellative(a: &FinitePomonoid) -> bool {
    a.elems().all(|x| {
        a.elems().all(|p| {
            a.elems().all(|q| {
                (!a.le(a.mul(p, x), a.mul(q, x)) || a.le(p, q))
                    && (!a.le(a.mul(x, p), a.mul(x, q)) || a.le(p, q))
            })
        })
    })
}

/// Equational cancellativity: a·x = b·x implies a = b, and dually.
pub fn is_equationally_cancellative(a: &FinitePomonoid) -> bool {
    a.elems().all(|x| {
        a.elems().all(|p| {
            a.elems().all(|q| {
                (a.mul(p, x) != a.mul(q, x) || p == q) && (a.mul(x, p) != a.mul(x, q) || p == q)
            })
        })
    })
}

/// Every pair of elements has a common lower bound.
pub fn is_down_directed(a: &FinitePomonoid) -> bool {
    a.elems().all(|x| a.elems().all(|y| a.elems().any(|c| a.le(c, x) && a.le(c, y))))
}

/// Every constraint a·x ≤ c and x·a ≤ c has at least one solution x.
pub fn is_ideally_residuated(a: &FinitePomonoid) -> bool {
    a.elems().all(|p| {
        a.elems().all(|c| {
            a.elems().any(|x| a.le(a.mul(p, x), c)) && a.elems().any(|x| a.le(a.mul(x, p), c))
        })
    })
}

/// Which side of a residuation/division constraint is solved for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Solve a·x ≤ c for x.
    Left,
    /// Solve x·a ≤ c for x.
    Right,
}

/// Maximal solutions of a·x ≤ c (or x·a ≤ c), as a sorted antichain of elements.
pub fn ideal_residuals(
    a: &FinitePomonoid,
    p: Elem,
    c: Elem,
    side: Side,
) -> Result<Vec<Elem>, AlgebraError> {
    let sols: Vec<Elem> = a
        .elems()
        .filter(|&x| match side {
            Side::Left => a.le(a.mul(p, x), c),
            Side::Right => a.le(a.mul(x, p), c),
        })
        .collect();
    if sols.is_empty() {
        let constraint = match side {
            Side::Left => format!("{p}*x <= {c}"),
            Side::Right => format!("x*{p} <= {c}"),
        };
        return Err(AlgebraError::EmptySolutionSet(constraint));
    }
    // keep x iff no other solution lies strictly above it
    let mut maximal: Vec<Elem> = sols
        .iter()
        .copied()
        .filter(|&x| !sols.iter().any(|&y| y != x && a.le(x, y)))
        .collect();
    maximal.sort_unstable();
    Ok(maximal)
}

/// Search for a structure-preserving bijection; `None` if the algebras differ.
pub fn are_isomorphic(a: &FinitePomonoid, b: &FinitePomonoid) -> Option<Vec<Elem>> {
    if a.n != b.n || a.signature != b.signature {
        return None;
    }
    if a.unit.is_some() != b.unit.is_some() {
        return None;
    }
    let n = a.n;
    let mut perm: Vec<Elem> = (0..n).collect();
    let preserves = |p: &[Elem]| {
        if let (Some(ua), Some(ub)) = (a.unit, b.unit) {
            if p[ua] != ub {
                return false;
            }
        }
        for x in 0..n {
            for y in 0..n {
                if a.le(x, y) != b.le(p[x], p[y]) || p[a.mul(x, y)] != b.mul(p[x], p[y]) {
                    return false;
                }
            }
        }
        true
    };
    // Heap's algorithm over all n! candidate bijections (n <= 6 in practice).
    let mut c = vec![0usize; n];
    if preserves(&perm) {
        return Some(perm);
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if preserves(&perm) {
                return Some(perm);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    None
}
