//! Algebras of non-empty finitely generated downsets, represented by the
//! antichains of their maximal generators.
//!
//! Two carriers are supported: a finite ordered monoid (every operation is
//! exact), and a budget-bounded fragment of canonical words over the unital
//! variant. For word carriers the meet and residual enumerations use length
//! bounds that are provably complete: any common lower bound (or any solution
//! of a division constraint) is dominated by the word of its block
//! evaluations, which is short.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    ideal_residuals, is_down_directed, Elem, FinitePomonoid, Side, Signature,
};
use crate::nucleus::UnaryMap;
use crate::word::{FreePreimage, Word, WordStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    #[error("length budget {budget} exceeded: {detail} needs {needed}")]
    BudgetExceeded { budget: usize, needed: usize, detail: String },
    #[error("word-carrier meets require a down-directed base")]
    NotDownDirected,
    #[error("no solution for {0}: the carrier is not ideally residuated here")]
    NotIdeallyResiduated(String),
    #[error("the meet is empty; downsets must be non-empty")]
    EmptyMeet,
    #[error("carrier has no unit")]
    NoUnit,
    #[error("no join of closures for {0}")]
    NoClosureJoin(String),
    #[error("word carriers use the unital variant only")]
    UnsupportedVariant,
}

/// What the downset algebra needs from its points. Points are canonical
/// representatives, so `le` is a partial order on them.
pub trait IdCarrier {
    type Point: Clone + Ord + fmt::Display;

    fn le(&self, a: &Self::Point, b: &Self::Point) -> bool;
    /// Canonical product; word carriers fail when the result leaves the budget.
    fn mul(&self, a: &Self::Point, b: &Self::Point) -> Result<Self::Point, IdError>;
    fn unit(&self) -> Option<Self::Point>;
    /// Maximal common lower bounds of a pair; empty when none exist.
    fn meet_candidates(
        &self,
        a: &Self::Point,
        b: &Self::Point,
    ) -> Result<Vec<Self::Point>, IdError>;
    /// Maximal solutions x of a·x ≤ c (`Left`) or x·a ≤ c (`Right`); empty
    /// when the constraint has no solutions.
    fn residual_solutions(&self, a: &Self::Point, c: &Self::Point, side: Side)
        -> Vec<Self::Point>;
    /// The closure of a point under the carrier's nucleus (identity if none).
    fn closure(&self, a: &Self::Point) -> Self::Point;
    /// Join of the closures of two points inside the image of the nucleus.
    fn closure_join(&self, a: &Self::Point, b: &Self::Point)
        -> Result<Self::Point, IdError>;
}

/// A non-empty downset, stored as the sorted antichain of its maximal
/// generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain<P>(Vec<P>);

impl<P: Clone + Ord> Antichain<P> {
    pub fn principal(p: P) -> Self {
        Antichain(vec![p])
    }

    pub fn gens(&self) -> &[P] {
        &self.0
    }

    /// Drop duplicates and dominated generators; `None` on empty input.
    pub fn normalize<C>(carrier: &C, points: Vec<P>) -> Option<Self>
    where
        C: IdCarrier<Point = P>,
    {
        let kept = maximal_points(carrier, points);
        if kept.is_empty() {
            None
        } else {
            Some(Antichain(kept))
        }
    }
}

impl<P: fmt::Display> fmt::Display for Antichain<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl<P: fmt::Debug> fmt::Debug for Antichain<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g:?}")?;
        }
        write!(f, "}}")
    }
}

/// Principal downset of a single point.
pub fn down<P: Clone + Ord>(p: P) -> Antichain<P> {
    Antichain::principal(p)
}

/// Sorted maximal elements of a point list (strict domination only, so
/// accidental preorder cycles never delete both endpoints).
fn maximal_points<C: IdCarrier>(carrier: &C, mut points: Vec<C::Point>) -> Vec<C::Point> {
    points.sort();
    points.dedup();
    points
        .iter()
        .filter(|p| {
            !points.iter().any(|q| *q != **p && carrier.le(p, q) && !carrier.le(q, p))
        })
        .cloned()
        .collect()
}

/// Downset containment: every generator of `x` lies below a generator of `y`.
pub fn ac_le<C: IdCarrier>(c: &C, x: &Antichain<C::Point>, y: &Antichain<C::Point>) -> bool {
    x.gens().iter().all(|g| point_in(c, g, y))
}

/// Membership of a point in the downset generated by `y`.
pub fn point_in<C: IdCarrier>(c: &C, p: &C::Point, y: &Antichain<C::Point>) -> bool {
    y.gens().iter().any(|g| c.le(p, g))
}

pub fn ac_join<C: IdCarrier>(
    c: &C,
    x: &Antichain<C::Point>,
    y: &Antichain<C::Point>,
) -> Antichain<C::Point> {
    let mut pts = x.gens().to_vec();
    pts.extend_from_slice(y.gens());
    Antichain::normalize(c, pts).expect("join of non-empty downsets is non-empty")
}

pub fn ac_mult<C: IdCarrier>(
    c: &C,
    x: &Antichain<C::Point>,
    y: &Antichain<C::Point>,
) -> Result<Antichain<C::Point>, IdError> {
    let mut pts = Vec::with_capacity(x.gens().len() * y.gens().len());
    for a in x.gens() {
        for b in y.gens() {
            pts.push(c.mul(a, b)?);
        }
    }
    Ok(Antichain::normalize(c, pts).expect("product of non-empty downsets is non-empty"))
}

pub fn ac_unit<C: IdCarrier>(c: &C) -> Result<Antichain<C::Point>, IdError> {
    c.unit().map(Antichain::principal).ok_or(IdError::NoUnit)
}

/// Intersection of downsets, when non-empty.
pub fn ac_meet<C: IdCarrier>(
    c: &C,
    x: &Antichain<C::Point>,
    y: &Antichain<C::Point>,
) -> Result<Antichain<C::Point>, IdError> {
    let mut pts = Vec::new();
    for a in x.gens() {
        for b in y.gens() {
            pts.extend(c.meet_candidates(a, b)?);
        }
    }
    Antichain::normalize(c, pts).ok_or(IdError::EmptyMeet)
}

/// The closure of a downset: the principal downset of the image-join of the
/// closed generators.
pub fn gamma_id<C: IdCarrier>(
    c: &C,
    x: &Antichain<C::Point>,
) -> Result<Antichain<C::Point>, IdError> {
    let mut acc = c.closure(&x.gens()[0]);
    for g in &x.gens()[1..] {
        acc = c.closure_join(&acc, g)?;
    }
    Ok(Antichain::principal(acc))
}

/// The residual X\Y (side `Left`: largest W with X∗W ≤ Y) or Y/X (`Right`).
/// Computed generator-wise and folded through meets.
pub fn ac_residual<C: IdCarrier>(
    c: &C,
    x: &Antichain<C::Point>,
    y: &Antichain<C::Point>,
    side: Side,
) -> Result<Antichain<C::Point>, IdError> {
    let mut acc: Option<Antichain<C::Point>> = None;
    for a in x.gens() {
        let mut sols = Vec::new();
        for t in y.gens() {
            sols.extend(c.residual_solutions(a, t, side));
        }
        let part = Antichain::normalize(c, sols)
            .ok_or_else(|| IdError::NotIdeallyResiduated(format!("{a} into {y}")))?;
        acc = Some(match acc {
            None => part,
            Some(prev) => ac_meet(c, &prev, &part)?,
        });
    }
    acc.ok_or(IdError::EmptyMeet)
}

/// Finite ordered monoid as a carrier; the optional nucleus drives `closure`.
pub struct FiniteCarrier<'a> {
    alg: &'a FinitePomonoid,
    nucleus: Option<&'a UnaryMap>,
}

impl<'a> FiniteCarrier<'a> {
    pub fn new(alg: &'a FinitePomonoid) -> Self {
        FiniteCarrier { alg, nucleus: None }
    }

    pub fn with_nucleus(alg: &'a FinitePomonoid, nucleus: &'a UnaryMap) -> Self {
        FiniteCarrier { alg, nucleus: Some(nucleus) }
    }

    pub fn alg(&self) -> &'a FinitePomonoid {
        self.alg
    }
}

impl IdCarrier for FiniteCarrier<'_> {
    type Point = Elem;

    fn le(&self, a: &Elem, b: &Elem) -> bool {
        self.alg.le(*a, *b)
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem, IdError> {
        Ok(self.alg.mul(*a, *b))
    }

    fn unit(&self) -> Option<Elem> {
        self.alg.unit()
    }

    fn meet_candidates(&self, a: &Elem, b: &Elem) -> Result<Vec<Elem>, IdError> {
        let below: Vec<Elem> = self
            .alg
            .elems()
            .filter(|&z| self.alg.le(z, *a) && self.alg.le(z, *b))
            .collect();
        Ok(below
            .iter()
            .copied()
            .filter(|&z| !below.iter().any(|&w| w != z && self.alg.le(z, w)))
            .collect())
    }

    fn residual_solutions(&self, a: &Elem, c: &Elem, side: Side) -> Vec<Elem> {
        ideal_residuals(self.alg, *a, *c, side).unwrap_or_default()
    }

    fn closure(&self, a: &Elem) -> Elem {
        match self.nucleus {
            Some(g) => g.apply(*a),
            None => *a,
        }
    }

    fn closure_join(&self, a: &Elem, b: &Elem) -> Result<Elem, IdError> {
        let ca = self.closure(a);
        let cb = self.closure(b);
        let closed: Vec<Elem> = self.alg.elems().filter(|&z| self.closure(&z) == z).collect();
        let ubs: Vec<Elem> = closed
            .iter()
            .copied()
            .filter(|&z| self.alg.le(ca, z) && self.alg.le(cb, z))
            .collect();
        let least = ubs
            .iter()
            .copied()
            .find(|&z| ubs.iter().all(|&w| self.alg.le(z, w)));
        least.ok_or_else(|| IdError::NoClosureJoin(format!("{ca} with {cb}")))
    }
}

/// Canonical words under the unital variant, with a hard length budget.
pub struct WordCarrier<'a, 'b> {
    pre: &'b FreePreimage<'a>,
    budget: usize,
    down_directed: bool,
}

impl<'a, 'b> WordCarrier<'a, 'b> {
    pub fn new(pre: &'b FreePreimage<'a>, budget: usize) -> Result<Self, IdError> {
        if pre.variant().structure != WordStructure::UnitalMonoid {
            return Err(IdError::UnsupportedVariant);
        }
        Ok(WordCarrier { pre, budget, down_directed: is_down_directed(pre.base()) })
    }

    pub fn pre(&self) -> &'b FreePreimage<'a> {
        self.pre
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Complete candidate length for common lower bounds of words of lengths
    /// m and k: a common refinement of the two block decompositions has at
    /// most m+k-1 segments (m·k cells in the multiset case), and replacing
    /// each segment by its evaluation dominates the original bound.
    fn meet_bound(&self, m: usize, k: usize) -> usize {
        if m == 0 || k == 0 {
            0
        } else if self.pre.variant().commutative {
            m * k
        } else {
            m + k - 1
        }
    }

    fn canonical_candidates(&self, max_len: usize) -> Vec<Word> {
        self.pre
            .canonical_words_up_to(max_len)
            .expect("candidate enumeration over a valid base")
    }
}

impl IdCarrier for WordCarrier<'_, '_> {
    type Point = Word;

    fn le(&self, a: &Word, b: &Word) -> bool {
        self.pre.le_unchecked(a, b)
    }

    fn mul(&self, a: &Word, b: &Word) -> Result<Word, IdError> {
        let prod = self
            .pre
            .canonical_form(&a.concat(b))
            .expect("product of valid words is valid");
        if prod.len() > self.budget {
            return Err(IdError::BudgetExceeded {
                budget: self.budget,
                needed: prod.len(),
                detail: format!("{a}*{b}"),
            });
        }
        Ok(prod)
    }

    fn unit(&self) -> Option<Word> {
        self.pre.unit_word().ok()
    }

    fn meet_candidates(&self, a: &Word, b: &Word) -> Result<Vec<Word>, IdError> {
        if !self.down_directed {
            return Err(IdError::NotDownDirected);
        }
        let bound = self.meet_bound(a.len(), b.len());
        if bound > self.budget {
            return Err(IdError::BudgetExceeded {
                budget: self.budget,
                needed: bound,
                detail: format!("meet of {a} and {b}"),
            });
        }
        let sols: Vec<Word> = self
            .canonical_candidates(bound)
            .into_iter()
            .filter(|w| self.pre.le_unchecked(w, a) && self.pre.le_unchecked(w, b))
            .collect();
        Ok(maximal_points(self, sols))
    }

    fn residual_solutions(&self, a: &Word, c: &Word, side: Side) -> Vec<Word> {
        // any solution is dominated by the word of its per-block evaluations,
        // which has at most |c| letters
        let sols: Vec<Word> = self
            .canonical_candidates(c.len())
            .into_iter()
            .filter(|x| {
                let prod = match side {
                    Side::Left => a.concat(x),
                    Side::Right => x.concat(a),
                };
                self.pre.le_unchecked(&prod, c)
            })
            .collect();
        maximal_points(self, sols)
    }

    fn closure(&self, a: &Word) -> Word {
        self.pre.nucleus_map(a).expect("closure of a valid word")
    }

    fn closure_join(&self, a: &Word, b: &Word) -> Result<Word, IdError> {
        let ca = self.pre.eval(a).expect("valid word");
        let cb = self.pre.eval(b).expect("valid word");
        match self.pre.base().lub(ca, cb) {
            Some(j) => Ok(Word::singleton(j)),
            None => Err(IdError::NoClosureJoin(format!("[{ca}] with [{cb}]"))),
        }
    }
}

/// All non-empty antichains of the algebra's order, sorted.
pub fn enumerate_antichains(alg: &FinitePomonoid) -> Vec<Antichain<Elem>> {
    let n = alg.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<Elem> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let ok = members.iter().all(|&a| {
            members.iter().all(|&b| a == b || !(alg.le(a, b) || alg.le(b, a)))
        });
        if ok {
            out.push(Antichain(members));
        }
    }
    out.sort();
    out
}

/// Materialize the downset algebra of a finite carrier as tables. Returns the
/// algebra together with the antichain carried by each element id.
pub fn id_algebra(alg: &FinitePomonoid) -> (FinitePomonoid, Vec<Antichain<Elem>>) {
    let carrier = FiniteCarrier::new(alg);
    let chains = enumerate_antichains(alg);
    let k = chains.len();
    let index = |x: &Antichain<Elem>| chains.binary_search(x).expect("closed under ops");
    let mut le = vec![false; k * k];
    let mut mult = vec![0; k * k];
    let mut join = vec![0; k * k];
    for (i, x) in chains.iter().enumerate() {
        for (j, y) in chains.iter().enumerate() {
            le[i * k + j] = ac_le(&carrier, x, y);
            mult[i * k + j] =
                index(&ac_mult(&carrier, x, y).expect("finite carrier has no budget"));
            join[i * k + j] = index(&ac_join(&carrier, x, y));
        }
    }
    let (signature, unit) = match alg.unit() {
        Some(u) => (
            Signature::SlMonoid,
            Some(index(&Antichain::principal(u))),
        ),
        None => (Signature::Posemigroup, None),
    };
    let built = FinitePomonoid::from_tables(
        format!("id_{}", alg.name),
        signature,
        k,
        le,
        mult,
        unit,
        Some(join),
    )
    .expect("downset tables are well-formed");
    (built, chains)
}

/// A failed distributivity instance: `a` is under `b ∨ c` but admits no
/// generator split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributivityWitness<P> {
    pub a: Antichain<P>,
    pub b: Antichain<P>,
    pub c: Antichain<P>,
}

/// Check the three-case distributive-semilattice law over a pool: whenever
/// a ≤ b∨c, either a ≤ b, or a ≤ c, or a splits as b'∨c' with b' ≤ b and
/// c' ≤ c. The split is built by restricting a's generators.
pub fn check_distributive_semilattice<C: IdCarrier>(
    carrier: &C,
    pool: &[Antichain<C::Point>],
) -> Option<DistributivityWitness<C::Point>> {
    check_distributive_semilattice_with(carrier, pool, |x, y| ac_le(carrier, x, y))
}

pub(crate) fn check_distributive_semilattice_with<C: IdCarrier>(
    carrier: &C,
    pool: &[Antichain<C::Point>],
    le: impl Fn(&Antichain<C::Point>, &Antichain<C::Point>) -> bool,
) -> Option<DistributivityWitness<C::Point>> {
    for a in pool {
        for b in pool {
            for c in pool {
                let bc = ac_join(carrier, b, c);
                if !le(a, &bc) || le(a, b) || le(a, c) {
                    continue;
                }
                let in_b: Vec<C::Point> =
                    a.gens().iter().filter(|g| point_in(carrier, g, b)).cloned().collect();
                let in_c: Vec<C::Point> =
                    a.gens().iter().filter(|g| point_in(carrier, g, c)).cloned().collect();
                let split_ok = match (
                    Antichain::normalize(carrier, in_b),
                    Antichain::normalize(carrier, in_c),
                ) {
                    (Some(bp), Some(cp)) => ac_join(carrier, &bp, &cp) == *a,
                    _ => false,
                };
                if !split_ok {
                    return Some(DistributivityWitness {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                    });
                }
            }
        }
    }
    None
}

/// A violated meet-distribution instance over a word carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetDistributionWitness {
    pub x: Antichain<Word>,
    pub y: Antichain<Word>,
    pub z: Antichain<Word>,
    /// `Left` for x(y∧z) vs xy∧xz, `Right` for the mirrored law.
    pub side: Side,
    /// A word in one side's downset but not the other's.
    pub witness: Word,
}

/// All antichains with up to `max_gens` generators drawn from the canonical
/// words of length ≤ `max_len`.
pub fn antichain_pool(
    carrier: &WordCarrier<'_, '_>,
    max_len: usize,
    max_gens: usize,
) -> Vec<Antichain<Word>> {
    let words = carrier.canonical_candidates(max_len);
    let mut pool = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        carrier: &WordCarrier<'_, '_>,
        words: &[Word],
        start: usize,
        max_gens: usize,
        pick: &mut Vec<Word>,
        pool: &mut Vec<Antichain<Word>>,
    ) {
        if !pick.is_empty() {
            pool.push(Antichain(pick.clone()));
        }
        if pick.len() == max_gens {
            return;
        }
        for i in start..words.len() {
            let w = &words[i];
            if pick
                .iter()
                .any(|g| carrier.le(g, w) || carrier.le(w, g))
            {
                continue;
            }
            pick.push(w.clone());
            rec(carrier, words, i + 1, max_gens, pick, pool);
            pick.pop();
        }
    }
    rec(carrier, &words, 0, max_gens, &mut pick, &mut pool);
    pool.sort();
    pool
}

/// Test x(y∧z) = xy∧xz and (y∧z)x = yx∧zx over all antichains with at most
/// two generators of length ≤ l/2. Sized for integral, down-directed bases:
/// every enumeration bound used is complete, so a `None` is exhaustive at the
/// stated scale.
pub fn check_meet_distribution(
    pre: &FreePreimage<'_>,
    l: usize,
) -> Result<Option<MeetDistributionWitness>, IdError> {
    let gen_len = l / 2;
    // products reach 2·gen_len letters; meets of products need the pairwise
    // candidate bound on top of that
    let budget = {
        let prod = 2 * gen_len;
        if pre.variant().commutative {
            (prod * prod).max(prod)
        } else {
            (2 * prod).max(1) - 1
        }
    };
    let carrier = WordCarrier::new(pre, budget)?;
    let pool = antichain_pool(&carrier, gen_len, 2);
    if pool.is_empty() {
        return Ok(None);
    }
    let k = pool.len();
    // pairwise products and meets are shared across triples
    let mut prod = HashMap::new();
    let mut meet = HashMap::new();
    for i in 0..k {
        for j in 0..k {
            prod.insert((i, j), ac_mult(&carrier, &pool[i], &pool[j])?);
            meet.insert((i, j), ac_meet(&carrier, &pool[i], &pool[j])?);
        }
    }
    let candidates = carrier.canonical_candidates(budget);
    for xi in 0..k {
        for yi in 0..k {
            for zi in 0..k {
                for side in [Side::Left, Side::Right] {
                    let m_yz = &meet[&(yi, zi)];
                    let (lhs, rhs1, rhs2) = match side {
                        Side::Left => (
                            ac_mult(&carrier, &pool[xi], m_yz)?,
                            &prod[&(xi, yi)],
                            &prod[&(xi, zi)],
                        ),
                        Side::Right => (
                            ac_mult(&carrier, m_yz, &pool[xi])?,
                            &prod[&(yi, xi)],
                            &prod[&(zi, xi)],
                        ),
                    };
                    let fail = |w: &Word| MeetDistributionWitness {
                        x: pool[xi].clone(),
                        y: pool[yi].clone(),
                        z: pool[zi].clone(),
                        side,
                        witness: w.clone(),
                    };
                    for g in lhs.gens() {
                        if !point_in(&carrier, g, rhs1) || !point_in(&carrier, g, rhs2) {
                            return Ok(Some(fail(g)));
                        }
                    }
                    let bound = rhs1
                        .gens()
                        .iter()
                        .flat_map(|p| {
                            rhs2.gens().iter().map(|q| carrier.meet_bound(p.len(), q.len()))
                        })
                        .max()
                        .unwrap_or(0);
                    for w in &candidates {
                        if w.len() > bound {
                            continue;
                        }
                        if point_in(&carrier, w, rhs1)
                            && point_in(&carrier, w, rhs2)
                            && !point_in(&carrier, w, &lhs)
                        {
                            return Ok(Some(fail(w)));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A cancellation failure in the downset algebra over a word fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdCancellationWitness {
    pub a: Antichain<Word>,
    pub b: Antichain<Word>,
    pub x: Antichain<Word>,
    pub side: Side,
}

/// Search A∗X ≤ B∗X ⟹ A ≤ B (and the left-multiplied dual) over antichains
/// with at most `max_gens` generators of length ≤ `gen_len`.
pub fn check_id_fragment_cancellativity(
    pre: &FreePreimage<'_>,
    gen_len: usize,
    max_gens: usize,
) -> Result<Option<IdCancellationWitness>, IdError> {
    let carrier = WordCarrier::new(pre, 2 * gen_len)?;
    let pool = antichain_pool(&carrier, gen_len, max_gens);
    let k = pool.len();
    let mut prod = vec![Vec::with_capacity(k); k];
    for i in 0..k {
        for j in 0..k {
            prod[i].push(ac_mult(&carrier, &pool[i], &pool[j])?);
        }
    }
    for a in 0..k {
        for b in 0..k {
            if ac_le(&carrier, &pool[a], &pool[b]) {
                continue;
            }
            for x in 0..k {
                if ac_le(&carrier, &prod[a][x], &prod[b][x]) {
                    return Ok(Some(IdCancellationWitness {
                        a: pool[a].clone(),
                        b: pool[b].clone(),
                        x: pool[x].clone(),
                        side: Side::Right,
                    }));
                }
                if ac_le(&carrier, &prod[x][a], &prod[x][b]) {
                    return Ok(Some(IdCancellationWitness {
                        a: pool[a].clone(),
                        b: pool[b].clone(),
                        x: pool[x].clone(),
                        side: Side::Left,
                    }));
                }
            }
        }
    }
    Ok(None)
}
