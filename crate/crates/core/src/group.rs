//! Signed words over a base monoid and the rewrite system that presents the
//! enveloping group-like quotient: six context rules whose side conditions
//! delegate to the word preorder, replayable proof certificates, bounded
//! proof search in normal rule order, conservativity over positive words,
//! and the maximal-positive-approximation operator `sigma`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{is_ideally_residuated, is_integrally_closed, Elem, FinitePomonoid};
use crate::downset::{Antichain, WordCarrier};
use crate::word::{FreePreimage, PreimageVariant, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("base `{0}` is not integrally closed")]
    NotIntegrallyClosed(String),
    #[error("base `{0}` is not ideally residuated")]
    NotIdeallyResiduated(String),
    #[error("no positive word lies below {0}")]
    NoPositiveBound(String),
    #[error("step {0} addresses letters outside the current word")]
    MalformedStep(usize),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A word over positive letters `[a]` and negative letters `[a]⁻¹`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedWord(Vec<(Elem, bool)>);

impl SignedWord {
    pub fn empty() -> Self {
        SignedWord(Vec::new())
    }

    /// The word itself, letter for letter, positively signed.
    pub fn positive(u: &Word) -> Self {
        SignedWord(u.letters().iter().map(|&a| (a, false)).collect())
    }

    /// The formal inverse of a positive word: reversed letters, all negative.
    pub fn negative(u: &Word) -> Self {
        SignedWord(u.letters().iter().rev().map(|&a| (a, true)).collect())
    }

    pub fn from_letters(letters: Vec<(Elem, bool)>) -> Self {
        SignedWord(letters)
    }

    pub fn letters(&self) -> &[(Elem, bool)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &SignedWord) -> SignedWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        SignedWord(letters)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&(_, neg)| !neg)
    }

    /// Number of negative letters.
    pub fn rank(&self) -> usize {
        self.0.iter().filter(|&&(_, neg)| neg).count()
    }

    /// Number of positive letters.
    pub fn positive_len(&self) -> usize {
        self.0.len() - self.rank()
    }

    /// The positive letters in order, forgetting the negative ones.
    pub fn positive_part(&self) -> Word {
        Word(self.0.iter().filter(|&&(_, neg)| !neg).map(|&(a, _)| a).collect())
    }

    /// Replace letters `range.0..range.1` by `replacement`.
    pub fn splice(&self, from: usize, to: usize, replacement: &SignedWord) -> SignedWord {
        let mut letters = Vec::with_capacity(self.0.len() - (to - from) + replacement.len());
        letters.extend_from_slice(&self.0[..from]);
        letters.extend_from_slice(&replacement.0);
        letters.extend_from_slice(&self.0[to..]);
        SignedWord(letters)
    }

    /// Read an all-negative slice back as the positive word it inverts.
    fn invert_slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].iter().rev().map(|&(a, _)| a).collect())
    }

    fn slice_all(&self, from: usize, to: usize, neg: bool) -> bool {
        self.0[from..to].iter().all(|&(_, n)| n == neg)
    }

    /// The negative letters in order: the subsequence that context rules in
    /// the closing phases can only extend, never rewrite.
    fn negative_subsequence(&self) -> Vec<Elem> {
        self.0.iter().filter(|&&(_, neg)| neg).map(|&(a, _)| a).collect()
    }
}

impl fmt::Display for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        write!(f, "[")?;
        for (i, &(a, neg)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if neg {
                write!(f, "~")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A single rewrite with its payload words. Patterns read left to right;
/// `u`, `w` always enter the word as their formal inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// u → [a] given u ⊑ [a].
    PosMono { u: Word, a: Elem },
    /// [a]⁻¹ → u⁻¹ given u ⊑ [a].
    NegMono { a: Elem, u: Word },
    /// u⁻¹ v w⁻¹ → x given v ⊑ u∘x∘w (u, w not both empty).
    Contraction { u: Word, v: Word, w: Word, x: Word },
    /// x → u⁻¹ v w⁻¹ given u∘x∘w ⊑ v (u, w not both empty).
    Expansion { u: Word, v: Word, w: Word, x: Word },
    /// u v⁻¹ → x⁻¹ y given x∘u ⊑ y∘v (v, x non-empty).
    PermLeft { u: Word, v: Word, x: Word, y: Word },
    /// u⁻¹ v → x y⁻¹ given v∘y ⊑ u∘x (u, y non-empty).
    PermRight { u: Word, v: Word, x: Word, y: Word },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::PosMono { .. } => "pos-mono",
            Rule::NegMono { .. } => "neg-mono",
            Rule::Contraction { .. } => "contraction",
            Rule::Expansion { .. } => "expansion",
            Rule::PermLeft { .. } => "perm-left",
            Rule::PermRight { .. } => "perm-right",
        }
    }

    /// Position in the normal phase order.
    pub fn phase(&self) -> u8 {
        match self {
            Rule::NegMono { .. } => 0,
            Rule::Contraction { .. } => 1,
            Rule::PermLeft { .. } | Rule::PermRight { .. } => 2,
            Rule::Expansion { .. } => 3,
            Rule::PosMono { .. } => 4,
        }
    }

    /// The non-emptiness constraints attached to the rule.
    pub fn shape_ok(&self) -> bool {
        match self {
            Rule::PosMono { .. } | Rule::NegMono { .. } => true,
            Rule::Contraction { u, w, .. } | Rule::Expansion { u, w, .. } => {
                !(u.is_empty() && w.is_empty())
            }
            Rule::PermLeft { v, x, .. } => !v.is_empty() && !x.is_empty(),
            Rule::PermRight { u, y, .. } => !u.is_empty() && !y.is_empty(),
        }
    }

    /// The pattern the rule consumes.
    pub fn lhs(&self) -> SignedWord {
        match self {
            Rule::PosMono { u, .. } => SignedWord::positive(u),
            Rule::NegMono { a, .. } => SignedWord::negative(&Word::singleton(*a)),
            Rule::Contraction { u, v, w, .. } => SignedWord::negative(u)
                .concat(&SignedWord::positive(v))
                .concat(&SignedWord::negative(w)),
            Rule::Expansion { x, .. } => SignedWord::positive(x),
            Rule::PermLeft { u, v, .. } => {
                SignedWord::positive(u).concat(&SignedWord::negative(v))
            }
            Rule::PermRight { u, v, .. } => {
                SignedWord::negative(u).concat(&SignedWord::positive(v))
            }
        }
    }

    /// The pattern the rule produces.
    pub fn rhs(&self) -> SignedWord {
        match self {
            Rule::PosMono { a, .. } => SignedWord::positive(&Word::singleton(*a)),
            Rule::NegMono { u, .. } => SignedWord::negative(u),
            Rule::Contraction { x, .. } => SignedWord::positive(x),
            Rule::Expansion { u, v, w, .. } => SignedWord::negative(u)
                .concat(&SignedWord::positive(v))
                .concat(&SignedWord::negative(w)),
            Rule::PermLeft { x, y, .. } => {
                SignedWord::negative(x).concat(&SignedWord::positive(y))
            }
            Rule::PermRight { x, y, .. } => {
                SignedWord::positive(x).concat(&SignedWord::negative(y))
            }
        }
    }

    /// The word inequality whose truth licenses the rewrite.
    pub fn side(&self) -> (Word, Word) {
        match self {
            Rule::PosMono { u, a } => (u.clone(), Word::singleton(*a)),
            Rule::NegMono { a, u } => (u.clone(), Word::singleton(*a)),
            Rule::Contraction { u, v, w, x } => (v.clone(), u.concat(x).concat(w)),
            Rule::Expansion { u, v, w, x } => (u.concat(x).concat(w), v.clone()),
            Rule::PermLeft { u, v, x, y } => (x.concat(u), y.concat(v)),
            Rule::PermRight { u, v, x, y } => (v.concat(y), u.concat(x)),
        }
    }
}

/// One rewrite applied after `prefix` untouched letters of context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub prefix: usize,
    pub rule: Rule,
}

/// A replayable derivation of `start ⊑ end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub start: SignedWord,
    pub steps: Vec<ProofStep>,
    pub end: SignedWord,
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        let mut cur = self.start.clone();
        for step in &self.steps {
            let lhs = step.rule.lhs();
            cur = cur.splice(step.prefix, step.prefix + lhs.len(), &step.rule.rhs());
            let (sl, sr) = step.rule.side();
            write!(f, " <= {cur}  ({}: {sl} <= {sr})", step.rule.name())?;
        }
        Ok(())
    }
}

/// `Proved` carries a certificate; `Unknown` means nothing was found within
/// the depth and instantiation bounds, which is not a refutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Proved(Proof),
    Unknown,
}

impl ProofOutcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            ProofOutcome::Proved(p) => Some(p),
            ProofOutcome::Unknown => None,
        }
    }
}

/// Does the rule sequence respect the phase order (inverse-eliminating
/// rules, then inverse-preserving, then inverse-introducing)?
pub fn is_normal(p: &Proof) -> bool {
    p.steps.windows(2).all(|w| w[0].rule.phase() <= w[1].rule.phase())
}

/// Signed words over a base with the rewrite rules, proof checking and
/// search, and the positive-approximation operator.
pub struct GroupPreimage<'a> {
    base: &'a FinitePomonoid,
    /// Word preorder extended with the empty word, used for side conditions.
    mon: FreePreimage<'a>,
    /// Unit-word preorder, used for canonical forms of positive outputs.
    uni: FreePreimage<'a>,
}

impl<'a> GroupPreimage<'a> {
    pub fn new(base: &'a FinitePomonoid) -> Result<Self, GroupError> {
        Ok(GroupPreimage {
            base,
            mon: FreePreimage::new(base, PreimageVariant::MONOID)?,
            uni: FreePreimage::new(base, PreimageVariant::UNITAL)?,
        })
    }

    pub fn base(&self) -> &'a FinitePomonoid {
        self.base
    }

    /// The word inequality backing a rule instance, including the empty word
    /// on either side.
    pub fn side_holds(&self, lhs: &Word, rhs: &Word) -> Result<bool, WordError> {
        self.mon.word_le(lhs, rhs)
    }

    /// Replay a certificate: every context must address letters that are
    /// present, every pattern must match, every side condition must hold,
    /// and the final word must be the claimed end.
    pub fn check_proof(&self, p: &Proof) -> Result<bool, GroupError> {
        let mut cur = p.start.clone();
        for (i, step) in p.steps.iter().enumerate() {
            if !step.rule.shape_ok() {
                return Ok(false);
            }
            let lhs = step.rule.lhs();
            let end = step.prefix + lhs.len();
            if end > cur.len() {
                return Err(GroupError::MalformedStep(i));
            }
            if cur.letters()[step.prefix..end] != *lhs.letters() {
                return Ok(false);
            }
            let (sl, sr) = step.rule.side();
            if !self.mon.word_le(&sl, &sr)? {
                return Ok(false);
            }
            cur = cur.splice(step.prefix, end, &step.rule.rhs());
        }
        Ok(cur == p.end)
    }

    /// Order between positive words, decided directly on the word preorder.
    /// Sound and complete because over an integrally closed base the
    /// positive fragment embeds order-reflectingly into the signed quotient.
    pub fn decide_positive(&self, u: &Word, v: &Word) -> Result<bool, GroupError> {
        if !is_integrally_closed(self.base) {
            return Err(GroupError::NotIntegrallyClosed(self.base.name.clone()));
        }
        Ok(self.mon.word_le(u, v)?)
    }

    /// Breadth-first proof search in normal phase order, augmented with a
    /// same-site expansion+contraction composite that deletes a positive
    /// slice x whenever c·eval(x) ≤ c or eval(x)·c ≤ c for some c. Payload
    /// words are drawn from single letters, canonical words up to a bound
    /// derived from the endpoints, and segments of the endpoints, so
    /// `Unknown` within `depth` is not a refutation.
    pub fn prove_bounded(
        &self,
        start: &SignedWord,
        end: &SignedWord,
        depth: usize,
    ) -> Result<ProofOutcome, GroupError> {
        if start == end {
            return Ok(ProofOutcome::Proved(Proof {
                start: start.clone(),
                steps: Vec::new(),
                end: end.clone(),
            }));
        }
        let pools = self.build_pools(start, end)?;
        // arena of (word, phase, parent index, steps from parent)
        let mut arena: Vec<(SignedWord, u8, usize, Vec<ProofStep>)> =
            vec![(start.clone(), 0, usize::MAX, Vec::new())];
        let mut seen: HashSet<(SignedWord, u8)> = HashSet::new();
        seen.insert((start.clone(), 0));
        let mut queue: VecDeque<(usize, usize)> = VecDeque::from([(0, 0)]);
        while let Some((idx, used)) = queue.pop_front() {
            if used >= depth {
                continue;
            }
            let (word, phase) = (arena[idx].0.clone(), arena[idx].1);
            let mut out: Vec<(SignedWord, u8, Vec<ProofStep>)> = Vec::new();
            self.successors(&word, phase, &pools, &mut out)?;
            for (next, next_phase, steps) in out {
                let cost = steps.len();
                if used + cost > depth {
                    continue;
                }
                if next == *end {
                    let mut all = self.collect_steps(&arena, idx);
                    all.extend(steps);
                    let proof = Proof {
                        start: start.clone(),
                        steps: all,
                        end: end.clone(),
                    };
                    debug_assert_eq!(self.check_proof(&proof), Ok(true));
                    return Ok(ProofOutcome::Proved(proof));
                }
                if next.len() > pools.len_cap {
                    continue;
                }
                if !seen.insert((next.clone(), next_phase)) {
                    continue;
                }
                arena.push((next, next_phase, idx, steps));
                queue.push_back((arena.len() - 1, used + cost));
            }
        }
        Ok(ProofOutcome::Unknown)
    }

    fn collect_steps(
        &self,
        arena: &[(SignedWord, u8, usize, Vec<ProofStep>)],
        mut idx: usize,
    ) -> Vec<ProofStep> {
        let mut chunks = Vec::new();
        while idx != 0 {
            chunks.push(arena[idx].3.clone());
            idx = arena[idx].2;
        }
        chunks.reverse();
        chunks.into_iter().flatten().collect()
    }

    fn build_pools(&self, start: &SignedWord, end: &SignedWord) -> Result<Pools, GroupError> {
        let wmax = start.len().max(end.len()).clamp(2, 4);
        let mut canon = self.uni.canonical_words_up_to(wmax)?;
        canon.push(Word::empty());
        let mut neg_segments = Vec::new();
        let mut pos_segments = Vec::new();
        for w in [start, end] {
            let n = w.len();
            for i in 0..n {
                for j in i + 1..=n {
                    if w.slice_all(i, j, true) {
                        neg_segments.push(w.invert_slice(i, j));
                    }
                    if w.slice_all(i, j, false) {
                        pos_segments.push(Word(
                            w.letters()[i..j].iter().map(|&(a, _)| a).collect(),
                        ));
                    }
                }
            }
        }
        let singletons: Vec<Word> =
            self.base.elems().map(Word::singleton).collect();
        let dedup = |mut v: Vec<Word>| {
            v.sort();
            v.dedup();
            v
        };
        let exp_neg = dedup(
            [Word::empty()]
                .into_iter()
                .chain(singletons.iter().cloned())
                .chain(neg_segments.iter().cloned())
                .collect(),
        );
        // expansion payloads: slices of either endpoint's positive material
        // (plus bare letters) suffice, because an expansion toward a small
        // payload followed by monotone growth is subsumed by expanding a
        // larger slice straight to the grown payload
        let exp_pos = dedup(
            singletons
                .iter()
                .cloned()
                .chain(pos_segments.iter().cloned())
                .collect(),
        );
        let con_x = dedup(canon.iter().cloned().chain(pos_segments.iter().cloned()).collect());
        let perm_x = dedup(
            singletons
                .iter()
                .cloned()
                .chain(neg_segments.iter().cloned())
                .collect(),
        );
        let perm_y = dedup(
            [Word::empty()]
                .into_iter()
                .chain(singletons.iter().cloned())
                .chain(pos_segments.iter().cloned())
                .collect(),
        );
        // +2 leaves room for the deletion composite's detour while keeping
        // the breadth-first frontier small
        let len_cap = start.len().max(end.len()) + 2;
        Ok(Pools {
            canon,
            exp_neg,
            exp_pos,
            con_x,
            perm_x,
            perm_y,
            len_cap,
            end_neg_subsequence: end.negative_subsequence(),
        })
    }

    /// All single-rule rewrites (plus the two-step deletion composite) that
    /// respect the phase order from `phase`.
    fn successors(
        &self,
        word: &SignedWord,
        phase: u8,
        pools: &Pools,
        out: &mut Vec<(SignedWord, u8, Vec<ProofStep>)>,
    ) -> Result<(), GroupError> {
        let n = word.len();
        let letters = word.letters();
        let push = |out: &mut Vec<_>,
                    from: usize,
                    to: usize,
                    rule: Rule,
                    extra: Option<Rule>| {
            let mut next = word.splice(from, to, &rule.rhs());
            let mut steps = vec![ProofStep { prefix: from, rule: rule.clone() }];
            let mut next_phase = phase.max(rule.phase());
            if let Some(second) = extra {
                let lhs_len = second.lhs().len();
                next = next.splice(from, from + lhs_len, &second.rhs());
                next_phase = second.phase().max(1);
                steps.push(ProofStep { prefix: from, rule: second });
            }
            // in the inverse-introducing phases existing negative letters are
            // frozen: they must survive into the target verbatim
            if next_phase >= 3
                && !is_subsequence(&next.negative_subsequence(), &pools.end_neg_subsequence)
            {
                return;
            }
            out.push((next, next_phase, steps));
        };

        // neg-mono
        if phase == 0 {
            for i in 0..n {
                let (a, neg) = letters[i];
                if !neg {
                    continue;
                }
                for u in &pools.canon {
                    if self.mon.word_le(u, &Word::singleton(a))? {
                        push(out, i, i + 1, Rule::NegMono { a, u: u.clone() }, None);
                    }
                }
            }
        }
        // contraction
        if phase <= 1 {
            for i in 0..n {
                for j in i..=n {
                    if !word.slice_all(i, j, true) {
                        break;
                    }
                    for k in j..=n {
                        if !word.slice_all(j, k, false) {
                            break;
                        }
                        for l in k..=n {
                            if !word.slice_all(k, l, true) {
                                break;
                            }
                            if i == j && k == l {
                                continue;
                            }
                            let u = word.invert_slice(i, j);
                            let v = Word(
                                letters[j..k].iter().map(|&(a, _)| a).collect(),
                            );
                            let w = word.invert_slice(k, l);
                            for x in &pools.con_x {
                                let side = u.concat(x).concat(&w);
                                if self.mon.word_le(&v, &side)? {
                                    push(
                                        out,
                                        i,
                                        l,
                                        Rule::Contraction {
                                            u: u.clone(),
                                            v: v.clone(),
                                            w: w.clone(),
                                            x: x.clone(),
                                        },
                                        None,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        // permutation
        if phase <= 2 {
            for k in 0..n {
                for l in k + 1..=n {
                    if !word.slice_all(k, l, true) {
                        break;
                    }
                    let v = word.invert_slice(k, l);
                    let mut j = k;
                    loop {
                        let u = Word(letters[j..k].iter().map(|&(a, _)| a).collect());
                        for x in &pools.perm_x {
                            for y in &pools.perm_y {
                                if self.mon.word_le(&x.concat(&u), &y.concat(&v))? {
                                    push(
                                        out,
                                        j,
                                        l,
                                        Rule::PermLeft {
                                            u: u.clone(),
                                            v: v.clone(),
                                            x: x.clone(),
                                            y: y.clone(),
                                        },
                                        None,
                                    );
                                }
                            }
                        }
                        if j == 0 || letters[j - 1].1 {
                            break;
                        }
                        j -= 1;
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..=n {
                    if !word.slice_all(i, j, true) {
                        break;
                    }
                    let u = word.invert_slice(i, j);
                    let mut k = j;
                    loop {
                        let v = Word(letters[j..k].iter().map(|&(a, _)| a).collect());
                        for y in &pools.perm_x {
                            for x in &pools.perm_y {
                                if self.mon.word_le(&v.concat(y), &u.concat(x))? {
                                    push(
                                        out,
                                        i,
                                        k,
                                        Rule::PermRight {
                                            u: u.clone(),
                                            v: v.clone(),
                                            x: x.clone(),
                                            y: y.clone(),
                                        },
                                        None,
                                    );
                                }
                            }
                        }
                        if k == n || letters[k].1 {
                            break;
                        }
                        k += 1;
                    }
                }
            }
        }
        // expansion
        if phase <= 3 {
            for i in 0..=n {
                for j in i..=n {
                    if !word.slice_all(i, j, false) {
                        break;
                    }
                    let x = Word(letters[i..j].iter().map(|&(a, _)| a).collect());
                    let negs_before: Vec<Elem> = letters[..i]
                        .iter()
                        .filter(|&&(_, neg)| neg)
                        .map(|&(a, _)| a)
                        .collect();
                    let negs_after: Vec<Elem> = letters[j..]
                        .iter()
                        .filter(|&&(_, neg)| neg)
                        .map(|&(a, _)| a)
                        .collect();
                    for u in &pools.exp_neg {
                        for w in &pools.exp_neg {
                            if u.is_empty() && w.is_empty() {
                                continue;
                            }
                            // the payload never contributes negatives, so the
                            // frozen-negatives test can run before choosing it
                            let cand: Vec<Elem> = negs_before
                                .iter()
                                .chain(u.0.iter().rev())
                                .chain(w.0.iter().rev())
                                .chain(negs_after.iter())
                                .copied()
                                .collect();
                            if !is_subsequence(&cand, &pools.end_neg_subsequence) {
                                continue;
                            }
                            let side = u.concat(&x).concat(w);
                            for v in &pools.exp_pos {
                                if self.mon.word_le(&side, v)? {
                                    push(
                                        out,
                                        i,
                                        j,
                                        Rule::Expansion {
                                            u: u.clone(),
                                            v: v.clone(),
                                            w: w.clone(),
                                            x: x.clone(),
                                        },
                                        None,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        // pos-mono
        for i in 0..=n {
            for j in i..=n {
                if !word.slice_all(i, j, false) {
                    break;
                }
                let u = Word(letters[i..j].iter().map(|&(a, _)| a).collect());
                let e = self.mon.eval(&u)?;
                for a in self.base.elems() {
                    if self.base.le(e, a) {
                        push(out, i, j, Rule::PosMono { u: u.clone(), a }, None);
                    }
                }
            }
        }
        // deletion composite, x ⊑ [c]∘[c]⁻¹ ⊑ ε (or mirrored); generated
        // last so single-rule routes win ties in the breadth-first order
        if phase <= 1 {
            for i in 0..n {
                for j in i + 1..=n {
                    if !word.slice_all(i, j, false) {
                        break;
                    }
                    let x = Word(letters[i..j].iter().map(|&(a, _)| a).collect());
                    let e = self.mon.eval(&x)?;
                    for c in self.base.elems() {
                        let cw = Word::singleton(c);
                        if self.base.le(self.base.mul(e, c), c) {
                            push(
                                out,
                                i,
                                j,
                                Rule::Expansion {
                                    u: Word::empty(),
                                    v: cw.clone(),
                                    w: cw.clone(),
                                    x: x.clone(),
                                },
                                Some(Rule::Contraction {
                                    u: Word::empty(),
                                    v: cw.clone(),
                                    w: cw.clone(),
                                    x: Word::empty(),
                                }),
                            );
                            break;
                        }
                        if self.base.le(self.base.mul(c, e), c) {
                            push(
                                out,
                                i,
                                j,
                                Rule::Expansion {
                                    u: cw.clone(),
                                    v: cw.clone(),
                                    w: Word::empty(),
                                    x: x.clone(),
                                },
                                Some(Rule::Contraction {
                                    u: cw.clone(),
                                    v: cw.clone(),
                                    w: Word::empty(),
                                    x: Word::empty(),
                                }),
                            );
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Maximal canonical positive words below `alpha`, by repeatedly
    /// replacing a contiguous pattern u⁻¹ v w⁻¹ (u, w not both empty) with
    /// each maximal solution x of u∘x∘w ⊑ v. Solutions of length ≤ |v|
    /// suffice: any solution is dominated by the word of its per-block
    /// evaluations in a witnessing decomposition.
    pub fn sigma(&self, alpha: &SignedWord) -> Result<Antichain<Word>, GroupError> {
        if !is_integrally_closed(self.base) {
            return Err(GroupError::NotIntegrallyClosed(self.base.name.clone()));
        }
        if !is_ideally_residuated(self.base) {
            return Err(GroupError::NotIdeallyResiduated(self.base.name.clone()));
        }
        let mut memo = HashMap::new();
        let words = self.sigma_set(alpha, &mut memo)?;
        if words.is_empty() {
            return Err(GroupError::NoPositiveBound(alpha.to_string()));
        }
        let budget = words.iter().map(Word::len).max().unwrap_or(1).max(1);
        let carrier = WordCarrier::new(&self.uni, budget)
            .expect("unit-word structure is always available here");
        Ok(Antichain::normalize(&carrier, words).expect("non-empty result"))
    }

    fn sigma_set(
        &self,
        alpha: &SignedWord,
        memo: &mut HashMap<SignedWord, Vec<Word>>,
    ) -> Result<Vec<Word>, GroupError> {
        if let Some(hit) = memo.get(alpha) {
            return Ok(hit.clone());
        }
        if alpha.is_positive() {
            let w = alpha.positive_part();
            let canonical = if w.is_empty() {
                // over an integrally closed base u ⊑ e exactly when
                // u ⊑ [1], so the empty result collapses to the unit word
                self.uni.unit_word()?
            } else {
                self.uni.canonical_form(&w)?
            };
            memo.insert(alpha.clone(), vec![canonical.clone()]);
            return Ok(vec![canonical]);
        }
        let n = alpha.len();
        let letters = alpha.letters();
        let mut out: Vec<Word> = Vec::new();
        for i in 0..n {
            for j in i..=n {
                if !alpha.slice_all(i, j, true) {
                    break;
                }
                for k in j..=n {
                    if !alpha.slice_all(j, k, false) {
                        break;
                    }
                    for l in k..=n {
                        if !alpha.slice_all(k, l, true) {
                            break;
                        }
                        if i == j && k == l {
                            continue;
                        }
                        let u = alpha.invert_slice(i, j);
                        let v = Word(letters[j..k].iter().map(|&(a, _)| a).collect());
                        let w = alpha.invert_slice(k, l);
                        for x in self.max_solutions(&u, &v, &w)? {
                            let next = alpha.splice(i, l, &SignedWord::positive(&x));
                            out.extend(self.sigma_set(&next, memo)?);
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        let kept = self.maximal_words(out)?;
        memo.insert(alpha.clone(), kept.clone());
        Ok(kept)
    }

    /// Maximal x with u∘x∘w ⊑ v, searched among canonical words of length
    /// at most |v| plus the empty word.
    fn max_solutions(&self, u: &Word, v: &Word, w: &Word) -> Result<Vec<Word>, GroupError> {
        let mut candidates = self.uni.canonical_words_up_to(v.len())?;
        candidates.push(Word::empty());
        let mut solutions = Vec::new();
        for x in candidates {
            if self.mon.word_le(&u.concat(&x).concat(w), v)? {
                solutions.push(x);
            }
        }
        self.maximal_words(solutions)
    }

    fn maximal_words(&self, words: Vec<Word>) -> Result<Vec<Word>, GroupError> {
        let mut kept = Vec::new();
        for (i, x) in words.iter().enumerate() {
            let mut dominated = false;
            for (j, y) in words.iter().enumerate() {
                if i != j
                    && self.mon.word_le(x, y)?
                    && !(self.mon.word_le(y, x)?)
                {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                kept.push(x.clone());
            }
        }
        Ok(kept)
    }

    /// Is every `sigma` output below the unit word on the whole sample?
    pub fn is_negative_conucleus(&self, sample: &[SignedWord]) -> Result<bool, GroupError> {
        let unit = self.uni.unit_word()?;
        for alpha in sample {
            for g in self.sigma(alpha)?.gens() {
                if !self.mon.word_le(g, &unit)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

struct Pools {
    canon: Vec<Word>,
    exp_neg: Vec<Word>,
    exp_pos: Vec<Word>,
    con_x: Vec<Word>,
    perm_x: Vec<Word>,
    perm_y: Vec<Word>,
    len_cap: usize,
    end_neg_subsequence: Vec<Elem>,
}

fn is_subsequence(needle: &[Elem], haystack: &[Elem]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn chain3() -> FinitePomonoid {
        let n = 3;
        let mut le = vec![false; 9];
        let mut mult = vec![0; 9];
        for a in 0..n {
            for b in 0..n {
                le[a * n + b] = a <= b;
                mult[a * n + b] = a.min(b);
            }
        }
        FinitePomonoid::from_tables("chain3", Signature::Pomonoid, 3, le, mult, Some(2), None)
            .unwrap()
    }

    fn z2() -> FinitePomonoid {
        FinitePomonoid::from_tables(
            "z2",
            Signature::Pomonoid,
            2,
            vec![true, false, false, true],
            vec![0, 1, 1, 0],
            Some(0),
            None,
        )
        .unwrap()
    }

    fn lz1() -> FinitePomonoid {
        FinitePomonoid::from_tables(
            "lz1",
            Signature::Pomonoid,
            3,
            vec![true, false, false, false, true, false, false, false, true],
            vec![0, 1, 2, 1, 1, 1, 2, 2, 2],
            Some(0),
            None,
        )
        .unwrap()
    }

    fn sw(letters: &[(Elem, bool)]) -> SignedWord {
        SignedWord::from_letters(letters.to_vec())
    }

    #[test]
    fn signed_word_basics() {
        let u = Word(vec![0, 1]);
        let neg = SignedWord::negative(&u);
        assert_eq!(neg.letters(), &[(1, true), (0, true)]);
        assert_eq!(neg.rank(), 2);
        assert_eq!(neg.to_string(), "[~1,~0]");
        assert_eq!(SignedWord::empty().to_string(), "e");
        let mixed = SignedWord::positive(&u).concat(&neg);
        assert_eq!(mixed.positive_part(), u);
        assert_eq!(mixed.positive_len(), 2);
        assert!(!mixed.is_positive());
        assert_eq!(mixed.invert_slice(2, 4), u);
    }

    #[test]
    fn empty_proof_checks_and_is_normal() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let w = sw(&[(0, false), (1, true)]);
        let p = Proof { start: w.clone(), steps: Vec::new(), end: w };
        assert_eq!(g.check_proof(&p), Ok(true));
        assert!(is_normal(&p));
    }

    /// A three-step certificate: one negative-letter refinement followed by
    /// two contractions, with each side condition holding in the base.
    #[test]
    fn worked_three_step_proof_replays() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        // letters: u = [0,1], a = 1 (1·1 ≤ 1), v = [1,0]; end [0,0]
        let start = sw(&[(0, false), (1, false), (1, true), (1, false), (0, false)]);
        let end = sw(&[(0, false), (0, false)]);
        let steps = vec![
            ProofStep {
                prefix: 2,
                rule: Rule::NegMono { a: 1, u: Word(vec![1, 1]) },
            },
            ProofStep {
                prefix: 0,
                rule: Rule::Contraction {
                    u: Word::empty(),
                    v: Word(vec![0, 1]),
                    w: Word(vec![1]),
                    x: Word(vec![0]),
                },
            },
            ProofStep {
                prefix: 1,
                rule: Rule::Contraction {
                    u: Word(vec![1]),
                    v: Word(vec![1, 0]),
                    w: Word::empty(),
                    x: Word(vec![0]),
                },
            },
        ];
        let proof = Proof { start, steps, end };
        assert_eq!(g.check_proof(&proof), Ok(true));
        assert!(is_normal(&proof));
        // break a side condition: the refined word no longer sits below [1]
        let mut bad = proof.clone();
        if let Rule::NegMono { u, .. } = &mut bad.steps[0].rule {
            *u = Word(vec![2, 2]);
        }
        assert_eq!(g.check_proof(&bad), Ok(false));
        // a context beyond the word is an error, not a failed proof
        let mut oob = proof;
        oob.steps[0].prefix = 9;
        assert_eq!(g.check_proof(&oob), Err(GroupError::MalformedStep(0)));
    }

    #[test]
    fn group_laws_found_at_depth_one() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        for u in [Word(vec![0]), Word(vec![1, 2]), Word(vec![2, 0, 1])] {
            let pos = SignedWord::positive(&u);
            let neg = SignedWord::negative(&u);
            let pairs = [
                (neg.concat(&pos), SignedWord::empty()),
                (pos.concat(&neg), SignedWord::empty()),
                (SignedWord::empty(), neg.concat(&pos)),
                (SignedWord::empty(), pos.concat(&neg)),
            ];
            for (a, b) in pairs {
                let outcome = g.prove_bounded(&a, &b, 1).unwrap();
                let proof = outcome.proof().unwrap_or_else(|| panic!("{a} <= {b}"));
                assert_eq!(proof.steps.len(), 1);
                assert_eq!(g.check_proof(proof), Ok(true));
            }
        }
    }

    #[test]
    fn unit_letter_collapses_to_the_empty_word() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let unit = SignedWord::positive(&Word(vec![2]));
        let outcome = g.prove_bounded(&unit, &SignedWord::empty(), 2).unwrap();
        let proof = outcome.proof().expect("deletion via a cancelling pair");
        assert_eq!(proof.steps.len(), 2);
        assert_eq!(g.check_proof(proof), Ok(true));
        assert!(!is_normal(proof), "expansion before contraction");
        // and the empty word reaches the unit letter by insertion
        let back = g.prove_bounded(&SignedWord::empty(), &unit, 1).unwrap();
        assert!(back.proof().is_some());
    }

    #[test]
    fn positive_pairs_prove_exactly_when_the_word_order_says_so() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let uni = FreePreimage::new(&alg, PreimageVariant::UNITAL).unwrap();
        let words = uni.canonical_words_up_to(2).unwrap();
        for u in &words {
            for v in &words {
                let expected = uni.word_le(u, v).unwrap();
                let outcome = g
                    .prove_bounded(
                        &SignedWord::positive(u),
                        &SignedWord::positive(v),
                        6,
                    )
                    .unwrap();
                match outcome {
                    ProofOutcome::Proved(p) => {
                        assert!(expected, "spurious proof of {u} <= {v}: {p}");
                        assert_eq!(g.check_proof(&p), Ok(true));
                    }
                    ProofOutcome::Unknown => {
                        assert!(!expected, "missed {u} <= {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn decide_positive_requires_integral_closure() {
        let alg = lz1();
        let g = GroupPreimage::new(&alg).unwrap();
        assert!(matches!(
            g.decide_positive(&Word(vec![1]), &Word(vec![2])),
            Err(GroupError::NotIntegrallyClosed(_))
        ));
        let ok = chain3();
        let g = GroupPreimage::new(&ok).unwrap();
        assert_eq!(g.decide_positive(&Word(vec![0, 1]), &Word(vec![0])), Ok(true));
        assert_eq!(g.decide_positive(&Word(vec![2]), &Word(vec![0])), Ok(false));
    }

    #[test]
    fn sigma_on_positive_input_is_its_canonical_form() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let alpha = SignedWord::positive(&Word(vec![2, 1]));
        let out = g.sigma(&alpha).unwrap();
        let uni = FreePreimage::new(&alg, PreimageVariant::UNITAL).unwrap();
        assert_eq!(out.gens(), &[uni.canonical_form(&Word(vec![2, 1])).unwrap()]);
    }

    #[test]
    fn sigma_of_a_single_residual_matches_the_residual_table() {
        let alg = chain3().with_residuals().unwrap();
        let g = GroupPreimage::new(&alg).unwrap();
        for a in alg.elems() {
            for b in alg.elems() {
                let alpha = SignedWord::negative(&Word::singleton(a))
                    .concat(&SignedWord::positive(&Word::singleton(b)));
                let out = g.sigma(&alpha).unwrap();
                let expected = alg.lres(a, b).unwrap();
                assert_eq!(out.gens(), &[Word(vec![expected])], "{a}\\{b}");
            }
        }
    }

    #[test]
    fn sigma_rejects_unsuitable_bases() {
        let alg = lz1();
        let g = GroupPreimage::new(&alg).unwrap();
        assert!(matches!(
            g.sigma(&SignedWord::empty()),
            Err(GroupError::NotIntegrallyClosed(_))
        ));
    }

    /// Brute-force oracle: over small inputs, sigma must produce exactly the
    /// maximal canonical words that bounded proof search can place below α.
    #[test]
    fn sigma_agrees_with_bounded_proof_search() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let uni = FreePreimage::new(&alg, PreimageVariant::UNITAL).unwrap();
        let alphas = [
            sw(&[(1, true), (2, false), (1, false)]),
            sw(&[(0, false), (1, true), (1, false)]),
            sw(&[(2, true), (0, false), (2, true), (2, false)]),
            sw(&[(1, false), (1, true)]),
        ];
        for alpha in &alphas {
            let out = g.sigma(alpha).unwrap();
            let cap = alpha.positive_len().max(1);
            let mut provable = Vec::new();
            for w in uni.canonical_words_up_to(cap).unwrap() {
                let outcome = g
                    .prove_bounded(&SignedWord::positive(&w), alpha, 6)
                    .unwrap();
                if outcome.proof().is_some() {
                    provable.push(w);
                }
            }
            let maximal = g.maximal_words(provable).unwrap();
            let mut got = out.gens().to_vec();
            let mut want = maximal;
            got.sort();
            want.sort();
            assert_eq!(got, want, "sigma vs search on {alpha}");
        }
    }

    #[test]
    fn sigma_is_submultiplicative_and_monotone() {
        let alg = chain3();
        let g = GroupPreimage::new(&alg).unwrap();
        let samples = [
            sw(&[(1, true), (2, false)]),
            sw(&[(0, false), (1, true), (2, false)]),
            sw(&[(2, false), (0, true)]),
        ];
        for a in &samples {
            for b in &samples {
                let sa = g.sigma(a).unwrap();
                let sb = g.sigma(b).unwrap();
                let sab = g.sigma(&a.concat(b)).unwrap();
                for u in sa.gens() {
                    for v in sb.gens() {
                        let prod = u.concat(v);
                        let below = sab
                            .gens()
                            .iter()
                            .any(|w| g.mon.word_le(&prod, w).unwrap());
                        assert!(below, "{u}∘{v} not below sigma({}{})", a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn negativity_holds_exactly_on_integral_bases() {
        let integral = chain3();
        let g = GroupPreimage::new(&integral).unwrap();
        let sample = [
            sw(&[(0, false)]),
            sw(&[(1, true), (2, false)]),
            sw(&[(2, false), (1, false)]),
        ];
        assert_eq!(g.is_negative_conucleus(&sample), Ok(true));
        assert_eq!(g.is_negative_conucleus(&[]), Ok(true));
        let group = z2();
        let g = GroupPreimage::new(&group).unwrap();
        let off_unit = [sw(&[(1, false)])];
        assert_eq!(g.is_negative_conucleus(&off_unit), Ok(false));
    }
}
