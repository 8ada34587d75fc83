//! Hall sets of decorated rooted trees, standard decompositions, foliage, Hall polynomials
//! and the reduction of tree polynomials to words.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::trees::{Alphabet, Decoration, Forest, RootedTree, TreePoly};
use crate::words::{pi_map, unshuffle, Pairing, Word, WordPoly};

/// t ∘ u: the trees of u grafted onto the root of t.
pub fn circ_graft(t: &RootedTree, u: &Forest) -> RootedTree {
    let mut children = t.children().to_vec();
    children.extend_from_slice(u.trees());
    RootedTree::from_children(t.root().clone(), children)
}

/// Bilinear extension of ∘ to tree polynomials; forests with several trees on the left are
/// rejected.
pub fn circ_graft_poly(x: &TreePoly, u: &TreePoly) -> Result<TreePoly> {
    let mut out = TreePoly::zero();
    for (f, a) in x.terms() {
        let t = f
            .as_tree()
            .ok_or_else(|| Error::invalid(format!("left operand of ∘ must be a tree, found {f}")))?;
        for (g, b) in u.terms() {
            out.add_term(Forest::single(circ_graft(t, g)), a * b);
        }
    }
    Ok(out)
}

/// π with the zero pairing: the sum of words over all linear extensions.
pub fn reduce_mod_ipi(x: &TreePoly) -> WordPoly {
    pi_map(x, &Pairing::Zero).expect("zero pairing is valid")
}

/// Membership in the kernel of π.
pub fn in_ideal(x: &TreePoly) -> bool {
    reduce_mod_ipi(x).is_zero()
}

#[derive(Clone, Debug)]
struct Member {
    tree: RootedTree,
    foliage: Word,
    decomposition: Option<(RootedTree, RootedTree)>,
}

/// A Hall set of decorated rooted trees up to a degree bound, ordered by the
/// alphabetical order of foliages.
#[derive(Clone, Debug)]
pub struct HallSet {
    alphabet: Alphabet,
    max_degree: u32,
    members: Vec<Member>,
    index: HashMap<RootedTree, usize>,
}

impl HallSet {
    /// Builds every member of degree ≤ `max_degree`, degree by degree.
    pub fn build(alphabet: &Alphabet, max_degree: u32) -> Result<HallSet> {
        let mut set = HallSet {
            alphabet: alphabet.clone(),
            max_degree,
            members: Vec::new(),
            index: HashMap::new(),
        };
        for d in 1..=max_degree {
            let mut fresh: Vec<Member> = Vec::new();
            for a in alphabet.letters() {
                if a.weight() == d {
                    fresh.push(Member {
                        tree: RootedTree::leaf(a.clone()),
                        foliage: Word::letter(a.clone()),
                        decomposition: None,
                    });
                } else if a.weight() < d {
                    for groups in set.multisets(d - a.weight()) {
                        if let Some(m) = set.candidate(a, &groups) {
                            fresh.push(m);
                        }
                    }
                }
            }
            fresh.sort_by(|x, y| x.foliage.alpha_cmp(&y.foliage));
            for m in fresh {
                set.index.insert(m.tree.clone(), set.members.len());
                set.members.push(m);
            }
        }
        Ok(set)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Members by increasing degree, each degree in Hall order.
    pub fn members(&self) -> impl Iterator<Item = &RootedTree> {
        self.members.iter().map(|m| &m.tree)
    }

    pub fn members_of_degree(&self, d: u32) -> Vec<&RootedTree> {
        self.members().filter(|t| t.degree() == d).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &RootedTree) -> bool {
        self.index.contains_key(t)
    }

    /// Member counts for degrees 1..=max_degree.
    pub fn counts(&self) -> Vec<usize> {
        (1..=self.max_degree)
            .map(|d| self.members().filter(|t| t.degree() == d).count())
            .collect()
    }

    fn member(&self, t: &RootedTree) -> Result<&Member> {
        self.index
            .get(t)
            .map(|&i| &self.members[i])
            .ok_or_else(|| Error::NotHallMember(t.to_string()))
    }

    /// The total order of the Hall set.
    pub fn compare(&self, s: &RootedTree, t: &RootedTree) -> Result<Ordering> {
        Ok(self.member(s)?.foliage.alpha_cmp(&self.member(t)?.foliage))
    }

    /// (t¹, t²) with t² = I for a single vertex.
    pub fn standard_decomposition(&self, t: &RootedTree) -> Result<(RootedTree, Option<RootedTree>)> {
        let m = self.member(t)?;
        Ok(match &m.decomposition {
            None => (t.clone(), None),
            Some((a, b)) => (a.clone(), Some(b.clone())),
        })
    }

    pub fn foliage(&self, t: &RootedTree) -> Result<Word> {
        Ok(self.member(t)?.foliage.clone())
    }

    /// p_t = [p_{t¹}, p_{t²}] in the concatenation algebra, p = a on a single vertex.
    pub fn hall_polynomial(&self, t: &RootedTree) -> Result<WordPoly> {
        let mut memo = HashMap::new();
        self.bracketed(t, false, &mut memo)
    }

    /// The same bracketing with the factors swapped: E(t) = [E(t²), E(t¹)].
    pub fn hall_polynomial_reversed(&self, t: &RootedTree) -> Result<WordPoly> {
        let mut memo = HashMap::new();
        self.bracketed(t, true, &mut memo)
    }

    fn bracketed(
        &self,
        t: &RootedTree,
        swap: bool,
        memo: &mut HashMap<RootedTree, WordPoly>,
    ) -> Result<WordPoly> {
        if let Some(p) = memo.get(t) {
            return Ok(p.clone());
        }
        let out = match &self.member(t)?.decomposition {
            None => WordPoly::from(Word::letter(t.root().clone())),
            Some((t1, t2)) => {
                let mut u = self.bracketed(t1, swap, memo)?;
                let mut v = self.bracketed(t2, swap, memo)?;
                if swap {
                    std::mem::swap(&mut u, &mut v);
                }
                u.concat(&v).sub(&v.concat(&u))
            }
        };
        memo.insert(t.clone(), out.clone());
        Ok(out)
    }

    /// Re-checks the defining conditions and the closure of decompositions on every member.
    pub fn audit(&self) -> Result<()> {
        for a in self.alphabet.letters() {
            if a.weight() <= self.max_degree && !self.contains(&RootedTree::leaf(a.clone())) {
                return Err(Error::invalid(format!("single vertex {a} missing")));
            }
        }
        for m in &self.members {
            let groups = self.groups(&m.tree)?;
            if groups.is_empty() {
                continue;
            }
            if !self.predicate(m.tree.root(), &groups)? {
                return Err(Error::invalid(format!("{} fails the Hall predicate", m.tree)));
            }
            for (c, _) in &groups {
                if self.member(c)?.foliage.alpha_cmp(&m.foliage) != Ordering::Greater {
                    return Err(Error::invalid(format!("branch {c} is not above {}", m.tree)));
                }
            }
            if let Some((t1, t2)) = &m.decomposition {
                if !self.contains(t1) || !self.contains(t2) {
                    return Err(Error::invalid(format!("decomposition of {} leaves the set", m.tree)));
                }
            }
        }
        Ok(())
    }

    /// Children grouped as (t_j, r_j) with t_1 > … > t_m in the Hall order.
    fn groups(&self, t: &RootedTree) -> Result<Vec<(RootedTree, usize)>> {
        let mut kids: Vec<(usize, &RootedTree)> = Vec::new();
        for c in t.children() {
            kids.push((*self.index.get(c).ok_or_else(|| Error::NotHallMember(c.to_string()))?, c));
        }
        kids.sort_by(|x, y| {
            self.members[y.0].foliage.alpha_cmp(&self.members[x.0].foliage)
        });
        let mut out: Vec<(RootedTree, usize)> = Vec::new();
        for (_, c) in kids {
            match out.last_mut() {
                Some((last, r)) if last == c => *r += 1,
                _ => out.push((c.clone(), 1)),
            }
        }
        Ok(out)
    }

    fn predicate(&self, a: &Decoration, groups: &[(RootedTree, usize)]) -> Result<bool> {
        let (tm, _) = groups.last().expect("nonempty");
        let mut prefix_children = Vec::new();
        for (t, r) in &groups[..groups.len() - 1] {
            prefix_children.extend(std::iter::repeat_n(t.clone(), *r));
        }
        let prefix = RootedTree::from_children(a.clone(), prefix_children);
        let Some(&pi) = self.index.get(&prefix) else {
            return Ok(false);
        };
        Ok(self.member(tm)?.foliage.alpha_cmp(&self.members[pi].foliage) == Ordering::Greater)
    }

    /// Nonincreasing member sequences (as index groups) of total degree `d`.
    fn multisets(&self, d: u32) -> Vec<Vec<(RootedTree, usize)>> {
        // members sorted by decreasing Hall order
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&x, &y| self.members[y].foliage.alpha_cmp(&self.members[x].foliage));
        let mut out = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        self.extend_multisets(&order, 0, d, &mut current, &mut out);
        out
    }

    fn extend_multisets(
        &self,
        order: &[usize],
        from: usize,
        remaining: u32,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<(RootedTree, usize)>>,
    ) {
        if remaining == 0 {
            let mut groups: Vec<(RootedTree, usize)> = Vec::new();
            for &i in current.iter() {
                let t = &self.members[i].tree;
                match groups.last_mut() {
                    Some((last, r)) if last == t => *r += 1,
                    _ => groups.push((t.clone(), 1)),
                }
            }
            out.push(groups);
            return;
        }
        for (pos, &i) in order.iter().enumerate().skip(from) {
            let deg = self.members[i].tree.degree();
            if deg <= remaining {
                current.push(i);
                self.extend_multisets(order, pos, remaining - deg, current, out);
                current.pop();
            }
        }
    }

    fn candidate(&self, a: &Decoration, groups: &[(RootedTree, usize)]) -> Option<Member> {
        if !self.predicate(a, groups).ok()? {
            return None;
        }
        let mut foliage = Word::letter(a.clone());
        let mut children = Vec::new();
        for (t, r) in groups {
            for _ in 0..*r {
                foliage = foliage.concat(&self.member(t).ok()?.foliage);
                children.push(t.clone());
            }
        }
        for (t, _) in groups {
            if self.member(t).ok()?.foliage.alpha_cmp(&foliage) != Ordering::Greater {
                return None;
            }
        }
        let (tm, _) = groups.last().expect("nonempty");
        let smallest = children.iter().rposition(|c| c == tm).expect("present");
        let tree = RootedTree::from_children(a.clone(), children.clone());
        children.remove(smallest);
        let t1 = RootedTree::from_children(a.clone(), children);
        Some(Member {
            tree,
            foliage,
            decomposition: Some((t1, tm.clone())),
        })
    }

    /// Decreasing products p_{t_1}⋯p_{t_k} (t_1 ≥ … ≥ t_k) of total degree `d`.
    pub fn decreasing_products(&self, d: u32) -> Result<Vec<WordPoly>> {
        let mut out = Vec::new();
        for groups in self.multisets(d) {
            let mut p = WordPoly::one();
            for (t, r) in &groups {
                let h = self.hall_polynomial(t)?;
                for _ in 0..*r {
                    p = p.concat(&h);
                }
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Primitivity under the unshuffle coproduct, for which letters are primitive.
pub fn is_primitive(p: &WordPoly) -> bool {
    let mut rest = unshuffle(p);
    for (w, c) in p.terms() {
        for key in [(w.clone(), Word::empty()), (Word::empty(), w.clone())] {
            let e = rest.entry(key.clone()).or_insert_with(Q::zero);
            *e -= c;
            if e.is_zero() {
                rest.remove(&key);
            }
        }
    }
    rest.is_empty()
}

/// Rank over the rationals of a family of word polynomials.
pub fn rank(family: &[WordPoly]) -> usize {
    let mut rows: Vec<std::collections::BTreeMap<Word, Q>> = family
        .iter()
        .map(|p| p.terms().map(|(w, c)| (w.clone(), c.clone())).collect())
        .collect();
    let mut r = 0;
    while r < rows.len() {
        let pivot_row = (r..rows.len()).find(|&i| !rows[i].is_empty());
        let Some(i) = pivot_row else { break };
        rows.swap(r, i);
        let (pw, pc) = {
            let (w, c) = rows[r].iter().next().expect("nonempty");
            (w.clone(), c.clone())
        };
        for j in r + 1..rows.len() {
            let Some(f) = rows[j].get(&pw).cloned() else { continue };
            let factor = f / &pc;
            let pivot = rows[r].clone();
            for (w, c) in pivot {
                let e = rows[j].entry(w.clone()).or_insert_with(Q::zero);
                *e -= &factor * c;
                if e.is_zero() {
                    rows[j].remove(&w);
                }
            }
        }
        r += 1;
    }
    r
}

/// Number of words of weight `d` over the alphabet.
pub fn word_count(alphabet: &Alphabet, d: u32) -> usize {
    let mut counts = vec![0usize; d as usize + 1];
    counts[0] = 1;
    for n in 1..=d as usize {
        for a in alphabet.letters() {
            let w = a.weight() as usize;
            if w <= n {
                counts[n] += counts[n - w];
            }
        }
    }
    counts[d as usize]
}
