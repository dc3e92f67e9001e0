//! Exhaustive model checks of the axioms and of the combination identities.

use std::collections::HashMap;
use std::fmt;

use super::semantics::{classical_model, logical_combine, logical_combine_many};
use super::{box_model, LogicSignature, ModelSet, TMode};
use crate::error::Result;
use crate::frame::Proposition;

/// Violations kept verbatim per check; the rest are only counted.
const KEPT_VIOLATIONS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub name: String,
    pub instances: usize,
    pub violation_count: usize,
    pub violations: Vec<String>,
}

impl AxiomCheck {
    fn new(name: &str) -> Self {
        AxiomCheck {
            name: name.to_string(),
            instances: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violation_count += 1;
            if self.violations.len() < KEPT_VIOLATIONS {
                self.violations.push(describe());
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub mode: TMode,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(AxiomCheck::holds)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.holds() { "ok" } else { "VIOLATED" };
            writeln!(f, "{:<28} {:>8} instances  {status}", c.name, c.instances)?;
            for v in &c.violations {
                writeln!(f, "    {v}")?;
            }
            if c.violation_count > c.violations.len() {
                writeln!(f, "    ... {} more", c.violation_count - c.violations.len())?;
            }
        }
        Ok(())
    }
}

/// Box and bla denotations, computed once per (group, atom set).
struct Models<'a> {
    sig: &'a LogicSignature,
    mode: TMode,
    subsets: Vec<Proposition>,
    boxes: HashMap<(Vec<usize>, Proposition), ModelSet>,
    blas: HashMap<(Vec<usize>, Proposition), ModelSet>,
}

impl<'a> Models<'a> {
    fn new(sig: &'a LogicSignature, mode: TMode) -> Self {
        Models {
            sig,
            mode,
            subsets: sig.frame().power_set().collect(),
            boxes: HashMap::new(),
            blas: HashMap::new(),
        }
    }

    fn boxed(&mut self, group: &[usize], e: Proposition) -> Result<ModelSet> {
        let key = (group.to_vec(), e);
        if let Some(m) = self.boxes.get(&key) {
            return Ok(m.clone());
        }
        let m = box_model(self.sig, self.mode, group, e)?;
        self.boxes.insert(key, m.clone());
        Ok(m)
    }

    fn bla(&mut self, group: &[usize], e: Proposition) -> Result<ModelSet> {
        let key = (group.to_vec(), e);
        if let Some(m) = self.blas.get(&key) {
            return Ok(m.clone());
        }
        let mut m = self.boxed(group, e)?;
        for f in e.subsets().filter(|f| *f != e) {
            m = m.difference(&self.boxed(group, f)?);
        }
        self.blas.insert(key, m.clone());
        Ok(m)
    }

    fn top(&self) -> ModelSet {
        ModelSet::universe(self.sig, self.mode)
    }

    fn bottom(&self) -> ModelSet {
        ModelSet::empty(self.sig, self.mode)
    }

    fn not(&self, e: Proposition) -> Proposition {
        Proposition::from_bits(self.sig.frame().full().bits() & !e.bits())
    }

    fn show(&self, e: Proposition) -> String {
        self.sig.frame().display(e)
    }
}

fn union_groups(j: &[usize], k: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = j.iter().chain(k).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn show_group(g: &[usize]) -> String {
    let parts: Vec<String> = g.iter().map(|s| (s + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Checks Partition, N, K, Inc and Ind in either mode, and T in the with-T
/// mode, over every group and atom set.
pub fn verify_axioms(sig: &LogicSignature, mode: TMode) -> Result<AxiomReport> {
    let mut m = Models::new(sig, mode);
    let groups = sig.source_groups();
    let subsets = m.subsets.clone();
    let top = m.top();
    let mut checks = Vec::new();

    let mut partition = AxiomCheck::new("Partition");
    let all = classical_model(sig, mode, sig.frame().full())?;
    partition.check(all == top, || "⟦⋁P⟧ ≠ ⟦⊤⟧".into());
    for p in 0..sig.atoms() {
        for q in 0..sig.atoms() {
            if p != q {
                let meet = classical_model(sig, mode, Proposition::atom(p))?.intersection(&classical_model(
                    sig,
                    mode,
                    Proposition::atom(q),
                )?);
                partition.check(meet.is_empty(), || format!("⟦p{p} ∧ p{q}⟧ ≠ ∅"));
            }
        }
    }
    checks.push(partition);

    let mut necessitation = AxiomCheck::new("N");
    for e in &subsets {
        if classical_model(sig, mode, *e)? != top {
            continue;
        }
        for j in &groups {
            let boxed = m.boxed(j, *e)?;
            necessitation.check(boxed == top, || format!("⟦[{}]{}⟧ ≠ ⟦⊤⟧", show_group(j), m.show(*e)));
        }
    }
    checks.push(necessitation);

    let mut k_axiom = AxiomCheck::new("K");
    for j in &groups {
        for x in &subsets {
            for y in &subsets {
                let implication = m.boxed(j, m.not(*x).union(*y))?;
                let lhs = implication.intersection(&m.boxed(j, *x)?);
                let ok = lhs.is_subset(&m.boxed(j, *y)?);
                k_axiom.check(ok, || format!("J={} X={} Y={}", show_group(j), m.show(*x), m.show(*y)));
            }
        }
    }
    checks.push(k_axiom);

    if mode == TMode::WithT {
        let mut t_axiom = AxiomCheck::new("T");
        for j in &groups {
            for x in &subsets {
                let ok = m.boxed(j, *x)?.is_subset(&classical_model(sig, mode, *x)?);
                t_axiom.check(ok, || format!("J={} X={}", show_group(j), m.show(*x)));
            }
        }
        checks.push(t_axiom);
    }

    let mut inc = AxiomCheck::new("Inc");
    for j in &groups {
        for k in &groups {
            let jk = union_groups(j, k);
            for x in &subsets {
                let ok = m.boxed(j, *x)?.is_subset(&m.boxed(&jk, *x)?);
                inc.check(ok, || {
                    format!("J={} K={} X={}", show_group(j), show_group(k), m.show(*x))
                });
            }
        }
    }
    checks.push(inc);

    let mut ind = AxiomCheck::new("Ind");
    for j in &groups {
        for k in &groups {
            let jk = union_groups(j, k);
            for e in &subsets {
                let mut rhs = m.bottom();
                for f in &subsets {
                    for g in &subsets {
                        if f.intersection(*g).is_subset_of(*e) {
                            rhs = rhs.union(&m.boxed(j, *f)?.intersection(&m.boxed(k, *g)?));
                        }
                    }
                }
                let ok = m.boxed(&jk, *e)?.is_subset(&rhs);
                ind.check(ok, || {
                    format!("J={} K={} E={}", show_group(j), show_group(k), m.show(*e))
                });
            }
        }
    }
    checks.push(ind);

    Ok(AxiomReport { mode, checks })
}

/// A witness that `[J]X → X` fails: a group, an atom set and a point in
/// `⟦[J]X⟧ ∖ ⟦X⟧`. Always `None` in the with-T mode.
pub fn t_counterexample(
    sig: &LogicSignature,
    mode: TMode,
) -> Result<Option<(Vec<usize>, Proposition, super::ModelPoint)>> {
    for j in sig.source_groups() {
        for x in sig.frame().power_set() {
            let outside = box_model(sig, mode, &j, x)?.difference(&classical_model(sig, mode, x)?);
            let point = outside.points().next();
            if let Some(point) = point {
                return Ok(Some((j, x, point)));
            }
        }
    }
    Ok(None)
}

fn is_partition(parts: &[ModelSet], top: &ModelSet) -> bool {
    let mut cover = ModelSet::empty(top.signature(), top.mode());
    for (i, p) in parts.iter().enumerate() {
        if parts[..i].iter().any(|q| !q.is_disjoint(p)) {
            return false;
        }
        cover = cover.union(p);
    }
    &cover == top
}

/// Subsets of `0..n` used as index families: all of them when small,
/// otherwise those of size at most two.
fn index_families(n: usize) -> Vec<Vec<usize>> {
    if n <= 8 {
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    } else {
        let mut out = vec![Vec::new()];
        for a in 0..n {
            out.push(vec![a]);
            for b in a + 1..n {
                out.push(vec![a, b]);
            }
        }
        out
    }
}

/// Checks the bla and combination identities: exclusivity, exhaustivity,
/// inversion, the (joint) bla partitions, the partition helper identities,
/// the combination lemma and the two- and many-source combination formulas.
pub fn verify_properties(sig: &LogicSignature, mode: TMode) -> Result<AxiomReport> {
    let mut m = Models::new(sig, mode);
    let groups = sig.source_groups();
    let subsets = m.subsets.clone();
    let top = m.top();
    let mut checks = Vec::new();

    let mut exclusive = AxiomCheck::new("bla exclusivity");
    let mut exhaustive = AxiomCheck::new("bla exhaustivity");
    let mut partition = AxiomCheck::new("bla partition");
    for j in &groups {
        let blas: Vec<ModelSet> = subsets.iter().map(|e| m.bla(j, *e)).collect::<Result<_>>()?;
        for (a, ea) in subsets.iter().enumerate() {
            for (b, eb) in subsets.iter().enumerate().skip(a + 1) {
                exclusive.check(blas[a].is_disjoint(&blas[b]), || {
                    format!("J={} E={} F={}", show_group(j), m.show(*ea), m.show(*eb))
                });
            }
            let mut below = m.bottom();
            for (b, eb) in subsets.iter().enumerate() {
                if eb.is_subset_of(*ea) {
                    below = below.union(&blas[b]);
                }
            }
            let boxed = m.boxed(j, *ea)?;
            exhaustive.check(below == boxed, || format!("J={} E={}", show_group(j), m.show(*ea)));
        }
        partition.check(is_partition(&blas, &top), || format!("J={}", show_group(j)));
    }
    checks.push(exclusive);
    checks.push(exhaustive);
    checks.push(partition);

    let mut joint = AxiomCheck::new("joint bla partition");
    let mut helper = AxiomCheck::new("partition identities");
    let mut lemma = AxiomCheck::new("combination lemma");
    for j in &groups {
        for k in &groups {
            let pi: Vec<ModelSet> = subsets.iter().map(|e| m.bla(j, *e)).collect::<Result<_>>()?;
            let lambda: Vec<ModelSet> = subsets.iter().map(|e| m.bla(k, *e)).collect::<Result<_>>()?;
            let cells: Vec<ModelSet> = pi
                .iter()
                .flat_map(|x| lambda.iter().map(move |y| x.intersection(y)))
                .collect();
            joint.check(is_partition(&cells, &top), || {
                format!("J={} K={}", show_group(j), show_group(k))
            });

            // Distinct pairs with equal meets meet in ⊥.
            for a in 0..cells.len() {
                for b in a + 1..cells.len() {
                    if cells[a] == cells[b] {
                        helper.check(cells[a].is_empty(), || {
                            format!("J={} K={} pairs {a},{b}", show_group(j), show_group(k))
                        });
                    }
                }
            }

            let jk = union_groups(j, k);
            for e in &subsets {
                let mut via_boxes = m.bottom();
                let mut via_blas = m.bottom();
                for (a, f) in subsets.iter().enumerate() {
                    for (b, g) in subsets.iter().enumerate() {
                        if f.intersection(*g).is_subset_of(*e) {
                            via_boxes = via_boxes.union(&m.boxed(j, *f)?.intersection(&m.boxed(k, *g)?));
                            via_blas = via_blas.union(&pi[a].intersection(&lambda[b]));
                        }
                    }
                }
                let lhs = m.boxed(&jk, *e)?;
                lemma.check(lhs == via_boxes && lhs == via_blas, || {
                    format!("J={} K={} E={}", show_group(j), show_group(k), m.show(*e))
                });
            }
        }
    }
    // (⋁A) ∧ ¬(⋁B) ≡ ⋁(A∖B) on the bla partition of each group.
    for j in &groups {
        let pi: Vec<ModelSet> = subsets.iter().map(|e| m.bla(j, *e)).collect::<Result<_>>()?;
        let families = index_families(pi.len());
        let join = |idx: &[usize]| idx.iter().fold(ModelSet::empty(sig, mode), |acc, i| acc.union(&pi[*i]));
        for a in &families {
            let ja = join(a);
            for b in &families {
                let diff: Vec<usize> = a.iter().filter(|i| !b.contains(i)).copied().collect();
                let ok = ja.intersection(&join(b).complement()) == join(&diff);
                helper.check(ok, || format!("J={} A={a:?} B={b:?}", show_group(j)));
            }
        }
    }
    checks.push(joint);
    checks.push(helper);
    checks.push(lemma);

    let mut two = AxiomCheck::new("two-group combination");
    for j in &groups {
        for k in &groups {
            if j.iter().any(|s| k.contains(s)) {
                continue;
            }
            let jk = union_groups(j, k);
            for e in &subsets {
                let ok = logical_combine(sig, mode, j, k, *e)? == m.bla(&jk, *e)?;
                two.check(ok, || {
                    format!("J={} K={} E={}", show_group(j), show_group(k), m.show(*e))
                });
            }
        }
    }
    checks.push(two);

    let mut many = AxiomCheck::new("many-group combination");
    for u in &groups {
        if u.len() < 2 {
            continue;
        }
        let singles: Vec<Vec<usize>> = u.iter().map(|s| vec![*s]).collect();
        for e in &subsets {
            let ok = logical_combine_many(sig, mode, &singles, *e)? == m.bla(u, *e)?;
            many.check(ok, || format!("groups={} E={}", show_group(u), m.show(*e)));
        }
    }
    checks.push(many);

    Ok(AxiomReport { mode, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;

    fn sig(atoms: usize, sources: usize) -> LogicSignature {
        let frame = Frame::new((0..atoms).map(|i| format!("p{i}"))).unwrap();
        LogicSignature::new(frame, sources).unwrap()
    }

    #[test]
    fn axioms_hold_in_both_modes() {
        for (p, n) in [(2, 2), (3, 2), (2, 3)] {
            for mode in [TMode::WithT, TMode::WithoutT] {
                let report = verify_axioms(&sig(p, n), mode).unwrap();
                assert!(report.holds(), "{report}");
                assert_eq!(report.check("T").is_some(), mode == TMode::WithT);
                assert!(report.checks.iter().all(|c| c.instances > 0), "{report}");
            }
        }
    }

    #[test]
    fn properties_hold_in_both_modes() {
        for (p, n) in [(2, 2), (2, 3)] {
            for mode in [TMode::WithT, TMode::WithoutT] {
                let report = verify_properties(&sig(p, n), mode).unwrap();
                assert!(report.holds(), "{report}");
            }
        }
    }

    #[test]
    fn t_fails_without_t() {
        let s = sig(2, 2);
        assert!(t_counterexample(&s, TMode::WithT).unwrap().is_none());
        let (j, x, point) = t_counterexample(&s, TMode::WithoutT).unwrap().unwrap();
        assert!(point.joint_knowledge(&j).is_subset_of(x));
        assert!(!x.contains_atom(point.truth));
    }

    #[test]
    fn ind_at_empty_set() {
        let s = sig(2, 2);
        let report = verify_axioms(&s, TMode::WithoutT).unwrap();
        let ind = report.check("Ind").unwrap();
        assert!(ind.holds());
        // 3 groups × 3 groups × 4 atom sets.
        assert_eq!(ind.instances, 36);
    }
}
