#![allow(dead_code)]

use emr_core::{Frame, MassFunction, Proposition, World};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn frame(atoms: usize) -> Frame {
    Frame::new(["a", "b", "c", "d", "e", "f"][..atoms].iter().copied()).unwrap()
}

/// A closed-world bba with up to `max_focal` distinct nonempty focal
/// elements, each carrying at least 0.05 before normalization.
pub fn random_mass(rng: &mut ChaCha8Rng, frame: &Frame, max_focal: usize) -> MassFunction {
    let mut sets: Vec<Proposition> = frame.power_set().filter(|p| !p.is_empty()).collect();
    sets.shuffle(rng);
    let k = rng.gen_range(1..=max_focal.min(sets.len()));
    let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    MassFunction::new(
        frame.clone(),
        World::Closed,
        sets[..k].iter().zip(&weights).map(|(p, w)| (*p, w / total)),
    )
    .unwrap()
}

/// `s` sources on a frame of `atoms` atoms.
pub fn random_sources(rng: &mut ChaCha8Rng, atoms: usize, s: usize, max_focal: usize) -> Vec<MassFunction> {
    let f = frame(atoms);
    (0..s).map(|_| random_mass(rng, &f, max_focal)).collect()
}

/// A random instance within the caps: 2–4 atoms, 2–3 sources, ≤ 4 focal
/// elements each.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Vec<MassFunction> {
    let atoms = rng.gen_range(2..=4);
    let s = rng.gen_range(2..=3);
    random_sources(rng, atoms, s, 4)
}

/// A probability density: mass on singletons only.
pub fn random_probability(rng: &mut ChaCha8Rng, frame: &Frame) -> MassFunction {
    let weights: Vec<f64> = (0..frame.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    MassFunction::new(
        frame.clone(),
        World::Closed,
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| (Proposition::atom(i), w / total)),
    )
    .unwrap()
}

/// Sends each focal element of `m` to random nonempty subsets of itself.
pub fn random_sharpened(rng: &mut ChaCha8Rng, m: &MassFunction) -> MassFunction {
    let mut out = Vec::new();
    for (x, v) in m.entries() {
        let subs: Vec<Proposition> = x.subsets().filter(|p| !p.is_empty()).collect();
        let parts = rng.gen_range(1..=2);
        for k in 0..parts {
            let y = *subs.choose(rng).unwrap();
            out.push((
                y,
                if parts == 1 {
                    v
                } else if k == 0 {
                    v * 0.4
                } else {
                    v * 0.6
                },
            ));
        }
    }
    MassFunction::new(m.frame().clone(), m.world(), out).unwrap()
}

/// Every family of pairwise disjoint nonempty subsets.
pub fn disjoint_families(frame: &Frame) -> Vec<Vec<Proposition>> {
    fn grow(rest: Proposition, start: u32, acc: &mut Vec<Proposition>, out: &mut Vec<Vec<Proposition>>) {
        if !acc.is_empty() {
            out.push(acc.clone());
        }
        for bits in start..=rest.bits() {
            let p = Proposition::from_bits(bits);
            if p.is_empty() || !p.is_subset_of(rest) {
                continue;
            }
            acc.push(p);
            grow(Proposition::from_bits(rest.bits() & !bits), bits + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    grow(frame.full(), 1, &mut Vec::new(), &mut out);
    out
}
