use std::sync::Arc;

use super::Formula;

/// Every formula over `alphabet` with at most `max_size` connectives, each
/// exactly once, ordered by size and then by the structural order of
/// [`Formula`] (prefix tokens compared left to right).
///
/// Strata are materialized one size at a time, so memory grows with the
/// largest stratum rather than with the whole stream.
pub fn enumerate_formulas(alphabet: &[&str], max_size: usize) -> impl Iterator<Item = Formula> {
    assert!(!alphabet.is_empty(), "alphabet must be nonempty");
    let mut atoms: Vec<Formula> = alphabet.iter().map(|a| Formula::atom(a)).collect();
    atoms.sort();
    atoms.dedup();
    Strata {
        strata: Vec::new(),
        atoms,
        max_size,
        next_size: 0,
    }
    .flat_map(|stratum: Arc<Vec<Arc<Formula>>>| {
        (0..stratum.len()).map(move |i| (*stratum[i]).clone())
    })
}

struct Strata {
    strata: Vec<Arc<Vec<Arc<Formula>>>>,
    atoms: Vec<Formula>,
    max_size: usize,
    next_size: usize,
}

impl Iterator for Strata {
    type Item = Arc<Vec<Arc<Formula>>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_size > self.max_size {
            return None;
        }
        let n = self.next_size;
        self.next_size += 1;
        let mut layer: Vec<Arc<Formula>> = Vec::new();
        if n == 0 {
            layer.extend(self.atoms.iter().cloned().map(Arc::new));
        } else {
            for sub in self.strata[n - 1].iter() {
                layer.push(Arc::new(Formula::Not(sub.clone())));
            }
            for left in 0..n {
                let right = n - 1 - left;
                for l in self.strata[left].iter() {
                    for r in self.strata[right].iter() {
                        layer.push(Arc::new(Formula::And(l.clone(), r.clone())));
                        layer.push(Arc::new(Formula::Or(l.clone(), r.clone())));
                        layer.push(Arc::new(Formula::Implies(l.clone(), r.clone())));
                    }
                }
            }
            layer.sort_unstable();
        }
        let layer = Arc::new(layer);
        if n < self.max_size {
            self.strata.push(layer.clone());
        }
        Some(layer)
    }
}
