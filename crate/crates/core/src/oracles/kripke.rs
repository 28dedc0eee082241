//! Brute-force Kripke semantics over small partial orders.

use std::fmt;

use crate::formula::Formula;

/// A rooted finite countermodel: world 0 is the root and does not force the
/// formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeCountermodel {
    /// `le[i][j]`: world j is accessible from world i.
    pub le: Vec<Vec<bool>>,
    /// Atoms forced at each world.
    pub forced: Vec<Vec<String>>,
}

impl fmt::Display for KripkeCountermodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kripke countermodel:")?;
        for (i, atoms) in self.forced.iter().enumerate() {
            let above: Vec<String> = (0..self.le.len())
                .filter(|&j| j != i && self.le[i][j])
                .map(|j| format!("w{j}"))
                .collect();
            write!(f, " w{i}{{{}}}", atoms.join(","))?;
            if !above.is_empty() {
                write!(f, "<{}", above.join(","))?;
            }
        }
        Ok(())
    }
}

/// All partial orders on `n` worlds in which world 0 is below every world.
fn rooted_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (1..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..1 << pairs.len() {
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
            le[0][i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if bits >> k & 1 == 1 {
                le[i][j] = true;
            }
        }
        let antisym = (0..n).all(|i| (0..n).all(|j| i == j || !(le[i][j] && le[j][i])));
        let trans = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(le[i][j] && le[j][k]) || le[i][k])));
        if antisym && trans {
            out.push(le);
        }
    }
    out
}

fn forces(f: &Formula, w: usize, le: &[Vec<bool>], val: &[u32], atoms: &[String]) -> bool {
    let up = |w: usize| (0..le.len()).filter(move |&v| le[w][v]);
    match f {
        Formula::Atom(a) => {
            let i = atoms.iter().position(|x| **x == **a).unwrap();
            val[w] >> i & 1 == 1
        }
        Formula::Not(a) => up(w).all(|v| !forces(a, v, le, val, atoms)),
        Formula::And(a, b) => forces(a, w, le, val, atoms) && forces(b, w, le, val, atoms),
        Formula::Or(a, b) => forces(a, w, le, val, atoms) || forces(b, w, le, val, atoms),
        Formula::Implies(a, b) => {
            up(w).all(|v| !forces(a, v, le, val, atoms) || forces(b, v, le, val, atoms))
        }
    }
}

/// A countermodel with at most `max_worlds` worlds, if one exists.
pub fn kripke_countermodel(f: &Formula, max_worlds: usize) -> Option<KripkeCountermodel> {
    let atoms = f.atoms();
    let k = atoms.len();
    for n in 1..=max_worlds {
        for le in rooted_orders(n) {
            // valuations: one atom bitmask per world, monotone along le
            let total = 1usize << (k * n);
            for code in 0..total {
                let val: Vec<u32> = (0..n).map(|w| ((code >> (w * k)) & ((1 << k) - 1)) as u32).collect();
                let monotone = (0..n).all(|i| (0..n).all(|j| !le[i][j] || val[i] & !val[j] == 0));
                if monotone && !forces(f, 0, &le, &val, &atoms) {
                    let forced = val
                        .iter()
                        .map(|&m| (0..k).filter(|i| m >> i & 1 == 1).map(|i| atoms[i].clone()).collect())
                        .collect();
                    return Some(KripkeCountermodel { le, forced });
                }
            }
        }
    }
    None
}

/// Truth in every Kripke model on at most `max_worlds` worlds.
pub fn kripke_valid(f: &Formula, max_worlds: usize) -> bool {
    kripke_countermodel(f, max_worlds).is_none()
}
