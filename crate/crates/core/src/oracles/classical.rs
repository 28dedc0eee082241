use std::collections::BTreeMap;

use crate::formula::Formula;

fn eval(f: &Formula, v: &BTreeMap<&str, bool>) -> bool {
    match f {
        Formula::Atom(a) => v[&**a],
        Formula::Not(a) => !eval(a, v),
        Formula::And(a, b) => eval(a, v) && eval(b, v),
        Formula::Or(a, b) => eval(a, v) || eval(b, v),
        Formula::Implies(a, b) => !eval(a, v) || eval(b, v),
    }
}

/// First falsifying assignment in binary counting order, if any.
pub fn classical_countermodel(f: &Formula) -> Option<BTreeMap<String, bool>> {
    let atoms = f.atoms();
    assert!(atoms.len() < 32, "too many atoms for a truth table");
    (0u32..1 << atoms.len()).find_map(|bits| {
        let v: BTreeMap<&str, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), bits >> i & 1 == 1))
            .collect();
        (!eval(f, &v)).then(|| v.into_iter().map(|(k, b)| (k.to_string(), b)).collect())
    })
}

pub fn classical_valid(f: &Formula) -> bool {
    classical_countermodel(f).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(classical_valid(&"p | ~p".parse().unwrap()));
        assert!(classical_valid(&"((p -> q) -> p) -> p".parse().unwrap()));
        let cm = classical_countermodel(&"p -> q".parse().unwrap()).unwrap();
        assert_eq!(cm["p"], true);
        assert_eq!(cm["q"], false);
    }
}
