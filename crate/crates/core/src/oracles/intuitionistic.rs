//! Dyckhoff's contraction-free calculus G4ip, with `~A` read as `A -> ⊥`.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum F {
    Bot,
    Atom(u32),
    And(Rc<F>, Rc<F>),
    Or(Rc<F>, Rc<F>),
    Imp(Rc<F>, Rc<F>),
}

fn imp(a: Rc<F>, b: Rc<F>) -> Rc<F> {
    Rc::new(F::Imp(a, b))
}

fn lower(f: &Formula, names: &mut Vec<String>) -> Rc<F> {
    Rc::new(match f {
        Formula::Atom(a) => {
            let i = match names.iter().position(|n| **n == **a) {
                Some(i) => i,
                None => {
                    names.push(a.to_string());
                    names.len() - 1
                }
            };
            F::Atom(i as u32)
        }
        Formula::Not(a) => F::Imp(lower(a, names), Rc::new(F::Bot)),
        Formula::And(a, b) => F::And(lower(a, names), lower(b, names)),
        Formula::Or(a, b) => F::Or(lower(a, names), lower(b, names)),
        Formula::Implies(a, b) => F::Imp(lower(a, names), lower(b, names)),
    })
}

type Ctx = BTreeSet<Rc<F>>;

#[derive(Default)]
struct Prover {
    memo: HashMap<(Ctx, Rc<F>), bool>,
}

impl Prover {
    fn prove(&mut self, mut ctx: Ctx, goal: Rc<F>) -> bool {
        // invertible left rules, applied to saturation
        loop {
            let Some(pick) = ctx.iter().find(|h| invertible_left(h, &ctx)).cloned() else {
                break;
            };
            ctx.remove(&pick);
            match &*pick {
                F::Bot => return true,
                F::And(a, b) => {
                    ctx.insert(a.clone());
                    ctx.insert(b.clone());
                }
                F::Or(a, b) => {
                    let mut l = ctx.clone();
                    l.insert(a.clone());
                    let mut r = ctx;
                    r.insert(b.clone());
                    return self.prove(l, goal.clone()) && self.prove(r, goal);
                }
                F::Imp(c, b) => match &**c {
                    F::Atom(_) => {
                        ctx.insert(b.clone());
                    }
                    F::Bot => {}
                    F::And(c1, c2) => {
                        ctx.insert(imp(c1.clone(), imp(c2.clone(), b.clone())));
                    }
                    F::Or(c1, c2) => {
                        ctx.insert(imp(c1.clone(), b.clone()));
                        ctx.insert(imp(c2.clone(), b.clone()));
                    }
                    F::Imp(..) => unreachable!("not invertible"),
                },
                F::Atom(_) => unreachable!("atoms stay in context"),
            }
        }
        if ctx.contains(&goal) {
            return true;
        }
        // invertible right rules
        match &*goal {
            F::And(a, b) => return self.prove(ctx.clone(), a.clone()) && self.prove(ctx, b.clone()),
            F::Imp(a, b) => {
                ctx.insert(a.clone());
                return self.prove(ctx, b.clone());
            }
            _ => {}
        }
        let key = (ctx, goal);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (ctx, goal) = key;
        let v = self.search(&ctx, &goal);
        self.memo.insert((ctx, goal), v);
        v
    }

    fn search(&mut self, ctx: &Ctx, goal: &Rc<F>) -> bool {
        if let F::Or(a, b) = &**goal {
            if self.prove(ctx.clone(), a.clone()) || self.prove(ctx.clone(), b.clone()) {
                return true;
            }
        }
        for h in ctx {
            if let F::Imp(cd, b) = &**h {
                if let F::Imp(c, d) = &**cd {
                    let mut rest = ctx.clone();
                    rest.remove(h);
                    let mut left = rest.clone();
                    left.insert(imp(d.clone(), b.clone()));
                    if !self.prove(left, cd.clone()) {
                        let _ = c;
                        continue;
                    }
                    rest.insert(b.clone());
                    if self.prove(rest, goal.clone()) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn invertible_left(h: &F, ctx: &Ctx) -> bool {
    match h {
        F::Bot | F::And(..) | F::Or(..) => true,
        F::Atom(_) => false,
        F::Imp(c, _) => match &**c {
            F::Atom(_) => ctx.contains(c),
            F::Imp(..) => false,
            _ => true,
        },
    }
}

/// Intuitionistic provability of `f`.
pub fn intuitionistic_valid(f: &Formula) -> bool {
    let mut names = Vec::new();
    let goal = lower(f, &mut names);
    Prover::default().prove(Ctx::new(), goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid(s: &str) -> bool {
        intuitionistic_valid(&s.parse().unwrap())
    }

    #[test]
    fn examples() {
        assert!(valid("p -> (q -> p)"));
        assert!(!valid("~p | ~~p"));
        assert!(!valid("~~p -> p"));
        assert!(!valid("p | ~p"));
        assert!(valid("~~(p | ~p)"));
        assert!(valid("p -> ~~p"));
        assert!(valid("~~~p -> ~p"));
        assert!(!valid("((p -> q) -> p) -> p"));
        assert!(valid("(p -> q) -> (~q -> ~p)"));
        assert!(!valid("(~q -> ~p) -> (p -> q)"));
        assert!(valid("(p | q) -> (q | p)"));
        assert!(valid("~(p | q) -> (~p & ~q)"));
        assert!(!valid("~(p & q) -> (~p | ~q)"));
    }
}
