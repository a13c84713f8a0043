use std::collections::BTreeSet;

use super::Term;

/// Capture-avoiding substitution `t[x := s]`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let fvs = s.free_vars();
    go(t, x, s, &fvs)
}

fn go(t: &Term, x: &str, s: &Term, fvs: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(y) if y == x => s.clone(),
        Term::App(f, a) => Term::App(Box::new(go(f, x, s, fvs)), Box::new(go(a, x, s, fvs))),
        Term::Lam(y, ty, body) | Term::Fix(y, ty, body) => {
            let rebuild = |y: String, body: Term| match t {
                Term::Lam(..) => Term::Lam(y, ty.clone(), Box::new(body)),
                _ => Term::Fix(y, ty.clone(), Box::new(body)),
            };
            if y == x || !body.has_free(x) {
                return t.clone();
            }
            if fvs.contains(y) {
                let mut avoid = fvs.clone();
                avoid.extend(body.free_vars());
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = go(body, y, &Term::Var(y2.clone()), &BTreeSet::from([y2.clone()]));
                rebuild(y2, go(&renamed, x, s, fvs))
            } else {
                rebuild(y.clone(), go(body, x, s, fvs))
            }
        }
        _ => t.clone(),
    }
}

/// Appends primes to `base` until the name is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}
