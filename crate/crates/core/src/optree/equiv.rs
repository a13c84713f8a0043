use serde::Serialize;

use super::{eval_op, Model, Outcome};
use crate::domains::{DomainElement, FinModel};
use crate::fineval::{eval_fin, Env, EvalError};
use crate::oracles::OracleTable;
use crate::syntax::{typecheck, Term, TypeError};

/// Factor by which fuel is raised before a missing value counts as a
/// disagreement.
const RETRY_FACTOR: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Agree,
    Disagree,
    /// The denotation is a number, the tree had no value within the given
    /// fuel, and the value appeared at a larger fuel.
    InconclusiveFuel,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Agree => "AGREE",
            Verdict::Disagree => "DISAGREE",
            Verdict::InconclusiveFuel => "INCONCLUSIVE-FUEL",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub verdict: Verdict,
    /// `None` for bottom.
    pub denotation: Option<u32>,
    pub operational: Outcome,
    pub steps: u64,
}

/// Compares the denotation of `t` in the finite model with the value of its
/// computation tree.
pub fn check_equiv(
    t: &Term,
    m: &FinModel,
    oracles: &OracleTable,
    fuel: u64,
) -> Result<AgreementReport, EvalError> {
    let ty = typecheck(t, &oracles.typing_context())?;
    if !ty.is_base() {
        return Err(TypeError::TypeMismatch {
            expected: "0".into(),
            found: ty,
            location: "top level".into(),
        }
        .into());
    }
    let d = match eval_fin(t, &Env::new(), m, oracles)? {
        DomainElement::Nat(a) => Some(a),
        _ => None,
    };
    let model = Model::Finite(m.clone());
    let r = eval_op(t, &model, oracles, fuel);
    let verdict = match (d, &r.outcome) {
        (Some(a), Outcome::Value(b)) if *b == a as u64 => Verdict::Agree,
        (Some(_), Outcome::Value(_)) => Verdict::Disagree,
        (Some(a), Outcome::NoValueWithinFuel(_)) => {
            let again = eval_op(t, &model, oracles, fuel.saturating_mul(RETRY_FACTOR));
            if again.outcome == Outcome::Value(a as u64) {
                Verdict::InconclusiveFuel
            } else {
                Verdict::Disagree
            }
        }
        (Some(_), _) => Verdict::Disagree,
        (None, Outcome::Value(_)) => Verdict::Disagree,
        (None, _) => Verdict::Agree,
    };
    Ok(AgreementReport { verdict, denotation: d, operational: r.outcome, steps: r.steps })
}
