//! Greedy compression of plain substitutions into meta-substitutions.
//!
//! Rows are consumed in the order given; a row is appended to the first
//! meta-substitution (in creation order) whose every column tail does not
//! exceed the row's value for that column, otherwise a fresh
//! meta-substitution of single-constant leaves is started. Callers sort
//! their input; sorted single-column input therefore packs into one
//! meta-substitution.

use crate::dict::{Constant, Variable};
use crate::meta::{MetaId, MuMapping};
use crate::stream::MetaSub;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompressError {
    #[error("row has {found} values but the domain has {expected} variables")]
    DomainMismatch { expected: usize, found: usize },
    #[error("cannot compress rows over an empty domain")]
    EmptyDomain,
}

/// Compresses `rows` (each aligned to `domain`) into meta-substitutions whose
/// represented multiset equals the input. Appends mutate only leaves created
/// by this call.
pub fn compress(
    domain: &[Variable],
    rows: &[Vec<Constant>],
    mu: &mut MuMapping,
) -> Result<Vec<MetaSub>, CompressError> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    if domain.is_empty() {
        return Err(CompressError::EmptyDomain);
    }
    // leaves per open meta-substitution, aligned to the domain
    let mut builders: Vec<Vec<MetaId>> = Vec::new();
    for row in rows {
        if row.len() != domain.len() {
            return Err(CompressError::DomainMismatch {
                expected: domain.len(),
                found: row.len(),
            });
        }
        let target = builders
            .iter()
            .position(|leaves| leaves.iter().zip(row).all(|(l, c)| mu.tail(*l) <= *c));
        match target {
            Some(t) => {
                for (leaf, c) in builders[t].iter().zip(row) {
                    mu.append_to_leaf(*leaf, *c);
                }
            }
            None => {
                let leaves: Vec<MetaId> = row.iter().map(|c| mu.repeated_leaf(*c, 1)).collect();
                builders.push(leaves);
            }
        }
    }
    Ok(builders
        .into_iter()
        .map(|leaves| {
            let bindings: Vec<(Variable, MetaId)> = domain.iter().copied().zip(leaves).collect();
            MetaSub::new(bindings, mu)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::NodeDef;

    fn vars(n: u32) -> Vec<Variable> {
        (0..n).map(Variable).collect()
    }

    #[test]
    fn sorted_rows_pack_into_one() {
        // (b1,c1), (b2,c2) with b1 < b2 and c1 < c2
        let mut mu = MuMapping::new();
        let v = vars(2);
        let rows = vec![
            vec![Constant(0), Constant(2)],
            vec![Constant(1), Constant(3)],
        ];
        let t = compress(&v, &rows, &mut mu).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(
            mu.unfold_vec(t[0].get(v[0]).unwrap()),
            vec![Constant(0), Constant(1)]
        );
        assert_eq!(
            mu.unfold_vec(t[0].get(v[1]).unwrap()),
            vec![Constant(2), Constant(3)]
        );
    }

    #[test]
    fn descending_input_forces_fresh_meta_substitution() {
        let mut mu = MuMapping::new();
        let v = vars(1);
        let rows = vec![vec![Constant(1)], vec![Constant(0)]];
        let t = compress(&v, &rows, &mut mu).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn empty_input_gives_empty_output() {
        let mut mu = MuMapping::new();
        let t = compress(&vars(1), &[], &mut mu).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn equal_constant_extends_the_run() {
        let mut mu = MuMapping::new();
        let v = vars(1);
        let rows = vec![vec![Constant(4)], vec![Constant(4)], vec![Constant(4)]];
        let t = compress(&v, &rows, &mut mu).unwrap();
        assert_eq!(t.len(), 1);
        match mu.def(t[0].get(v[0]).unwrap()) {
            NodeDef::Leaf(runs) => {
                assert_eq!(runs.len(), 1);
                assert_eq!(runs[0].count, 3);
            }
            _ => panic!("expected leaf"),
        }
    }

    #[test]
    fn first_satisfying_candidate_wins() {
        // row 3 fits both open meta-substitutions; it must extend the first
        let mut mu = MuMapping::new();
        let v = vars(1);
        let rows = vec![vec![Constant(5)], vec![Constant(0)], vec![Constant(7)]];
        let t = compress(&v, &rows, &mut mu).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            mu.unfold_vec(t[0].get(v[0]).unwrap()),
            vec![Constant(5), Constant(7)]
        );
        assert_eq!(mu.unfold_vec(t[1].get(v[0]).unwrap()), vec![Constant(0)]);
    }

    #[test]
    fn sorted_single_variable_input_packs_into_one() {
        let mut mu = MuMapping::new();
        let v = vars(1);
        let rows: Vec<Vec<Constant>> = (0..30).map(|c| vec![Constant(c / 3)]).collect();
        let t = compress(&v, &rows, &mut mu).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].len(), 30);
    }

    #[test]
    fn row_width_mismatch_is_an_error() {
        let mut mu = MuMapping::new();
        let err = compress(&vars(2), &[vec![Constant(0)]], &mut mu).unwrap_err();
        assert!(matches!(
            err,
            CompressError::DomainMismatch {
                expected: 2,
                found: 1
            }
        ));
    }
}
