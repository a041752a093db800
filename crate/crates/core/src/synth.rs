//! Generator for the bundled synthetic example family, parameterised by
//! (n, m): a chain of two recursive rules over four fact shapes whose
//! materialisation adds exactly `n + 2nm` facts.

/// Triple data of the family:
/// `P(a_i, d)` for i in 1..=2n, `P(b_i, c_i)` and `T(d, e_i)` for i in 1..=m,
/// and `R(a_2i)` for i in 1..=n (emitted as `rdf:type` triples).
pub fn example_triples(n: usize, m: usize) -> String {
    let mut out = String::new();
    for i in 1..=2 * n {
        out.push_str(&format!("<a{i}> <P> <d> .\n"));
    }
    for i in 1..=m {
        out.push_str(&format!("<b{i}> <P> <c{i}> .\n"));
    }
    for i in 1..=n {
        out.push_str(&format!("<a{}> <rdf:type> <R> .\n", 2 * i));
    }
    for i in 1..=m {
        out.push_str(&format!("<d> <T> <e{i}> .\n"));
    }
    out
}

/// The two recursive rules joining the family's facts.
pub fn example_rules() -> &'static str {
    "S(?x,?y) :- P(?x,?y), R(?x) .\nP(?x,?z) :- S(?x,?y), T(?y,?z) .\n"
}
