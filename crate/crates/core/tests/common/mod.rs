#![allow(dead_code)]

use kaccoh::cartan::{CartanMatrix, IndexSet};

pub struct Fixture {
    pub name: &'static str,
    pub rows: Vec<Vec<i64>>,
    /// Expected nontrivial items, transcribed from the published lists.
    pub expected: &'static str,
}

impl Fixture {
    pub fn matrix(&self) -> CartanMatrix {
        CartanMatrix::validate(&self.rows).unwrap()
    }
}

pub fn s(v: &[usize]) -> IndexSet {
    IndexSet::from_members(v.iter().map(|i| i - 1))
}

/// One matrix per rank-3 shape of the simplicial category.
pub fn rank_three() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "rank 3, maximal 1 2 3",
            rows: vec![vec![2, -2, -2], vec![-2, 2, -2], vec![-2, -2, 2]],
            expected: r"$\Sigma(P-(P_{1}+P_{2}))\oplus \Sigma(P-(P_{12}+P_{3}))\oplus P_{123}$",
        },
        Fixture {
            name: "rank 3, maximal 12 3",
            rows: vec![vec![2, -1, -3], vec![-3, 2, -2], vec![-2, -2, 2]],
            expected: r"$\Sigma(P-(P_{12}+P_{3}))\oplus P_{123}$",
        },
        Fixture {
            name: "rank 3, maximal 12 13",
            rows: vec![vec![2, -1, -1], vec![-1, 2, -3], vec![-1, -3, 2]],
            expected: r"$\Sigma(P_1-(P_{12}+P_{13}))\oplus P_{123}$",
        },
        Fixture {
            name: "rank 3, maximal 12 13 23",
            rows: vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]],
            expected: r"$\Sigma^2(P-(P_{1}+P_{2}+P_3))\oplus \Sigma(P_1\cap(P_2+P_3)-(P_{12}+P_{13}))\oplus P_{123}$",
        },
    ]
}

pub fn rank_four() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "rank 4, maximal 12 34",
            rows: vec![vec![2, -1, -2, -2], vec![-1, 2, -2, -2], vec![-2, -2, 2, -1], vec![-2, -2, -1, 2]],
            expected: r"$\Sigma(P-(P_{12}+P_{34}))\oplus P_{1234}$",
        },
        Fixture {
            name: "rank 4, all pairs maximal",
            rows: vec![vec![2, -1, -1, -1], vec![-1, 2, -1, -1], vec![-1, -1, 2, -1], vec![-1, -1, -1, 2]],
            expected: r"$\Sigma^2(P-(P_1+P_2+P_3))\oplus \Sigma^2(P-(P_{1}+P_2+P_{4}))\oplus \Sigma^2(P-(P_1\cap(P_2+P_4)+P_3+P_4))\oplus \Sigma(P_1\cap(P_2+P_4)\cap(P_3+P_4)-(P_{123}+P_{14})\oplus \Sigma(P_1\cap(P_2+P_3)-(P_{12}+P_{13})\oplus P_{1234}$",
        },
        Fixture {
            name: "rank 4, all triples maximal",
            rows: vec![vec![2, -1, 0, -1], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![-1, 0, -1, 2]],
            expected: r"$\Sigma^3(P-(P_{1}+P_{2}+P_{3}+P_{4}))\oplus \Sigma^2(P_{1}\cap (P_{2}+P_{3}+P_{4})-(P_{12}+P_{13}+P_{14}))\oplus \Sigma^2(P_{2}\cap (P_{3}+P_{4})-(P_{12}\cap (P_{13}+P_{14})+P_{23}+P_{24}))\oplus \Sigma(P_{12}\cap (P_{13}+P_{14})\cap (P_{23}+P_{24})-(P_{123}+P_{124}))\oplus P_{1234}$",
        },
    ]
}

pub fn all() -> Vec<Fixture> {
    let mut v = rank_three();
    v.extend(rank_four());
    v
}

/// Brings a transcribed item to the printed form: markup and spacing removed,
/// unclosed parentheses closed at the end.
pub fn normalize(item: &str) -> String {
    let mut out: String = item
        .replace(r"\Sigma", "Σ")
        .replace(r"\cap", "∩")
        .chars()
        .filter(|c| !matches!(c, '$' | '{' | '}' | '.') && !c.is_whitespace())
        .collect();
    let open = out.matches('(').count();
    let close = out.matches(')').count();
    for _ in close..open {
        out.push(')');
    }
    out
}

pub fn expected_items(f: &Fixture) -> Vec<String> {
    f.expected.split(r"\oplus").map(normalize).collect()
}
