mod common;

use common::vertex_enumeration;
use nsc_core::{solve_lp, DenseMatrix, LpOutcome, LpProblem};
use proptest::prelude::*;

fn small_lp() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<bool>)> {
    (1usize..=4, 0usize..=5).prop_flat_map(|(nv, rows)| {
        (
            prop::collection::vec(-5i32..=5, nv),
            prop::collection::vec(prop::collection::vec(-5i32..=5, nv), rows),
            prop::collection::vec(-3i32..=10, rows),
            prop::collection::vec(any::<bool>(), nv),
        )
            .prop_map(|(c, g, h, mask)| {
                let to_f = |v: Vec<i32>| v.into_iter().map(f64::from).collect::<Vec<_>>();
                (to_f(c), g.into_iter().map(to_f).collect(), to_f(h), mask)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// Box-bounded random LPs agree with exhaustive vertex enumeration.
    #[test]
    fn simplex_matches_vertex_enumeration((c, g, h, mask) in small_lp()) {
        let nv = c.len();
        let mut rows = g.clone();
        let mut rhs = h.clone();
        for j in 0..nv {
            let mut up = vec![0.0; nv];
            up[j] = 1.0;
            rows.push(up.clone());
            rhs.push(4.0);
            up[j] = -1.0;
            rows.push(up);
            rhs.push(4.0);
        }
        // The solver sees the sign restrictions as flags; the oracle as rows.
        let mut oracle_rows = rows.clone();
        let mut oracle_rhs = rhs.clone();
        for (j, &nonneg) in mask.iter().enumerate() {
            if nonneg {
                let mut r = vec![0.0; nv];
                r[j] = -1.0;
                oracle_rows.push(r);
                oracle_rhs.push(0.0);
            }
        }
        let expected = vertex_enumeration(&c, &oracle_rows, &oracle_rhs);

        let problem = LpProblem::new(c.clone(), DenseMatrix::from_rows(&rows).unwrap(), rhs.clone(), mask.clone()).unwrap();
        let outcome = solve_lp(&problem, 1e-9).unwrap();
        match (expected, &outcome) {
            (Some(v), LpOutcome::Optimal { value, point }) => {
                prop_assert!((v - value).abs() <= 1e-8, "oracle {} vs simplex {}", v, value);
                for (row, hi) in rows.iter().zip(&rhs) {
                    let lhs: f64 = row.iter().zip(point).map(|(a, b)| a * b).sum();
                    prop_assert!(lhs <= hi + 1e-9);
                }
                for (j, &nonneg) in mask.iter().enumerate() {
                    prop_assert!(!nonneg || point[j] >= -1e-9);
                }
            }
            (None, LpOutcome::Infeasible) => {}
            (e, o) => prop_assert!(false, "oracle {:?} vs simplex {:?}", e, o),
        }
    }
}

#[test]
fn unbounded_ray_along_free_direction() {
    // max x + y with x - y <= 1, x free, y >= 0
    let p = LpProblem::new(
        vec![1.0, 1.0],
        DenseMatrix::from_rows(&[[1.0, -1.0]]).unwrap(),
        vec![1.0],
        vec![false, true],
    )
    .unwrap();
    assert_eq!(solve_lp(&p, 1e-9).unwrap(), LpOutcome::Unbounded);
}
