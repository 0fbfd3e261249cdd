use proptest::prelude::*;

use sparse_ca::{
    cut_tree, fit_ca, fit_sparse_ca, read_contingency_csv, total_inertia, ward_cluster, write_contingency_csv,
    write_tables_csv, ContingencyTable, DenseMatrix, Error, SparseCaOptions, SparsityConstraint, Variant, WardVariant,
};

fn table(m: usize, n: usize, cells: &[u32]) -> ContingencyTable {
    // +1 keeps every margin positive
    let counts = DenseMatrix::from_fn(m, n, |i, j| (cells[i * n + j] + 1) as f64);
    ContingencyTable::from_counts(counts).unwrap()
}

fn tables() -> impl Strategy<Value = ContingencyTable> {
    (3usize..8, 3usize..8)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), prop::collection::vec(0u32..40, m * n)))
        .prop_map(|(m, n, cells)| table(m, n, &cells))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_exhaust_the_inertia(t in tables()) {
        let m = fit_ca(&t, 1).unwrap();
        let sum: f64 = m.eigenvalues.iter().sum();
        let phi2 = total_inertia(&t);
        prop_assert!((sum - phi2).abs() <= 1e-10 * phi2.max(1.0));
    }

    #[test]
    fn sparse_weights_respect_their_budgets(t in tables(), s in 0.6f64..1.0) {
        let ks = [SparsityConstraint::Coupled { sumabs: s }; 2];
        let fit = match fit_sparse_ca(&t, &ks, Variant::DoublySparse, &SparseCaOptions::default()) {
            Ok(f) => f,
            // rank-deficient draws can run out of dimensions
            Err(e) => {
                prop_assert!(matches!(e, Error::Degenerate(_)), "{e}");
                return Ok(());
            }
        };
        let (ru, rv) = ((t.n_rows() as f64).sqrt(), (t.n_cols() as f64).sqrt());
        for f in &fit.factors {
            let l1u: f64 = f.u.iter().map(|x| x.abs()).sum();
            let l1v: f64 = f.v.iter().map(|x| x.abs()).sum();
            prop_assert!(l1u <= s * ru + 1e-9 && l1v <= s * rv + 1e-9);
            let l2: f64 = f.v.iter().map(|x| x * x).sum();
            prop_assert!((l2 - 1.0).abs() < 1e-9);
        }
        let sum: f64 = fit.lambdas.iter().sum();
        prop_assert!(sum <= fit.total_inertia * (1.0 + 1e-9));
    }
}

#[test]
fn csv_fit_and_tables_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cells: Vec<u32> = (0..6 * 5).map(|k| (k * 7 % 11) as u32).collect();
    let t = table(6, 5, &cells);
    let path = dir.path().join("t.csv");
    write_contingency_csv(&path, &t).unwrap();
    let back = read_contingency_csv(&path, false).unwrap();
    assert_eq!(back.counts().as_slice(), t.counts().as_slice());

    let m = fit_ca(&back, 2).unwrap();
    let files = write_tables_csv(&m, dir.path()).unwrap();
    assert_eq!(files.len(), 3);

    let coords = m.a.clone();
    let tree = ward_cluster(&coords, back.row_labels(), WardVariant::D2).unwrap();
    let groups = cut_tree(&tree, 3).unwrap();
    assert_eq!(groups.iter().copied().max(), Some(2));
}
