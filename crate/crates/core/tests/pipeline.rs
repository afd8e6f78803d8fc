use knotpi::chi::ChiAlgebra;
use knotpi::cosimplicial::{
    bkss_pages, formality_collapse_check, pages_of_total, unnormalized_e2_dims,
};
use knotpi::pipeline::{
    chi_cosimplicial, e2_page, homology_cosimplicial, homology_side_e2, homotopy_e1,
    hurewicz_check, knot_pi_table, verify_support_bound, weight_of_degree, Limits,
};

#[test]
fn degree_pattern_of_e1() {
    for d in [4usize, 5, 6] {
        let chi = ChiAlgebra::new(d).unwrap();
        let e1 = homotopy_e1(&chi, 5, 3).unwrap();
        for e in e1.page.entries.iter().filter(|e| e.dim > 0) {
            let w = weight_of_degree(d, e.q).expect("q = w(d-2)+1");
            assert!((1..=3).contains(&w));
            assert_eq!(e.q, (w * (d - 2) + 1) as i64);
        }
    }
}

#[test]
fn row_euler_characteristic_e1_to_e2() {
    for d in [4usize, 5] {
        let chi = ChiAlgebra::new(d).unwrap();
        let e1 = homotopy_e1(&chi, 5, 3).unwrap();
        let e2 = e2_page(&e1).unwrap();
        assert_eq!(
            e1.page.row_euler_characteristics(),
            e2.row_euler_characteristics()
        );
        assert_eq!(e1.page.euler_characteristic(), e2.euler_characteristic());
    }
}

#[test]
fn stable_entries_survive_more_levels() {
    for d in [4usize, 5] {
        let chi = ChiAlgebra::new(d).unwrap();
        let small = pages_of_total(&homotopy_e1(&chi, 4, 3).unwrap().total, 3).unwrap();
        let big = pages_of_total(&homotopy_e1(&chi, 6, 3).unwrap().total, 3).unwrap();
        for (a, b) in small.iter().zip(&big) {
            for e in a.entries.iter().filter(|e| e.stable) {
                assert_eq!(e.dim, b.dim(e.s, e.q), "d={d} E{} s={} q={}", a.r, e.s, e.q);
            }
        }
    }
}

#[test]
fn homotopy_side_collapses_at_e2() {
    for d in [4usize, 5] {
        let chi = ChiAlgebra::new(d).unwrap();
        let v = chi_cosimplicial(&chi, 5, 3).unwrap();
        let r = formality_collapse_check(&v, 4).unwrap();
        assert!(r.passed);
        // the direct page computation agrees
        let pages = bkss_pages(&v, 3).unwrap();
        for e in pages[2].entries.iter().filter(|e| e.stable) {
            assert_eq!(e.dim, pages[1].dim(e.s, e.q));
        }
    }
}

#[test]
fn homology_side_normalized_vs_unnormalized() {
    for d in [4usize, 5] {
        let v = homology_cosimplicial(d, 4, 3 * (d - 1)).unwrap();
        let e2 = homology_side_e2(d, 4, 3 * (d - 1)).unwrap();
        let full = unnormalized_e2_dims(&v).unwrap();
        for s in 0..4 {
            for e in e2.entries.iter().filter(|e| e.s == s) {
                assert_eq!(e.dim, full.get(&(s, e.q)).copied().unwrap_or(0));
            }
        }
        // p = 2 column of E¹: the single class γ21 in degree d-1
        let e1 = bkss_pages(&v, 1).unwrap().remove(0);
        let col2: Vec<(i64, usize)> = e1
            .entries
            .iter()
            .filter(|e| e.s == 2 && e.dim > 0)
            .map(|e| (e.q, e.dim))
            .collect();
        assert_eq!(col2, [((d - 1) as i64, 1)]);
    }
}

#[test]
fn hurewicz_cross_check() {
    for d in [4usize, 5, 6] {
        let chi = ChiAlgebra::new(d).unwrap();
        assert!(hurewicz_check(&chi, 5).unwrap());
    }
}

#[test]
fn support_bound_other_dimensions() {
    for d in [6usize, 7] {
        let chi = ChiAlgebra::new(d).unwrap();
        for w in 1..=3 {
            let s = verify_support_bound(&chi, w, 7).unwrap();
            assert!(s.holds && s.holds_2w());
        }
    }
}

#[test]
fn pi_tables_by_parity() {
    let table = |d: usize, m_max: usize| -> Vec<usize> {
        let chi = ChiAlgebra::new(d).unwrap();
        let t = knot_pi_table(&chi, m_max, Limits::default()).unwrap();
        assert!(t.rows.iter().all(|r| r.complete));
        for r in &t.rows {
            let sum: usize = r.bidegrees.iter().map(|b| b.dim).sum();
            assert_eq!(sum, r.dim);
            assert!(r.bidegrees.iter().all(|b| b.q + b.p == r.m));
        }
        t.rows.iter().map(|r| r.dim).collect()
    };
    let t4 = table(4, 4);
    let t5 = table(5, 8);
    // d = 4: Ω²S³ contributes π_1, the first knot class sits at 2(d-3) = 2
    assert_eq!(t4[0], 1);
    assert_eq!(t4[1], 1);
    // d = 5: π_2 and π_5 from Ω²S⁴, π_4 from the first knot class, π_1 = π_3 = 0
    assert_eq!(&t5[..5], &[0, 1, 0, 1, 1]);
    // odd d sees Ω²S^{d-1} twice (degrees d-3 and 2d-5), even d once
    assert_ne!(t4[..4], t5[..4]);
    let t6 = table(6, 7);
    assert_eq!(t6, [0, 0, 1, 0, 0, 1, 0]);
}
