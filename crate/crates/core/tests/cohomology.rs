use gkm::cohomology::*;

#[test]
fn r22_annihilator_matches_known_generators() {
    let (a, ann, q) = r_cohomology(2, 2).unwrap();
    assert_eq!(a.rank(), 16);
    assert_eq!(ann.rank(), 6);
    let known = ideal_generated(
        &a,
        &[
            a.eval("(x2-x1)*(y2-y1)").unwrap(),
            a.eval("x2^2-x2*y2+y2^2").unwrap(),
        ],
    )
    .unwrap();
    assert!(known.same_as(&ann));
    // with a plus sign the quadric is killed by x2 - y2 instead
    let plus = a.eval("x2^2+x2*y2+y2^2").unwrap();
    assert!(!ann.contains(&plus));
    let other = annihilator(&a, &a.eval("x2 - y2").unwrap()).unwrap();
    assert!(other.contains(&plus));
    assert_eq!(q.graded_ranks(), vec![1, 4, 4, 1]);
    q.verify_associative().unwrap();
}

#[test]
fn br32_relations_hold() {
    let (a, ann, q) = br_cohomology(3, 2).unwrap();
    assert!(ann.contains(&a.eval("x2*y^2 - x3*y^2").unwrap()));
    assert!(ann.contains(&a.eval("x3^3 - x3^2*y + x3*y^2").unwrap()));
    assert_eq!(
        q.graded_ranks(),
        hd_br(3, 2)
            .unwrap()
            .coeffs
            .iter()
            .map(|&c| c as usize)
            .collect::<Vec<_>>()
    );
}

#[test]
fn printed_substitution_is_not_a_ring_map() {
    let (_, _, q) = r_cohomology(2, 2).unwrap();
    let b = blowup_ring(&r22_blowup_data()).unwrap();
    let lit = ["x1", "x1+v", "y1", "y2"];
    let images: Vec<(String, Elem)> = ["x1", "y1", "y2", "x2"]
        .iter()
        .zip(lit)
        .map(|(g, s)| (g.to_string(), b.eval(s).unwrap()))
        .collect();
    assert!(check_ring_isomorphism(&q, &b, &images).is_err());
}

#[test]
fn r22_quotient_is_isomorphic_to_blowup_model() {
    let (_, _, q) = r_cohomology(2, 2).unwrap();
    let b = blowup_ring(&r22_blowup_data()).unwrap();
    let m = [("x1", "x1"), ("x2", "x1+y2+v"), ("y1", "y1"), ("y2", "y2")];
    let images: Vec<(String, Elem)> = m
        .iter()
        .map(|(g, s)| (g.to_string(), b.eval(s).unwrap()))
        .collect();
    check_ring_isomorphism(&q, &b, &images).unwrap();
}

#[test]
fn graded_ranks_match_hodge_deligne() {
    for i in 1..=5 {
        for j in 1..=(8 - i).min(5) {
            let want = |p: HDPolynomial| p.coeffs.iter().map(|&c| c as usize).collect::<Vec<_>>();
            let (_, _, q) = br_cohomology(i, j).unwrap();
            assert_eq!(q.graded_ranks(), want(hd_br(i, j).unwrap()), "BR {i},{j}");
            let (_, _, q) = r_cohomology(i, j).unwrap();
            assert_eq!(q.graded_ranks(), want(hd_r(i, j).unwrap()), "R {i},{j}");
        }
    }
}

#[test]
fn binomial_betti_formulas() {
    for i in 1..=10 {
        for j in 1..=10 - i {
            if i > j {
                assert_eq!(
                    betti_br_binomial(i, j).unwrap(),
                    hd_br(i, j).unwrap().coeffs,
                    "BR {i},{j}"
                );
            }
            if i + j > 2 {
                assert_eq!(
                    betti_r_binomial(i, j).unwrap(),
                    hd_r(i, j).unwrap().coeffs,
                    "R {i},{j}"
                );
            }
        }
    }
}
