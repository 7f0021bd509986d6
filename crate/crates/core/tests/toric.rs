use std::collections::BTreeSet;

use gkm::families::bf_graph;
use gkm::toric::*;
use gkm::weightgraph::validate_axial;

fn diagonal_pair(p: SimplePolytope, cols: Vec<Vec<i64>>) -> CharPair {
    let n = cols[0].len();
    let lambda = (0..n)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    CharPair::new(p, lambda).unwrap()
}

#[test]
fn projective_space_and_products() {
    // ℙ² × ℙ¹
    let p = polytope_product(&polytope_simplex(2), &polytope_simplex(1));
    let cols = vec![
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![-1, -1, 0],
        vec![0, 0, 1],
        vec![0, 0, -1],
    ];
    let cp = diagonal_pair(p, cols);
    let (g, c) = gkm_from_charpair(&cp).unwrap();
    assert_eq!(g.num_vertices(), 6);
    assert!(validate_axial(&g).is_empty());
    assert_eq!(unique_connection(&g).unwrap(), c);
    assert_eq!(cp.polytope().h_polynomial().coeffs, vec![1, 2, 2, 1]);
    assert!(search_obstruction(&g, 6, 64, None).witness.is_none());
}

#[test]
fn bott_tower_matches_bounded_flags() {
    // BF_3 is the Bott tower with x_q^2 = x_q x_{q-1}
    let cols = vec![
        vec![1, 0, 0],
        vec![-1, 1, 0],
        vec![0, 1, 0],
        vec![0, -1, 1],
        vec![0, 0, 1],
        vec![0, 0, -1],
    ];
    let cp = diagonal_pair(polytope_cube(3), cols);
    let (g, _) = gkm_from_charpair(&cp).unwrap();
    assert!(find_isomorphism(&bf_graph(3).unwrap(), &g).is_some());
}

#[test]
fn non_unimodular_minor_is_rejected() {
    let lambda = vec![vec![1, 1, 0, 0], vec![0, 0, 2, 1]];
    assert!(matches!(
        CharPair::new(polytope_cube(2), lambda),
        Err(ToricError::MinorNotUnimodular { .. })
    ));
}

#[test]
fn truncation_rejects_non_faces() {
    let c = polytope_cube(3);
    assert!(polytope_truncate(&c, &BTreeSet::from([0, 1])).is_err());
    assert!(polytope_truncate(&c, &BTreeSet::new()).is_err());
    let v = polytope_truncate(&c, &BTreeSet::from([0, 2, 4])).unwrap();
    assert_eq!(v.f_vector(), vec![10, 15, 7, 1]);
}

#[test]
fn charpair_json_round_trip() {
    for p in Preset::ALL {
        let cp = p.charpair();
        let s = serde_json::to_string(&cp.to_json()).unwrap();
        let back = CharPair::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, cp);
    }
}

#[test]
fn preset_faces_span() {
    for p in Preset::ALL {
        let cp = p.charpair();
        let (g, c) = gkm_from_charpair(&cp).unwrap();
        let poly = cp.polytope();
        for face in poly.faces_of_codim(1) {
            let sub = polytope_face_subgraph(&g, poly, &face);
            assert!(
                check_external_monodromy(&g, &c, &sub, 8),
                "{} {face:?}",
                p.name()
            );
        }
    }
}

#[test]
fn family_graph_maps_onto_preset() {
    let cp = Preset::R22.charpair();
    let (g, _) = gkm_from_charpair(&cp).unwrap();
    let fam = Preset::R22.family().graph().unwrap();
    let iso = find_isomorphism(&fam, &g).unwrap();
    let mut seen = iso.vertices.clone();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), g.num_vertices());
}
