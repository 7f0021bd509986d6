use std::collections::BTreeSet;

use proptest::prelude::*;

use gkm::cohomology::{betti_from_hd, hd_bf, hd_br, hd_r};
use gkm::families::{bf_graph, br_graph, hij_graph, r_graph, Family, FlagIndex};
use gkm::toric::{
    check_external_monodromy, gkm_from_charpair, polytope_cube, polytope_face_subgraph,
    polytope_truncate, search_obstruction, unique_connection, CharPair,
};
use gkm::weightgraph::{
    admissible_bijections, forced_transport, is_definite_at, validate_axial, validate_connection,
    Connection, Weight, WeightHypergraph,
};

fn family_graph(kind: u8, i: usize, j: usize) -> Option<WeightHypergraph> {
    match kind {
        0 => bf_graph(i + j).ok(),
        1 => br_graph(i, j).ok(),
        2 => r_graph(i, j).ok(),
        _ => hij_graph(i, j).ok(),
    }
}

fn graphs() -> impl Strategy<Value = WeightHypergraph> {
    (0u8..4, 0usize..6, 0usize..6)
        .prop_filter("i + j ≤ 7", |(_, i, j)| i + j <= 7)
        .prop_filter_map("valid parameters", |(k, i, j)| family_graph(k, i, j))
}

/// Bott tower: column 2t is e_t, column 2t+1 is −e_t + Σ_{s>t} c_{ts} e_s.
fn bott_tower(n: usize, c: &[i64]) -> CharPair {
    let mut lambda = vec![vec![0i64; 2 * n]; n];
    let mut k = 0;
    for t in 0..n {
        lambda[t][2 * t] = 1;
        lambda[t][2 * t + 1] = -1;
        for row in lambda.iter_mut().skip(t + 1) {
            row[2 * t + 1] = c[k % c.len()];
            k += 1;
        }
    }
    CharPair::new(polytope_cube(n), lambda).expect("triangular minors")
}

/// Blow up along the face cut out by `face`: the new column is the sum of
/// the face columns.
fn blow_up(cp: &CharPair, face: &BTreeSet<usize>) -> Option<CharPair> {
    let p = polytope_truncate(cp.polytope(), face).ok()?;
    let n = cp.lambda().len();
    let lambda = (0..n)
        .map(|r| {
            let mut row = cp.lambda()[r].clone();
            row.push(face.iter().map(|&f| cp.lambda()[r][f]).sum());
            row
        })
        .collect();
    CharPair::new(p, lambda).ok()
}

fn charpairs() -> impl Strategy<Value = CharPair> {
    (
        2usize..=3,
        prop::collection::vec(-2i64..=2, 3),
        prop::option::of((0usize..64, 1usize..=2)),
    )
        .prop_filter_map("blow-up centre must be a proper face", |(n, c, cut)| {
            let cp = bott_tower(n, &c);
            match cut {
                None => Some(cp),
                Some((pick, codim)) if codim < n || n == 2 => {
                    let faces = cp.polytope().faces_of_codim(codim.min(n));
                    blow_up(&cp, &faces[pick % faces.len()])
                }
                Some(_) => Some(cp),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forced_transport_equals_brute_force(g in graphs(), pick in 0usize..10_000) {
        let edges = g.edges();
        prop_assume!(!edges.is_empty());
        let e = edges[pick % edges.len()];
        prop_assume!(is_definite_at(&g, e).unwrap());
        let all = admissible_bijections(&g, e);
        match forced_transport(&g, e) {
            Ok(f) => prop_assert_eq!(all, vec![f]),
            Err(_) => prop_assert_ne!(all.len(), 1),
        }
    }

    #[test]
    fn forced_transports_form_a_connection(g in graphs()) {
        let mut c = Connection::new();
        for e in g.edges() {
            if is_definite_at(&g, e).unwrap() {
                if let Ok(m) = forced_transport(&g, e) {
                    c.insert(e, m);
                }
            }
        }
        let rep = validate_connection(&g, &c);
        prop_assert!(rep.is_empty(), "{:?}", rep.violations);
    }

    #[test]
    fn transport_round_trip(g in graphs(), pick in 0usize..10_000) {
        let edges = g.edges();
        prop_assume!(!edges.is_empty());
        let e = edges[pick % edges.len()];
        let (Ok(there), Ok(back)) = (forced_transport(&g, e), forced_transport(&g, g.reverse(e))) else {
            return Ok(());
        };
        for (x, y) in &there {
            prop_assert_eq!(back.get(y), Some(x));
        }
    }

    #[test]
    fn family_graphs_validate(g in graphs()) {
        let rep = validate_axial(&g);
        prop_assert!(rep.is_empty(), "{}", rep);
    }

    #[test]
    fn graph_json_round_trip(g in graphs()) {
        let s = serde_json::to_string(&g.to_json()).unwrap();
        let back = WeightHypergraph::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        prop_assert_eq!(back.hyperedges(), g.hyperedges());
        prop_assert_eq!(back.labels(), g.labels());
    }

    #[test]
    fn fixed_points_match_euler_characteristic(kind in 0u8..3, i in 0usize..6, j in 0usize..6) {
        prop_assume!(i + j <= 8 && (kind != 0 || i + j >= 1));
        let hd = match kind {
            0 => Ok(hd_bf(i + j)),
            1 => hd_br(i, j),
            _ => hd_r(i, j),
        };
        let g = family_graph(kind, i, j);
        prop_assert_eq!(hd.is_ok(), g.is_some());
        if let (Ok(hd), Some(g)) = (hd, g) {
            prop_assert!(hd.is_palindromic());
            prop_assert_eq!(betti_from_hd(&hd).iter().sum::<i64>() as usize, g.num_vertices());
        }
    }

    #[test]
    fn weight_canonical_form(v in prop::collection::vec(-5i64..=5, 1..5)) {
        let w = Weight(v);
        prop_assert_eq!(w.canonical().canonical(), w.canonical());
        prop_assert_eq!(w.neg().canonical(), w.canonical());
        prop_assert!(w.is_zero() || w.canonical().is_sign_canonical());
    }

    #[test]
    fn flag_index_text_round_trip(bits in prop::collection::vec(any::<bool>(), 1..9)) {
        let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let f: FlagIndex = s.parse().unwrap();
        prop_assert_eq!(f.to_string(), s);
        prop_assert_eq!(f.flip(1).flip(1), f.clone());
    }

    #[test]
    fn family_text_round_trip(k in 0u8..4, i in 1usize..6, j in 1usize..6) {
        let f = match k {
            0 => Family::Bf(i),
            1 => Family::Br(i, j),
            2 => Family::R(i, j),
            _ => Family::H(i, j),
        };
        prop_assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smooth_toric_graphs_have_no_obstruction(cp in charpairs()) {
        let (g, c) = gkm_from_charpair(&cp).unwrap();
        prop_assert!(validate_axial(&g).is_empty());
        prop_assert!(validate_connection(&g, &c).is_empty());
        if let Ok(u) = unique_connection(&g) {
            prop_assert_eq!(u, c.clone());
        }
        let poly = cp.polytope();
        for codim in 1..poly.dim() {
            for face in poly.faces_of_codim(codim) {
                let sub = polytope_face_subgraph(&g, poly, &face);
                prop_assert!(check_external_monodromy(&g, &c, &sub, 8));
            }
        }
        prop_assert!(search_obstruction(&g, 6, 64, None).witness.is_none());
    }

    #[test]
    fn h_vector_is_palindromic(cp in charpairs()) {
        let h = cp.polytope().h_polynomial();
        prop_assert!(h.is_palindromic());
        prop_assert_eq!(h.coeffs.iter().sum::<i64>() as usize, cp.polytope().vertices().len());
    }
}
