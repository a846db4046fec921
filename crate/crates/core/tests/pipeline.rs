use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;

use smoothpoly::catalog::CatalogFile;
use smoothpoly::constructions::{blow_down, blow_up_face, blowup_faces, exceptional_inequality};
use smoothpoly::enumerate3d::{classify, verify_entries, Category, Classification, ClosureConfig};
use smoothpoly::fans::{is_smooth, normal_fan, stellar_subdivide, Cone};
use smoothpoly::iso::{are_isomorphic, canonical_form};
use smoothpoly::labels::{edge_blowup_labels, label, vertex_blowup_labels};
use smoothpoly::{Face, LatticeVector, UnimodularAffineMap};

fn full() -> &'static Classification {
    static C: OnceLock<Classification> = OnceLock::new();
    C.get_or_init(|| classify(ClosureConfig::new(16)))
}

fn ids(c: &Classification) -> Vec<(String, Vec<LatticeVector>)> {
    c.entries
        .iter()
        .map(|e| (e.id.clone(), e.canonical.points.clone()))
        .collect()
}

#[test]
fn counts_by_embedding_dimension() {
    let mut by_dim = BTreeMap::new();
    for e in &full().entries {
        *by_dim.entry(e.embedding_dim()).or_insert(0) += 1;
    }
    let expected: BTreeMap<usize, usize> = [
        (3, 1),
        (5, 1),
        (6, 1),
        (7, 3),
        (8, 4),
        (9, 6),
        (10, 5),
        (11, 12),
        (12, 10),
        (13, 17),
        (14, 14),
        (15, 29),
    ]
    .into_iter()
    .collect();
    assert_eq!(by_dim, expected);
    assert_eq!(full().entries.len(), 103);
}

#[test]
fn counts_by_description() {
    let mut by_desc: BTreeMap<String, usize> = BTreeMap::new();
    for e in &full().entries {
        let d = e.fiber_description.split(" embedded in ").next().unwrap();
        let key = if d.starts_with("blow-up") {
            "blow-up"
        } else {
            d
        };
        *by_desc.entry(key.to_string()).or_insert(0) += 1;
    }
    let expected: BTreeMap<String, usize> = [
        ("P^3", 2),
        ("P^2-bundle over P^1", 69),
        ("P^1-bundle over F_0", 9),
        ("P^1-bundle over F_1", 7),
        ("P^1-bundle over F_2", 4),
        ("P^1-bundle over F_3", 2),
        ("P^1-bundle over F_4", 1),
        ("P^1-bundle over P^2", 3),
        ("P^1-bundle over Bl_2(P^2)", 1),
        ("P^1-bundle over Bl_3(P^2)", 1),
        ("blow-up", 4),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    assert_eq!(by_desc, expected);
}

#[test]
fn blowup_entries() {
    let iv: Vec<_> = full()
        .entries
        .iter()
        .filter(|e| e.category == Category::Blowup)
        .collect();
    let got: BTreeSet<(String, String, Option<String>)> = iv
        .iter()
        .map(|e| (e.id.clone(), e.label.to_string(), e.parent.clone()))
        .collect();
    let expected: BTreeSet<(String, String, Option<String>)> = [
        ("smooth3-14-16", "3^2 4^3 6^2", Some("smooth3-15-14")),
        ("smooth3-15-14", "3^2 4^2 5^2", Some("smooth3-16-26")),
        ("smooth3-16-28", "3^2 4^2 5^2 6^1", None),
        ("smooth3-16-29", "3^4 6^4", None),
    ]
    .into_iter()
    .map(|(a, b, c)| (a.to_string(), b.to_string(), c.map(str::to_string)))
    .collect();
    assert_eq!(got, expected);
    let desc: BTreeMap<&str, &str> = iv
        .iter()
        .map(|e| (e.id.as_str(), e.fiber_description.as_str()))
        .collect();
    assert_eq!(
        desc["smooth3-14-16"],
        "blow-up of P^2-bundle over P^1 at 2 vertices embedded in P^13"
    );
    assert_eq!(
        desc["smooth3-16-29"],
        "blow-up of P^3 at 4 vertices embedded in P^15"
    );
    for e in iv {
        assert!(!e.minimal);
        assert_eq!(e.f_vector.0, 2 * (e.f_vector.2 - 2));
    }
}

#[test]
fn pruning_and_seed_budget_do_not_change_the_result() {
    let base = ids(full());
    let mut cfg = ClosureConfig::new(16);
    cfg.prune = false;
    assert_eq!(ids(&classify(cfg)), base);
    cfg.seed_budget = 28;
    assert_eq!(ids(&classify(cfg)), base);
}

#[test]
fn repeated_runs_agree() {
    let again = classify(ClosureConfig::new(16));
    assert_eq!(ids(&again), ids(full()));
    assert_eq!(again.tallies, full().tallies);
}

#[test]
fn smaller_budget_is_a_prefix() {
    let small = classify(ClosureConfig::new(12));
    let expected: Vec<_> = ids(full())
        .into_iter()
        .filter(|(_, pts)| pts.len() <= 12)
        .collect();
    assert_eq!(ids(&small), expected);
}

#[test]
fn catalog_file_round_trip() {
    let file = CatalogFile::from_classification(full(), 16);
    let text = file.to_json_lines();
    assert_eq!(text.lines().count(), 104);
    let back = CatalogFile::parse(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_json_lines(), text);
    let total: usize = back.header.category_counts.values().sum();
    assert_eq!(total, back.entries.len());
    for (r, e) in back.entries.iter().zip(&full().entries) {
        assert_eq!(canonical_form(&r.polytope().unwrap()).unwrap(), e.canonical);
        let recipe = r.recipe.as_ref().unwrap();
        assert_eq!(
            canonical_form(&recipe.build().unwrap()).unwrap(),
            e.canonical
        );
    }
}

#[test]
fn catalog_passes_verification() {
    let report = verify_entries(&full().entries, 16);
    assert!(report.ok(), "{report}");
}

#[test]
fn entries_are_pairwise_non_isomorphic() {
    let es = &full().entries;
    for (i, a) in es.iter().enumerate() {
        assert!(are_isomorphic(&a.polytope, &a.polytope));
        for b in &es[i + 1..] {
            assert!(
                !are_isomorphic(&a.polytope, &b.polytope),
                "{} ~ {}",
                a.id,
                b.id
            );
        }
    }
}

#[test]
fn minimal_entries_are_cayley() {
    for e in &full().entries {
        if e.minimal {
            assert_ne!(e.category, Category::Blowup, "{}", e.id);
        }
    }
}

#[test]
fn blowups_of_catalog_entries() {
    for e in &full().entries {
        let p = &e.polytope;
        let fan = normal_fan(p);
        let l = label(p).unwrap();
        for face in blowup_faces(p) {
            let normals: Vec<LatticeVector> = p
                .facets_containing(&face)
                .iter()
                .map(|&f| p.facets()[f].inequality.normal)
                .collect();
            let sigma = Cone::new(normals).unwrap();
            let allowed = match face {
                Face::Vertex(_) => vertex_blowup_labels(&l),
                Face::Edge(..) => edge_blowup_labels(&l),
            };
            for k in 1..=3 {
                let Ok(q) = blow_up_face(p, &face, k) else {
                    break;
                };
                assert_eq!(q.vertices().len(), p.vertices().len() + 2);
                assert_eq!(q.facets().len(), p.facets().len() + 1);
                assert!(
                    allowed.contains(&label(&q).unwrap()),
                    "{} {face:?} {k}",
                    e.id
                );
                assert_eq!(normal_fan(&q), stellar_subdivide(&fan, &sigma).unwrap());
                let ex = exceptional_inequality(p, &face, k);
                let fi = q.facets().iter().position(|f| f.inequality == ex).unwrap();
                assert_eq!(blow_down(&q, fi).as_ref(), Some(p));
            }
        }
    }
}

fn unimodular3() -> impl Strategy<Value = UnimodularAffineMap> {
    (
        prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..6),
        prop::sample::select(vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]),
        prop::array::uniform3(-6i64..=6),
        prop::array::uniform3(prop::bool::ANY),
    )
        .prop_map(|(shears, perm, t, flips)| {
            let mut m: Vec<Vec<i64>> = (0..3)
                .map(|i| (0..3).map(|j| i64::from(perm[i] == j)).collect())
                .collect();
            for (i, f) in flips.iter().enumerate() {
                if *f {
                    for x in &mut m[i] {
                        *x = -*x;
                    }
                }
            }
            for (i, j, k) in shears {
                if i != j {
                    let row = m[j].clone();
                    for (x, y) in m[i].iter_mut().zip(row) {
                        *x += k * y;
                    }
                }
            }
            UnimodularAffineMap::new(&m, LatticeVector::new(&t).unwrap()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moved_entries_keep_their_identity(which in 0usize..103, m in unimodular3()) {
        let e = &full().entries[which];
        let q = e.polytope.image(&m);
        prop_assert!(is_smooth(&q));
        prop_assert_eq!(canonical_form(&q).unwrap(), e.canonical.clone());
        prop_assert_eq!(label(&q).unwrap(), e.label.clone());
        prop_assert_eq!(q.f_vector(), e.f_vector);
        prop_assert_eq!(q.num_points(), e.num_points());
    }
}
