//! End-to-end checks of the good-path machinery: profile construction,
//! window verification, threshold sets, vectors, and both cut routes.

use surplus_lab::gen;
use surplus_lab::rounding::{analytic_expected_cut, augment_with_identity, hyperplane_round};
use surplus_lab::sampling::bucket_neighborhood_cut;
use surplus_lab::structure::{good_path_profile, intersection_sums, st_sets, GoodPathParams};
use surplus_lab::vectors::{odd_cycle_st_vectors, path_edge_terms};

#[test]
fn profile_on_c7_blowup() {
    let g = gen::blowup(&gen::cycle(7), 2).unwrap();
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 42)).unwrap();
    assert_eq!(prof.ell, 3);
    // Distance-1 windows are pinned at 1.
    for i in 0..prof.ell {
        assert_eq!(prof.window(i, i + 1), 1);
    }
    // Every stored tuple re-verified against the walk-count windows.
    for level in &prof.levels {
        let q = level.level;
        for tuple in &level.full_tuples {
            assert_eq!(tuple.len(), q + 1);
            for (i, &v) in tuple.iter().enumerate() {
                assert_eq!(level.layer[v as usize] as usize, i);
            }
            for i in 0..q {
                for j in i + 1..=q {
                    let h = g.walk_count(tuple[i], tuple[j], j - i).unwrap();
                    let s = prof.window(i, j);
                    assert!(s <= h && h < 2 * s, "window ({i},{j}): {h} vs {s}");
                }
            }
        }
    }
    // Nested windows stay within a factor 2.
    for i in 0..=prof.ell {
        for j in i + 1..=prof.ell {
            for ii in i..j {
                for jj in ii + 1..=j {
                    assert!(
                        prof.window(ii, jj) <= 2 * prof.window(i, j),
                        "nested ({ii},{jj}) vs ({i},{j})"
                    );
                }
            }
        }
    }
    // Density floor from the default exponent.
    let d = g.average_degree();
    assert!(prof.nu >= d.powf(-0.1), "nu {} too small", prof.nu);
}

#[test]
fn st_sets_cover_half_the_tuples() {
    let g = gen::blowup(&gen::cycle(7), 2).unwrap();
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 7)).unwrap();
    for q in 2..=prof.ell {
        let sets = st_sets(&g, &prof, q).unwrap();
        let level = prof.level(q).unwrap();
        let covered = level
            .full_tuples
            .iter()
            .filter(|t| {
                let u0 = t[0];
                sets.near_sets[t[q - 1] as usize].contains(&u0)
                    && sets.far_sets[t[q] as usize].contains(&u0)
            })
            .count();
        assert!(
            2 * covered >= level.full_tuples.len(),
            "level {q}: only {covered} of {} tuples covered",
            level.full_tuples.len()
        );
        // Norm-driving bound |S(u)| * s <= max_degree^q for every vertex.
        let cap = (g.max_degree() as u64).pow(q as u32);
        for v in g.vertices() {
            assert!(sets.far_sets[v as usize].len() as u64 * sets.base <= cap);
        }
        // Loss sums exist and are finite; logged upstream, not asserted.
        let (far_sum, near_sum) = intersection_sums(&g, &sets);
        assert!(far_sum < u64::MAX && near_sum < u64::MAX);
    }
}

#[test]
fn st_vectors_round_after_augmentation() {
    let g = gen::blowup(&gen::cycle(7), 2).unwrap();
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 3)).unwrap();
    let q = prof.ell;
    let sets = st_sets(&g, &prof, q).unwrap();
    let va = odd_cycle_st_vectors(&g, &sets).unwrap();
    let d = g.average_degree();
    // Edge products decompose as -a + b with the intersection terms.
    for (u, v) in g.edges() {
        let terms = path_edge_terms(&sets, d, u, v).unwrap();
        let direct = va.inner_product(u, v);
        assert!(
            (direct - (terms.b - terms.a)).abs() < 1e-12,
            "edge ({u},{v}): {direct} vs {}",
            terms.b - terms.a
        );
    }
    let aug = augment_with_identity(&g, &va).unwrap();
    let expect = analytic_expected_cut(&g, &aug).unwrap();
    assert!(expect.is_finite() && expect >= 0.0 && expect <= g.m() as f64);
    let out = hyperplane_round(&g, &aug, 5, 32).unwrap();
    assert!(out.best_crossing >= g.m() / 2);
}

#[test]
fn st_sets_drive_the_sampling_route() {
    let g = gen::blowup(&gen::cycle(7), 3).unwrap();
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 11)).unwrap();
    let q = prof.ell;
    let sets = st_sets(&g, &prof, q).unwrap();
    if sets.far_sets.iter().all(|s| s.is_empty()) {
        panic!("threshold sets empty on the blowup instance");
    }
    let r = bucket_neighborhood_cut(&g, &sets, 13, 64).unwrap();
    let floor = r.xyz.0 as i64 - r.xyz.1 as i64 - r.xyz.2 as i64;
    assert!(r.cut.surplus_twice() >= floor);
    assert!(r.cut.surplus_twice() >= 0);
}

#[test]
fn rejects_even_or_small_r_and_bad_levels() {
    let g = gen::blowup(&gen::cycle(7), 2).unwrap();
    assert!(good_path_profile(&g, &GoodPathParams::new(6, 1)).is_err());
    assert!(good_path_profile(&g, &GoodPathParams::new(3, 1)).is_err());
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 1)).unwrap();
    assert!(st_sets(&g, &prof, 1).is_err());
    assert!(st_sets(&g, &prof, 4).is_err());
}

#[test]
fn profile_errors_without_paths() {
    let g = gen::star(2); // longest path has length 2 < ell = 2? star(2) = path(2)
    let err = good_path_profile(&g, &GoodPathParams::new(5, 1));
    // ell = 2: the 2-edge star has exactly two 2-paths, so this succeeds;
    // a single edge has none.
    assert!(err.is_ok());
    let single = gen::path(1);
    assert!(good_path_profile(&single, &GoodPathParams::new(5, 1)).is_err());
}
