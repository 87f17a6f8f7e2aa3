use super::*;
use crate::characters::CharacterLabel;

fn rats(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(n, d)| Rat::from((n, d))).collect()
}

#[test]
fn enumerate_candidates_counts_and_dedup() {
    let mut cfg = SearchConfig::new(SearchFamily::Coset { k: 2 });
    cfg.range = Some((rat(-1, 1), rat(1, 1)));
    cfg.denominators = vec![1, 2];
    let got = enumerate_candidates(&cfg, 1);
    let expect: Vec<Vec<Rat>> = vec![
        rats(&[(-1, 1)]),
        rats(&[(0, 1)]),
        rats(&[(1, 1)]),
        rats(&[(-1, 2)]),
        rats(&[(1, 2)]),
    ];
    assert_eq!(got, expect);

    // r = 2, integers only: 3^2 candidates.
    cfg.denominators = vec![1];
    assert_eq!(enumerate_candidates(&cfg, 2).len(), 9);

    // 2/4 is emitted once, at denominator 2.
    cfg.denominators = vec![1, 2, 4];
    let all = enumerate_candidates(&cfg, 1);
    let half = rats(&[(1, 2)]);
    assert_eq!(all.iter().filter(|b| **b == half).count(), 1);
    // Denominator-4 block contributes only truly new entries.
    assert_eq!(all.len(), 3 + 2 + 4);
}

#[test]
fn screen_candidate_examples() {
    let cfg = SearchConfig::new(SearchFamily::Minimal { n: 1 });
    let a = cfg.family.matrix();
    let sol = tba_solution(&a, &cfg.precision).unwrap();

    let (pass, c) = screen_candidate(&rats(&[(0, 1)]), &sol, &cfg);
    assert!(pass);
    assert_eq!(c.unwrap(), rat(-1, 60));

    let (pass, c) = screen_candidate(&rats(&[(1, 3)]), &sol, &cfg);
    assert!(!pass);
    assert!(c.is_none());

    let cfg2 = SearchConfig::new(SearchFamily::Coset { k: 2 });
    let a2 = cfg2.family.matrix();
    let sol2 = tba_solution(&a2, &cfg2.precision).unwrap();
    let (pass, c) = screen_candidate(&rats(&[(-1, 2)]), &sol2, &cfg2);
    assert!(pass);
    assert_eq!(c.unwrap(), rat(1, 24));
}

#[test]
fn match_series_finds_unique_target() {
    let order = 14u32;
    let targets: Vec<(TargetCombination, PuiseuxSeries)> = minimal_targets(1)
        .into_iter()
        .map(|t| {
            let s = combination_series(&t, order as usize + 4).unwrap();
            (t, s)
        })
        .collect();

    let a = SearchFamily::Minimal { n: 1 }.matrix();
    let datum = NahmDatum::new(a.clone(), rats(&[(1, 1)]), rat(11, 60)).unwrap();
    let f = nahm_sum(&datum, order).unwrap();
    let (name, verified) = match_series(&f, &targets, order).unwrap().unwrap();
    assert_eq!(name, "minimal:p=5,s=1");
    assert!(verified >= order);

    // Against the wrong single-target list: no match.
    let wrong: Vec<_> = targets
        .iter()
        .filter(|(t, _)| t.name.contains("s=2"))
        .cloned()
        .collect();
    assert!(match_series(&f, &wrong, order).unwrap().is_none());

    // Duplicated target list: ambiguity is an error.
    let mut doubled = targets.clone();
    doubled.extend(targets.iter().cloned());
    let datum = NahmDatum::new(a, rats(&[(0, 1)]), rat(-1, 60)).unwrap();
    let f = nahm_sum(&datum, order).unwrap();
    assert!(matches!(
        match_series(&f, &doubled, order),
        Err(Error::AmbiguousMatch { .. })
    ));
}

#[test]
fn minimal_model_search_finds_both_records() {
    let mut cfg = SearchConfig::new(SearchFamily::Minimal { n: 1 });
    cfg.range = Some((rat(-5, 1), rat(5, 1)));
    cfg.denominators = vec![1];
    let records = run_search(&cfg).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].b, rats(&[(0, 1)]));
    assert_eq!(records[0].c, rat(-1, 60));
    assert_eq!(records[0].matched, "minimal:p=5,s=2");
    assert_eq!(records[1].b, rats(&[(1, 1)]));
    assert_eq!(records[1].c, rat(11, 60));
    assert_eq!(records[1].matched, "minimal:p=5,s=1");
}

#[test]
fn coset_k2_search_finds_both_records() {
    let mut cfg = SearchConfig::new(SearchFamily::Coset { k: 2 });
    cfg.range = Some((rat(-2, 1), rat(2, 1)));
    cfg.denominators = vec![1, 2];
    let records = run_search(&cfg).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].b, rats(&[(0, 1)]));
    assert_eq!(records[0].c, rat(-1, 48));
    assert_eq!(records[0].matched, "coset:k=2,l=0,m=0 + coset:k=2,l=0,m=2");
    assert_eq!(records[1].b, rats(&[(-1, 2)]));
    assert_eq!(records[1].c, rat(1, 24));
    assert_eq!(records[1].matched, "2*coset:k=2,l=1,m=1");
}

#[test]
fn search_results_reverify_at_deeper_order() {
    let mut cfg = SearchConfig::new(SearchFamily::Coset { k: 2 });
    cfg.range = Some((rat(-2, 1), rat(2, 1)));
    cfg.denominators = vec![1, 2];
    cfg.order = 12;
    let a = cfg.family.matrix();
    for rec in run_search(&cfg).unwrap() {
        assert!(verify_record(&a, &rec, &cfg, 5).unwrap(), "record {rec:?}");
    }
}

#[test]
fn search_is_deterministic() {
    let mut cfg = SearchConfig::new(SearchFamily::Minimal { n: 1 });
    cfg.range = Some((rat(-3, 1), rat(3, 1)));
    cfg.denominators = vec![1, 2];
    cfg.order = 10;
    let a = run_search(&cfg).unwrap();
    let b = run_search(&cfg).unwrap();
    let ja =
        serde_json::to_string(&a.iter().map(MatchRecordJson::from).collect::<Vec<_>>()).unwrap();
    let jb =
        serde_json::to_string(&b.iter().map(MatchRecordJson::from).collect::<Vec<_>>()).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn known_b_minimal_staircase() {
    assert_eq!(known_b_minimal(1), vec![rats(&[(0, 1)]), rats(&[(1, 1)])]);
    assert_eq!(
        known_b_minimal(3),
        vec![
            rats(&[(0, 1), (0, 1), (0, 1)]),
            rats(&[(0, 1), (0, 1), (1, 1)]),
            rats(&[(0, 1), (1, 1), (2, 1)]),
            rats(&[(1, 1), (2, 1), (3, 1)]),
        ]
    );
    for n in 1..=6u32 {
        assert_eq!(known_b_minimal(n).len(), n as usize + 1);
    }
}

#[test]
fn known_b_coset_columns() {
    assert_eq!(known_b_coset(2), vec![rats(&[(0, 1)]), rats(&[(-1, 2)])]);
    assert_eq!(
        known_b_coset(4),
        vec![
            rats(&[(0, 1), (0, 1), (0, 1)]),
            rats(&[(-3, 4), (-1, 2), (-1, 4)]),
            rats(&[(-1, 2), (-1, 1), (-1, 2)]),
            rats(&[(-1, 4), (-1, 2), (-3, 4)]),
        ]
    );
}

#[test]
fn known_b_catalogues_pass_the_screen() {
    for n in 1..=3u32 {
        let cfg = SearchConfig::new(SearchFamily::Minimal { n });
        let sol = tba_solution(&cfg.family.matrix(), &cfg.precision).unwrap();
        for b in known_b_minimal(n) {
            let (pass, c) = screen_candidate(&b, &sol, &cfg);
            assert!(pass && c.is_some(), "minimal n={n}, B={b:?}");
        }
    }
    for k in 2..=5u32 {
        let cfg = SearchConfig::new(SearchFamily::Coset { k });
        let sol = tba_solution(&cfg.family.matrix(), &cfg.precision).unwrap();
        for b in known_b_coset(k) {
            let (pass, c) = screen_candidate(&b, &sol, &cfg);
            assert!(pass && c.is_some(), "coset k={k}, B={b:?}");
        }
    }
}

#[test]
fn dual_transform_examples() {
    // Self-dual point: A=(1), B=(0), C=-1/48.
    let a = MatrixQ::from_rows(vec![vec![rat(1, 1)]]).unwrap();
    let (a_star, b_star, c_star) = dual_transform(&a, &rats(&[(0, 1)]), &rat(-1, 48)).unwrap();
    assert_eq!(a_star, a);
    assert_eq!(b_star, rats(&[(0, 1)]));
    assert_eq!(c_star, rat(-1, 48));

    // Coset catalogue maps to columns of -(1/2) I.
    for k in 2..=6u32 {
        let a = SearchFamily::Coset { k }.matrix();
        for (col, b) in known_b_coset(k).into_iter().enumerate().skip(1) {
            let (_, b_star, _) = dual_transform(&a, &b, &rat(0, 1)).unwrap();
            for (i, v) in b_star.iter().enumerate() {
                let expect = if i == col - 1 { rat(-1, 2) } else { rat(0, 1) };
                assert_eq!(*v, expect, "k={k}, column {col}");
            }
        }
    }
}

#[test]
fn dual_transform_is_an_involution() {
    // 50 deterministic pseudo-random rational triples of ranks 1..=3.
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed
    };
    let mut checked = 0;
    while checked < 50 {
        let r = (next() % 3 + 1) as usize;
        let mut rows = vec![vec![Rat::new(); r]; r];
        for i in 0..r {
            for j in 0..=i {
                let num = (next() % 9) as i64 - 4;
                let den = (next() % 3 + 1) as i64;
                rows[i][j] = Rat::from((num, den));
                rows[j][i] = rows[i][j].clone();
            }
            // Push toward nonsingularity.
            rows[i][i] += Rat::from(5);
        }
        let a = MatrixQ::from_rows(rows).unwrap();
        if a.invert().is_err() {
            continue;
        }
        let b: Vec<Rat> = (0..r)
            .map(|_| Rat::from(((next() % 17) as i64 - 8, (next() % 4 + 1) as i64)))
            .collect();
        let c = Rat::from(((next() % 49) as i64 - 24, (next() % 48 + 1) as i64));
        let (a1, b1, c1) = dual_transform(&a, &b, &c).unwrap();
        let (a2, b2, c2) = dual_transform(&a1, &b1, &c1).unwrap();
        assert_eq!(a2, a);
        assert_eq!(b2, b);
        assert_eq!(c2, c);
        checked += 1;
    }
}

#[test]
fn infinite_families_hold_for_small_members() {
    let precision = PrecisionConfig::default();
    let check = infinite_family_identity(0, FamilyVariant::Even, 12, &precision).unwrap();
    assert_eq!(check.b, rats(&[(0, 1), (0, 1), (0, 1)]));
    assert_eq!(check.c, rat(-1, 24));
    assert!(check.equal);

    let check = infinite_family_identity(1, FamilyVariant::Even, 12, &precision).unwrap();
    assert_eq!(check.b, rats(&[(3, 2), (0, 1), (-3, 2)]));
    assert!(check.equal);

    let check = infinite_family_identity(0, FamilyVariant::Odd, 12, &precision).unwrap();
    assert_eq!(check.b, rats(&[(1, 2), (0, 1), (-1, 2)]));
    assert_eq!(check.c, rat(1, 24));
    assert!(check.equal);
}

#[test]
fn odd_family_matches_halved_combination() {
    // f for B = (1/2, 0, -1/2) equals the halved l = 2 combination at k = 4.
    let order = 16u32;
    let targets: Vec<(TargetCombination, PuiseuxSeries)> = predicted_combinations(4)
        .into_iter()
        .map(|t| {
            let s = combination_series(&t, order as usize + 4).unwrap();
            (t, s)
        })
        .collect();
    let a = SearchFamily::Coset { k: 4 }.matrix();
    let datum = NahmDatum::new(a, rats(&[(1, 2), (0, 1), (-1, 2)]), rat(1, 24)).unwrap();
    let f = nahm_sum(&datum, order).unwrap();
    let (name, _) = match_series(&f, &targets, order).unwrap().unwrap();
    assert_eq!(name, "coset:k=4,l=2,m=0 + coset:k=4,l=2,m=2");
}

#[test]
fn explicit_family_uses_given_targets() {
    let a = MatrixQ::from_rows(vec![vec![rat(2, 1)]]).unwrap();
    let targets = vec![TargetCombination::new(vec![(
        CharacterLabel::Minimal { p: 5, s: 2 },
        1,
    )])];
    let mut cfg = SearchConfig::new(SearchFamily::Explicit { a, targets });
    cfg.range = Some((rat(0, 1), rat(2, 1)));
    cfg.denominators = vec![1];
    cfg.order = 12;
    let records = run_search(&cfg).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].b, rats(&[(0, 1)]));
}

#[test]
fn dual_data_passes_the_asymptotic_screen() {
    // The dual-model characters are out of reach of the su(2) engine, but
    // the screening formulas must accept the transformed data: for every
    // catalogue match (B, C) of the coset family, (A*, B*) vanishes under
    // the second formula and the first reconstructs exactly to C*.
    let precision = PrecisionConfig::default();
    for k in 2..=5u32 {
        let cfg = SearchConfig::new(SearchFamily::Coset { k });
        let a = cfg.family.matrix();
        let sol = tba_solution(&a, &precision).unwrap();
        for b in known_b_coset(k) {
            let (_, c) = crate::tba::asymptotic_c(&b, &sol, &precision);
            let c = c.expect("catalogue member reconstructs");
            let (a_star, b_star, c_star) = dual_transform(&a, &b, &c).unwrap();
            let dual_sol = tba_solution(&a_star, &precision).unwrap();
            let residual = crate::tba::asymptotic_residual(&b_star, &dual_sol, &precision).abs();
            assert!(
                residual < 1e-30,
                "k={k}, B={b:?}: dual residual {}",
                residual.to_f64()
            );
            let (_, c_recon) = crate::tba::asymptotic_c(&b_star, &dual_sol, &precision);
            assert_eq!(c_recon, Some(c_star), "k={k}, B={b:?}");
        }
    }
}

#[test]
fn prefilter_margin_on_catalogue_members() {
    // The f64 stage must keep every genuine B: its value on true zeros is
    // pure round-off, well under the 1e-8 gate.
    let precision = PrecisionConfig::default();
    let mut worst = 0f64;
    for n in 1..=6u32 {
        let a = SearchFamily::Minimal { n }.matrix();
        let sol = tba_solution(&a, &precision).unwrap();
        let tables = sol.tables_f64();
        for b in known_b_minimal(n) {
            let b64: Vec<f64> = b.iter().map(|r| r.to_f64()).collect();
            let v = crate::tba::asymptotic_residual_value(&tables, &b64).abs();
            worst = worst.max(v);
        }
    }
    for k in 2..=6u32 {
        let a = SearchFamily::Coset { k }.matrix();
        let sol = tba_solution(&a, &precision).unwrap();
        let tables = sol.tables_f64();
        for b in known_b_coset(k) {
            let b64: Vec<f64> = b.iter().map(|r| r.to_f64()).collect();
            let v = crate::tba::asymptotic_residual_value(&tables, &b64).abs();
            worst = worst.max(v);
        }
    }
    assert!(
        worst < 1e-10,
        "f64 residual on known-good B reached {worst:e}"
    );
}
