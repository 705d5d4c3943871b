use hdcoding::coding::{
    coordinate_step, h, h_i_assemble_sides, h_j_assemble_sides, h_per_iterate, i_word, j_word, shift, sigma_membership,
    verify_commutation, CodingError, CoordinateWord, SideEnd, SymbolSequence, WordStatus,
};
use hdcoding::map::{apply_f, apply_f_inv, mirror, MapConfig, Point};
use hdcoding::scalar::{int, rat, Rational, Scalar, Sign};
use proptest::prelude::*;

fn tw(v: &[i64]) -> CoordinateWord {
    CoordinateWord::truncated(v.to_vec()).unwrap()
}

fn fw(v: &[i64]) -> CoordinateWord {
    CoordinateWord::finite(v.to_vec()).unwrap()
}

/// Time-ordered rendering of both sides, e.g. "-2 -1 2 ; 2 2 1".
fn render(s: &SymbolSequence) -> String {
    let past: Vec<String> = s.past.iter().rev().map(|x| x.to_string()).collect();
    let fut: Vec<String> = s.future.iter().map(|x| x.to_string()).collect();
    format!("{} ; {}", past.join(" "), fut.join(" ")).trim().to_string()
}

// The printed words list complete entries followed by "..."; a trailing
// extra entry of the forced sign makes the listed runs complete here.

#[test]
fn h_i_example_same_sign() {
    let s = h_i_assemble_sides(&tw(&[3, -2, 1]), &tw(&[1, -4, 1]), 5, 4).unwrap();
    assert_eq!(render(&s), "-2 -2 -2 -1 2 ; 2 2 1 -2");
}

#[test]
fn h_i_example_negative_block() {
    let s = h_i_assemble_sides(&tw(&[-1, 3, -1, 1]), &tw(&[-1, 2, -1]), 3, 4).unwrap();
    assert_eq!(render(&s), "2 1 -2 ; -1 2 2 1");
}

#[test]
fn h_i_example_sign_mismatch() {
    let s = h_i_assemble_sides(&tw(&[3, -2, 1]), &tw(&[-1, 4, -1]), 5, 4).unwrap();
    assert_eq!(render(&s), "2 2 2 1 -1 ; 2 2 1 -2");
}

#[test]
fn h_i_finite_forward() {
    let s = h_i_assemble_sides(&fw(&[3]), &tw(&[1, -4, 1]), 5, 10).unwrap();
    assert_eq!(render(&s), "-2 -2 -2 -1 2 ; 2 2 0");
    assert_eq!(s.future_end, SideEnd::Terminated);
}

#[test]
fn h_i_finite_backward() {
    let s = h_i_assemble_sides(&tw(&[3, -2, 1]), &fw(&[1, -4]), 10, 4).unwrap();
    assert_eq!(render(&s), "0 -2 -2 -2 -1 2 ; 2 2 1 -2");
    assert_eq!(s.past_end, SideEnd::Terminated);
}

#[test]
fn h_i_finite_both() {
    let s = h_i_assemble_sides(&fw(&[3]), &fw(&[1, -4]), 10, 10).unwrap();
    assert_eq!(render(&s), "0 -2 -2 -2 -1 2 ; 2 2 0");
    assert!(sigma_membership(&s));
}

#[test]
fn h_j_example_same_sign() {
    let s = h_j_assemble_sides(&tw(&[3, -2, 1]), &tw(&[1, -4, 1]), 4, 6).unwrap();
    assert_eq!(render(&s), "-1 -2 -2 -2 ; 1 2 2 2 -1 -2");
}

#[test]
fn h_j_example_negative_block() {
    let s = h_j_assemble_sides(&tw(&[-1, 3, -1, 1]), &tw(&[-1, 2, -1]), 2, 6).unwrap();
    assert_eq!(render(&s), "1 2 ; -1 -2 1 2 2 -1");
}

#[test]
fn h_j_example_sign_mismatch() {
    let s = h_j_assemble_sides(&tw(&[3, -2, 1]), &tw(&[-1, 4, -1]), 4, 6).unwrap();
    assert_eq!(render(&s), "1 2 2 2 ; -1 1 2 2 -1 -2");
}

#[test]
fn window_beyond_words_is_reported() {
    let e = h_i_assemble_sides(&tw(&[3, -2]), &tw(&[1, -4]), 5, 9).unwrap_err();
    assert_eq!(
        e,
        CodingError::WindowExceedsWords { side: hdcoding::coding::SeqSide::Future, requested: 9, fillable: 4 }
    );
}

/// Codings read off the last `k` symbols up to time 0 of each sequence.
fn tail(s: &SymbolSequence, k: usize) -> String {
    let (all, origin) = s.time_ordered();
    all[origin + 1 - k..=origin].iter().map(|x| x.value().to_string()).collect::<Vec<_>>().join("")
}

fn check_table_row(i: &[i64], j: &[i64], coords: [(&[i64], &[i64]); 2], codes: [(&str, &str); 3]) {
    let mut wi = tw(i);
    let mut wj = tw(j);
    for step in 0..3 {
        if step > 0 {
            let (a, b) = coordinate_step(&wi, &wj).unwrap();
            wi = a;
            wj = b;
            let (ci, cj) = coords[step - 1];
            assert_eq!(&wi.entries()[..ci.len()], ci, "i coordinates after {step} steps");
            assert_eq!(&wj.entries()[..cj.len()], cj, "j coordinates after {step} steps");
        }
        let hi = h_i_assemble_sides(&wi, &wj, step, 1).unwrap();
        let hj = h_j_assemble_sides(&wi, &wj, step, 1).unwrap();
        assert_eq!((tail(&hi, step + 1).as_str(), tail(&hj, step + 1).as_str()), codes[step], "step {step}");
    }
}

#[test]
fn example_table_rows() {
    check_table_row(
        &[3, -2, 1],
        &[1, -4, 1],
        [(&[2, -2], &[2, -4]), (&[1, -2], &[3, -4])],
        [("2", "1"), ("22", "12"), ("221", "122")],
    );
    check_table_row(
        &[-1, 3, -1, 1],
        &[-1, 1],
        [(&[3, -1], &[-2]), (&[2, -1], &[1, -2])],
        [("-1", "-1"), ("-12", "-1-2"), ("-122", "-1-21")],
    );
    check_table_row(
        &[-1, 1, -1, 1],
        &[-1, 1],
        [(&[1, -1], &[-2]), (&[-1], &[1, -2])],
        [("-1", "-1"), ("-11", "-1-2"), ("-11-1", "-1-21")],
    );
    check_table_row(
        &[3, -2, 1],
        &[3, -4, 1],
        [(&[2, -2], &[4, -4]), (&[1, -2], &[5, -4])],
        [("2", "2"), ("22", "22"), ("221", "222")],
    );
    check_table_row(
        &[3, -2, 1],
        &[-1, 4, -1],
        [(&[2, -2], &[1, -1, 4]), (&[1, -2], &[2, -1, 4])],
        [("2", "-1"), ("22", "-11"), ("221", "-112")],
    );
}

// ---- independent oracle: reduced-rational orbits and the per-time symbol rule ----

fn sign_of(q: &Rational) -> i64 {
    q.sign(0.0).as_i64()
}

/// s_k = sign y(f^k p) for k in [-back, fwd), computed on reduced rationals.
fn oracle_signs(p: &Point<Rational>, fwd: usize, back: usize) -> Option<(Vec<i64>, Vec<i64>)> {
    let cfg = MapConfig { max_bits: u64::MAX, ..MapConfig::default() };
    let mut f = Vec::new();
    let mut q = p.clone();
    for k in 0..fwd {
        f.push(sign_of(&q.y));
        if k + 1 < fwd {
            q = apply_f(&q, &cfg).ok()?;
        }
    }
    let mut b = Vec::new();
    let mut q = p.clone();
    for _ in 0..back {
        q = apply_f_inv(&q, &cfg).ok()?;
        b.push(sign_of(&q.y));
    }
    if f.contains(&0) || b.contains(&0) {
        return None;
    }
    Some((f, b))
}

fn rle(signs: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    for &s in signs {
        match out.last_mut() {
            Some(l) if l.signum() == s => *l += s,
            _ => out.push(s),
        }
    }
    out
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-80i64..=80, 1i64..=8).prop_map(|(n, d)| rat(n, d))
}

fn small_point() -> impl Strategy<Value = Point<Rational>> {
    (small_rational(), small_rational()).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_match_oracle(p in small_point()) {
        let cfg = MapConfig::default();
        let depth = 8;
        if let Some((f, b)) = oracle_signs(&p, depth, depth) {
            let wi = i_word(&p, depth, &cfg).unwrap();
            prop_assert_eq!(wi.entries(), &rle(&f)[..]);
            prop_assert_eq!(wi.status(), WordStatus::Truncated(depth));
            let wj = j_word(&p, depth, &cfg).unwrap();
            prop_assert_eq!(wj.entries(), &rle(&b)[..]);
            prop_assert_eq!(wi.signs().iter().map(|s| s.as_i64()).collect::<Vec<_>>(), f);
        }
    }

    #[test]
    fn assembly_matches_per_time_rule(p in small_point()) {
        let cfg = MapConfig::default();
        let w = 6;
        // i-symbol at n: s_n, doubled unless s_{n+1} differs. j-symbol at n:
        // s_{n-1}, doubled unless s_{n-2} differs.
        if let Some((f, b)) = oracle_signs(&p, w + 1, w + 2) {
            let s = |k: i64| if k >= 0 { f[k as usize] } else { b[(-k - 1) as usize] };
            let isym = |n: i64| s(n) * if s(n + 1) != s(n) { 1 } else { 2 };
            let jsym = |n: i64| s(n - 1) * if s(n - 2) != s(n - 1) { 1 } else { 2 };
            let (hi, hj) = h(&p, w, &cfg).unwrap();
            let fi: Vec<i64> = (0..w as i64).map(isym).collect();
            let pi: Vec<i64> = (1..=w as i64).map(|k| isym(-k)).collect();
            let fj: Vec<i64> = (0..w as i64).map(jsym).collect();
            let pj: Vec<i64> = (1..=w as i64).map(|k| jsym(-k)).collect();
            let v = |x: &[hdcoding::coding::Symbol]| x.iter().map(|s| s.value() as i64).collect::<Vec<_>>();
            prop_assert_eq!(v(&hi.future), fi);
            prop_assert_eq!(v(&hi.past), pi);
            prop_assert_eq!(v(&hj.future), fj);
            prop_assert_eq!(v(&hj.past), pj);
        }
    }

    #[test]
    fn per_iterate_equals_block_assembly(p in small_point()) {
        let cfg = MapConfig::default();
        if oracle_signs(&p, 9, 9).is_some() {
            let a = h(&p, 6, &cfg).unwrap();
            let b = h_per_iterate(&p, 6, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn coordinate_step_tracks_the_map(p in small_point()) {
        let cfg = MapConfig::default();
        let d = 8;
        if let (Ok(wi), Ok(wj)) = (i_word(&p, d, &cfg), j_word(&p, d, &cfg)) {
            if let Ok(q) = apply_f(&p, &cfg) {
                match coordinate_step(&wi, &wj) {
                    Ok((si, sj)) => {
                        if !si.is_empty() {
                            prop_assert_eq!(i_word(&q, d - 1, &cfg).unwrap(), si);
                        }
                        prop_assert_eq!(j_word(&q, d + 1, &cfg).unwrap(), sj);
                    }
                    Err(e) => prop_assert_eq!(e, CodingError::ExhaustedWord),
                }
            }
        }
    }

    #[test]
    fn mirror_negates_everything(p in small_point()) {
        let cfg = MapConfig::default();
        let m = mirror(&p);
        if let Ok(w) = i_word(&p, 8, &cfg) {
            prop_assert_eq!(i_word(&m, 8, &cfg).unwrap(), w.negate());
        }
        if let Ok(w) = j_word(&p, 8, &cfg) {
            prop_assert_eq!(j_word(&m, 8, &cfg).unwrap(), w.negate());
        }
        let (a, b) = h(&p, 5, &cfg).unwrap();
        let (c, d) = h(&m, 5, &cfg).unwrap();
        prop_assert_eq!(c, a.negate());
        prop_assert_eq!(d, b.negate());
    }

    #[test]
    fn assembled_sequences_are_admissible(p in small_point()) {
        let cfg = MapConfig::default();
        let (a, b) = h(&p, 6, &cfg).unwrap();
        prop_assert!(sigma_membership(&a), "{}", a);
        prop_assert!(sigma_membership(&b), "{}", b);
    }

    #[test]
    fn words_alternate(p in small_point()) {
        let cfg = MapConfig::default();
        if let Ok(w) = i_word(&p, 10, &cfg) {
            prop_assert!(w.entries().windows(2).all(|x| x[0].signum() != x[1].signum()));
        }
    }

    #[test]
    fn commutation_holds(p in small_point()) {
        let cfg = MapConfig::default();
        let r = verify_commutation(&p, 10, &cfg).unwrap();
        if r.skipped.is_none() && oracle_signs(&p, 10, 10).is_some() {
            prop_assert!(r.passed(), "{:?}", r);
        }
    }
}

#[test]
fn first_run_length_counts_steps_to_the_sign_flip() {
    let cfg = MapConfig::default();
    let p = Point::new(int(1), int(1));
    // y: 1, -1 ... flips at the first step.
    assert_eq!(i_word(&p, 6, &cfg).unwrap().first(), Some(1));
    // x + y: 2 at p, 2 at f^-1(p) = (1/2, 2), ...
    let j0 = j_word(&p, 6, &cfg).unwrap().first().unwrap();
    assert!(j0 >= 2);
}

#[test]
fn finite_i_word_on_a_preimage_curve() {
    let cfg = MapConfig::default();
    let mut q = Point::new(int(5), int(0));
    for _ in 0..3 {
        q = apply_f_inv(&q, &cfg).unwrap();
    }
    assert_eq!(i_word(&q, 20, &cfg).unwrap(), fw(&[3]));
}

#[test]
fn finite_j_word_on_an_image_curve() {
    let cfg = MapConfig::default();
    let t = rat(11, 10);
    let mut q = Point::new(t.clone(), -t);
    for _ in 0..4 {
        q = apply_f(&q, &cfg).unwrap();
    }
    assert_eq!(j_word(&q, 20, &cfg).unwrap(), fw(&[1, -4]));
}

#[test]
fn degenerate_sides() {
    let cfg = MapConfig::default();
    let (hi, _) = h(&Point::new(int(2), int(0)), 4, &cfg).unwrap();
    assert_eq!(render(&hi), "; 0");
    assert_eq!(hi.future_end, SideEnd::Terminated);
    let (hi, hj) = h(&Point::new(int(1), int(-1)), 4, &cfg).unwrap();
    assert_eq!(render(&hj), "; 0");
    assert_eq!(hi.past.first().map(|s| s.value()), Some(0));
    assert_eq!(i_word(&Point::new(int(1), int(0)), 4, &cfg), Err(CodingError::OnDiscontinuity));
    assert_eq!(j_word(&Point::new(int(1), int(-1)), 4, &cfg), Err(CodingError::OnDiscontinuity));
}

#[test]
fn shift_twice_equals_shifting_the_image_twice() {
    let cfg = MapConfig::default();
    let p = Point::new(rat(3, 7), rat(5, 2));
    let q = apply_f(&apply_f(&p, &cfg).unwrap(), &cfg).unwrap();
    let (hi, _) = h(&p, 8, &cfg).unwrap();
    let (hq, _) = h(&q, 6, &cfg).unwrap();
    assert!(shift(&shift(&hi).unwrap()).unwrap().agrees_with(&hq));
}

#[test]
fn mirror_pairs_have_identical_commutation_outcomes() {
    let cfg = MapConfig::default();
    for (x, y) in [(rat(3, 7), rat(5, 2)), (rat(-9, 4), rat(1, 3)), (int(7), rat(-2, 5))] {
        let p = Point::new(x, y);
        let a = verify_commutation(&p, 12, &cfg).unwrap();
        let b = verify_commutation(&mirror(&p), 12, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }
    let _ = Sign::Zero;
}
