mod common;

use common::*;
use peerassign::matrix::Mat3;
use peerassign::preference::{
    accumulate_responses, affected_cells, derive_stages, merge, normalize, option_weight, position_weight,
    reverse_values, transpose, MergeStage, PreferenceMatrix, Question, QuestionnaireResponse,
};
use proptest::prelude::*;

#[test]
fn survey_reproduces_normalized_matrices() {
    let (r1, r2) = survey();
    let stages = derive_stages(&r1, &r2, MergeStage::Raw).unwrap();
    assert!(max_diff(&stages.reviewer_normalized.values, &R3) <= 0.01);
    assert!(max_diff(&stages.author_normalized.values, &R4) <= 0.01);
    assert!(max_diff(&stages.merged.values, &R5) <= 0.01);
}

#[test]
fn survey_reproduces_rule_matrices() {
    let (r1, r2) = survey();
    let rules = derive_stages(&r1, &r2, MergeStage::Raw).unwrap().rules;
    assert!(max_diff(&rules.reviewer.values, &R3_RULE) <= 0.01);
    assert!(max_diff(&rules.author.values, &R4_RULE) <= 0.01);
    assert!(max_diff(&rules.merged.values, &R5_RULE) <= 0.01);
}

#[test]
fn transposed_author_view_entry() {
    let (_, r2) = survey();
    assert_eq!(transpose(&r2).values[(0, 2)], 50.25);
    assert_eq!(r2.values[(2, 0)], 50.25);
}

#[test]
fn normalized_stage_merge_differs_from_reference() {
    let (r1, r2) = survey();
    let stages = derive_stages(&r1, &r2, MergeStage::Normalized).unwrap();
    // (R3 + R4) / min: computed directly from the unrounded normalized matrices.
    let r3 = normalize(&r1).unwrap();
    let r4 = normalize(&transpose(&r2)).unwrap();
    let sum = r3.values.zip_with(&r4.values, |a, b| a + b);
    let min = sum.values().fold(f64::INFINITY, f64::min);
    assert!(stages.merged.values.max_abs_diff(&sum.map(|v| v / min)) < 1e-12);
    assert!(max_diff(&stages.merged.values, &R5) > 0.05);
}

#[test]
fn merged_preference_order() {
    let (r1, r2) = survey();
    let r5 = derive_stages(&r1, &r2, MergeStage::Raw).unwrap().merged.values;
    let mut cells: Vec<(usize, usize)> = Mat3::cells().collect();
    cells.sort_by(|a, b| r5[*b].total_cmp(&r5[*a]));
    // high reviewer -> low author, then low reviewer -> high author.
    assert_eq!(cells[0], (0, 2));
    assert_eq!(cells[1], (2, 0));
    // Then adjacent-higher reviewer, adjacent-lower reviewer, same level.
    let upper = r5[(0, 1)];
    let lower = r5[(1, 0)];
    assert!(r5[(2, 0)] > upper && upper > lower && lower > r5[(0, 0)]);
    assert_eq!(r5[(0, 1)], r5[(1, 2)]);
    assert_eq!(r5[(1, 0)], r5[(2, 1)]);
}

fn arb_matrix() -> impl Strategy<Value = Mat3> {
    // Few distinct levels so duplicates are common.
    prop::array::uniform9(0u8..6).prop_map(|vals| {
        let palette = [0.5, 1.0, 2.25, 3.0, 7.5, 10.0];
        let mut m = Mat3::ZERO;
        for (k, v) in vals.iter().enumerate() {
            m.0[k / 3][k % 3] = palette[*v as usize];
        }
        m
    })
}

fn arb_ranking() -> impl Strategy<Value = String> {
    Just(vec!['A', 'B', 'C', 'D', 'E'])
        .prop_shuffle()
        .prop_flat_map(|letters| (Just(letters), 1usize..=5))
        .prop_map(|(letters, len)| letters[..len].iter().collect())
}

proptest! {
    #[test]
    fn reverse_is_involution(m in arb_matrix()) {
        prop_assert_eq!(reverse_values(&reverse_values(&m)), m);
    }

    #[test]
    fn reverse_swaps_argmin_and_argmax(m in arb_matrix()) {
        let r = reverse_values(&m);
        let (lo, hi) = (m.values().fold(f64::INFINITY, f64::min), m.values().fold(0.0, f64::max));
        let (rlo, rhi) = (r.values().fold(f64::INFINITY, f64::min), r.values().fold(0.0, f64::max));
        for cell in Mat3::cells() {
            prop_assert_eq!(m[cell] == lo, r[cell] == rhi);
            prop_assert_eq!(m[cell] == hi, r[cell] == rlo);
        }
    }

    #[test]
    fn normalize_idempotent_and_scale_invariant(m in arb_matrix(), c in 0.01f64..100.0) {
        let p = PreferenceMatrix::reviewer_major(m);
        let n1 = normalize(&p).unwrap();
        let n2 = normalize(&n1).unwrap();
        prop_assert!(n1.values.max_abs_diff(&n2.values) < 1e-12);
        let scaled = normalize(&PreferenceMatrix::reviewer_major(m.map(|v| v * c))).unwrap();
        prop_assert!(n1.values.max_abs_diff(&scaled.values) < 1e-9);
        prop_assert_eq!(n1.values.min_positive(), Some(1.0));
    }

    #[test]
    fn raw_merge_symmetric_and_jointly_scale_invariant(a in arb_matrix(), b in arb_matrix(), c in 0.01f64..100.0) {
        let pa = PreferenceMatrix::reviewer_major(a);
        let pb = PreferenceMatrix::reviewer_major(b);
        let ab = merge(&pa, &pb, MergeStage::Raw).unwrap();
        let ba = merge(&pb, &pa, MergeStage::Raw).unwrap();
        prop_assert_eq!(ab, ba);
        let scaled = merge(
            &PreferenceMatrix::reviewer_major(a.map(|v| v * c)),
            &PreferenceMatrix::reviewer_major(b.map(|v| v * c)),
            MergeStage::Raw,
        ).unwrap();
        prop_assert!(ab.values.max_abs_diff(&scaled.values) < 1e-9);
        // merge(m, m) = normalize(m)
        let mm = merge(&pa, &pa, MergeStage::Raw).unwrap();
        prop_assert!(mm.values.max_abs_diff(&normalize(&pa).unwrap().values) < 1e-12);
    }

    #[test]
    fn each_position_adds_its_weight(ranking in arb_ranking(), q1 in any::<bool>()) {
        let question = if q1 { Question::Q1 } else { Question::Q2 };
        let acc = accumulate_responses(&[QuestionnaireResponse::new("s", question, ranking.clone())]);
        let m = if q1 { acc.reviewer.values } else { acc.author.values };
        let total: f64 = m.values().sum();
        let expected: f64 = (1..=ranking.len()).map(|p| position_weight(p).unwrap()).sum();
        prop_assert!((total - expected).abs() < 1e-12);
        for (p, opt) in ranking.chars().enumerate() {
            let cells = affected_cells(question, opt).unwrap();
            let mass = cells.len() as f64 * option_weight(opt).unwrap() * position_weight(p + 1).unwrap();
            prop_assert!((mass - position_weight(p + 1).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn single_response_matches_independent_weight_sum() {
    // Independent tally: walk the ranking, map each letter to the counterpart
    // offset (A = +2 levels above ... E = 2 below) and add 1/k * e^-(p) to
    // every respondent level that has such a counterpart.
    fn tally(ranking: &str) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (p, opt) in ranking.chars().enumerate() {
            let offset: i32 = 2 - (opt as i32 - 'A' as i32); // A=2 .. E=-2 levels superior
            let cells: Vec<(usize, usize)> = (0..3i32)
                .filter_map(|row| {
                    let col = row - offset;
                    (0..3).contains(&col).then_some((row as usize, col as usize))
                })
                .collect();
            let w = (-(p as f64)).exp() / cells.len() as f64;
            for (r, c) in cells {
                m[r][c] += w;
            }
        }
        m
    }
    for ranking in ["BACDE", "EDCBA", "CAEBD", "DB"] {
        let acc = accumulate_responses(&[QuestionnaireResponse::new("s", Question::Q1, ranking)]);
        assert!(acc.reviewer.values.max_abs_diff(&Mat3(tally(ranking))) < 1e-12, "{ranking}");
    }
}
