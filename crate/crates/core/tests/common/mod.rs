#![allow(dead_code)]

use peerassign::matrix::Mat3;
use peerassign::preference::{PreferenceMatrix, RuleMatrices, RuleMatrix, RuleProvenance};

/// Aggregated reviewer view (rows reviewer level, columns author level).
pub const SURVEY_REVIEWER: [[f64; 3]; 3] = [[8.75, 5.26, 2.10], [24.66, 8.75, 5.26], [35.92, 24.66, 8.75]];
/// Aggregated author view (rows author level, columns reviewer level).
pub const SURVEY_AUTHOR: [[f64; 3]; 3] = [[6.75, 2.42, 2.28], [22.47, 6.75, 2.42], [50.25, 22.47, 6.75]];

pub const R3: [[f64; 3]; 3] = [[4.17, 2.51, 1.00], [11.74, 4.17, 2.51], [17.11, 11.74, 4.17]];
pub const R4: [[f64; 3]; 3] = [[2.96, 9.86, 22.04], [1.06, 2.96, 9.86], [1.00, 1.06, 2.96]];
pub const R5: [[f64; 3]; 3] = [[1.00, 1.79, 3.38], [1.75, 1.00, 1.79], [2.46, 1.75, 1.00]];

pub const R3_RULE: [[f64; 3]; 3] = [[4.17, 11.74, 17.11], [2.51, 4.17, 11.74], [1.00, 2.51, 4.17]];
pub const R4_RULE: [[f64; 3]; 3] = [[2.96, 1.06, 1.00], [9.86, 2.96, 1.06], [22.04, 9.86, 2.96]];
pub const R5_RULE: [[f64; 3]; 3] = [[3.38, 1.79, 1.00], [2.46, 3.38, 1.79], [1.75, 2.46, 3.38]];

pub fn survey() -> (PreferenceMatrix, PreferenceMatrix) {
    (
        PreferenceMatrix::reviewer_major(Mat3(SURVEY_REVIEWER)),
        PreferenceMatrix::author_major(Mat3(SURVEY_AUTHOR)),
    )
}

/// The three reference rule matrices, rounded to two decimals.
pub fn reference_rules() -> RuleMatrices {
    RuleMatrices {
        reviewer: RuleMatrix::new(Mat3(R3_RULE), RuleProvenance::Reviewer),
        author: RuleMatrix::new(Mat3(R4_RULE), RuleProvenance::Author),
        merged: RuleMatrix::new(Mat3(R5_RULE), RuleProvenance::Merged),
    }
}

pub fn max_diff(a: &Mat3, b: &[[f64; 3]; 3]) -> f64 {
    a.max_abs_diff(&Mat3(*b))
}
