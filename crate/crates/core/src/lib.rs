//! Reviewer assignment for peer code review.
//!
//! The pipeline ranks students into three competence levels from their running
//! average scores, turns questionnaire rankings into 3×3 rule matrices, expands
//! a rule matrix over a cohort into a distance instance, and solves the
//! assignment problem exactly under a minimum cycle length. The `evaluation`
//! module compares optimized assignments against a constrained random baseline.

pub mod competence;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod matrix;
pub mod par;
pub mod preference;
pub mod solver;

pub use competence::{cluster_levels, update_averages, CompetenceLevel, LevelAssignment, StudentRecord};
pub use error::{Error, ErrorCategory, Result};
pub use evaluation::{
    compare, random_baseline, run_study, BaselineParams, EvaluationReport, ReportRow, RuleKind,
    StudyParams,
};
pub use matrix::Mat3;
pub use par::Execution;
pub use preference::{
    build_rule_matrices, MergeStage, Orientation, PreferenceMatrix, Question, QuestionnaireResponse,
    RuleMatrices, RuleMatrix, RuleProvenance,
};
pub use solver::{
    brute_force_oracle, expand_distance, find_cycles, solve_lap, solve_min_cycle_atsp,
    total_distance, Assignment, DistanceInstance, SolveParams,
};
