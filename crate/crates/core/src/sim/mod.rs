//! Scene generation, a scripted agent and repeated trials comparing layout
//! conditions.

mod agent;
mod compare;
mod scene_gen;
mod trial;

pub use agent::{Agent, AgentConfig};
pub use compare::{
    compare_methods, compare_methods_with, format_table, summarize, trend_flags, trial_setup,
    write_report, write_summary_csv, write_summary_json, write_trials_jsonl, CompareConfig,
    ConditionSummary, Execution, Report, SceneSource, TrendFlag, TrialRecord,
    REPORT_FORMAT_VERSION,
};
pub use scene_gen::{generate_scene, word_list, Preset, SceneSpec};
pub use trial::{run_trial, run_trial_logged, Limits, TrialLog, TrialMetrics};

/// Layout condition compared in trials.
pub use crate::layout::Method as MethodCondition;
