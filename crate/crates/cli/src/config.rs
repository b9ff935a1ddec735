//! Walk configuration files and their merge with command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::schema::{BlockEntry, CoinFamilySpec, ComplexVectorSpec, GraphSpec};

pub const PAPER_LINE: &str = "paper-line";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

/// Operators that can be dumped for inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Pi,
    Swap,
    U,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Pi => "pi",
            OperatorKind::Swap => "swap",
            OperatorKind::U => "u",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pi" => Ok(OperatorKind::Pi),
            "swap" => Ok(OperatorKind::Swap),
            "u" => Ok(OperatorKind::U),
            _ => Err(format!("unknown operator `{s}` (expected pi, swap or u)")),
        }
    }
}

/// The initial state: either `u ⊗ |pair⟩` or explicit density blocks.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Pure {
        coin: ComplexVectorSpec,
        pair: [i64; 2],
    },
    Blocks {
        blocks: Vec<BlockEntry>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    #[serde(default)]
    pub invariants: bool,
    #[serde(default)]
    pub collapse_each_step: bool,
    #[serde(default)]
    pub dump_states: bool,
    pub dump_operator: Option<OperatorKind>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub graph: Option<GraphSpec>,
    pub preset: Option<String>,
    pub coins: Option<CoinFamilySpec>,
    pub initial: Option<InitialSpec>,
    pub steps: Option<usize>,
    pub margin: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub checks: ChecksSpec,
}

/// Flag values; `None`/`false` defers to the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub steps: Option<usize>,
    pub margin: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub dump_states: bool,
    pub dump_operator: Option<OperatorKind>,
    pub check_invariants: bool,
    pub collapse_each_step: bool,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Preset {
        margin: usize,
    },
    Graph {
        graph: GraphSpec,
        coins: CoinFamilySpec,
    },
}

/// A validated, fully merged run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub source: Source,
    pub initial: Option<InitialSpec>,
    pub steps: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub dump_states: bool,
    pub dump_operator: Option<OperatorKind>,
    pub check_invariants: bool,
    pub collapse_each_step: bool,
    pub tolerance: f64,
    pub seed: u64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MARGIN: usize = 1;

impl RunPlan {
    pub fn resolve(config: WalkConfig, flags: Overrides) -> Result<RunPlan, String> {
        let preset = flags.preset.or(config.preset);
        let margin = flags.margin.or(config.margin);
        let source = match (preset, config.graph) {
            (Some(_), Some(_)) => return Err("give either a graph or a preset, not both".into()),
            (None, None) => return Err("a graph or a preset is required".into()),
            (Some(name), None) => {
                if name != PAPER_LINE {
                    return Err(format!("unknown preset `{name}` (available: {PAPER_LINE})"));
                }
                if config.coins.is_some() {
                    return Err(format!("preset `{name}` defines its own coins"));
                }
                Source::Preset {
                    margin: margin.unwrap_or(DEFAULT_MARGIN),
                }
            }
            (None, Some(graph)) => {
                if margin.is_some() {
                    return Err("`margin` only applies to the line preset".into());
                }
                let coins = config
                    .coins
                    .ok_or("`coins` is required with an explicit graph")?;
                if config.initial.is_none() {
                    return Err("`initial` is required with an explicit graph".into());
                }
                Source::Graph { graph, coins }
            }
        };
        let tolerance = flags
            .tolerance
            .or(config.checks.tolerance)
            .unwrap_or(DEFAULT_TOLERANCE);
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(format!("tolerance must be non-negative, got {tolerance}"));
        }
        let plan = RunPlan {
            source,
            initial: config.initial,
            steps: flags.steps.or(config.steps).unwrap_or(0),
            format: flags.format.or(config.format).unwrap_or_default(),
            output: flags.output.or(config.output),
            dump_states: flags.dump_states || config.checks.dump_states,
            dump_operator: flags.dump_operator.or(config.checks.dump_operator),
            check_invariants: flags.check_invariants || config.checks.invariants,
            collapse_each_step: flags.collapse_each_step || config.checks.collapse_each_step,
            tolerance,
            seed: flags.seed.or(config.checks.seed).unwrap_or(0),
        };
        if plan.output.is_none() && (plan.dump_states || plan.dump_operator.is_some()) {
            return Err("dumps are written next to --output, which is missing".into());
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset_flags() -> Overrides {
        Overrides {
            preset: Some(PAPER_LINE.into()),
            ..Overrides::default()
        }
    }

    #[test]
    fn preset_defaults() {
        let plan = RunPlan::resolve(WalkConfig::default(), preset_flags()).unwrap();
        assert_eq!(plan.source, Source::Preset { margin: 1 });
        assert_eq!(plan.steps, 0);
        assert_eq!(plan.format, Format::Json);
        assert_eq!(plan.tolerance, DEFAULT_TOLERANCE);
    }

    #[test]
    fn flags_override_file() {
        let config: WalkConfig = serde_json::from_str(
            r#"{"preset": "paper-line", "steps": 4, "format": "csv", "checks": {"tolerance": 1e-6}}"#,
        )
        .unwrap();
        let flags = Overrides {
            steps: Some(7),
            ..Overrides::default()
        };
        let plan = RunPlan::resolve(config, flags).unwrap();
        assert_eq!(plan.steps, 7);
        assert_eq!(plan.format, Format::Csv);
        assert_eq!(plan.tolerance, 1e-6);
    }

    #[test]
    fn graph_and_preset_are_exclusive() {
        let config: WalkConfig = serde_json::from_str(
            r#"{"graph": {"vertices": [0], "edges": [[0, 0]]}, "preset": "paper-line"}"#,
        )
        .unwrap();
        assert!(RunPlan::resolve(config, Overrides::default()).is_err());
        assert!(RunPlan::resolve(WalkConfig::default(), Overrides::default()).is_err());
    }

    #[test]
    fn rejects_unknown_preset_and_missing_parts() {
        let flags = Overrides {
            preset: Some("ring".into()),
            ..Overrides::default()
        };
        assert!(RunPlan::resolve(WalkConfig::default(), flags).is_err());

        let config: WalkConfig =
            serde_json::from_str(r#"{"graph": {"vertices": [0], "edges": [[0, 0]]}}"#).unwrap();
        assert!(RunPlan::resolve(config, Overrides::default()).is_err());
    }

    #[test]
    fn dumps_need_output() {
        let flags = Overrides {
            dump_states: true,
            ..preset_flags()
        };
        assert!(RunPlan::resolve(WalkConfig::default(), flags).is_err());
    }

    #[test]
    fn initial_forms_parse() {
        let pure: InitialSpec =
            serde_json::from_str(r#"{"coin": {"re": [1, 0]}, "pair": [0, 1]}"#).unwrap();
        assert!(matches!(pure, InitialSpec::Pure { pair: [0, 1], .. }));
        let blocks: InitialSpec = serde_json::from_str(
            r#"{"blocks": [{"ket": [0, 0], "bra": [0, 0], "block": [[{"re": 1, "im": 0}]]}]}"#,
        )
        .unwrap();
        assert!(matches!(blocks, InitialSpec::Blocks { .. }));
    }
}
