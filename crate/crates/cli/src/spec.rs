//! TOML study specifications.
//!
//! ```toml
//! b = 1000
//! reps = 1000
//! alphas = [0.05]
//! seed = 7
//! builtin = ["uniform_vs_linear"]   # or `true` for every built-in case
//! grid_len = 20                     # grid length of built-in cases
//!
//! [[case]]
//! name = "uniform_vs_linear"
//! null = "uniform"
//! params = [0.0, 1.0]
//! alternative = "linear"
//! alt_params = [0.0]
//! vary = [0]
//! grid = { from = 0.0125, to = 0.25, len = 20 }
//!
//! [[cell]]
//! null = "normal"
//! params = [0.0, 1.0]
//! estimate = true
//! n = 100
//! ```

use std::collections::HashSet;

use multigof::statistics::parse_methods;
use multigof::studies::cases::{linspace, power_cases, type1_cells, GRID_LEN, POWER_N};
use multigof::studies::{DataBinning, NullSchedule, PowerCase, Type1Cell};
use multigof::{AltFamily, AlternativeSpec, MethodId, NullModel};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range { from: f64, to: f64, len: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range { from, to, len } => linspace(*from, *to, *len),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Builtin {
    All(bool),
    Names(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: Spanned<String>,
    pub null: String,
    pub params: Vec<f64>,
    #[serde(default)]
    pub estimate: bool,
    pub alternative: String,
    pub alt_params: Vec<f64>,
    /// Alternative parameter indices set to the grid value.
    #[serde(default)]
    pub vary: Option<Vec<usize>>,
    pub grid: GridSpec,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub binning: Option<DataBinning>,
    #[serde(default)]
    pub null_schedule: Option<NullSchedule>,
    #[serde(default)]
    pub methods: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub null: Spanned<String>,
    pub params: Vec<f64>,
    #[serde(default)]
    pub estimate: bool,
    pub n: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub b: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub alphas: Option<Vec<f64>>,
    pub builtin: Option<Builtin>,
    pub grid_len: Option<usize>,
    #[serde(default, rename = "case")]
    pub cases: Vec<CaseSpec>,
    #[serde(default, rename = "cell")]
    pub cells: Vec<CellSpec>,
}

/// A parsed specification with its source text for line diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub spec: StudySpec,
    source: String,
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn methods_from(list: &Option<Vec<String>>) -> multigof::Result<Vec<MethodId>> {
    match list {
        None => Ok(MethodId::ALL.to_vec()),
        Some(names) => parse_methods(&names.join(",")),
    }
}

impl LoadedSpec {
    pub fn parse(source: &str) -> CliResult<Self> {
        let spec: StudySpec =
            toml::from_str(source).map_err(|e| CliError::config(format!("study spec: {e}")))?;
        Ok(LoadedSpec {
            spec,
            source: source.to_string(),
        })
    }

    fn at(
        &self,
        span: std::ops::Range<usize>,
        what: &str,
        msg: impl std::fmt::Display,
    ) -> CliError {
        CliError::config(format!(
            "study spec line {}: {what}: {msg}",
            line_of(&self.source, span.start)
        ))
    }

    /// Built-in and user-defined power cases, validated.
    pub fn power_cases(&self) -> CliResult<Vec<PowerCase>> {
        let grid_len = self.spec.grid_len.unwrap_or(GRID_LEN);
        if grid_len == 0 {
            return Err(CliError::config("study spec: grid_len must be positive"));
        }
        let mut cases = match &self.spec.builtin {
            None | Some(Builtin::All(false)) => Vec::new(),
            Some(Builtin::All(true)) => power_cases(grid_len),
            Some(Builtin::Names(names)) => {
                let all = power_cases(grid_len);
                names
                    .iter()
                    .map(|n| {
                        all.iter().find(|c| &c.name == n).cloned().ok_or_else(|| {
                            CliError::config(format!("study spec: unknown built-in case `{n}`"))
                        })
                    })
                    .collect::<CliResult<_>>()?
            }
        };
        for c in &self.spec.cases {
            let span = c.name.span();
            let name = c.name.get_ref();
            let what = format!("case `{name}`");
            let err = |msg: &dyn std::fmt::Display| self.at(span.clone(), &what, msg);
            if !valid_name(name) {
                return Err(err(&"names may use letters, digits, `_`, `-` and `.` only"));
            }
            let null =
                NullModel::from_name(&c.null, c.params.clone(), c.estimate).map_err(|e| err(&e))?;
            let family: AltFamily = c.alternative.parse().map_err(|e| err(&e))?;
            let alternative =
                AlternativeSpec::new(family, c.alt_params.clone()).map_err(|e| err(&e))?;
            let grid = c.grid.values();
            if grid.is_empty() {
                return Err(err(&"grid is empty"));
            }
            let methods = methods_from(&c.methods).map_err(|e| err(&e))?;
            let case = PowerCase {
                name: name.clone(),
                null,
                alternative,
                grid_params: c.vary.clone().unwrap_or_else(|| vec![0]),
                grid,
                n: c.n.unwrap_or(POWER_N),
                lambda: c.lambda,
                binning: c.binning,
                null_schedule: c.null_schedule.unwrap_or_default(),
                methods,
            };
            for &g in &case.grid {
                case.alternative_at(g)
                    .map_err(|e| err(&format!("grid value {g}: {e}")))?;
            }
            if case.n < 3 {
                return Err(err(&"n must be at least 3"));
            }
            if let Some(b) = case.binning {
                b.edges().map_err(|e| err(&e))?;
            }
            cases.push(case);
        }
        if cases.is_empty() {
            return Err(CliError::config("study spec: no cases"));
        }
        let mut seen = HashSet::new();
        for c in &cases {
            if !seen.insert(c.name.as_str()) {
                return Err(CliError::config(format!(
                    "study spec: duplicate case name `{}`",
                    c.name
                )));
            }
        }
        Ok(cases)
    }

    /// Type I error cells; the built-in grid when the spec lists none.
    pub fn type1_cells(&self) -> CliResult<Vec<Type1Cell>> {
        if self.spec.cells.is_empty() {
            return Ok(type1_cells());
        }
        self.spec
            .cells
            .iter()
            .map(|c| {
                let model = NullModel::from_name(c.null.get_ref(), c.params.clone(), c.estimate)
                    .map_err(|e| self.at(c.null.span(), "cell", e))?;
                if c.n < 3 {
                    return Err(self.at(c.null.span(), "cell", "n must be at least 3"));
                }
                Ok(Type1Cell { model, n: c.n })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
b = 200
reps = 50
alphas = [0.01, 0.05]

[[case]]
name = "lin"
null = "uniform"
params = [0.0, 1.0]
alternative = "linear"
alt_params = [0.0]
grid = { from = 0.0, to = 0.2, len = 3 }
methods = ["ks", "AD"]

[[case]]
name = "t"
null = "normal"
params = [0.0, 1.0]
estimate = true
alternative = "t"
alt_params = [3.0]
grid = [3.0, 10.0]
n = 50
"#;

    #[test]
    fn parses_cases() {
        let s = LoadedSpec::parse(SPEC).unwrap();
        assert_eq!(s.spec.b, Some(200));
        let cases = s.power_cases().unwrap();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0].grid, vec![0.0, 0.1, 0.2]);
        assert_eq!(cases[0].methods, vec![MethodId::KS, MethodId::AD]);
        assert_eq!(cases[0].n, POWER_N);
        assert_eq!(cases[1].methods.len(), MethodId::ALL.len());
        assert!(cases[1].null.estimates_params());
        assert_eq!(s.type1_cells().unwrap().len(), 21);
    }

    #[test]
    fn builtin_selection() {
        let s = LoadedSpec::parse("builtin = [\"uniform_vs_linear\"]\ngrid_len = 4\n").unwrap();
        let cases = s.power_cases().unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].grid.len(), 4);
        let s = LoadedSpec::parse("builtin = true\n").unwrap();
        assert_eq!(s.power_cases().unwrap().len(), 21);
        let s = LoadedSpec::parse("builtin = [\"nope\"]\n").unwrap();
        assert!(s.power_cases().is_err());
    }

    #[test]
    fn empty_grid_is_reported_with_line() {
        let src = SPEC.replace("grid = [3.0, 10.0]", "grid = []");
        let e = LoadedSpec::parse(&src).unwrap().power_cases().unwrap_err();
        assert_eq!(e.kind, crate::Failure::InvalidConfig);
        assert!(e.message.contains("grid is empty"), "{}", e.message);
        let line = src
            .lines()
            .position(|l| l.contains("name = \"t\""))
            .unwrap()
            + 1;
        assert!(e.message.contains(&format!("line {line}")), "{}", e.message);
    }

    #[test]
    fn malformed_specs() {
        let e = LoadedSpec::parse("b = \n").unwrap_err();
        assert!(e.message.contains("line 1"), "{}", e.message);
        assert!(LoadedSpec::parse("bogus = 1\n").is_err());
        for (from, to) in [
            ("\"linear\"", "\"wiggly\""),
            ("alt_params = [0.0]", "alt_params = [5.0]"),
            ("name = \"lin\"", "name = \"a b\""),
            ("name = \"t\"", "name = \"lin\""),
            ("[\"ks\", \"AD\"]", "[\"ks\", \"XX\"]"),
        ] {
            let src = SPEC.replace(from, to);
            assert!(
                LoadedSpec::parse(&src)
                    .and_then(|s| s.power_cases())
                    .is_err(),
                "{from} -> {to}"
            );
        }
        assert!(LoadedSpec::parse("").unwrap().power_cases().is_err());
    }

    #[test]
    fn custom_cells() {
        let s = LoadedSpec::parse(
            "[[cell]]\nnull = \"exp\"\nparams = [1.0]\nestimate = true\nn = 100\n",
        )
        .unwrap();
        let cells = s.type1_cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].n, 100);
        let s =
            LoadedSpec::parse("\n[[cell]]\nnull = \"exp\"\nparams = [-1.0]\nn = 100\n").unwrap();
        let e = s.type1_cells().unwrap_err();
        assert!(e.message.contains("line 3"), "{}", e.message);
    }
}
