//! Built-in study grids: the type I error grid and the power case studies
//! with desk-scale parameter grids.

use super::{DataBinning, NullSchedule, PowerCase, Type1Cell};
use crate::model::{AltFamily, AlternativeSpec, Family, NullModel};
use crate::statistics::MethodId;

/// Points per power grid.
pub const GRID_LEN: usize = 20;
/// Sample size of the power cases.
pub const POWER_N: usize = 1000;

/// `len` equally spaced values from `a` to `b`.
pub fn linspace(a: f64, b: f64, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![a];
    }
    (0..len)
        .map(|i| {
            if i == len - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (len - 1) as f64
            }
        })
        .collect()
}

fn null(family: Family, params: &[f64], estimate: bool) -> NullModel {
    NullModel::new(family, params.to_vec(), estimate).expect("built-in null")
}

/// Rows of the type I error table: each family, fixed or estimated, at
/// n = 100, 500 and 1000.
pub fn type1_cells() -> Vec<Type1Cell> {
    let models = [
        null(Family::Normal, &[0.0, 1.0], false),
        null(Family::Normal, &[0.0, 1.0], true),
        null(Family::Uniform, &[0.0, 1.0], false),
        null(Family::Exponential, &[1.0], false),
        null(Family::Exponential, &[1.0], true),
        null(Family::Beta, &[2.0, 2.0], false),
        null(Family::Gamma, &[2.0, 1.0], false),
    ];
    models
        .iter()
        .flat_map(|m| {
            [100, 500, 1000].map(|n| Type1Cell {
                model: m.clone(),
                n,
            })
        })
        .collect()
}

struct CaseDef {
    name: &'static str,
    null: NullModel,
    alt: (AltFamily, Vec<f64>),
    index: &'static [usize],
    grid: Vec<f64>,
    binning: Option<DataBinning>,
    lambda: Option<f64>,
    schedule: NullSchedule,
}

/// The power case studies with `len`-point grids.
pub fn power_cases(len: usize) -> Vec<PowerCase> {
    let t_grid: Vec<f64> = linspace(3.0, 60.0, len);
    let gamma_r: Vec<f64> = linspace(5.0, 43.0, len);
    let defs = vec![
        CaseDef {
            name: "normal_est_vs_t",
            null: null(Family::Normal, &[0.0, 1.0], true),
            alt: (AltFamily::StudentT, vec![3.0]),
            index: &[0],
            grid: t_grid.clone(),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "normal_fixed_vs_t",
            null: null(Family::Normal, &[0.0, 1.0], false),
            alt: (AltFamily::StudentT, vec![3.0]),
            index: &[0],
            grid: t_grid.clone(),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "normal_est_vs_beta_qq",
            null: null(Family::Normal, &[0.0, 1.0], true),
            alt: (AltFamily::Beta, vec![5.0, 5.0]),
            index: &[0, 1],
            grid: linspace(5.0, 24.0, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "normal_matched_vs_gamma",
            null: null(Family::Normal, &[5.0, 5f64.sqrt()], false),
            alt: (AltFamily::Gamma, vec![5.0, 1.0]),
            index: &[0],
            grid: gamma_r.clone(),
            binning: None,
            lambda: None,
            schedule: NullSchedule::MatchMoments,
        },
        CaseDef {
            name: "normal_est_vs_gamma",
            null: null(Family::Normal, &[0.0, 1.0], true),
            alt: (AltFamily::Gamma, vec![5.0, 1.0]),
            index: &[0],
            grid: gamma_r,
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_linear",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Linear, vec![0.0]),
            index: &[0],
            grid: linspace(0.0125, 0.25, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_beta_1q",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Beta, vec![1.0, 1.0]),
            index: &[1],
            grid: linspace(1.01, 1.2, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_beta_qq",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Beta, vec![1.0, 1.0]),
            index: &[0, 1],
            grid: linspace(1.01, 1.2, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_quadratic",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Quadratic, vec![0.0]),
            index: &[0],
            grid: linspace(0.025, 0.5, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "exponential_est_vs_bump",
            null: null(Family::Exponential, &[1.0], true),
            alt: (AltFamily::ExpNormalBump, vec![1.0]),
            index: &[0],
            grid: linspace(1.0, 0.3, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "exponential_fixed_vs_gamma",
            null: null(Family::Exponential, &[1.0], false),
            alt: (AltFamily::Gamma, vec![1.0, 1.0]),
            index: &[0],
            grid: linspace(1.01, 1.2, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "exponential_est_vs_gamma",
            null: null(Family::Exponential, &[1.0], true),
            alt: (AltFamily::Gamma, vec![1.0, 1.0]),
            index: &[0],
            grid: linspace(1.01, 1.2, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "exponential_est_vs_inverse_power",
            null: null(Family::Exponential, &[1.0], true),
            alt: (AltFamily::InversePower, vec![5.0]),
            index: &[0],
            grid: linspace(5.0, 30.0, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "truncexp_fixed_vs_linear",
            null: null(Family::TruncatedExponential, &[0.5, 0.0, 1.0], false),
            alt: (AltFamily::Linear, vec![-0.2]),
            index: &[0],
            grid: linspace(-0.2, -0.5, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "truncexp_est_vs_linear",
            null: null(Family::TruncatedExponential, &[0.5, 0.0, 1.0], true),
            alt: (AltFamily::Linear, vec![-0.2]),
            index: &[0],
            grid: linspace(-0.2, -0.5, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "beta22_vs_noncentral_beta",
            null: null(Family::Beta, &[2.0, 2.0], false),
            alt: (AltFamily::NoncentralBeta, vec![2.0, 2.0, 0.0]),
            index: &[2],
            grid: linspace(0.0, 0.75, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "beta1_est_vs_linear",
            null: null(Family::Beta, &[1.0, 1.0], true),
            alt: (AltFamily::Linear, vec![0.0]),
            index: &[0],
            grid: linspace(0.0125, 0.25, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "erlang_est_vs_gamma",
            null: null(Family::Erlang, &[2.0, 5.0], true),
            alt: (AltFamily::Gamma, vec![1.75, 5.0]),
            index: &[0],
            grid: linspace(1.75, 2.25, len),
            binning: None,
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_beta_1q_binned",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Beta, vec![1.0, 1.0]),
            index: &[1],
            grid: linspace(0.8, 1.2, len),
            binning: Some(DataBinning {
                lo: 0.0,
                hi: 1.0,
                nbins: 50,
            }),
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "normal_est_vs_t_binned",
            null: null(Family::Normal, &[0.0, 1.0], true),
            alt: (AltFamily::StudentT, vec![3.0]),
            index: &[0],
            grid: t_grid,
            binning: Some(DataBinning {
                lo: -5.0,
                hi: 5.0,
                nbins: 50,
            }),
            lambda: None,
            schedule: NullSchedule::Fixed,
        },
        CaseDef {
            name: "uniform_vs_beta_1q_poisson",
            null: null(Family::Uniform, &[0.0, 1.0], false),
            alt: (AltFamily::Beta, vec![1.0, 1.0]),
            index: &[1],
            grid: linspace(0.8, 1.2, len),
            binning: None,
            lambda: Some(POWER_N as f64),
            schedule: NullSchedule::Fixed,
        },
    ];
    defs.into_iter()
        .map(|d| {
            let alt = AlternativeSpec::new(d.alt.0, d.alt.1).expect("built-in alternative");
            PowerCase {
                name: d.name.to_string(),
                null: d.null,
                alternative: alt,
                grid_params: d.index.to_vec(),
                grid: d.grid,
                n: POWER_N,
                lambda: d.lambda,
                binning: d.binning,
                null_schedule: d.schedule,
                methods: MethodId::ALL.to_vec(),
            }
        })
        .collect()
}
