//! `poles` and `linearize`: frequency- and state-space views of one
//! (optionally controlled) Dirac GAN.

use clap::Args;
use clcgan::diracgan::{
    apply_clc, eigenvalues, jacobian_report, linearize, make_objective, theorem1_threshold, transfer_functions,
    Controller, Matrix2, ObjectiveKind, ObjectiveSpec, Realization,
};
use clcgan::polyrat::{max_real_part, routh_hurwitz_stable, ComplexRoot, StabilityClass, DEFAULT_AXIS_TOL};
use clcgan::{Polynomial64, TransferFunction64};
use serde::Serialize;
use std::path::PathBuf;

use crate::config::{usage, RunConfig};

#[derive(Args, Debug, Clone, Default)]
pub struct SystemArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// wgan, sgan, nsgan, lsgan or hinge.
    #[arg(long)]
    pub objective: Option<ObjectiveKind>,
    /// Data location.
    #[arg(long)]
    pub c: Option<f64>,
    /// Proportional control gain (0 disables control).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// input-feedback or output-damping.
    #[arg(long)]
    pub realization: Option<Realization>,
}

/// A fully resolved Dirac system.
#[derive(Clone, Debug)]
pub struct System {
    pub objective: ObjectiveKind,
    pub spec: ObjectiveSpec<f64>,
    pub c: f64,
    pub lambda: f64,
    pub realization: Realization,
}

impl System {
    pub fn resolve(args: &SystemArgs, cfg: &RunConfig) -> anyhow::Result<Self> {
        let objective = args.objective.or(cfg.objective).unwrap_or(ObjectiveKind::Wgan);
        let c = args.c.or(cfg.c).unwrap_or(1.0);
        let lambda = args.lambda.or(cfg.lambda).unwrap_or(0.0);
        let realization = args.realization.or(cfg.realization).unwrap_or(Realization::InputFeedback);
        if !c.is_finite() || c == 0.0 {
            return Err(usage(format!("--c must be finite and nonzero, got {c}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(usage(format!("--lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { objective, spec: make_objective(objective), c, lambda, realization })
    }

    pub fn controller(&self) -> Controller<f64> {
        Controller::from_lambda(self.lambda, self.realization).expect("lambda checked on resolve")
    }
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub re: f64,
    pub im: f64,
}

// Negated exact zeros print as `-0.0`; adding +0 clears the sign bit.
fn unsigned(x: f64) -> f64 {
    x + 0.0
}

fn coeffs(p: &Polynomial64) -> Vec<f64> {
    p.coeffs().iter().copied().map(unsigned).collect()
}

fn matrix(m: Matrix2<f64>) -> Matrix2<f64> {
    m.map(|row| row.map(unsigned))
}

fn poles_of(roots: &[ComplexRoot<f64>]) -> Vec<Pole> {
    roots.iter().map(|z| Pole { re: unsigned(z.re), im: unsigned(z.im) }).collect()
}

#[derive(Serialize, Debug)]
pub struct TfReport {
    /// Ascending powers of `s`.
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub display: String,
}

impl From<&TransferFunction64> for TfReport {
    fn from(tf: &TransferFunction64) -> Self {
        Self { num: coeffs(tf.num()), den: coeffs(tf.den()), display: tf.to_string() }
    }
}

#[derive(Serialize, Debug)]
pub struct PolesReport {
    pub objective: ObjectiveKind,
    pub c: f64,
    pub lambda: f64,
    pub realization: Realization,
    pub t_d: TfReport,
    pub t_g: TfReport,
    pub controlled_t_d: TfReport,
    pub controlled_t_g: TfReport,
    pub controlled_den: Vec<f64>,
    pub poles: Vec<Pole>,
    pub max_real_part: f64,
    pub class: StabilityClass,
    pub routh_hurwitz_stable: bool,
    pub theorem1_threshold: f64,
}

pub fn poles(sys: &System) -> anyhow::Result<PolesReport> {
    let open = linearize(&sys.spec, sys.c);
    let (t_d, t_g) = transfer_functions(&open)?;
    let (ct_d, ct_g) = transfer_functions(&apply_clc(&open, &sys.controller()))?;
    let roots = ct_d.poles()?;
    Ok(PolesReport {
        objective: sys.objective,
        c: sys.c,
        lambda: sys.lambda,
        realization: sys.realization,
        t_d: (&t_d).into(),
        t_g: (&t_g).into(),
        controlled_den: coeffs(ct_d.den()),
        controlled_t_d: (&ct_d).into(),
        controlled_t_g: (&ct_g).into(),
        max_real_part: max_real_part(&roots),
        poles: poles_of(&roots),
        class: ct_d.classify(DEFAULT_AXIS_TOL)?,
        routh_hurwitz_stable: routh_hurwitz_stable(ct_d.den())?,
        theorem1_threshold: theorem1_threshold(&sys.spec),
    })
}

#[derive(Serialize, Debug)]
pub struct JacobianSection {
    pub regularizer: Matrix2<f64>,
    pub regularized: Matrix2<f64>,
    pub eigenvalues: Vec<Pole>,
    pub max_real_part: f64,
}

#[derive(Serialize, Debug)]
pub struct LinearizeReport {
    pub objective: ObjectiveKind,
    pub c: f64,
    pub lambda: f64,
    pub realization: Realization,
    pub matrix: Matrix2<f64>,
    pub input_gain: f64,
    pub eigenvalues: Vec<Pole>,
    pub controlled_matrix: Matrix2<f64>,
    pub controlled_eigenvalues: Vec<Pole>,
    pub jacobian: JacobianSection,
    pub theorem1_threshold: f64,
}

pub fn linearize_report(sys: &System) -> anyhow::Result<LinearizeReport> {
    let open = linearize(&sys.spec, sys.c);
    let closed = apply_clc(&open, &sys.controller());
    let jac = jacobian_report(&sys.spec, sys.c, sys.lambda)?;
    Ok(LinearizeReport {
        objective: sys.objective,
        c: sys.c,
        lambda: sys.lambda,
        realization: sys.realization,
        eigenvalues: poles_of(&eigenvalues(&open.a)?),
        matrix: matrix(open.a),
        input_gain: unsigned(open.input_gain),
        controlled_eigenvalues: poles_of(&eigenvalues(&closed.a)?),
        controlled_matrix: matrix(closed.a),
        jacobian: JacobianSection {
            regularizer: matrix(jac.regularizer),
            regularized: matrix(jac.regularized()),
            max_real_part: jac.max_real_part(),
            eigenvalues: poles_of(&jac.eigenvalues),
        },
        theorem1_threshold: theorem1_threshold(&sys.spec),
    })
}
