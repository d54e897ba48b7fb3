use evalexpr::{ContextWithMutableVariables, HashMapContext, Node, Value};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qwalls::model::{PhysicalConfig, SpectralState};
use qwalls::movingwalls::{build_galerkin, energy_rate_check, step_crank_nicolson, RateOptions, WallTrajectory};

use crate::error::{CliError, CliResult};
use crate::output::num;

/// Input file of `evolve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    pub l0: f64,
    #[serde(rename = "M")]
    pub modes: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Width as an expression in t.
    pub l: String,
    /// Centre as an expression in t.
    pub d: String,
    /// Sine-basis coefficients as [re, im] pairs; ground mode when absent.
    #[serde(default)]
    pub initial: Option<Vec<[f64; 2]>>,
    /// Steps between output rows.
    #[serde(default)]
    pub output_every: Option<usize>,
    #[serde(default)]
    pub l_min: Option<f64>,
}

fn compile(expr: &str) -> CliResult<impl Fn(f64) -> f64 + Send + Sync + 'static> {
    let node: Node = evalexpr::build_operator_tree(expr).map_err(|e| CliError::Args(format!("expression '{expr}': {e}")))?;
    let probe = move |t: f64| -> Result<f64, evalexpr::EvalexprError> {
        let mut ctx = HashMapContext::new();
        ctx.set_value("t".into(), Value::Float(t))?;
        ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI))?;
        node.eval_number_with_context(&ctx)
    };
    probe(0.0).map_err(|e| CliError::Args(format!("expression '{expr}': {e}")))?;
    Ok(move |t| probe(t).unwrap_or(f64::NAN))
}

pub fn run(spec: &EvolveSpec, hbar: f64, mass: f64) -> CliResult<Vec<Vec<String>>> {
    if !(spec.dt > 0.0 && spec.t_end >= 0.0 && spec.dt.is_finite() && spec.t_end.is_finite()) {
        return Err(CliError::Args("dt must be positive and t_end non-negative".into()));
    }
    let config = PhysicalConfig::new(hbar, mass, spec.l0)?;
    let ops = build_galerkin(&config, spec.modes)?;
    let traj = WallTrajectory::new(compile(&spec.l)?, compile(&spec.d)?).with_min_width(spec.l_min.unwrap_or(1e-6 * spec.l0));
    let steps = (spec.t_end / spec.dt).round() as usize;
    traj.validate(0.0, spec.t_end, steps.clamp(1, 10_000), f64::INFINITY)?;

    let mut c = vec![Complex64::new(0.0, 0.0); spec.modes];
    match &spec.initial {
        None => c[0] = Complex64::new(1.0, 0.0),
        Some(v) => {
            if v.len() > spec.modes {
                return Err(CliError::Args(format!("{} initial coefficients for {} modes", v.len(), spec.modes)));
            }
            for (z, [re, im]) in c.iter_mut().zip(v) {
                *z = Complex64::new(*re, *im);
            }
        }
    }
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(CliError::Args("initial state has zero norm".into()));
    }
    let mut state = SpectralState::new("sine", c.into_iter().map(|z| z / n).collect());
    let every = spec.output_every.unwrap_or_else(|| (steps / 100).max(1)).max(1);
    let opts = RateOptions::default();
    let mut rows = Vec::new();
    let mut record = |t: f64, s: &SpectralState| -> CliResult<()> {
        let (lhs, rhs) = energy_rate_check(&ops, &traj, s, t, &opts)?;
        rows.push(vec![num(t), num(s.norm()), num(ops.energy(&s.coeffs, traj.width(t))), num(lhs), num(rhs)]);
        Ok(())
    };
    record(0.0, &state)?;
    for k in 0..steps {
        state = step_crank_nicolson(&ops, &traj, &state, k as f64 * spec.dt, spec.dt)?;
        if (k + 1) % every == 0 || k + 1 == steps {
            record((k + 1) as f64 * spec.dt, &state)?;
        }
    }
    Ok(rows)
}
