use std::path::Path;

use qwalls::boundary::{make_dirichlet, make_local, make_neumann, make_pseudo_periodic, make_robin, BoundaryUnitary};

use crate::error::{CliError, CliResult};

pub const BC_HELP: &str = "dirichlet | neumann | robin:ALPHA | periodic:ALPHA | local:ALPHA1,ALPHA2 | inline JSON | path to a JSON file";

fn angle(s: &str) -> CliResult<f64> {
    s.trim().parse::<f64>().map_err(|_| CliError::Args(format!("bad angle '{s}'")))
}

/// Boundary unitary from its command-line form.
pub fn parse_bc(spec: &str) -> CliResult<BoundaryUnitary> {
    let s = spec.trim();
    if s.starts_with('{') {
        return Ok(serde_json::from_str(s)?);
    }
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let bc = match (name.to_ascii_lowercase().as_str(), arg) {
        ("dirichlet", None) => make_dirichlet(),
        ("neumann", None) => make_neumann(),
        ("robin", Some(a)) => make_robin(angle(a)?)?,
        ("periodic" | "pseudo_periodic", Some(a)) => make_pseudo_periodic(angle(a)?)?,
        ("local", Some(a)) => {
            let (a1, a2) = a
                .split_once(',')
                .ok_or_else(|| CliError::Args(format!("local needs two angles, got '{a}'")))?;
            make_local(angle(a1)?, angle(a2)?)?
        }
        _ if Path::new(s).is_file() => {
            let text = std::fs::read_to_string(s)?;
            serde_json::from_str(&text)?
        }
        _ => return Err(CliError::Args(format!("unknown boundary condition '{s}' (expected {BC_HELP})"))),
    };
    Ok(bc)
}
