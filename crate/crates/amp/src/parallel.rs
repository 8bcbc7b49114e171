//! Multi-threaded sweeps. Rows are computed independently and collected in
//! index order, so the output matches the serial sweep bit for bit.

use optomech_core::sweep::{assemble, evaluate_point, SweepResult, SweepSpec};
use rayon::prelude::*;

use crate::CliError;

/// Worker count override; unset or empty means one thread per core.
pub const THREADS_ENV: &str = "OPTOMECH_THREADS";

pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "`{THREADS_ENV}` must be a positive integer, got `{v}`"
            ))),
        },
        _ => Ok(None),
    }
}

pub fn run_sweep_parallel(
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<SweepResult, CliError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        (0..spec.point_count())
            .into_par_iter()
            .map(|i| evaluate_point(spec, i))
            .collect()
    });
    Ok(assemble(spec, rows))
}
