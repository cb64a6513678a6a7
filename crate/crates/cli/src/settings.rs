//! `key = value` config files. Blank lines and `#` comments are ignored;
//! unknown keys are usage errors so typos cannot silently change a run.

use diffprobe_core::{Error, ProbeConfig, RadialSchedule};

pub fn apply_config_text(cfg: &mut ProbeConfig, text: &str) -> Result<(), Error> {
    let mut rho0 = cfg.schedule.rho0;
    let mut lambda = cfg.schedule.lambda;
    let mut count = cfg.schedule.count;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            Error::InvalidArgument(format!("config line {}: bad {what} `{value}`", lineno + 1))
        };

        match key {
            "rho0" => rho0 = value.parse().map_err(|_| bad("float"))?,
            "lambda" => lambda = value.parse().map_err(|_| bad("float"))?,
            "count" => count = value.parse().map_err(|_| bad("integer"))?,
            "dirs" => cfg.extra_dirs = value.parse().map_err(|_| bad("integer"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
            "deriv_tol" => cfg.deriv_tol = value.parse().map_err(|_| bad("float"))?,
            "deriv_consecutive" => {
                cfg.deriv_consecutive = value.parse().map_err(|_| bad("integer"))?
            }
            "richardson_tol" => cfg.richardson_tol = value.parse().map_err(|_| bad("float"))?,
            "grad_cap" => cfg.grad_cap = value.parse().map_err(|_| bad("float"))?,
            "det_tuples" => cfg.det_tuples = value.parse().map_err(|_| bad("integer"))?,
            "block_tuples" => cfg.block_tuples = value.parse().map_err(|_| bad("integer"))?,
            "shell_rho_min" => cfg.shell_rho_min = value.parse().map_err(|_| bad("float"))?,
            "shell_step_scale" => cfg.shell_step_scale = value.parse().map_err(|_| bad("float"))?,
            "cr_tol" => cfg.cr_tol = value.parse().map_err(|_| bad("float"))?,
            "slope_margin" => cfg.tol.slope_margin = value.parse().map_err(|_| bad("float"))?,
            "fit_min" => cfg.tol.fit_min = value.parse().map_err(|_| bad("float"))?,
            "ratio_tol" => cfg.tol.ratio_tol = value.parse().map_err(|_| bad("float"))?,
            "ratio_floor" => cfg.tol.ratio_floor = value.parse().map_err(|_| bad("float"))?,
            "tail_len" => cfg.tol.tail_len = value.parse().map_err(|_| bad("integer"))?,
            "zero_tol" => cfg.tol.zero_tol = value.parse().map_err(|_| bad("float"))?,
            "vanish_slope_min" => {
                cfg.tol.vanish_slope_min = value.parse().map_err(|_| bad("float"))?
            }
            "vanish_fit_min" => cfg.tol.vanish_fit_min = value.parse().map_err(|_| bad("float"))?,
            "vanish_tol" => cfg.tol.vanish_tol = value.parse().map_err(|_| bad("float"))?,
            "vanish_floor" => cfg.tol.vanish_floor = value.parse().map_err(|_| bad("float"))?,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "config line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    cfg.schedule = RadialSchedule::new(rho0, lambda, count)?;
    Ok(())
}
