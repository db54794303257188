use lsmr_core::ReorthMode;

/// Parses `none|v|u|both|local:<L>|restart:<L>` with `L ≥ 1`.
pub fn parse_reorth(spec: &str) -> Result<ReorthMode, String> {
    let spec = spec.trim().to_ascii_lowercase();
    let window = |s: &str| -> Result<usize, String> {
        match s.parse::<usize>() {
            Ok(l) if l >= 1 => Ok(l),
            _ => Err(format!("window `{s}` must be a positive integer")),
        }
    };
    match spec.split_once(':') {
        None => match spec.as_str() {
            "none" => Ok(ReorthMode::None),
            "v" => Ok(ReorthMode::VOnly),
            "u" => Ok(ReorthMode::UOnly),
            "both" => Ok(ReorthMode::Both),
            _ => Err(format!("unknown reorthogonalization `{spec}`; expected none|v|u|both|local:<L>|restart:<L>")),
        },
        Some(("local", l)) => window(l).map(ReorthMode::Local),
        Some(("restart", l)) => window(l).map(ReorthMode::Restart),
        Some(_) => Err(format!("unknown reorthogonalization `{spec}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_reorth("none"), Ok(ReorthMode::None));
        assert_eq!(parse_reorth("V"), Ok(ReorthMode::VOnly));
        assert_eq!(parse_reorth("u"), Ok(ReorthMode::UOnly));
        assert_eq!(parse_reorth("both"), Ok(ReorthMode::Both));
        assert_eq!(parse_reorth("local:7"), Ok(ReorthMode::Local(7)));
        assert_eq!(parse_reorth("restart:5"), Ok(ReorthMode::Restart(5)));
        for bad in ["local:0", "restart:", "local:-1", "full", "both:2", ""] {
            assert!(parse_reorth(bad).is_err(), "{bad}");
        }
    }
}
