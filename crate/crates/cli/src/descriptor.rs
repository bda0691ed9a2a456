use crate::CliError;
use coupled_core::{LatticeState, NormP, TailKind};
use num_complex::Complex64;
use std::path::Path;

/// Complex literal: a bare real like `-0.25` or a `re:im` pair.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    if let Some((re, im)) = t.split_once(':') {
        let re: f64 = re.trim().parse().map_err(|_| format!("bad real part `{re}`"))?;
        let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part `{im}`"))?;
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = t.parse().map_err(|_| format!("bad number `{t}`"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Comma-separated list of complex literals.
pub fn parse_block(text: &str) -> Result<Vec<Complex64>, String> {
    if text.trim().is_empty() {
        return Err("empty block".to_string());
    }
    text.split(',').map(parse_complex).collect()
}

/// Initial data descriptors:
///   `delta`                           unit impulse at site 0
///   `constant:<block>`                the same block at every site
///   `window:<lo>:<block>|<block>|..`  a finite window, zero outside
///   `file:<path>`                     window and tails from a text file
/// where `<block>` is a comma list of complex literals.
#[derive(Debug, Clone)]
pub enum InitialData {
    Delta,
    Constant(Vec<Complex64>),
    Window { lo: i64, blocks: Vec<Vec<Complex64>> },
    File(String),
}

pub fn parse_initial(text: &str) -> Result<InitialData, String> {
    let t = text.trim();
    if t == "delta" {
        return Ok(InitialData::Delta);
    }
    if let Some(rest) = t.strip_prefix("constant:") {
        return Ok(InitialData::Constant(parse_block(rest)?));
    }
    if let Some(rest) = t.strip_prefix("window:") {
        let (lo, blocks) =
            rest.split_once(':').ok_or("window needs `window:<lo>:<blocks>`".to_string())?;
        let lo: i64 =
            lo.trim().parse().map_err(|_| format!("bad window origin `{lo}`"))?;
        let blocks: Vec<Vec<Complex64>> =
            blocks.split('|').map(parse_block).collect::<Result<_, _>>()?;
        return Ok(InitialData::Window { lo, blocks });
    }
    if let Some(rest) = t.strip_prefix("file:") {
        return Ok(InitialData::File(rest.trim().to_string()));
    }
    Err(format!(
        "unknown initial data `{t}` (expected delta, constant:..., window:... or file:...)"
    ))
}

pub fn build_state(data: &InitialData, m: usize, p: NormP) -> Result<LatticeState, CliError> {
    match data {
        InitialData::Delta => Ok(LatticeState::delta(m, p)),
        InitialData::Constant(entry) => {
            check_block_len(entry, m)?;
            LatticeState::new(
                0,
                m,
                entry.clone(),
                entry.clone(),
                entry.clone(),
                TailKind::Constant,
                p,
            )
            .map_err(CliError::from)
        }
        InitialData::Window { lo, blocks } => {
            for block in blocks {
                check_block_len(block, m)?;
            }
            LatticeState::from_window(*lo, m, blocks.concat(), p).map_err(CliError::from)
        }
        InitialData::File(path) => state_from_file(Path::new(path), m, p),
    }
}

fn check_block_len(block: &[Complex64], m: usize) -> Result<(), CliError> {
    if block.len() != m {
        return Err(CliError::Usage(format!(
            "block has {} components, the model needs {m}",
            block.len()
        )));
    }
    Ok(())
}

/// State file: `key = value` lines with keys `lo` (site of the first
/// window block), `left` / `right` (tail blocks, default zero) and one
/// `site` line per window block, in order.
fn state_from_file(path: &Path, m: usize, p: NormP) -> Result<LatticeState, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut lo = 0i64;
    let mut left = vec![Complex64::new(0.0, 0.0); m];
    let mut right = left.clone();
    let mut sites: Vec<Vec<Complex64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| CliError::Usage(format!("{}:{}: {msg}", path.display(), idx + 1));
        let Some((key, value)) = line.split_once('=') else {
            return Err(at("expected `key = value`".to_string()));
        };
        match key.trim() {
            "lo" => lo = value.trim().parse().map_err(|_| at("bad integer".to_string()))?,
            "left" => left = parse_block(value).map_err(at)?,
            "right" => right = parse_block(value).map_err(at)?,
            "site" => sites.push(parse_block(value).map_err(at)?),
            other => return Err(at(format!("unknown key `{other}`"))),
        }
    }
    if sites.is_empty() {
        return Err(CliError::Usage(format!("{}: no `site` lines", path.display())));
    }
    check_block_len(&left, m)?;
    check_block_len(&right, m)?;
    for block in &sites {
        check_block_len(block, m)?;
    }
    LatticeState::new(lo, m, sites.concat(), left, right, TailKind::Constant, p)
        .map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-2:0.25").unwrap(), Complex64::new(-2.0, 0.25));
        assert_eq!(parse_complex(" 1e-3 : -4 ").unwrap(), Complex64::new(1e-3, -4.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1:2:3").is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        assert!(matches!(parse_initial("delta").unwrap(), InitialData::Delta));
        let InitialData::Constant(entry) = parse_initial("constant:1,-0.5:2").unwrap() else {
            panic!("expected constant");
        };
        assert_eq!(entry, vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 2.0)]);
        let InitialData::Window { lo, blocks } = parse_initial("window:-3:1,0|0,2:1").unwrap()
        else {
            panic!("expected window");
        };
        assert_eq!(lo, -3);
        assert_eq!(blocks.len(), 2);
        assert!(parse_initial("garbage").is_err());
    }

    #[test]
    fn window_state_has_requested_shape() {
        let data = parse_initial("window:2:1|0.5").unwrap();
        let state = build_state(&data, 1, NormP::Inf).unwrap();
        assert_eq!(state.lo(), 2);
        assert_eq!(state.window_len(), 2);
        let wrong = parse_initial("constant:1,2,3").unwrap();
        assert!(matches!(build_state(&wrong, 2, NormP::Inf), Err(CliError::Usage(_))));
    }
}
