use coupled_core::{LatticeState, NormP, TailKind};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal; infinities spelled `inf` / `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{}:{}", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn fmt_block(block: &[Complex64]) -> String {
    block.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(",")
}

pub fn fmt_norm(p: NormP) -> String {
    match p {
        NormP::Inf => "inf".to_string(),
        NormP::P(x) => fmt_f64(x),
    }
}

/// Output directory handle; every artifact is written in one shot so a
/// run never leaves a half-written CSV behind.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn new(dir: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> io::Result<PathBuf> {
        let mut text = String::with_capacity(
            header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>(),
        );
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.path(name);
        std::fs::write(&path, text)?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> io::Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Rows of trajectory.csv for one snapshot: the window plus one tail
/// site on each side, so the tail value is visible in the flat file.
pub fn trajectory_rows(label: &str, state: &LatticeState, rows: &mut Vec<String>) {
    for k in (state.lo() - 1)..=(state.hi() + 1) {
        let block = state.value_at(k);
        for (comp, z) in block.iter().enumerate() {
            rows.push(format!("{label},{k},{comp},{},{}", fmt_f64(z.re), fmt_f64(z.im)));
        }
    }
}

fn sidecar_block(label: &str, state: &LatticeState, text: &mut String) {
    let _ = writeln!(text, "[snapshot {label}]");
    let _ = writeln!(text, "lo = {}", state.lo());
    let _ = writeln!(text, "hi = {}", state.hi());
    match state.tail_kind() {
        TailKind::Constant => {
            let _ = writeln!(text, "tail = constant");
        }
        TailKind::Geometric { ratio } => {
            let _ = writeln!(text, "tail = geometric {}", fmt_complex(ratio));
        }
    }
    let _ = writeln!(text, "left = {}", fmt_block(state.left_tail()));
    let _ = writeln!(text, "right = {}", fmt_block(state.right_tail()));
}

/// Writes trajectory.csv (columns step_or_time, k, comp, re, im) and the
/// sidecar trajectory.meta describing each snapshot's window and tails.
pub fn write_trajectory(
    out: &OutDir,
    snapshots: &[(String, LatticeState)],
) -> io::Result<PathBuf> {
    let mut rows = Vec::new();
    let mut meta = String::new();
    if let Some((_, first)) = snapshots.first() {
        let _ = writeln!(meta, "block-dim = {}", first.block_dim());
        let _ = writeln!(meta, "p = {}", fmt_norm(first.norm_p()));
    }
    let _ = writeln!(meta, "snapshots = {}", snapshots.len());
    for (label, state) in snapshots {
        trajectory_rows(label, state, &mut rows);
        sidecar_block(label, state, &mut meta);
    }
    out.write_text("trajectory.meta", &meta)?;
    out.write_csv("trajectory.csv", "step_or_time,k,comp,re,im", &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for &x in &[0.5, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn trajectory_rows_cover_one_tail_site_each_side() {
        let state = LatticeState::delta(2, NormP::Inf);
        let mut rows = Vec::new();
        trajectory_rows("7", &state, &mut rows);
        // Sites -1, 0, 1 with two components each.
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[2], "7,0,0,1,0");
    }
}
