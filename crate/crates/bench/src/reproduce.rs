//! Built-in campaigns for the four CCDF figures.
//!
//! Every figure runs at `L = 4`. Each campaign is a list of configuration
//! documents; a document with a `[sweep]` section contributes one curve per
//! child.

use std::path::{Path, PathBuf};

use crate::config::{parse_config, ExperimentConfig};
use crate::error::Result;
use crate::output::{gnuplot_script, write_csv};
use crate::run::{run_experiment, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Unmodified CCDF for N = 64 to 1024.
    Fig2,
    /// SLM with U = 2, 4, 6, 8, 16 at N = 256.
    Fig3,
    /// Orthogonal pilot sequences with M = 1, 4, 8, 16 at N = 256.
    Fig4,
    /// SAP with alpha = 1.55 and l_count = 8, 16, 32 at N = 256.
    Fig5,
}

const FIG2: &str = r#"
label = "baseline"
technique = "none"
n_subcarriers = 64

[sweep]
n_subcarriers = [64, 128, 256, 512, 1024]
"#;

const BASELINE_256: &str = r#"
label = "baseline"
technique = "none"
n_subcarriers = 256
"#;

const FIG3: &str = r#"
technique = "slm"
n_subcarriers = 256

[slm]
alphabet = "binary"

[sweep]
u_count = [2, 4, 6, 8, 16]
"#;

// M = 1 is the conventional frame with a fixed pilot sequence and serves as
// the baseline.
const FIG4: &str = r#"
technique = "ops"
n_subcarriers = 256

[ops]
n_pilots = 16

[sweep]
m_count = [1, 4, 8, 16]
"#;

const FIG5: &str = r#"
technique = "sap"
n_subcarriers = 256

[sap]
alpha = 1.55

[sweep]
l_count = [8, 16, 32]
"#;

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn documents(self) -> Vec<&'static str> {
        match self {
            Figure::Fig2 => vec![FIG2],
            Figure::Fig3 => vec![BASELINE_256, FIG3],
            Figure::Fig4 => vec![FIG4],
            Figure::Fig5 => vec![BASELINE_256, FIG5],
        }
    }

    /// Every configuration of the campaign, overrides applied.
    pub fn configs(self, seed: Option<u64>, n_symbols: Option<usize>) -> Vec<ExperimentConfig> {
        self.documents()
            .into_iter()
            .flat_map(|doc| {
                let mut cfg = parse_config(doc).expect("built-in configuration is valid");
                cfg.override_with(seed, n_symbols);
                cfg.expand().into_iter().cloned().collect::<Vec<_>>()
            })
            .collect()
    }
}

/// Runs a campaign and writes `<figure>_<label>.csv` per curve plus a
/// `<figure>.gp` gnuplot script into `out_dir`.
pub fn reproduce(
    figure: Figure,
    seed: Option<u64>,
    n_symbols: Option<usize>,
    workers: Option<usize>,
    out_dir: &Path,
) -> Result<Vec<(PathBuf, RunResult)>> {
    let mut written = Vec::new();
    for cfg in figure.configs(seed, n_symbols) {
        let result = run_experiment(&cfg, workers)?;
        let path = out_dir.join(format!("{}_{}.csv", figure.name(), cfg.label));
        write_csv(&result, &path)?;
        written.push((path, result));
    }
    let paths: Vec<PathBuf> = written.iter().map(|(p, _)| p.clone()).collect();
    let script = out_dir.join(format!("{}.gp", figure.name()));
    std::fs::write(&script, gnuplot_script(figure.name(), &paths, out_dir)).map_err(|source| {
        crate::error::BenchError::Io {
            path: script.clone(),
            source,
        }
    })?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn campaign_shapes() {
        assert_eq!(Figure::Fig2.configs(None, None).len(), 5);
        let fig3 = Figure::Fig3.configs(Some(7), Some(10));
        assert_eq!(fig3.len(), 6);
        assert_eq!(fig3[0].label, "baseline");
        assert_eq!(fig3[1].label, "slm_u_count_2");
        assert!(fig3
            .iter()
            .all(|c| c.seed == 7 && c.n_symbols == 10 && c.oversampling == 4));
        assert_eq!(Figure::Fig4.configs(None, None).len(), 4);
        assert_eq!(Figure::Fig5.configs(None, None).len(), 4);
    }
}
