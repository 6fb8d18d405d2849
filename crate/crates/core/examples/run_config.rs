//! Run an experiment from a TOML config and write its CSVs, as the binary
//! does.
//!
//! ```text
//! cargo run --release --example run_config -- configs/snr_beta_sweep.toml
//! ```

use transmon_kerr::cli;
use transmon_kerr::config::load_config;

fn main() -> transmon_kerr::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/polarisation.toml".into());
    let cfg = load_config(path.as_ref())?;
    let out = cli::run(&cfg)?;
    for (k, v) in &out.summary {
        println!("{k} = {v}");
    }
    for t in &out.tables {
        println!("wrote {}", cfg.output_dir.join(&t.name).display());
    }
    Ok(())
}
