//! Campaign reproducibility: per-replica derived seeds make the
//! aggregated summary byte-identical no matter how many workers run it.

use wignerlab::harness::{run_campaign, CampaignConfig, GridConfig};

fn main() -> wignerlab::Result<()> {
    let mut config = CampaignConfig {
        n_list: vec![64, 96],
        replicas: 8,
        seed: 2024,
        grid: GridConfig {
            a0: 1.0,
            ..GridConfig::default()
        },
        ..CampaignConfig::default()
    };

    config.workers = 1;
    let serial = run_campaign(&config)?;
    config.workers = 4;
    let parallel = run_campaign(&config)?;

    println!("config hash: {}", serial.config_hash);
    println!(
        "records: {} serial, {} parallel; failures: {}",
        serial.records.len(),
        parallel.records.len(),
        serial.failures.len()
    );
    let identical = serial.summary.render() == parallel.summary.render();
    println!("summaries byte-identical across 1 vs 4 workers: {identical}");
    print!("{}", serial.summary.render());
    Ok(())
}
