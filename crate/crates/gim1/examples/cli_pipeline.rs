//! Drive the CLI layer in-process: parse an argv, run it against an
//! in-memory buffer, and feed the JSON output to serde. Useful when
//! embedding the tool instead of shelling out to the `gim1` binary.

use clap::Parser;
use gim1::cli::{run, Cli};

fn main() -> gim1::Result<()> {
    let argv = [
        "gim1", "exact", "--dist", "erlang:k=2,rate=1.4", "--mu", "1.0", "--n", "6", "--format",
        "json",
    ];
    let cli = Cli::parse_from(argv);
    let mut out = Vec::new();
    run(cli, &mut out)?;

    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    println!("schema_version: {}", doc["schema_version"]);
    println!("config:         {}", doc["config"]);
    println!("p_6:            {}", doc["result"]["rows"][6]["p"]);

    // The same machinery renders the csv form (a commented config line
    // followed by plain csv, which is also the human format).
    let cli = Cli::parse_from([
        "gim1", "sigma", "--dist", "det:d=1.25", "--mu", "1.0", "--format", "csv",
    ]);
    let mut out = Vec::new();
    run(cli, &mut out)?;
    println!("\n--- sigma (csv) ---");
    print!("{}", String::from_utf8(out).unwrap());
    Ok(())
}
