use std::fmt::Write as _;

use qgan_core::ansatz::{count_resources, Architecture, ResourceConfig, ResourceReport};

use crate::settings::usage;
use crate::ResourcesArgs;

pub const CSV_HEADER: &str = "architecture,qubits_per_qnn,qnn_count,total_qubits,one_qubit_gates,two_qubit_gates";

pub fn reports(arch: &str) -> anyhow::Result<Vec<ResourceReport>> {
    let archs = match arch {
        "all" => vec![Architecture::LstmQgan, Architecture::PatchGan],
        name => vec![name.parse::<Architecture>().map_err(|e| usage(e.to_string()))?],
    };
    archs
        .into_iter()
        .map(|a| Ok(count_resources(&ResourceConfig::default_for(a))?))
        .collect()
}

pub fn table(reports: &[ResourceReport]) -> String {
    let head = ["architecture", "qubits/QNN", "QNNs", "total qubits", "1-qubit gates", "2-qubit gates"];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.architecture.to_string(),
                r.qubits_per_qnn.to_string(),
                r.qnn_count.to_string(),
                r.total_qubits.to_string(),
                r.total_1qg.to_string(),
                r.total_2qg.to_string(),
            ]
        })
        .collect();
    let width: Vec<usize> = (0..6)
        .map(|c| rows.iter().map(|r| r[c].len()).chain([head[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut line = |cells: [&str; 6]| {
        let mut l = format!("{:<w$}", cells[0], w = width[0]);
        for c in 1..6 {
            let _ = write!(l, "  {:>w$}", cells[c], w = width[c]);
        }
        out.push_str(&l);
        out.push('\n');
    };
    line(head);
    for r in &rows {
        line([&r[0], &r[1], &r[2], &r[3], &r[4], &r[5]]);
    }
    out
}

pub fn csv(reports: &[ResourceReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.architecture, r.qubits_per_qnn, r.qnn_count, r.total_qubits, r.total_1qg, r.total_2qg
        );
    }
    out
}

pub fn run(a: &ResourcesArgs) -> anyhow::Result<()> {
    let reports = reports(&a.arch)?;
    let csv = csv(&reports);
    print!("{}\n{csv}", table(&reports));
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv)?;
    }
    Ok(())
}
