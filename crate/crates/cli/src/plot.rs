//! gnuplot scripts for CSV tables.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use gpdephase_core::SweepTable;

use crate::error::{CliError, Result};
use crate::output::{read_table, write_file, FileEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    /// Colour map of the first column over both axes.
    Density,
    /// One line per value of the outer axis.
    Curves,
}

fn quote(text: &str) -> String {
    text.replace('\'', "''")
}

/// Script text for `table`, stored at `table_file` (referenced by file name,
/// so run gnuplot from the table's directory).
pub fn plot_script(
    table: &SweepTable,
    table_file: &str,
    column: &str,
    style: PlotStyle,
) -> Result<String> {
    let col = table.column_index(column).ok_or_else(|| CliError::Table {
        path: PathBuf::from(table_file),
        message: format!("no column {column:?}"),
    })?;
    let axes = table.axes.len();
    let using = axes + col + 1;
    let stem = Path::new(table_file)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".into());
    let file = quote(table_file);

    let mut s = String::new();
    writeln!(s, "# {column} from {table_file}").unwrap();
    writeln!(s, "set datafile separator comma").unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    writeln!(s, "set terminal pngcairo size 900,650").unwrap();
    writeln!(s, "set output '{}.png'", quote(&stem)).unwrap();
    match (axes, style) {
        (0, _) => {
            writeln!(s, "set style data boxes").unwrap();
            writeln!(s, "plot '{file}' using 0:{using} title '{}'", quote(column)).unwrap();
        }
        (1, _) => {
            let x = &table.axes[0].name;
            writeln!(s, "set xlabel '{}'", quote(x)).unwrap();
            writeln!(s, "set ylabel '{}'", quote(column)).unwrap();
            writeln!(s, "plot '{file}' using 1:{using} with linespoints").unwrap();
        }
        (_, PlotStyle::Density) => {
            let (y, x) = (&table.axes[0].name, &table.axes[1].name);
            writeln!(s, "set xlabel '{}'", quote(x)).unwrap();
            writeln!(s, "set ylabel '{}'", quote(y)).unwrap();
            writeln!(s, "set cblabel '{}'", quote(column)).unwrap();
            writeln!(s, "set palette rgbformulae 33,13,10").unwrap();
            writeln!(s, "plot '{file}' using 2:1:{using} with image notitle").unwrap();
        }
        (_, PlotStyle::Curves) => {
            let (outer, inner) = (&table.axes[0], &table.axes[1]);
            writeln!(s, "set xlabel '{}'", quote(&inner.name)).unwrap();
            writeln!(s, "set ylabel '{}'", quote(column)).unwrap();
            let n = inner.len();
            let sets = table.metadata.get("sets").and_then(|v| v.as_array());
            let series: Vec<String> = outer
                .points
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let title = match sets.and_then(|s| s.get(k)) {
                        Some(p) if outer.name == "set" => format!(
                            "gamma0 = {}, cutoff = {}, lambda = {}, d = {}",
                            p["gamma0"], p["cutoff"], p["lambda"], p["d"]
                        ),
                        _ => format!("{} = {v}", outer.name),
                    };
                    format!(
                        "  '{file}' every ::{}::{} using 2:{using} with lines title '{}'",
                        k * n,
                        (k + 1) * n - 1,
                        quote(&title)
                    )
                })
                .collect();
            writeln!(s, "plot \\\n{}", series.join(", \\\n")).unwrap();
        }
    }
    Ok(s)
}

/// Read the CSV table at `table_path` and write `<table>.gp` next to it.
pub fn write_plot_script(table_path: &Path, column: &str, style: PlotStyle) -> Result<FileEntry> {
    let table = read_table(table_path)?;
    let name = table_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = plot_script(&table, &name, column, style)?;
    write_file(&table_path.with_extension("gp"), "plot-script", &text)
}
