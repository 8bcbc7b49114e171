//! Gnuplot scripts that reproduce a figure from its CSV table.

use optomech_core::sweep::SweepResult;

use crate::VERSION;

/// Script plotting every output column of `csv_name`, which is referenced
/// relative to the script's directory. Flagged rows are skipped.
pub fn gnuplot_script(result: &SweepResult, csv_name: &str) -> String {
    let naxes = result.axes.len();
    let flag_col = naxes + result.columns.len() + 1;
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let mut s = format!(
        "# optomech-amp v{VERSION}\n\
         # gnuplot script; run from the directory containing {csv_name}\n\
         set datafile separator \",\"\n\
         set datafile commentschars \"#\"\n\
         set terminal pngcairo size 900,600\n\
         data = \"{csv_name}\"\n"
    );
    let ok = |col: usize| format!("(${flag_col} == 0 ? ${col} : NaN)");
    if naxes == 1 {
        s.push_str(&format!(
            "set output \"{stem}.png\"\nset xlabel \"{}\"\nset grid\nplot \\\n",
            result.axes[0].param.name()
        ));
        let lines: Vec<String> = result
            .columns
            .iter()
            .enumerate()
            .map(|(k, name)| {
                format!(
                    "    data skip 2 using 1:{} with lines title \"{name}\"",
                    ok(k + 2)
                )
            })
            .collect();
        s.push_str(&lines.join(", \\\n"));
        s.push('\n');
    } else {
        s.push_str(&format!(
            "set view map\nset xlabel \"{}\"\nset ylabel \"{}\"\n",
            result.axes[1].param.name(),
            result.axes[0].param.name()
        ));
        for (k, name) in result.columns.iter().enumerate() {
            s.push_str(&format!(
                "set output \"{stem}_{name}.png\"\nset title \"{name}\"\n\
                 plot data skip 2 using 2:1:{} with image notitle\n",
                ok(k + 3)
            ));
        }
    }
    s
}
