//! CSV layouts.

use tetrafold_core::classify::SValueGroup;
use tetrafold_core::embed::{CellResult, VolumeTable};

pub fn format_cell(cell: &CellResult) -> String {
    match cell {
        CellResult::Converged { relative_volume, .. } => format!("{relative_volume:.6}"),
        CellResult::NotConverged { residual } => format!("NC({residual:.1e})"),
    }
}

/// Upper-triangular grid: header `a\b,1,2,...`, one row per `a`, blank below the diagonal.
pub fn table_csv(table: &VolumeTable) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["a\\b".to_string()];
    header.extend((1..=table.b_max).map(|b| b.to_string()));
    w.write_record(&header)?;
    for a in 1..=table.a_max {
        let mut row = vec![a.to_string()];
        for b in 1..=table.b_max {
            row.push(table.get(a, b).map(format_cell).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn format_members(g: &SValueGroup) -> String {
    g.members.iter().map(|(a, b)| format!("({a},{b})")).collect::<Vec<_>>().join(" ")
}

pub fn common_csv(groups: &[SValueGroup]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "s_over_4", "members"])?;
    for g in groups {
        w.write_record([g.s.to_string(), g.quarter().to_string(), format_members(g)])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tetrafold_core::embed::TableCell;

    #[test]
    fn table_layout() {
        let table = VolumeTable {
            a_max: 2,
            b_max: 2,
            cells: vec![
                TableCell {
                    a: 1,
                    b: 1,
                    result: CellResult::Converged {
                        relative_volume: 0.9622504,
                        volume: 0.0,
                        residual: 0.0,
                        all_popped: true,
                    },
                },
                TableCell { a: 1, b: 2, result: CellResult::NotConverged { residual: 2.5e-3 } },
                TableCell {
                    a: 2,
                    b: 2,
                    result: CellResult::Converged {
                        relative_volume: 1.29799,
                        volume: 0.0,
                        residual: 0.0,
                        all_popped: true,
                    },
                },
            ],
        };
        assert_eq!(table_csv(&table).unwrap(), "a\\b,1,2\n1,0.962250,NC(2.5e-3)\n2,,1.297990\n");
    }

    #[test]
    fn common_layout() {
        let groups = vec![SValueGroup { s: 364, members: vec![(1, 9), (5, 6)] }];
        assert_eq!(common_csv(&groups).unwrap(), "s,s_over_4,members\n364,91,\"(1,9) (5,6)\"\n");
    }
}
