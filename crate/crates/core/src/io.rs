//! CSV import/export of fields.
//!
//! Export layout: first row is the spatial knots behind an empty lead
//! cell, each following row is one time sample (time knot first, then
//! the M values). Floats print in shortest round-trip form, so an
//! export/ingest cycle is lossless.
//!
//! Ingestion is deliberately permissive about labels: a header whose
//! first cell is not numeric marks labeled rows (time label first), a
//! fully numeric header means bare value rows. Non-numeric time labels
//! map to month fractions n/12 when they look like month names, else to
//! unit steps. Columns arriving out of coordinate order are sorted,
//! with the values permuted consistently; so are rows with numeric
//! labels.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Error, Field, Grid1D, Result};

const MONTHS: [&str; 12] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
];

/// Write a field in the canonical layout.
pub fn write_field_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let grid = field.grid();
    let header: Vec<String> =
        std::iter::once(String::new()).chain(grid.x().iter().map(|x| format!("{x}"))).collect();
    writeln!(w, "{}", header.join(","))?;
    for (n, &t) in grid.t().iter().enumerate() {
        let mut cells = Vec::with_capacity(grid.m() + 1);
        cells.push(format!("{t}"));
        cells.extend(field.time_slice(n).iter().map(|v| format!("{v}")));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Write a field to a file path.
pub fn save_field_csv(field: &Field, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field_csv(field, std::io::BufWriter::new(file))
}

/// Read a field from a file path.
pub fn load_field_csv(path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_field_csv(std::io::BufReader::new(file))
}

/// Parse a field from CSV text. See the module docs for the accepted
/// layouts.
pub fn read_field_csv<R: BufRead>(reader: R) -> Result<Field> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push(line);
        }
    }
    if lines.is_empty() {
        return Err(Error::Csv("empty input".into()));
    }
    let header: Vec<&str> = lines[0].split(',').map(str::trim).collect();
    let labeled = parse_f64(header[0]).is_none();
    let coord_cells: Vec<&str> = if labeled { header[1..].to_vec() } else { header.clone() };
    let mut x = Vec::with_capacity(coord_cells.len());
    for (c, cell) in coord_cells.iter().enumerate() {
        match parse_f64(cell) {
            Some(v) => x.push(v),
            None => {
                return Err(Error::Csv(format!(
                    "header column {}: cannot parse coordinate '{cell}'",
                    c + if labeled { 2 } else { 1 }
                )))
            }
        }
    }
    let m = x.len();
    if m < 4 {
        return Err(Error::Csv(format!("need at least 4 spatial columns, got {m}")));
    }
    let n_rows = lines.len() - 1;
    if n_rows < 4 {
        return Err(Error::Csv(format!("need at least 4 time rows, got {n_rows}")));
    }

    let expected = if labeled { m + 1 } else { m };
    let mut labels: Vec<String> = Vec::with_capacity(n_rows);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_rows);
    for (r, line) in lines[1..].iter().enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != expected {
            return Err(Error::Csv(format!(
                "row {} has {} cells, expected {expected}",
                r + 2,
                cells.len()
            )));
        }
        let (label, value_cells) = if labeled {
            (cells[0].to_string(), &cells[1..])
        } else {
            (String::new(), &cells[..])
        };
        let mut row = Vec::with_capacity(m);
        for (c, cell) in value_cells.iter().enumerate() {
            match parse_f64(cell) {
                Some(v) => row.push(v),
                None => {
                    return Err(Error::Csv(format!(
                        "row {} column {}: cannot parse value '{cell}'",
                        r + 2,
                        c + if labeled { 2 } else { 1 }
                    )))
                }
            }
        }
        labels.push(label);
        rows.push(row);
    }

    let t = time_knots(&labels, labeled)?;

    // Sort columns by coordinate and rows by time, permuting values.
    let mut col_order: Vec<usize> = (0..m).collect();
    col_order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut row_order: Vec<usize> = (0..n_rows).collect();
    row_order.sort_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap());

    let x_sorted: Vec<f64> = col_order.iter().map(|&c| x[c]).collect();
    let t_sorted: Vec<f64> = row_order.iter().map(|&r| t[r]).collect();
    let grid = Grid1D::new(x_sorted, t_sorted)?;
    let mut values = Vec::with_capacity(m * n_rows);
    for &r in &row_order {
        for &c in &col_order {
            values.push(rows[r][c]);
        }
    }
    Field::new(grid, values)
}

fn parse_f64(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn time_knots(labels: &[String], labeled: bool) -> Result<Vec<f64>> {
    if !labeled {
        return Ok((0..labels.len()).map(|n| n as f64).collect());
    }
    let numeric: Option<Vec<f64>> = labels.iter().map(|l| parse_f64(l)).collect();
    if let Some(t) = numeric {
        return Ok(t);
    }
    let monthly = labels
        .iter()
        .all(|l| MONTHS.iter().any(|m| l.trim().to_ascii_lowercase().starts_with(m)));
    if monthly {
        // Monthly samples in year units.
        Ok((0..labels.len()).map(|n| n as f64 / 12.0).collect())
    } else {
        Ok((0..labels.len()).map(|n| n as f64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufReader;

    fn roundtrip(field: &Field) -> Field {
        let mut buf = Vec::new();
        write_field_csv(field, &mut buf).unwrap();
        read_field_csv(BufReader::new(buf.as_slice())).unwrap()
    }

    #[test]
    fn export_ingest_is_lossless() {
        let grid = Grid1D::uniform(7, 5, 1.0, 0.1).unwrap();
        let field = Field::from_fn(grid, |x, t| (4.0 * x - 8.0 * t).sin() / 3.0).unwrap();
        let back = roundtrip(&field);
        assert_eq!(back.grid(), field.grid());
        assert_eq!(back.values(), field.values());
    }

    #[test]
    fn out_of_order_header_is_sorted_with_values() {
        let csv = "\
,2.0,0.5,1.0,3.0
0.1,20,5,10,30
0.2,21,6,11,31
0.3,22,7,12,32
0.4,23,8,13,33
";
        let field = read_field_csv(BufReader::new(csv.as_bytes())).unwrap();
        assert_eq!(field.grid().x(), &[0.5, 1.0, 2.0, 3.0]);
        assert_eq!(field.time_slice(0), &[5.0, 10.0, 20.0, 30.0]);
        assert_eq!(field.time_slice(3), &[8.0, 13.0, 23.0, 33.0]);
    }

    #[test]
    fn month_labels_map_to_year_fractions() {
        let mut csv = String::from("longitude,-177.5,-172.5,-167.5,-162.5\n");
        for month in ["Jan 2017", "Feb 2017", "Mar 2017", "Apr 2017", "May 2017"] {
            csv.push_str(&format!("{month},1,2,3,4\n"));
        }
        let field = read_field_csv(BufReader::new(csv.as_bytes())).unwrap();
        assert_eq!(field.grid().n(), 5);
        assert!((field.grid().t()[1] - 1.0 / 12.0).abs() < 1e-15);
        assert!((field.grid().t()[4] - 4.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn ragged_row_is_named() {
        let csv = "\
,0.1,0.2,0.3,0.4
0.1,1,2,3,4
0.2,1,2,3
0.3,1,2,3,4
0.4,1,2,3,4
";
        match read_field_csv(BufReader::new(csv.as_bytes())) {
            Err(Error::Csv(msg)) => assert!(msg.contains("row 3"), "{msg}"),
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn bad_cell_is_named() {
        let csv = "\
,0.1,0.2,0.3,0.4
0.1,1,2,3,4
0.2,1,x,3,4
0.3,1,2,3,4
0.4,1,2,3,4
";
        match read_field_csv(BufReader::new(csv.as_bytes())) {
            Err(Error::Csv(msg)) => {
                assert!(msg.contains("row 3"), "{msg}");
                assert!(msg.contains("column 3"), "{msg}");
            }
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn empty_and_tiny_inputs_are_rejected() {
        assert!(matches!(
            read_field_csv(BufReader::new("".as_bytes())),
            Err(Error::Csv(_))
        ));
        let csv = ",0.1,0.2,0.3\n0.1,1,2,3\n0.2,1,2,3\n0.3,1,2,3\n0.4,1,2,3\n";
        assert!(read_field_csv(BufReader::new(csv.as_bytes())).is_err());
    }

    #[test]
    fn calipso_shaped_file_ingests() {
        let mut csv = String::new();
        let coords: Vec<String> = (0..72).map(|i| format!("{}", -177.5 + 5.0 * i as f64)).collect();
        csv.push_str(&format!(",{}\n", coords.join(",")));
        let months = [
            "Jan 2017", "Feb 2017", "Mar 2017", "Apr 2017", "May 2017", "Jun 2017", "Jul 2017",
            "Aug 2017", "Sep 2017", "Oct 2017", "Nov 2017", "Dec 2017",
        ];
        for (n, month) in months.iter().enumerate() {
            let row: Vec<String> =
                (0..72).map(|i| format!("{}", -46.0 + (i as f64) * 0.01 + n as f64)).collect();
            csv.push_str(&format!("{month},{}\n", row.join(",")));
        }
        let field = read_field_csv(BufReader::new(csv.as_bytes())).unwrap();
        assert_eq!(field.grid().m(), 72);
        assert_eq!(field.grid().n(), 12);
    }
}
