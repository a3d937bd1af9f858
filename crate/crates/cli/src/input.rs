//! Tab-separated feature matrices: one feature per row, one sample per column.

use std::fmt;
use std::path::Path;

use rareperm::ObservedData;

/// One row of the input, ready to test.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: String,
    pub data: ObservedData,
}

/// A malformed input file. Rows and columns are 1-based positions in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub row: usize,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column {
            Some(c) => write!(f, "row {}, column {}: {}", self.row, c, self.message),
            None => write!(f, "row {}: {}", self.row, self.message),
        }
    }
}

#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Parse(ParseError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "{e}"),
            LoadError::Parse(e) => write!(f, "{e}"),
        }
    }
}

pub fn load_matrix(path: &Path, group_sizes: (usize, usize)) -> Result<Vec<Feature>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    parse_matrix(&text, group_sizes).map_err(LoadError::Parse)
}

/// Parses matrix text. `group_sizes = (k, m)` assigns the first `k` value
/// columns to group 1 and the next `m` to group 2; `m = 0` means one-group
/// data. A leading id column is recognized by its extra cell, and a first
/// line whose value cells are not all numbers is taken as a header.
pub fn parse_matrix(text: &str, group_sizes: (usize, usize)) -> Result<Vec<Feature>, ParseError> {
    let (k, m) = group_sizes;
    let width = k + m;
    let err = |row: usize, column: Option<usize>, message: String| ParseError { row, column, message };
    if k == 0 {
        return Err(err(0, None, "group 1 must have at least one column".into()));
    }

    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(row, line)| (row, line.split('\t').collect()))
        .collect();

    let has_header = lines.first().is_some_and(|(_, cells)| {
        let values = if cells.len() > width { &cells[1..] } else { &cells[..] };
        values.iter().any(|c| c.trim().parse::<f64>().is_err())
    });
    let body = &lines[usize::from(has_header)..];
    let Some((_, first)) = body.first() else {
        return Err(err(lines.first().map_or(1, |l| l.0), None, "no data rows".into()));
    };
    let with_id = match first.len() {
        n if n == width => false,
        n if n == width + 1 => true,
        n => {
            return Err(err(
                body[0].0,
                None,
                format!("{n} columns, but group sizes {k},{m} need {width} (or {} with an id column)", width + 1),
            ))
        }
    };

    let mut features = Vec::with_capacity(body.len());
    for (index, (row, cells)) in body.iter().enumerate() {
        if cells.len() != first.len() {
            return Err(err(*row, None, format!("{} columns, expected {}", cells.len(), first.len())));
        }
        let offset = usize::from(with_id);
        let mut values = Vec::with_capacity(width);
        for (j, cell) in cells[offset..].iter().enumerate() {
            let column = j + offset + 1;
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| err(*row, Some(column), format!("{cell:?} is not a number")))?;
            if !v.is_finite() {
                return Err(err(*row, Some(column), format!("{cell:?} is not a finite number")));
            }
            values.push(v);
        }
        let id = if with_id { cells[0].trim().to_string() } else { format!("row{}", index + 1) };
        let data = if m == 0 { ObservedData::one_group(values) } else { ObservedData::two_group(values, k, m) }
            .map_err(|e| err(*row, None, e.to_string()))?;
        features.push(Feature { id, data });
    }
    Ok(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rareperm::Design;

    #[test]
    fn plain_rows() {
        let f = parse_matrix("1\t2\t3\t4\n5\t6\t7\t8\n", (2, 2)).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].id, "row2");
        assert_eq!(f[0].data.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f[0].data.design(), Design::TwoGroup { group1: 2, group2: 2 });
    }

    #[test]
    fn header_and_ids() {
        let f = parse_matrix("id\ts1\ts2\ts3\ts4\ng1\t1\t2\t3\t4\ng2\t5\t6\t7\t8\n", (2, 2)).unwrap();
        assert_eq!(f.iter().map(|f| f.id.as_str()).collect::<Vec<_>>(), ["g1", "g2"]);
        // Header without a name for the id column.
        let f = parse_matrix("s1\ts2\ts3\ng1\t1\t2\t3\n", (3, 0)).unwrap();
        assert_eq!(f[0].id, "g1");
        assert_eq!(f[0].data.design(), Design::OneGroup);
    }

    #[test]
    fn rejections_name_the_cell() {
        let e = parse_matrix("1\t2\t3\t4\n5\tNaN\t7\t8\n", (2, 2)).unwrap_err();
        assert_eq!((e.row, e.column), (2, Some(2)));
        let e = parse_matrix("1\t2\t3\t4\n5\t6\t7\n", (2, 2)).unwrap_err();
        assert_eq!((e.row, e.column), (2, None));
        let e = parse_matrix("a\t1\t2\nb\t3\tx\n", (1, 1)).unwrap_err();
        assert_eq!((e.row, e.column), (2, Some(3)));
        assert!(parse_matrix("1\t2\t3\n", (2, 2)).is_err());
        assert!(parse_matrix("", (2, 2)).is_err());
    }

    #[test]
    fn crlf_and_blank_lines() {
        let f = parse_matrix("1\t2\r\n\r\n3\t4\r\n", (1, 1)).unwrap();
        assert_eq!(f.len(), 2);
    }
}
