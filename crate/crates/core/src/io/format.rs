use crate::error::{Error, Result};
use crate::knn::SpdDataset;
use crate::linalg::{Matrix, SpdMatrix};

/// `(1-based line number, content)` for non-blank, non-comment lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_block<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, last_line: usize) -> Result<Matrix> {
    let (hline, header) = lines.next().ok_or_else(|| parse_err(last_line.max(1), "missing header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |t: &str| t.parse::<usize>().ok().filter(|v| *v > 0);
    let (rows, cols) = match dims.as_slice() {
        [r, c] => match (parse_dim(r), parse_dim(c)) {
            (Some(r), Some(c)) => (r, c),
            _ => return Err(parse_err(hline, format!("malformed header {header:?}"))),
        },
        _ => return Err(parse_err(hline, format!("malformed header {header:?}"))),
    };
    let mut entries = Vec::with_capacity(rows * cols);
    let mut at = hline;
    for r in 0..rows {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(at + 1, format!("expected {rows} rows, found {r}")))?;
        at = lno;
        let before = entries.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| parse_err(lno, format!("non-numeric token {tok:?}")))?;
            entries.push(v);
        }
        let got = entries.len() - before;
        if got != cols {
            return Err(parse_err(lno, format!("expected {cols} entries, found {got}")));
        }
    }
    Matrix::from_row_slice(rows, cols, &entries).map_err(|e| parse_err(at, e.to_string()))
}

/// Parses one matrix; trailing content is an error.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let total = text.lines().count();
    let mut lines = content_lines(text);
    let m = parse_block(&mut lines, total + 1)?;
    if let Some((lno, _)) = lines.next() {
        return Err(parse_err(lno, "unexpected content after matrix"));
    }
    Ok(m)
}

/// Writes 17 significant digits per entry, enough for an exact round trip.
pub fn serialize_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:.16e}", m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_id_comment(line: &str) -> Option<&str> {
    line.strip_prefix('#')?.trim().strip_prefix("id:").map(str::trim)
}

/// Blocks separated by `---`; a `# id: N` comment inside a block sets its id,
/// otherwise ids are the block index.
pub fn parse_dataset(text: &str) -> Result<SpdDataset> {
    let mut blocks: Vec<(usize, Vec<(usize, &str)>, Option<u64>)> = vec![(1, Vec::new(), None)];
    for (i, raw) in text.lines().enumerate() {
        let lno = i + 1;
        let line = raw.trim();
        if line == "---" {
            blocks.push((lno + 1, Vec::new(), None));
            continue;
        }
        let block = blocks.last_mut().unwrap();
        if let Some(id) = parse_id_comment(line) {
            let id = id.parse::<u64>().map_err(|_| parse_err(lno, format!("bad id {id:?}")))?;
            if block.2.replace(id).is_some() {
                return Err(parse_err(lno, "duplicate id comment in block"));
            }
        } else if !line.is_empty() && !line.starts_with('#') {
            block.1.push((lno, line));
        }
    }
    // A trailing separator or a file with no matrices leaves an empty block.
    let blocks: Vec<_> = blocks.into_iter().filter(|b| !b.1.is_empty() || b.2.is_some()).collect();

    let mut items = Vec::with_capacity(blocks.len());
    let mut ids = Vec::with_capacity(blocks.len());
    let mut dim = None;
    for (k, (start, lines, id)) in blocks.into_iter().enumerate() {
        let mut it = lines.into_iter();
        let m = parse_block(&mut it, start)?;
        if let Some((lno, _)) = it.next() {
            return Err(parse_err(lno, "unexpected content after matrix"));
        }
        if !m.is_square() {
            return Err(parse_err(start, format!("block {k} is {}x{}, expected square", m.rows(), m.cols())));
        }
        if *dim.get_or_insert(m.rows()) != m.rows() {
            return Err(parse_err(start, format!("block {k} has dimension {}, expected {}", m.rows(), dim.unwrap())));
        }
        items.push(SpdMatrix::new(m)?);
        ids.push(id.unwrap_or(k as u64));
    }
    SpdDataset::new(items, ids)
}

pub fn serialize_dataset(ds: &SpdDataset) -> String {
    let blocks: Vec<String> = ds
        .items()
        .iter()
        .zip(ds.ids())
        .map(|(m, id)| format!("# id: {id}\n{}", serialize_matrix(m.as_matrix())))
        .collect();
    blocks.join("---\n")
}
