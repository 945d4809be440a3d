use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Instance, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// `n`, `W H`, then `n` lines of `w h`.
    #[default]
    Native,
    /// Classic benchmark layout: free-form header lines, bin line, item lines,
    /// with trailing comment text allowed on every line.
    TwoBp,
}

/// Order of the two numbers on bin and item lines of benchmark files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DimsOrder {
    #[default]
    WidthHeight,
    HeightWidth,
}

impl DimsOrder {
    fn apply(self, a: u32, b: u32) -> (u32, u32) {
        match self {
            DimsOrder::WidthHeight => (a, b),
            DimsOrder::HeightWidth => (b, a),
        }
    }
}

impl std::str::FromStr for DimsOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wh" => Ok(DimsOrder::WidthHeight),
            "hw" => Ok(DimsOrder::HeightWidth),
            other => Err(format!("unknown dims order '{other}' (expected wh or hw)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

pub fn parse_instance(text: &str, format: Format, order: DimsOrder) -> Result<Instance, ParseError> {
    match format {
        Format::Native => parse_native(text),
        Format::TwoBp => {
            let mut entries = parse_twobp_collection(text, order)?;
            if entries.len() != 1 {
                return Err(ParseError::new(
                    1,
                    format!("expected one instance, found {}", entries.len()),
                ));
            }
            Ok(entries.remove(0).instance)
        }
    }
}

fn parse_native(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, first) = lines.next().ok_or_else(|| ParseError::new(1, "empty input"))?;
    let n = match ints(first, line_no)?.as_slice() {
        [n] => *n as usize,
        _ => return Err(ParseError::new(line_no, "expected item count")),
    };
    let (bin_line, second) = lines.next().ok_or_else(|| ParseError::new(line_no + 1, "missing bin line"))?;
    let (width, height) = pair(second, bin_line)?;

    let mut dims = Vec::with_capacity(n);
    let mut item_lines = Vec::with_capacity(n);
    for k in 0..n {
        let (no, l) = lines
            .next()
            .ok_or_else(|| ParseError::new(bin_line + k + 1, format!("missing item {k}")))?;
        dims.push(pair(l, no)?);
        item_lines.push(no);
    }
    if let Some((no, _)) = lines.next() {
        return Err(ParseError::new(no, "unexpected trailing line"));
    }
    build(width, height, &dims, bin_line, &item_lines)
}

fn ints(line: &str, line_no: usize) -> Result<Vec<i64>, ParseError> {
    line.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| ParseError::new(line_no, format!("malformed token '{t}'"))))
        .collect()
}

fn pair(line: &str, line_no: usize) -> Result<(u32, u32), ParseError> {
    match ints(line, line_no)?.as_slice() {
        [a, b] => Ok((dim(*a, line_no)?, dim(*b, line_no)?)),
        _ => Err(ParseError::new(line_no, "expected two integers")),
    }
}

fn dim(v: i64, line_no: usize) -> Result<u32, ParseError> {
    if v <= 0 {
        return Err(ParseError::new(line_no, "non-positive dimension"));
    }
    u32::try_from(v).map_err(|_| ParseError::new(line_no, "dimension too large"))
}

fn build(
    width: u32,
    height: u32,
    dims: &[(u32, u32)],
    bin_line: usize,
    item_lines: &[usize],
) -> Result<Instance, ParseError> {
    Instance::new(width, height, dims).map_err(|e| {
        let line = match e {
            InstanceError::EmptyBin => bin_line,
            InstanceError::NonPositive(i) | InstanceError::TooWide(i) | InstanceError::TooTall(i) => {
                item_lines[i]
            }
        };
        ParseError::new(line, e.to_string())
    })
}

/// One instance read from a benchmark file, with whatever header numbers preceded it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBpEntry {
    /// Header integers before the item count / bin line (class, instance number, ...).
    pub header: Vec<i64>,
    pub instance: Instance,
}

impl TwoBpEntry {
    /// Problem class, when the header carries one ahead of the item count.
    pub fn class(&self) -> Option<u32> {
        let n = self.instance.len() as i64;
        let pos = self.header.iter().position(|&v| v == n)?;
        if pos == 0 {
            None
        } else {
            u32::try_from(self.header[0]).ok()
        }
    }
}

struct NumLine {
    no: usize,
    vals: Vec<i64>,
}

/// Leading integer tokens of each line; lines without any are comments.
fn numeric_lines(text: &str) -> Vec<NumLine> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let vals: Vec<i64> = l.split_whitespace().map_while(|t| t.parse::<i64>().ok()).collect();
            (!vals.is_empty()).then_some(NumLine { no: i + 1, vals })
        })
        .collect()
}

/// Reads every instance in a benchmark file. Single-instance files and the
/// multi-instance class files are both accepted; record boundaries are found by
/// matching a header item count against the number of item lines that follow.
pub fn parse_twobp_collection(text: &str, order: DimsOrder) -> Result<Vec<TwoBpEntry>, ParseError> {
    let lines = numeric_lines(text);
    if lines.is_empty() {
        return Err(ParseError::new(1, "no numeric content"));
    }
    let mut memo = HashMap::new();
    let records = split_records(&lines, 0, &mut memo)
        .ok_or_else(|| ParseError::new(lines[0].no, "cannot locate item count and bin line"))?;

    records
        .into_iter()
        .map(|(start, bin_at, n)| {
            let header: Vec<i64> = lines[start..bin_at].iter().flat_map(|l| l.vals.iter().copied()).collect();
            let bin = &lines[bin_at];
            let (width, height) = order.apply(dim(bin.vals[0], bin.no)?, dim(bin.vals[1], bin.no)?);
            let mut dims = Vec::with_capacity(n);
            let mut item_lines = Vec::with_capacity(n);
            for l in &lines[bin_at + 1..bin_at + 1 + n] {
                dims.push(order.apply(dim(l.vals[0], l.no)?, dim(l.vals[1], l.no)?));
                item_lines.push(l.no);
            }
            let instance = build(width, height, &dims, bin.no, &item_lines)?;
            Ok(TwoBpEntry { header, instance })
        })
        .collect()
}

/// Returns `(record start, bin line index, n)` triples covering `lines[start..]` exactly.
fn split_records(
    lines: &[NumLine],
    start: usize,
    memo: &mut HashMap<usize, Option<Vec<(usize, usize, usize)>>>,
) -> Option<Vec<(usize, usize, usize)>> {
    if start == lines.len() {
        return Some(Vec::new());
    }
    if let Some(hit) = memo.get(&start) {
        return hit.clone();
    }
    let mut found = None;
    // At most three header lines precede the bin line.
    'outer: for bin_at in start + 1..(start + 4).min(lines.len()) {
        if lines[bin_at].vals.len() < 2 {
            continue;
        }
        for h in &lines[start..bin_at] {
            if h.vals.len() != 1 || h.vals[0] <= 0 {
                continue;
            }
            let n = h.vals[0] as usize;
            let end = bin_at + 1 + n;
            if end > lines.len() || lines[bin_at + 1..end].iter().any(|l| l.vals.len() < 2) {
                continue;
            }
            if let Some(mut rest) = split_records(lines, end, memo) {
                rest.insert(0, (start, bin_at, n));
                found = Some(rest);
                break 'outer;
            }
        }
    }
    memo.insert(start, found.clone());
    found
}

pub fn serialize_instance(inst: &Instance, format: Format, order: DimsOrder) -> String {
    let mut out = String::new();
    match format {
        Format::Native => {
            let _ = writeln!(out, "{}", inst.len());
            let _ = writeln!(out, "{} {}", inst.width(), inst.height());
            for it in inst.items() {
                let _ = writeln!(out, "{} {}", it.width, it.height);
            }
        }
        Format::TwoBp => {
            let (a, b) = order.apply(inst.width(), inst.height());
            let (bin_label, item_label) = match order {
                DimsOrder::WidthHeight => ("WBIN,HBIN", "W(I),H(I),I=1,...,N"),
                DimsOrder::HeightWidth => ("HBIN,WBIN", "H(I),W(I),I=1,...,N"),
            };
            let _ = writeln!(out, "{:>5}    N. OF ITEMS", inst.len());
            let _ = writeln!(out, "{a:>5}{b:>5}    {bin_label}");
            for (k, it) in inst.items().iter().enumerate() {
                let (a, b) = order.apply(it.width, it.height);
                if k == 0 {
                    let _ = writeln!(out, "{a:>5}{b:>5}    {item_label}");
                } else {
                    let _ = writeln!(out, "{a:>5}{b:>5}");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_examples() {
        let inst = parse_instance("3\n10 10\n6 6\n6 6\n6 6\n", Format::Native, DimsOrder::default()).unwrap();
        assert_eq!((inst.len(), inst.width(), inst.height()), (3, 10, 10));
        assert!(inst.items().iter().all(|it| it.width == 6 && it.height == 6));

        let one = parse_instance("1\n7 5\n7 5\n", Format::Native, DimsOrder::default()).unwrap();
        assert_eq!(one.dims(), vec![(7, 5)]);
    }

    #[test]
    fn native_crlf_and_errors() {
        let inst = parse_instance("2\r\n4 4\r\n1 2\r\n3 4\r\n", Format::Native, DimsOrder::default()).unwrap();
        assert_eq!(inst.dims(), vec![(1, 2), (3, 4)]);

        let err = parse_instance("2\n10 10\n11 3\n2 2\n", Format::Native, DimsOrder::default()).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("item 0 exceeds bin width"), "{err}");

        let err = parse_instance("1\n10 10\n0 3\n", Format::Native, DimsOrder::default()).unwrap_err();
        assert_eq!(err.to_string(), "line 3: non-positive dimension");

        let err = parse_instance("2\n10 10\n1 x\n", Format::Native, DimsOrder::default()).unwrap_err();
        assert_eq!(err.line, 3);

        let err = parse_instance("2\n10 10\n1 1\n", Format::Native, DimsOrder::default()).unwrap_err();
        assert!(err.message.contains("missing item 1"));
    }

    const CLASSIC: &str = "    1    PROBLEM CLASS
    3    N. OF ITEMS
    1    1     RELATIVE AND ABSOLUTE N. OF INSTANCE
   10   20    HBIN,WBIN
    3    8    H(I),W(I),I=1,...,N
    4    2
    6    6

    1    PROBLEM CLASS
    2    N. OF ITEMS
    2    2     RELATIVE AND ABSOLUTE N. OF INSTANCE
   10   20    HBIN,WBIN
    1    1    H(I),W(I),I=1,...,N
    2    3
";

    #[test]
    fn twobp_class_file_with_two_records() {
        let entries = parse_twobp_collection(CLASSIC, DimsOrder::HeightWidth).unwrap();
        assert_eq!(entries.len(), 2);
        let first = &entries[0].instance;
        assert_eq!((first.width(), first.height()), (20, 10));
        assert_eq!(first.dims(), vec![(8, 3), (2, 4), (6, 6)]);
        assert_eq!(entries[0].class(), Some(1));
        assert_eq!(entries[1].instance.dims(), vec![(1, 1), (3, 2)]);
    }

    #[test]
    fn twobp_short_layouts() {
        let plain = "3\n10 10\n6 6\n6 6\n6 6\n";
        let inst = parse_instance(plain, Format::TwoBp, DimsOrder::WidthHeight).unwrap();
        assert_eq!(inst.len(), 3);

        let with_ids = "2\n3 7\n10 8\n10 5\n2 8\n";
        let inst = parse_instance(with_ids, Format::TwoBp, DimsOrder::WidthHeight).unwrap();
        assert_eq!((inst.width(), inst.height()), (10, 8));
        assert_eq!(inst.dims(), vec![(10, 5), (2, 8)]);
        let swapped = parse_instance(with_ids, Format::TwoBp, DimsOrder::HeightWidth).unwrap();
        assert_eq!(swapped.dims(), vec![(5, 10), (8, 2)]);
    }

    #[test]
    fn twobp_reports_item_line() {
        let err = parse_instance("2\n10 10\n6 6\n6 12\n", Format::TwoBp, DimsOrder::WidthHeight).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("exceeds bin height"));
    }

    #[test]
    fn dims_order_from_str() {
        assert_eq!("hw".parse::<DimsOrder>(), Ok(DimsOrder::HeightWidth));
        assert!("xy".parse::<DimsOrder>().is_err());
    }
}
