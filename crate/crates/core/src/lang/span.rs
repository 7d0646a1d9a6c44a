use serde::{Deserialize, Serialize};

/// A half-open byte range into the session source, with 1-based line and
/// column positions for both ends. Columns count characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start_byte: usize,
    pub end_byte: usize,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end_byte - self.start_byte
    }

    pub fn is_empty(&self) -> bool {
        self.start_byte == self.end_byte
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start_byte <= other.start_byte && other.end_byte <= self.end_byte
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start_byte < other.end_byte && other.start_byte < self.end_byte
            || (self.is_empty() || other.is_empty())
                && self.start_byte <= other.end_byte
                && other.start_byte <= self.end_byte
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &Span) -> Span {
        let (start, end) = (self.min_start(other), self.max_end(other));
        Span {
            start_byte: start.0,
            start_line: start.1,
            start_col: start.2,
            end_byte: end.0,
            end_line: end.1,
            end_col: end.2,
        }
    }

    fn min_start(&self, other: &Span) -> (usize, usize, usize) {
        if self.start_byte <= other.start_byte {
            (self.start_byte, self.start_line, self.start_col)
        } else {
            (other.start_byte, other.start_line, other.start_col)
        }
    }

    fn max_end(&self, other: &Span) -> (usize, usize, usize) {
        if self.end_byte >= other.end_byte {
            (self.end_byte, self.end_line, self.end_col)
        } else {
            (other.end_byte, other.end_line, other.end_col)
        }
    }

    pub fn text<'s>(&self, source: &'s str) -> &'s str {
        source.get(self.start_byte..self.end_byte).unwrap_or("")
    }
}

/// Maps byte offsets of one source text to line/column positions.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
    source: String,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(source.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex {
            line_starts,
            source: source.to_string(),
        }
    }

    /// 1-based (line, column) of a byte offset.
    pub fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.source.len());
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let col = self.source[start..offset].chars().count() + 1;
        (line + 1, col)
    }

    pub fn span(&self, start: usize, end: usize) -> Span {
        let (start_line, start_col) = self.position(start);
        let (end_line, end_col) = self.position(end);
        Span {
            start_byte: start,
            end_byte: end,
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn line_count(&self) -> usize {
        self.line_starts.len()
    }

    /// Text of a 1-based line, without its terminating newline.
    pub fn line_text(&self, line: usize) -> &str {
        let start = self.line_starts[line - 1];
        let end = self
            .line_starts
            .get(line)
            .map(|e| e - 1)
            .unwrap_or(self.source.len());
        self.source[start..end].trim_end_matches('\r')
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let idx = LineIndex::new("ab\ncd\n");
        assert_eq!(idx.position(0), (1, 1));
        assert_eq!(idx.position(1), (1, 2));
        assert_eq!(idx.position(3), (2, 1));
        assert_eq!(idx.position(6), (3, 1));
        let s = idx.span(1, 4);
        assert_eq!((s.start_line, s.start_col, s.end_line, s.end_col), (1, 2, 2, 2));
        assert_eq!(idx.line_text(2), "cd");
    }

    #[test]
    fn columns_count_characters() {
        let idx = LineIndex::new("\"é\" x");
        assert_eq!(idx.position(5), (1, 5));
    }

    #[test]
    fn join_and_overlap() {
        let idx = LineIndex::new("0123456789");
        let a = idx.span(1, 3);
        let b = idx.span(5, 8);
        let j = a.to(&b);
        assert_eq!((j.start_byte, j.end_byte), (1, 8));
        assert!(j.contains(&a) && j.contains(&b));
        assert!(!a.overlaps(&b));
        assert!(j.overlaps(&b));
    }
}
