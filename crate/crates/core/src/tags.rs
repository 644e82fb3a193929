//! BIO span handling.

/// A labeled span `[start, end)` within a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub kind: String,
}

/// Decode BIO tags into maximal spans. An `I-X` that does not continue an
/// open `X` span starts a new one.
pub fn spans<S: AsRef<str>>(tags: &[S]) -> Vec<Span> {
    let mut out: Vec<Span> = Vec::new();
    let mut open: Option<Span> = None;
    for (i, tag) in tags.iter().enumerate() {
        let tag = tag.as_ref();
        let (prefix, kind) = match tag.split_once('-') {
            Some((p @ ("B" | "I"), k)) => (p, k),
            _ => {
                out.extend(open.take());
                continue;
            }
        };
        match (&mut open, prefix) {
            (Some(span), "I") if span.kind == kind => span.end = i + 1,
            _ => {
                out.extend(open.take());
                open = Some(Span {
                    start: i,
                    end: i + 1,
                    kind: kind.to_string(),
                });
            }
        }
    }
    out.extend(open);
    out
}

/// Lowercase phrase covered by a span, words joined by single spaces.
pub fn phrase<S: AsRef<str>>(words: &[S], span: &Span) -> String {
    words[span.start..span.end]
        .iter()
        .map(|w| w.as_ref().to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Write `B-kind I-kind …` over `[start, end)`. A following `I-kind` is
/// turned into `B-kind` so the span after it keeps its own boundaries.
pub fn mark(tags: &mut [String], start: usize, end: usize, kind: &str) {
    for (i, t) in tags[start..end].iter_mut().enumerate() {
        *t = if i == 0 { format!("B-{kind}") } else { format!("I-{kind}") };
    }
    if let Some(next) = tags.get_mut(end) {
        if next.strip_prefix("I-") == Some(kind) {
            *next = format!("B-{kind}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(start: usize, end: usize) -> Span {
        Span {
            start,
            end,
            kind: "ASP".into(),
        }
    }

    #[test]
    fn decodes_spans() {
        assert_eq!(spans(&["O", "B-ASP", "O"]), vec![sp(1, 2)]);
        assert_eq!(spans(&["B-ASP", "I-ASP"]), vec![sp(0, 2)]);
        assert_eq!(spans(&["B-ASP", "B-ASP", "I-ASP", "O", "B-ASP"]), vec![sp(0, 1), sp(1, 3), sp(4, 5)]);
    }

    #[test]
    fn orphan_inside_starts_span() {
        assert_eq!(spans(&["O", "I-ASP", "O"]), vec![sp(1, 2)]);
        assert_eq!(spans(&["I-ASP", "I-ASP"]), vec![sp(0, 2)]);
    }

    #[test]
    fn kind_change_splits() {
        let s = spans(&["B-ASP", "I-OPN"]);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].kind, "OPN");
    }

    #[test]
    fn marking_keeps_following_span_separate() {
        let mut t: Vec<String> = ["O", "I-ASP", "I-ASP"].iter().map(|s| s.to_string()).collect();
        let before = spans(&t)[0].clone();
        mark(&mut t, 0, 1, "ASP");
        assert_eq!(spans(&t), vec![sp(0, 1), before]);
    }

    #[test]
    fn phrase_lowercases() {
        assert_eq!(phrase(&["Battery", "Life"], &sp(0, 2)), "battery life");
    }
}
