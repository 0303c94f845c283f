use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

/// One raw interaction as read from a log.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionRecord {
    pub user: String,
    pub item: String,
    pub rating: f64,
    pub timestamp: Option<i64>,
}

/// Field separator of an interaction file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delimiter {
    /// MovieLens `.dat` style `user::item::rating::timestamp`.
    DoubleColon,
    Tab,
    Comma,
}

impl Delimiter {
    pub fn as_str(self) -> &'static str {
        match self {
            Delimiter::DoubleColon => "::",
            Delimiter::Tab => "\t",
            Delimiter::Comma => ",",
        }
    }
}

impl FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "::" | "dcolon" | "movielens" => Ok(Delimiter::DoubleColon),
            "\t" | "tab" | "tsv" => Ok(Delimiter::Tab),
            "," | "comma" | "csv" => Ok(Delimiter::Comma),
            other => Err(Error::invalid(format!("unknown delimiter {other:?}"))),
        }
    }
}

/// Reads `user<sep>item<sep>rating[<sep>timestamp]` lines.
///
/// Blank lines are ignored. The first non-blank line is treated as a header
/// and skipped when its rating field is not numeric; anywhere else a bad
/// rating is an error.
pub fn load_interactions(path: impl AsRef<Path>, delimiter: Delimiter) -> Result<Vec<InteractionRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_interactions(BufReader::new(file), delimiter).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn parse_interactions(reader: impl BufRead, delimiter: Delimiter) -> Result<Vec<InteractionRecord>> {
    let sep = delimiter.as_str();
    let mut records = Vec::new();
    let mut seen_content = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        let fields: Vec<&str> = line.split(sep).map(str::trim).collect();
        if fields.len() < 3 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected at least 3 fields, found {}", fields.len()),
            });
        }
        let rating = match fields[2].parse::<f64>() {
            Ok(r) => r,
            Err(_) if first => continue,
            Err(_) => {
                return Err(Error::MalformedLine {
                    line: line_no,
                    reason: format!("rating {:?} is not a number", fields[2]),
                })
            }
        };
        if !rating.is_finite() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("rating {rating} is not finite"),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "empty user or item token".into(),
            });
        }
        records.push(InteractionRecord {
            user: fields[0].to_string(),
            item: fields[1].to_string(),
            rating,
            timestamp: fields.get(3).and_then(|t| t.parse().ok()),
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(records)
}

/// Keeps records rated strictly above `threshold`, recoding them as 1.
pub fn binarize(records: Vec<InteractionRecord>, threshold: f64) -> Vec<InteractionRecord> {
    records
        .into_iter()
        .filter(|r| r.rating > threshold)
        .map(|r| InteractionRecord { rating: 1.0, ..r })
        .collect()
}

/// Drops every user with fewer than `min_count` records. Single pass.
pub fn filter_min_ratings(records: Vec<InteractionRecord>, min_count: usize) -> Result<Vec<InteractionRecord>> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in &records {
        *counts.entry(r.user.as_str()).or_default() += 1;
    }
    let keep: std::collections::HashSet<String> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(u, _)| u.to_string())
        .collect();
    let kept: Vec<_> = records.into_iter().filter(|r| keep.contains(&r.user)).collect();
    if kept.is_empty() {
        return Err(Error::DegenerateDataset(format!(
            "no user has at least {min_count} positive interactions"
        )));
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(u: &str, i: &str, r: f64) -> InteractionRecord {
        InteractionRecord {
            user: u.into(),
            item: i.into(),
            rating: r,
            timestamp: None,
        }
    }

    #[test]
    fn parses_movielens_line() {
        let recs = parse_interactions("1::1193::5::978300760\n".as_bytes(), Delimiter::DoubleColon).unwrap();
        assert_eq!(
            recs,
            vec![InteractionRecord {
                user: "1".into(),
                item: "1193".into(),
                rating: 5.0,
                timestamp: Some(978300760),
            }]
        );
    }

    #[test]
    fn bad_rating_reports_line() {
        let input = "1,2,4\n1,3,abc\n";
        match parse_interactions(input.as_bytes(), Delimiter::Comma) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_skipped_only_on_first_line() {
        let recs = parse_interactions("user\titem\trating\n7\t8\t1\n".as_bytes(), Delimiter::Tab).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].item, "8");
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(parse_interactions("".as_bytes(), Delimiter::Comma), Err(Error::EmptyInput)));
        assert!(matches!(parse_interactions("\n\n".as_bytes(), Delimiter::Comma), Err(Error::EmptyInput)));
    }

    #[test]
    fn too_few_fields_rejected() {
        assert!(matches!(
            parse_interactions("1,2\n".as_bytes(), Delimiter::Comma),
            Err(Error::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_interactions("/nonexistent/ratings.dat", Delimiter::DoubleColon).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/ratings.dat"));
    }

    #[test]
    fn binarize_is_strict() {
        let out = binarize(vec![rec("a", "x", 4.0), rec("a", "y", 3.5), rec("b", "x", 1.0)], 3.5);
        assert_eq!(out, vec![rec("a", "x", 1.0)]);
    }

    #[test]
    fn binary_input_passes_with_half_threshold() {
        let out = binarize(vec![rec("a", "x", 1.0), rec("a", "y", 0.0)], 0.5);
        assert_eq!(out, vec![rec("a", "x", 1.0)]);
    }

    #[test]
    fn filter_boundary() {
        let mut recs: Vec<_> = (0..5).map(|i| rec("keep", &i.to_string(), 1.0)).collect();
        recs.extend((0..4).map(|i| rec("drop", &i.to_string(), 1.0)));
        let out = filter_min_ratings(recs, 5).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|r| r.user == "keep"));
    }

    #[test]
    fn filter_to_nothing_is_degenerate() {
        let recs = vec![rec("a", "x", 1.0)];
        assert!(matches!(filter_min_ratings(recs, 20), Err(Error::DegenerateDataset(_))));
    }
}
