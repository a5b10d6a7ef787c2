//! Plain-text explanation tables.
//!
//! Each row lists an explanation's predicates followed by the Actions,
//! Followers and Followups columns. Predicates a row shares with the row
//! above are moved to the front and left blank, so a run of rows that
//! share leading features reads as one group.

use std::collections::{HashMap, HashSet};

use crate::featurization::{Dimension, Predicate};
use crate::report::ExplanationReport;

/// Orders each row's predicates so that it starts with the longest run of
/// the previous row's (already ordered) predicates it contains.
pub fn group_rows(rows: &[Vec<Predicate>]) -> Vec<Vec<Predicate>> {
    let mut out: Vec<Vec<Predicate>> = Vec::with_capacity(rows.len());
    for row in rows {
        let ordered = match out.last() {
            None => row.clone(),
            Some(prev) => {
                let mut head: Vec<Predicate> = prev.iter().take_while(|p| row.contains(p)).cloned().collect();
                let rest: Vec<Predicate> = row.iter().filter(|p| !head.contains(p)).cloned().collect();
                head.extend(rest);
                head
            }
        };
        out.push(ordered);
    }
    out
}

/// Number of leading predicates `row` shares with `prev`.
pub fn shared_prefix(prev: &[Predicate], row: &[Predicate]) -> usize {
    prev.iter().zip(row).take_while(|(a, b)| a == b).count()
}

/// Attributes that occur under both dimensions in `rows`.
fn ambiguous_attributes(rows: &[Vec<Predicate>]) -> HashSet<&str> {
    let mut seen: HashMap<&str, Dimension> = HashMap::new();
    let mut both = HashSet::new();
    for p in rows.iter().flatten() {
        match seen.get(p.attribute.as_str()) {
            Some(&d) if d != p.dimension => {
                both.insert(p.attribute.as_str());
            }
            Some(_) => {}
            None => {
                seen.insert(&p.attribute, p.dimension);
            }
        }
    }
    both
}

fn display(p: &Predicate, names: &HashMap<String, String>, qualify: bool) -> String {
    let qualified = format!("{}.{}", p.dimension, p.attribute);
    let name = if qualify { names.get(&qualified) } else { None }.or_else(|| names.get(&p.attribute));
    match name {
        Some(name) if name.is_empty() => p.value.clone(),
        Some(name) => format!("{name}={}", p.value),
        None if qualify => format!("{qualified}={}", p.value),
        None => format!("{}={}", p.attribute, p.value),
    }
}

/// Coverage as a percentage with one decimal.
pub fn coverage_percent(covered: usize, total: usize) -> String {
    let pct = if total == 0 { 0.0 } else { 100.0 * covered as f64 / total as f64 };
    format!("{pct:.1}%")
}

/// Renders `report` as an aligned text table with a Total Coverage footer.
/// `names` maps attribute names to display names; an empty display name
/// shows the bare value. An attribute present under both dimensions is
/// shown as `user.attr` / `action.attr`, and `names` may key on that form.
pub fn render_table(report: &ExplanationReport, names: &HashMap<String, String>) -> String {
    let rows: Vec<Vec<Predicate>> = report.explanations.iter().map(|r| r.predicates.clone()).collect();
    let grouped = group_rows(&rows);
    let width = grouped.iter().map(Vec::len).max().unwrap_or(0);
    let ambiguous = ambiguous_attributes(&rows);

    let mut header: Vec<String> = (1..=width).map(|i| format!("Feature {i}")).collect();
    header.extend(["Actions", "Followers", "Followups"].map(String::from));

    let mut body: Vec<Vec<String>> = Vec::with_capacity(grouped.len());
    for (i, (preds, row)) in grouped.iter().zip(&report.explanations).enumerate() {
        let skip = if i == 0 { 0 } else { shared_prefix(&grouped[i - 1], preds) };
        let mut cells: Vec<String> = (0..width)
            .map(|j| match preds.get(j) {
                Some(_) if j < skip => String::new(),
                Some(p) => display(p, names, ambiguous.contains(p.attribute.as_str())),
                None => String::new(),
            })
            .collect();
        cells.push(row.actions.to_string());
        cells.push(row.followers.to_string());
        cells.push(row.followups.to_string());
        body.push(cells);
    }

    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for cells in &body {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, &w))| {
                if j < width {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join(" | ").trim_end().to_string()
    };

    let mut out = String::new();
    out.push_str(&line(&header));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for cells in &body {
        out.push_str(&line(cells));
        out.push('\n');
    }
    out.push_str(&format!(
        "Total Coverage: {}\n",
        coverage_percent(report.total_coverage, report.total_followups)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::ReportRow;

    fn p(attr: &str, value: &str) -> Predicate {
        Predicate {
            dimension: if attr == "gender" { Dimension::User } else { Dimension::Action },
            attribute: attr.into(),
            value: value.into(),
        }
    }

    fn report(rows: Vec<Vec<Predicate>>) -> ExplanationReport {
        ExplanationReport {
            influencer: 1,
            total_followups: 1000,
            explanations: rows
                .into_iter()
                .map(|predicates| ReportRow {
                    predicates,
                    actions: 7,
                    followers: 3,
                    followups: 100,
                })
                .collect(),
            total_coverage: 563,
            relative_coverage: 0.563,
            algorithm: None,
            seed: None,
            truncated: false,
        }
    }

    #[test]
    fn footer_uses_one_decimal() {
        let r = report(vec![vec![p("genre", "comedy")]]);
        let text = render_table(&r, &HashMap::new());
        assert!(text.ends_with("Total Coverage: 56.3%\n"), "{text}");
        assert_eq!(text.lines().count(), 4);
        assert_eq!(coverage_percent(0, 0), "0.0%");
    }

    #[test]
    fn shared_predicates_move_to_the_front_and_render_once() {
        let rows = vec![
            vec![p("rating", "R"), p("genre", "thriller"), p("gender", "male")],
            vec![p("gender", "female"), p("genre", "thriller"), p("rating", "R")],
        ];
        let grouped = group_rows(&rows);
        assert_eq!(grouped[1][..2], [p("rating", "R"), p("genre", "thriller")]);
        assert_eq!(shared_prefix(&grouped[0], &grouped[1]), 2);

        let text = render_table(&report(rows), &HashMap::new());
        assert_eq!(text.matches("genre=thriller").count(), 1);
        assert_eq!(text.matches("rating=R").count(), 1);
        assert!(text.contains("gender=female"));
    }

    #[test]
    fn display_names() {
        let r = report(vec![vec![p("gender", "male"), p("year", "pre-1997")]]);
        let names: HashMap<String, String> =
            [("gender".to_string(), String::new()), ("year".to_string(), "Year".to_string())].into();
        let text = render_table(&r, &names);
        let row = text.lines().nth(2).unwrap();
        assert!(row.starts_with("male"), "{row}");
        assert!(row.contains("Year=pre-1997"));
    }

    #[test]
    fn attribute_in_both_dimensions_is_qualified() {
        let user_lang = Predicate { dimension: Dimension::User, attribute: "language".into(), value: "en".into() };
        let action_lang = Predicate { dimension: Dimension::Action, ..user_lang.clone() };
        let r = report(vec![vec![user_lang, action_lang]]);
        let text = render_table(&r, &HashMap::new());
        assert!(text.contains("user.language=en") && text.contains("action.language=en"), "{text}");

        let names: HashMap<String, String> = [("user.language".to_string(), "Speaks".to_string())].into();
        let text = render_table(&r, &names);
        assert!(text.contains("Speaks=en") && text.contains("action.language=en"), "{text}");

        let single = render_table(&report(vec![vec![p("language", "en")]]), &HashMap::new());
        assert!(single.contains("language=en") && !single.contains("action."));
    }
}
