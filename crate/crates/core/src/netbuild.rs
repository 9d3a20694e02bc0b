//! Networks built from timestamped message logs: URL co-sharing and
//! near-duplicate text within a time window.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::Graph;

/// Largest number of messages compared pairwise in one window.
pub const MAX_WINDOW_MESSAGES: usize = 100_000;

/// Default edit-distance threshold for near-duplicate messages.
pub const DEFAULT_MAX_EDIT: usize = 29;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub user: String,
    /// Epoch seconds.
    pub timestamp: f64,
    pub text: String,
    pub urls: Vec<String>,
}

/// Half-open time window `[start, end)` in epoch seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub start: f64,
    pub end: f64,
}

impl WindowSpec {
    pub fn new(start: f64, end: f64) -> Result<WindowSpec> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return domain(format!("window [{start}, {end}) is empty or not finite"));
        }
        Ok(WindowSpec { start, end })
    }

    /// Window of `days` days beginning at `start`.
    pub fn days(start: f64, days: f64) -> Result<WindowSpec> {
        WindowSpec::new(start, start + days * 86_400.0)
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

/// Parses CSV with columns `user,timestamp,text,urls`, URLs separated by `;`.
/// Records come back sorted by timestamp, ties kept in file order.
pub fn ingest_messages(text: &str) -> Result<Vec<MessageRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse { line: 1, message: format!("missing column {name}") })
    };
    let (cu, ct, cx, cl) = (column("user")?, column("timestamp")?, column("text")?, column("urls")?);
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(line, e))?;
        let field = |c: usize| row.get(c).unwrap_or("");
        let timestamp: f64 = field(ct)
            .trim()
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| Error::Parse { line, message: format!("bad timestamp {:?}", field(ct)) })?;
        let urls = field(cl).split(';').map(str::trim).filter(|u| !u.is_empty()).map(String::from).collect();
        out.push(MessageRecord { user: field(cu).to_string(), timestamp, text: field(cx).to_string(), urls });
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(out)
}

fn parse_err(line: usize, e: csv::Error) -> Error {
    Error::Parse { line, message: e.to_string() }
}

/// Labelled graph on the users that appear in `pairs`.
fn user_graph(pairs: BTreeSet<(String, String)>) -> Result<Graph> {
    let users: Vec<String> =
        pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&str, usize> = users.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    let edges: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (index[a.as_str()], index[b.as_str()])).collect();
    Graph::from_edges(users.len(), edges)?.with_labels(users)
}

/// Users joined when both posted a common URL at or before `t`; users without links are dropped.
pub fn aggregate_url_network(records: &[MessageRecord], t: f64) -> Result<Graph> {
    let mut sharers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.timestamp <= t) {
        for u in &r.urls {
            sharers.entry(u.as_str()).or_default().insert(r.user.as_str());
        }
    }
    let mut pairs = BTreeSet::new();
    for users in sharers.values() {
        let users: Vec<&str> = users.iter().copied().collect();
        for (i, a) in users.iter().enumerate() {
            for b in &users[i + 1..] {
                pairs.insert((a.to_string(), b.to_string()));
            }
        }
    }
    user_graph(pairs)
}

/// Optimal string alignment distance over Unicode scalar values.
pub fn restricted_damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let m = b.len();
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Optimal string alignment distance if it is at most `max`, computed on a diagonal band.
pub fn osa_within(a: &[char], b: &[char], max: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > max {
        return None;
    }
    const INF: usize = usize::MAX / 2;
    let mut prev2 = vec![INF; m + 1];
    let mut prev: Vec<usize> = (0..=m).map(|j| if j <= max { j } else { INF }).collect();
    let mut cur = vec![INF; m + 1];
    for i in 1..=n {
        let lo = i.saturating_sub(max).max(1);
        let hi = (i + max).min(m);
        cur[lo - 1] = if lo == 1 && i <= max { i } else { INF };
        let mut best = cur[lo - 1];
        for j in lo..=hi {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
            best = best.min(d);
        }
        if hi < m {
            cur[hi + 1] = INF;
        }
        if best > max {
            return None;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[m]).filter(|&d| d <= max)
}

/// Users joined when two of their messages inside `window` are within `max_edit`
/// edits of each other; users without links are dropped.
pub fn windowed_similarity_network(records: &[MessageRecord], window: WindowSpec, max_edit: usize) -> Result<Graph> {
    let inside: Vec<(&str, Vec<char>)> = records
        .iter()
        .filter(|r| window.contains(r.timestamp))
        .map(|r| (r.user.as_str(), r.text.chars().collect()))
        .collect();
    if inside.len() > MAX_WINDOW_MESSAGES {
        return Err(Error::Size(format!(
            "{} messages in the window exceed the limit of {MAX_WINDOW_MESSAGES}",
            inside.len()
        )));
    }
    let pairs: BTreeSet<(String, String)> = (0..inside.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (ua, ta) = &inside[i];
            inside[i + 1..]
                .iter()
                .filter(move |(ub, tb)| ub != ua && osa_within(ta, tb, max_edit).is_some())
                .map(move |(ub, _)| if ua < ub { (ua.to_string(), ub.to_string()) } else { (ub.to_string(), ua.to_string()) })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    user_graph(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(user: &str, t: f64, text: &str, urls: &[&str]) -> MessageRecord {
        MessageRecord { user: user.into(), timestamp: t, text: text.into(), urls: urls.iter().map(|u| u.to_string()).collect() }
    }

    #[test]
    fn ingest_examples() {
        let csv = "user,timestamp,text,urls\nb,20,\"hi, there\",\na,10,yo,http://x;http://y\n";
        let r = ingest_messages(csv).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].user, "a");
        assert_eq!(r[0].urls, ["http://x", "http://y"]);
        assert!(r[1].urls.is_empty());
        assert_eq!(r[1].text, "hi, there");
        let bad = ingest_messages("user,timestamp,text,urls\na,1,x,\nb,soon,y,\n").unwrap_err();
        assert!(matches!(bad, Error::Parse { line: 3, .. }), "{bad:?}");
    }

    #[test]
    fn url_network_examples() {
        let r = vec![msg("a", 1.0, "", &["u"]), msg("b", 2.0, "", &["u"])];
        let g = aggregate_url_network(&r, 5.0).unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 1));
        let r = vec![msg("a", 1.0, "", &["u"]), msg("b", 2.0, "", &["v"])];
        assert_eq!(aggregate_url_network(&r, 5.0).unwrap().n(), 0);
        let r = vec![msg("a", 1.0, "", &["u"]), msg("b", 2.0, "", &["u"]), msg("c", 3.0, "", &["u"])];
        let early = aggregate_url_network(&r, 2.5).unwrap().edge_count();
        let late = aggregate_url_network(&r, 3.0).unwrap().edge_count();
        assert!(early < late);
    }

    #[test]
    fn osa_examples() {
        assert_eq!(restricted_damerau_levenshtein("same", "same"), 0);
        assert_eq!(restricted_damerau_levenshtein("abc", "acb"), 1);
        assert_eq!(restricted_damerau_levenshtein("kitten", "sitting"), 3);
        // a transposed pair may not be edited again
        assert_eq!(restricted_damerau_levenshtein("ca", "abc"), 3);
        assert_eq!(restricted_damerau_levenshtein("", "abc"), 3);
        let (a, b): (Vec<char>, Vec<char>) = ("kitten".chars().collect(), "sitting".chars().collect());
        assert_eq!(osa_within(&a, &b, 3), Some(3));
        assert_eq!(osa_within(&a, &b, 2), None);
    }

    #[test]
    fn similarity_window() {
        let text = "breaking: something happened downtown";
        let r = vec![msg("a", 10.0, text, &[]), msg("b", 20.0, text, &[])];
        let g = windowed_similarity_network(&r, WindowSpec::new(0.0, 100.0).unwrap(), 29).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = windowed_similarity_network(&r, WindowSpec::new(15.0, 100.0).unwrap(), 29).unwrap();
        assert_eq!(g.n(), 0);
        let same_user = vec![msg("a", 10.0, text, &[]), msg("a", 20.0, text, &[])];
        let g = windowed_similarity_network(&same_user, WindowSpec::new(0.0, 100.0).unwrap(), 29).unwrap();
        assert_eq!(g.n(), 0);
        assert!(WindowSpec::new(5.0, 5.0).is_err());
        assert_eq!(WindowSpec::days(0.0, 4.0).unwrap().duration(), 345_600.0);
    }
}
