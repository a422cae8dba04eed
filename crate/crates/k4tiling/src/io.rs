//! graph6 and edge-list serialization.
//!
//! graph6 follows the standard encoding: a size prefix `N(n)` followed by the
//! upper triangle of the adjacency matrix in column order (`(0,1), (0,2),
//! (1,2), (0,3), ...`), six bits per printable byte offset by 63.

use crate::error::{input, Result};
use crate::graph::{Graph, MAX_VERTICES};

const HEADER: &str = ">>graph6<<";

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push(acc + 63);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push((acc << (6 - nbits)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

pub fn from_graph6(text: &str) -> Result<Graph> {
    let s = text.trim();
    let s = s.strip_prefix(HEADER).unwrap_or(s);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return input("empty graph6 string");
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return input(format!("invalid graph6 byte {b:#04x}"));
    }
    let (n, body) = if bytes[0] < 126 {
        ((bytes[0] - 63) as usize, &bytes[1..])
    } else {
        if bytes.len() < 4 || bytes[1] == 126 {
            return input("graph6 size prefix too large for this crate");
        }
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, &bytes[4..])
    };
    if n == 0 || n > MAX_VERTICES {
        return input(format!(
            "graph6 vertex count {n} outside 1..={MAX_VERTICES}"
        ));
    }
    let nbits = n * (n - 1) / 2;
    let need = nbits.div_ceil(6);
    if body.len() != need {
        return input(format!(
            "graph6 body has {} bytes, expected {need}",
            body.len()
        ));
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Edge-list text: header `n m`, then one `u v` per line.
pub fn to_edge_list(g: &Graph) -> String {
    let edges = g.edges();
    let mut s = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn from_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = match lines.next() {
        Some(h) => h,
        None => return input("empty edge list"),
    };
    let nums = parse_pair(header)?;
    let (n, m) = nums;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        edges.push(parse_pair(line)?);
    }
    if edges.len() != m {
        return input(format!(
            "edge list header promises {m} edges, found {}",
            edges.len()
        ));
    }
    let g = Graph::from_edges(n, &edges)?;
    if g.edge_count() != m {
        return input("edge list contains duplicate edges");
    }
    Ok(g)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 2 {
        return input(format!("expected two integers, got `{line}`"));
    }
    let a = parts[0]
        .parse()
        .map_err(|_| crate::Error::Input(format!("bad integer `{}`", parts[0])))?;
    let b = parts[1]
        .parse()
        .map_err(|_| crate::Error::Input(format!("bad integer `{}`", parts[1])))?;
    Ok((a, b))
}

/// Reads either format, sniffing the edge-list header.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let first = text.trim_start().lines().next().unwrap_or("");
    if first.split_whitespace().count() == 2
        && first.split_whitespace().all(|t| t.parse::<usize>().is_ok())
    {
        from_edge_list(text)
    } else {
        from_graph6(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_strings() {
        // Edges a-c, a-e, b-d, d-e on five vertices.
        let g = Graph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(to_graph6(&g), "DQc");
        assert_eq!(from_graph6("DQc").unwrap(), g);
        assert_eq!(to_graph6(&Graph::complete(4).unwrap()), "C~");
        assert_eq!(to_graph6(&Graph::empty(1).unwrap()), "@");
        assert_eq!(
            from_graph6(">>graph6<<C~\n").unwrap(),
            Graph::complete(4).unwrap()
        );
    }

    #[test]
    fn large_prefix_roundtrip() {
        for n in [62, 63, 64] {
            let mut g = Graph::empty(n).unwrap();
            for v in 1..n {
                g.add_edge(v - 1, v);
            }
            let s = to_graph6(&g);
            assert_eq!(s.as_bytes()[0] == 126, n > 62);
            assert_eq!(from_graph6(&s).unwrap(), g);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_graph6("").is_err());
        assert!(from_graph6("C").is_err());
        assert!(from_graph6("C~~").is_err());
        assert!(from_graph6("C\u{1}").is_err());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let s = to_edge_list(&g);
        assert!(s.starts_with("5 3\n"));
        assert_eq!(from_edge_list(&s).unwrap(), g);
        assert_eq!(parse_graph(&s).unwrap(), g);
        assert_eq!(parse_graph(&to_graph6(&g)).unwrap(), g);
        assert!(from_edge_list("3 2\n0 1\n").is_err());
        assert!(from_edge_list("3 2\n0 1\n1 0\n").is_err());
    }
}
