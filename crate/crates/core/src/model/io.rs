//! Line-oriented instance format.
//!
//! ```text
//! n 4
//! m 1
//! tmax 20
//! 0 0 0 0
//! 1 2 10 1.5
//! ...
//! MANDATORY
//! 2
//! PHYSICAL
//! 2 3
//! 3 2
//! LOGICAL
//! VARIANT
//! P
//! ```
//!
//! A plain Chao file stops after the node lines (which then have three
//! columns, no service time). An optional trailing `FLAGS` section carries
//! `symmetric` and `exact`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{euclidean_matrix, Instance, ModelError, Route, Solution, Variant};

const SECTIONS: [&str; 5] = ["MANDATORY", "PHYSICAL", "LOGICAL", "VARIANT", "FLAGS"];

fn header_value<T: std::str::FromStr>(
    line_no: usize,
    line: Option<&str>,
    key: &str,
) -> Result<T, ModelError> {
    let line = line.ok_or_else(|| ModelError::MalformedHeader {
        line: line_no,
        detail: format!("missing `{key}` line"),
    })?;
    let mut parts = line.split_whitespace();
    let bad = |detail: String| ModelError::MalformedHeader {
        line: line_no,
        detail,
    };
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| bad(format!("cannot parse `{v}` for `{key}`"))),
        _ => Err(bad(format!("expected `{key} <value>`"))),
    }
}

fn parse_id(line: usize, token: &str, n: usize) -> Result<usize, ModelError> {
    let id: usize = token.parse().map_err(|_| ModelError::Malformed {
        line,
        detail: format!("bad node id `{token}`"),
    })?;
    if id == 0 || id > n {
        return Err(ModelError::OutOfRange { line, id });
    }
    Ok(id - 1)
}

fn parse_pair(line: usize, text: &str, n: usize) -> Result<(usize, usize), ModelError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(ModelError::Malformed {
            line,
            detail: "expected two node ids".into(),
        });
    }
    Ok((parse_id(line, tokens[0], n)?, parse_id(line, tokens[1], n)?))
}

pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    // (1-based line number, trimmed content), blank lines dropped
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (l1, first) = lines.next().map_or((1, None), |(i, l)| (i, Some(l)));
    let n: usize = header_value(l1, first, "n")?;
    let (l2, second) = lines.next().map_or((l1 + 1, None), |(i, l)| (i, Some(l)));
    let fleet_size: usize = header_value(l2, second, "m")?;
    let (l3, third) = lines.next().map_or((l2 + 1, None), |(i, l)| (i, Some(l)));
    let t_max: f64 = header_value(l3, third, "tmax")?;
    if n < 2 {
        return Err(ModelError::MalformedHeader {
            line: l1,
            detail: "n must be at least 2".into(),
        });
    }

    let mut coords = Vec::with_capacity(n);
    let mut profit = Vec::with_capacity(n);
    let mut service = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, content) = lines.next().ok_or_else(|| ModelError::Malformed {
            line: 0,
            detail: format!("expected {n} node lines"),
        })?;
        let values: Result<Vec<f64>, _> = content.split_whitespace().map(str::parse).collect();
        let values = values.map_err(|_| ModelError::Malformed {
            line,
            detail: "bad number".into(),
        })?;
        match values.as_slice() {
            [x, y, p] => {
                coords.push((*x, *y));
                profit.push(*p);
                service.push(0.0);
            }
            [x, y, p, s] => {
                coords.push((*x, *y));
                profit.push(*p);
                service.push(*s);
            }
            _ => {
                return Err(ModelError::Malformed {
                    line,
                    detail: "node line needs `x y profit [service]`".into(),
                })
            }
        }
    }

    let mut mandatory = BTreeSet::new();
    let mut physical = BTreeSet::new();
    let mut logical = BTreeSet::new();
    let mut variant = Variant::P;
    let mut symmetric_physical = false;
    let mut exact_time = false;

    let mut current: Option<usize> = None;
    let mut seen = [false; SECTIONS.len()];
    let mut variant_seen = false;
    for (line, content) in lines {
        if let Some(idx) = SECTIONS.iter().position(|s| *s == content) {
            if seen[idx] {
                return Err(ModelError::DuplicateSection {
                    line,
                    section: content.into(),
                });
            }
            if seen[idx..].iter().any(|&s| s) || current.is_some_and(|c| c > idx) {
                return Err(ModelError::SectionOrder {
                    line,
                    section: content.into(),
                });
            }
            seen[idx] = true;
            current = Some(idx);
            continue;
        }
        match current {
            None => {
                return Err(ModelError::Malformed {
                    line,
                    detail: "content before any section".into(),
                })
            }
            Some(0) => {
                for token in content.split_whitespace() {
                    mandatory.insert(parse_id(line, token, n)?);
                }
            }
            Some(1) => {
                physical.insert(parse_pair(line, content, n)?);
            }
            Some(2) => {
                let (i, j) = parse_pair(line, content, n)?;
                if i >= j {
                    return Err(ModelError::Malformed {
                        line,
                        detail: "logical pairs are written with i < j".into(),
                    });
                }
                logical.insert((i, j));
            }
            Some(3) => {
                if variant_seen {
                    return Err(ModelError::Malformed {
                        line,
                        detail: "VARIANT takes one value".into(),
                    });
                }
                variant = content.parse().map_err(|_| ModelError::Malformed {
                    line,
                    detail: format!("unknown variant `{content}`"),
                })?;
                variant_seen = true;
            }
            Some(_) => {
                for token in content.split_whitespace() {
                    match token {
                        "symmetric" => symmetric_physical = true,
                        "exact" => exact_time = true,
                        other => {
                            return Err(ModelError::Malformed {
                                line,
                                detail: format!("unknown flag `{other}`"),
                            })
                        }
                    }
                }
            }
        }
    }

    let instance = Instance {
        fleet_size,
        t_max,
        travel: euclidean_matrix(&coords),
        coords: Some(coords),
        profit,
        service,
        mandatory,
        physical,
        logical,
        variant,
        symmetric_physical,
        exact_time,
    };
    instance.validate()?;
    Ok(instance)
}

pub fn write_instance(instance: &Instance) -> Result<String, ModelError> {
    let coords = instance
        .coords
        .as_ref()
        .ok_or(ModelError::MissingCoordinates)?;
    let mut out = String::new();
    let _ = writeln!(out, "n {}", instance.n());
    let _ = writeln!(out, "m {}", instance.fleet_size);
    let _ = writeln!(out, "tmax {}", instance.t_max);
    for (k, &(x, y)) in coords.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            x, y, instance.profit[k], instance.service[k]
        );
    }
    out.push_str("MANDATORY\n");
    let ids: Vec<String> = instance
        .mandatory
        .iter()
        .map(|k| (k + 1).to_string())
        .collect();
    let _ = writeln!(out, "{}", ids.join(" "));
    out.push_str("PHYSICAL\n");
    for &(i, j) in &instance.physical {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out.push_str("LOGICAL\n");
    for &(i, j) in &instance.logical {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    let _ = writeln!(out, "VARIANT\n{}", instance.variant);
    if instance.symmetric_physical || instance.exact_time {
        let mut flags = Vec::new();
        if instance.symmetric_physical {
            flags.push("symmetric");
        }
        if instance.exact_time {
            flags.push("exact");
        }
        let _ = writeln!(out, "FLAGS\n{}", flags.join(" "));
    }
    Ok(out)
}

/// `profit <value>` followed by one route per line, 1-based ids.
pub fn write_solution(solution: &Solution) -> String {
    let mut out = format!("profit {}\n", solution.profit);
    for route in &solution.routes {
        let _ = writeln!(out, "{route}");
    }
    out
}

/// Reads a solution file; durations and profit are recomputed from the instance.
pub fn parse_solution(instance: &Instance, text: &str) -> Result<Solution, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, first) = lines.next().map_or((1, None), |(i, l)| (i, Some(l)));
    let _: f64 = header_value(line, first, "profit")?;
    let mut routes = Vec::new();
    for (line, content) in lines {
        let nodes = content
            .split_whitespace()
            .map(|t| parse_id(line, t, instance.n()))
            .collect::<Result<Vec<_>, _>>()?;
        // Keep non-traversable routes so the checker can report them.
        let duration = super::route_duration(instance, &nodes).unwrap_or(f64::INFINITY);
        routes.push(Route { nodes, duration });
    }
    Ok(Solution::new(instance, routes))
}
