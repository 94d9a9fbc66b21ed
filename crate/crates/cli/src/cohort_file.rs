//! Line-oriented event-history files.
//!
//! ```text
//! # comment
//! S,healthy,ill,dead
//! H,<id>,<initial_state>,<censor_time>,<landmark>
//! J,<id>,<time>,<from>,<to>
//! ```
//!
//! The `S` record lists the state labels and must come first. Ids are
//! unsigned integers; `censor_time` may be `inf`; an empty landmark means the
//! universal class. Jumps of one individual are read in file order and must
//! chain and strictly increase in time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use msland_core::model::{Jump, Landmark, ModelError, SamplePath, StateSpace};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CohortFile {
    pub states: StateSpace,
    pub paths: Vec<SamplePath>,
    /// Line of each path's H record.
    pub header_lines: Vec<usize>,
}

struct Pending {
    header_line: usize,
    initial: usize,
    censor: f64,
    landmark: Landmark,
    jumps: Vec<(usize, Jump)>,
}

fn parse_time(field: &str) -> Result<f64, String> {
    let t: f64 = field.parse().map_err(|_| format!("`{field}` is not a number"))?;
    if t.is_nan() {
        return Err("time must not be NaN".into());
    }
    Ok(t)
}

/// Parses the text of a cohort file; `origin` only labels diagnostics.
pub fn parse_cohort(text: &str, origin: &Path) -> Result<CohortFile, CliError> {
    let err = |line: usize, message: String| CliError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut states: Option<StateSpace> = None;
    let mut pending: BTreeMap<u64, Pending> = BTreeMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let record = raw.trim();
        if record.is_empty() || record.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = record.split(',').map(str::trim).collect();
        let state = |label: &str| -> Result<usize, CliError> {
            let space = states.as_ref().expect("checked before use");
            space.index_of(label).map_err(|e| err(line, e.to_string()))
        };
        let id = |field: &str| -> Result<u64, CliError> {
            field
                .parse()
                .map_err(|_| err(line, format!("id `{field}` is not an unsigned integer")))
        };
        match fields[0] {
            "S" => {
                if states.is_some() {
                    return Err(err(line, "duplicate S record".into()));
                }
                let space = StateSpace::new(&fields[1..]).map_err(|e| err(line, e.to_string()))?;
                states = Some(space);
            }
            "H" | "J" if states.is_none() => {
                return Err(err(line, "the S record listing the states must come first".into()));
            }
            "H" => {
                if fields.len() != 5 {
                    return Err(err(line, format!("H record needs 5 fields, found {}", fields.len())));
                }
                let id = id(fields[1])?;
                let initial = state(fields[2])?;
                let censor = parse_time(fields[3]).map_err(|m| err(line, m))?;
                let landmark = if fields[4].is_empty() {
                    Landmark::universal()
                } else {
                    Landmark::new(fields[4])
                };
                if let Some(previous) = pending.get(&id) {
                    return Err(err(
                        line,
                        format!("individual {id} already has a header on line {}", previous.header_line),
                    ));
                }
                pending.insert(
                    id,
                    Pending {
                        header_line: line,
                        initial,
                        censor,
                        landmark,
                        jumps: Vec::new(),
                    },
                );
            }
            "J" => {
                if fields.len() != 5 {
                    return Err(err(line, format!("J record needs 5 fields, found {}", fields.len())));
                }
                let id = id(fields[1])?;
                let time = parse_time(fields[2]).map_err(|m| err(line, m))?;
                let (from, to) = (state(fields[3])?, state(fields[4])?);
                let Some(p) = pending.get_mut(&id) else {
                    return Err(err(line, format!("jump for individual {id} before its H record")));
                };
                p.jumps.push((line, Jump::new(time, from, to)));
            }
            other => return Err(err(line, format!("unknown record type `{other}`"))),
        }
    }

    let Some(states) = states else {
        return Err(CliError::NoIndividuals {
            path: origin.to_path_buf(),
        });
    };
    if pending.is_empty() {
        return Err(CliError::NoIndividuals {
            path: origin.to_path_buf(),
        });
    }
    let mut paths = Vec::with_capacity(pending.len());
    let mut header_lines = Vec::with_capacity(pending.len());
    for (id, p) in pending {
        header_lines.push(p.header_line);
        let lines: Vec<usize> = p.jumps.iter().map(|j| j.0).collect();
        let jumps = p.jumps.into_iter().map(|j| j.1).collect();
        let path = SamplePath::new(id, p.initial, jumps, p.censor, p.landmark).map_err(|e| {
            let line = match &e {
                ModelError::NonIncreasingJump { position, .. }
                | ModelError::InvalidJumpTime { position, .. }
                | ModelError::SelfTransition { position, .. }
                | ModelError::BrokenChain { position, .. } => lines[*position],
                _ => p.header_line,
            };
            err(line, describe(&e, &states))
        })?;
        paths.push(path);
    }
    Ok(CohortFile {
        states,
        paths,
        header_lines,
    })
}

fn describe(e: &ModelError, states: &StateSpace) -> String {
    let label = |i: usize| states.label(i).unwrap_or("?").to_string();
    match e {
        ModelError::BrokenChain { id, from, current, .. } => format!(
            "individual {id}: jump leaves `{}` but the individual is in `{}`",
            label(*from),
            label(*current)
        ),
        ModelError::SelfTransition { id, from, .. } => {
            format!("individual {id}: jump from `{}` to itself", label(*from))
        }
        other => other.to_string(),
    }
}

impl CohortFile {
    /// Rejects individuals censored at or before the landmark time.
    pub fn check_landmark_time(&self, s: f64, origin: &Path) -> Result<(), CliError> {
        for (p, &line) in self.paths.iter().zip(&self.header_lines) {
            if p.censor_time() <= s {
                return Err(CliError::Parse {
                    path: origin.to_path_buf(),
                    line,
                    message: format!("individual {}: censored at {} <= s = {s}", p.id(), p.censor_time()),
                });
            }
        }
        Ok(())
    }
}

pub fn read_cohort(path: &Path) -> Result<CohortFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_cohort(&text, path)
}

/// Text form of a cohort; [`parse_cohort`] reads it back unchanged.
pub fn format_cohort(states: &StateSpace, paths: &[SamplePath], header: &[String]) -> Result<String, CliError> {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").unwrap();
    }
    for label in states.labels() {
        if label.contains(',') || label.trim() != label || label.is_empty() {
            return Err(CliError::Config(format!(
                "state label `{label}` cannot be written to a cohort file"
            )));
        }
    }
    writeln!(out, "S,{}", states.labels().join(",")).unwrap();
    let label = |i: usize| states.label(i).expect("path states are checked");
    for p in paths {
        p.check_states(states)?;
        let z = p.landmark().as_str();
        if z.contains(',') || z.trim() != z {
            return Err(CliError::Config(format!(
                "landmark `{z}` cannot be written to a cohort file"
            )));
        }
        writeln!(
            out,
            "H,{},{},{},{}",
            p.id(),
            label(p.initial_state()),
            p.censor_time(),
            z
        )
        .unwrap();
        for j in p.jumps() {
            writeln!(out, "J,{},{},{},{}", p.id(), j.time, label(j.from), label(j.to)).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CohortFile, CliError> {
        parse_cohort(text, Path::new("cohort.csv"))
    }

    #[test]
    fn empty_file_has_no_individuals() {
        let e = parse("").unwrap_err();
        assert!(e.to_string().ends_with("no individuals"), "{e}");
        let e = parse("# only a comment\nS,a,b\n").unwrap_err();
        assert!(matches!(e, CliError::NoIndividuals { .. }));
    }

    #[test]
    fn single_constant_path() {
        let c = parse("S,alive,dead\nH,7,alive,inf,\n").unwrap();
        assert_eq!(c.paths.len(), 1);
        let p = &c.paths[0];
        assert_eq!((p.id(), p.initial_state(), p.jumps().len()), (7, 0, 0));
        assert_eq!(p.censor_time(), f64::INFINITY);
        assert_eq!(p.landmark(), &Landmark::universal());
    }

    #[test]
    fn broken_chain_names_id_and_line() {
        let text = "S,h,i,d\nH,3,h,inf,all\nJ,3,1,h,i\nJ,3,2,h,d\n";
        match parse(text).unwrap_err() {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("individual 3"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagnostics_for_malformed_rows() {
        let cases = [
            ("H,1,h,inf,all\n", 1),
            ("S,h,d\nH,x,h,inf,all\n", 2),
            ("S,h,d\nH,1,h,inf,all\nJ,2,1,h,d\n", 3),
            ("S,h,d\nH,1,h,inf,all\nH,1,h,inf,all\n", 3),
            ("S,h,d\nH,1,q,inf,all\n", 2),
            ("S,h,d\nH,1,h,nan,all\n", 2),
            ("S,h,d\nH,1,h,inf\n", 2),
            ("S,h,d\nX,1\n", 2),
            ("S,h,d\nH,1,d,inf,all\nJ,1,2,d,h\nJ,1,2,h,d\n", 4),
        ];
        for (text, expected) in cases {
            match parse(text) {
                Err(CliError::Parse { line, .. }) => assert_eq!(line, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let text = "S,h,i,d\nH,2,i,4.5,i|1\nJ,2,0.25,i,h\nJ,2,3,h,d\nH,1,h,inf,all\n";
        let c = parse(text).unwrap();
        let written = format_cohort(&c.states, &c.paths, &[]).unwrap();
        let back = parse(&written).unwrap();
        assert_eq!((back.states, back.paths), (c.states, c.paths));
    }
}
