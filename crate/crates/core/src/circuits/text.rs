//! A subset of the stim circuit text format.

use std::fmt::Write;

use super::{Circuit, Instruction, InstructionKind};
use crate::error::{Error, Result};

fn name(kind: &InstructionKind) -> &'static str {
    match kind {
        InstructionKind::ResetZ => "R",
        InstructionKind::ResetX => "RX",
        InstructionKind::H => "H",
        InstructionKind::X => "X",
        InstructionKind::Y => "Y",
        InstructionKind::Z => "Z",
        InstructionKind::CNOT => "CX",
        InstructionKind::CZ => "CZ",
        InstructionKind::MeasureZ => "M",
        InstructionKind::MeasureX => "MX",
        InstructionKind::Tick => "TICK",
        InstructionKind::Depolarize1(_) => "DEPOLARIZE1",
        InstructionKind::Depolarize2(_) => "DEPOLARIZE2",
        InstructionKind::XError(_) => "X_ERROR",
        InstructionKind::ZError(_) => "Z_ERROR",
        InstructionKind::Detector(_) => "DETECTOR",
        InstructionKind::Observable(_) => "OBSERVABLE_INCLUDE",
    }
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text form: one instruction per line, relative record targets.
pub fn serialize(c: &Circuit) -> String {
    let mut out = String::new();
    let mut measured = 0usize;
    for ins in c.instructions() {
        out.push_str(name(&ins.kind));
        match &ins.kind {
            InstructionKind::Depolarize1(p)
            | InstructionKind::Depolarize2(p)
            | InstructionKind::XError(p)
            | InstructionKind::ZError(p) => write!(out, "({p})").unwrap(),
            InstructionKind::Detector(coords) if !coords.is_empty() => {
                write!(out, "({})", join_f64(coords)).unwrap()
            }
            InstructionKind::Observable(j) => write!(out, "({j})").unwrap(),
            _ => {}
        }
        if ins.kind.is_annotation() {
            for &r in &ins.targets {
                write!(out, " rec[-{}]", measured - r).unwrap();
            }
        } else {
            for &q in &ins.targets {
                write!(out, " {q}").unwrap();
            }
        }
        if ins.kind.is_measurement() {
            measured += ins.targets.len();
        }
        out.push('\n');
    }
    out
}

fn parse_args(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|a| a.trim())
        .filter(|a| !a.is_empty())
        .map(|a| {
            a.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad argument '{a}'"),
            })
        })
        .collect()
}

/// Parses the subset written by [`serialize`]. Also accepts `CNOT`, `RZ` and
/// `MZ` as aliases and `#` comments. The qubit count is one more than the
/// largest qubit target.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut parsed: Vec<(InstructionKind, Vec<String>, usize)> = Vec::new();
    let mut max_qubit: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        // The head ends at the first space outside an argument list.
        let split = match line.find('(') {
            Some(open) if line[..open].trim_end().len() == open => {
                line[open..].find(')').map(|c| open + c + 1).unwrap_or(line.len())
            }
            _ => line.find(char::is_whitespace).unwrap_or(line.len()),
        };
        let (head, rest) = (&line[..split], line[split..].trim());
        let (gate, args) = match head.find('(') {
            Some(p) => {
                let close = head
                    .rfind(')')
                    .ok_or_else(|| perr(format!("unclosed argument list in '{head}'")))?;
                (&head[..p], parse_args(line_no, &head[p + 1..close])?)
            }
            None => (head, Vec::new()),
        };
        let prob = || -> Result<f64> {
            match args.as_slice() {
                [p] => Ok(*p),
                _ => Err(perr(format!("{gate} takes one probability"))),
            }
        };
        let kind = match gate.to_ascii_uppercase().as_str() {
            "R" | "RZ" => InstructionKind::ResetZ,
            "RX" => InstructionKind::ResetX,
            "H" => InstructionKind::H,
            "X" => InstructionKind::X,
            "Y" => InstructionKind::Y,
            "Z" => InstructionKind::Z,
            "CX" | "CNOT" => InstructionKind::CNOT,
            "CZ" => InstructionKind::CZ,
            "M" | "MZ" => InstructionKind::MeasureZ,
            "MX" => InstructionKind::MeasureX,
            "TICK" => InstructionKind::Tick,
            "DEPOLARIZE1" => InstructionKind::Depolarize1(prob()?),
            "DEPOLARIZE2" => InstructionKind::Depolarize2(prob()?),
            "X_ERROR" => InstructionKind::XError(prob()?),
            "Z_ERROR" => InstructionKind::ZError(prob()?),
            "DETECTOR" => InstructionKind::Detector(args.clone()),
            "OBSERVABLE_INCLUDE" => match args.as_slice() {
                [j] if *j >= 0.0 && j.fract() == 0.0 => InstructionKind::Observable(*j as usize),
                _ => return Err(perr("OBSERVABLE_INCLUDE needs one index".into())),
            },
            other => return Err(perr(format!("unsupported instruction '{other}'"))),
        };
        let targets: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if !kind.is_annotation() {
            for t in &targets {
                let q: usize = t.parse().map_err(|_| perr(format!("bad target '{t}'")))?;
                max_qubit = Some(max_qubit.map_or(q, |m| m.max(q)));
            }
        }
        parsed.push((kind, targets, line_no));
    }

    let mut c = Circuit::new(max_qubit.map_or(0, |m| m + 1));
    for (kind, targets, line) in parsed {
        let targets = if kind.is_annotation() {
            let measured = c.num_measurements();
            targets
                .iter()
                .map(|t| {
                    t.strip_prefix("rec[-")
                        .and_then(|s| s.strip_suffix(']'))
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&back| back >= 1 && back <= measured)
                        .map(|back| measured - back)
                        .ok_or_else(|| Error::Parse {
                            line,
                            msg: format!("bad record target '{t}'"),
                        })
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            targets.iter().map(|t| t.parse().expect("checked above")).collect()
        };
        c.push(Instruction::new(kind, targets)).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(c)
}
