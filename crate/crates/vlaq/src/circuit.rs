//! Circuits and the plain-text circuit file format.
//!
//! A circuit is a qubit count plus an ordered gate list. The text format is
//! one gate per line:
//!
//! ```text
//! # comment
//! h 0
//! cx 0 1            # shorthand: control first, target second
//! rz 2 @ 1.5707963
//! x 3 | 0 1         # any gate, extra controls after '|'
//! u3 1 @ 0.3 1.2 -0.8
//! ```
//!
//! Qubit positions are 0-based. Parameters in radians follow `@`; extra
//! control positions follow `|`. `ccx`/`mcx` read all but the last position
//! as controls. Parse errors carry the 1-based line number.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gate::{self, Gate};

#[derive(Debug, Clone)]
pub struct Circuit {
    pub name: String,
    pub n: u32,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n: u32) -> Self {
        Circuit {
            name: name.into(),
            n,
            gates: Vec::new(),
        }
    }

    /// Appends a gate after validating its qubit positions.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate_for(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Total qubit positions referenced, for sanity reporting.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate_for(self.n)?;
        }
        Ok(())
    }

    /// Renders the circuit in the text format; `parse` reads it back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} on {} qubits", self.name, self.n);
        let _ = writeln!(out, "qubits {}", self.n);
        for g in &self.gates {
            let mut line = g.name.clone();
            for &t in &g.targets {
                let _ = write!(line, " {t}");
            }
            if !g.controls.is_empty() && !has_builtin_controls(&g.name) {
                line.push_str(" |");
                for &cq in &g.controls {
                    let _ = write!(line, " {cq}");
                }
            } else if has_builtin_controls(&g.name) {
                // Builtin controlled forms serialize as controls-then-target.
                let mut parts = vec![g.name.clone()];
                parts.extend(g.controls.iter().map(|c| c.to_string()));
                parts.extend(g.targets.iter().map(|t| t.to_string()));
                line = parts.join(" ");
            }
            if let Some(params) = gate_params(g) {
                let _ = write!(line, " @ {params}");
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Parses the text format. The qubit count comes from a `qubits N` line
    /// or, absent one, from the highest position referenced plus one.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Circuit> {
        let mut declared_n: Option<u32> = None;
        let mut parsed: Vec<(usize, Gate)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("non-empty line has a token");
            if head.eq_ignore_ascii_case("qubits") {
                let count = tokens
                    .next()
                    .ok_or_else(|| parse_err(lineno, "qubits line needs a count"))?;
                let n: u32 = count
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad qubit count '{count}'")))?;
                declared_n = Some(n);
                if tokens.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after qubit count"));
                }
                continue;
            }
            let gate = parse_gate_line(head, tokens, lineno)?;
            parsed.push((lineno, gate));
        }

        let highest = parsed
            .iter()
            .flat_map(|(_, g)| g.targets.iter().chain(&g.controls))
            .max()
            .copied();
        let n = match (declared_n, highest) {
            (Some(n), _) => n,
            (None, Some(h)) => h + 1,
            (None, None) => {
                return Err(Error::CircuitParse {
                    line: 0,
                    message: "no gates and no qubit count".into(),
                })
            }
        };

        let mut circuit = Circuit::new(name, n);
        for (lineno, gate) in parsed {
            circuit.push(gate).map_err(|e| parse_err(lineno, e.to_string()))?;
        }
        Ok(circuit)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Circuit> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileIo {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "circuit".into());
        Circuit::parse(name, &text)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| Error::FileIo {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::CircuitParse {
        line,
        message: message.into(),
    }
}

fn has_builtin_controls(name: &str) -> bool {
    matches!(name, "cx" | "cz" | "cp" | "ccx" | "mcx")
}

/// Parameters for serialization, in the order the constructors take them.
fn gate_params(g: &Gate) -> Option<String> {
    let m = &g.matrix;
    match g.name.as_str() {
        "p" | "cp" => {
            let e = m.at(1, 1);
            Some(format!("{}", e.im.atan2(e.re)))
        }
        "rx" => {
            let half = (-m.at(0, 1).im).atan2(m.at(0, 0).re);
            Some(format!("{}", 2.0 * half))
        }
        "ry" => {
            let half = m.at(1, 0).re.atan2(m.at(0, 0).re);
            Some(format!("{}", 2.0 * half))
        }
        "rz" => {
            let e = m.at(1, 1);
            Some(format!("{}", 2.0 * e.im.atan2(e.re)))
        }
        "u3" => {
            let ct = m.at(0, 0).re;
            let m10 = m.at(1, 0);
            let st = m10.norm();
            let theta = 2.0 * st.atan2(ct);
            let phi = m10.im.atan2(m10.re);
            let m01 = -m.at(0, 1);
            let lambda = m01.im.atan2(m01.re);
            Some(format!("{theta} {phi} {lambda}"))
        }
        _ => None,
    }
}

fn parse_gate_line<'a>(
    head: &str,
    tokens: impl Iterator<Item = &'a str>,
    lineno: usize,
) -> Result<Gate> {
    // Split the remainder into positions, extra controls, and parameters.
    let mut positions: Vec<u32> = Vec::new();
    let mut extra_controls: Vec<u32> = Vec::new();
    let mut params: Vec<f64> = Vec::new();
    #[derive(PartialEq)]
    enum Section {
        Positions,
        Controls,
        Params,
    }
    let mut section = Section::Positions;
    for tok in tokens {
        match tok {
            "|" if section == Section::Positions => section = Section::Controls,
            "@" if section != Section::Params => section = Section::Params,
            _ => match section {
                Section::Positions => positions.push(
                    tok.parse()
                        .map_err(|_| parse_err(lineno, format!("bad qubit position '{tok}'")))?,
                ),
                Section::Controls => extra_controls.push(
                    tok.parse()
                        .map_err(|_| parse_err(lineno, format!("bad control position '{tok}'")))?,
                ),
                Section::Params => params.push(
                    tok.parse()
                        .map_err(|_| parse_err(lineno, format!("bad parameter '{tok}'")))?,
                ),
            },
        }
    }

    let name = head.to_ascii_lowercase();
    let need = |count: usize| -> Result<()> {
        if positions.len() != count {
            Err(parse_err(
                lineno,
                format!("{name} takes {count} position(s), got {}", positions.len()),
            ))
        } else {
            Ok(())
        }
    };
    let need_params = |count: usize| -> Result<()> {
        if params.len() != count {
            Err(parse_err(
                lineno,
                format!("{name} takes {count} parameter(s), got {}", params.len()),
            ))
        } else {
            Ok(())
        }
    };

    let mut gate = match name.as_str() {
        "h" => {
            need(1)?;
            need_params(0)?;
            gate::hadamard(positions[0])
        }
        "x" => {
            need(1)?;
            need_params(0)?;
            gate::pauli_x(positions[0])
        }
        "y" => {
            need(1)?;
            need_params(0)?;
            gate::pauli_y(positions[0])
        }
        "z" => {
            need(1)?;
            need_params(0)?;
            gate::pauli_z(positions[0])
        }
        "p" => {
            need(1)?;
            need_params(1)?;
            gate::phase(positions[0], params[0])
        }
        "rx" => {
            need(1)?;
            need_params(1)?;
            gate::rx(positions[0], params[0])
        }
        "ry" => {
            need(1)?;
            need_params(1)?;
            gate::ry(positions[0], params[0])
        }
        "rz" => {
            need(1)?;
            need_params(1)?;
            gate::rz(positions[0], params[0])
        }
        "u3" => {
            need(1)?;
            need_params(3)?;
            gate::u3(positions[0], params[0], params[1], params[2])
        }
        "cx" | "cnot" => {
            need(2)?;
            need_params(0)?;
            gate::cnot(positions[0], positions[1])
        }
        "cz" => {
            need(2)?;
            need_params(0)?;
            gate::cz(positions[0], positions[1])
        }
        "cp" => {
            need(2)?;
            need_params(1)?;
            gate::cphase(positions[0], positions[1], params[0])
        }
        "swap" => {
            need(2)?;
            need_params(0)?;
            gate::swap(positions[0], positions[1])
        }
        "ccx" | "toffoli" => {
            need(3)?;
            need_params(0)?;
            gate::toffoli(positions[0], positions[1], positions[2])
        }
        "mcx" => {
            if positions.len() < 2 {
                return Err(parse_err(lineno, "mcx needs at least one control"));
            }
            need_params(0)?;
            let target = *positions.last().expect("len >= 2");
            gate::mcx(positions[..positions.len() - 1].to_vec(), target)
        }
        other => return Err(parse_err(lineno, format!("unknown gate '{other}'"))),
    };

    if !extra_controls.is_empty() {
        gate.controls.extend(extra_controls);
        // Re-run the duplicate check the constructor would have done.
        let mut seen = std::collections::HashSet::new();
        for &q in gate.targets.iter().chain(&gate.controls) {
            if !seen.insert(q) {
                return Err(parse_err(lineno, format!("position {q} appears twice")));
            }
        }
    }
    Ok(gate)
}
