//! Plain-text model files.
//!
//! ```text
//! # comments and blank lines are ignored
//! name two-qubit example
//! factors 2 2
//! h0 0
//! gamma 1
//! hamiltonian
//! <d rows of 2d reals: re im re im ...>
//! jump 1
//! <d rows>
//! zeno
//! <one row of 2 d0 reals>
//! target
//! <one row of 2 d1 reals>
//! ```
//!
//! `d` is the product of `factors`; `h0` lists the factors making up `H_0`.
//! Matrices are row-major. Any number of `jump <rate>` sections may appear.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::liouville::LindbladModel;
use crate::models::TargetedModel;
use crate::operators::{ComplexMatrix, HilbertLayout, PureState, C64};

const NORM_TOL: f64 = 1e-10;

pub fn read_model_file(path: &Path) -> Result<TargetedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    parse_model_text(&text, &path.display().to_string())
}

/// Writes atomically next to `path`.
pub fn write_model_file(tm: &TargetedModel, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(model_to_text(tm).as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Shortest round-trip float formatting, so re-reading is exact.
pub fn model_to_text(tm: &TargetedModel) -> String {
    let m = &tm.model;
    let layout = m.layout();
    let mut s = String::new();
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(s, "name {}", tm.name).unwrap();
    writeln!(s, "factors {}", join(layout.factor_dims())).unwrap();
    writeln!(s, "h0 {}", join(layout.h0_factors())).unwrap();
    writeln!(s, "gamma {:e}", m.gamma()).unwrap();
    s.push_str("hamiltonian\n");
    write_matrix(&mut s, m.hamiltonian());
    for (l, r) in m.jumps().iter().zip(m.rates()) {
        writeln!(s, "jump {r:e}").unwrap();
        write_matrix(&mut s, l);
    }
    s.push_str("zeno\n");
    write_row(&mut s, tm.zeno.amplitudes());
    s.push_str("target\n");
    write_row(&mut s, tm.target.amplitudes());
    s
}

fn write_matrix(s: &mut String, m: &ComplexMatrix) {
    for i in 0..m.rows() {
        write_row(s, m.row(i));
    }
}

fn write_row(s: &mut String, row: &[C64]) {
    let cells: Vec<String> = row.iter().map(|z| format!("{:e} {:e}", z.re, z.im)).collect();
    s.push_str(&cells.join("  "));
    s.push('\n');
}

struct Lines<'a> {
    source: &'a str,
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, source: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self {
            source,
            inner: it.peekable(),
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::config(format!("{}:{line}", self.source), msg)
    }

    fn row(&mut self, what: &str, entries: usize) -> Result<(usize, Vec<C64>)> {
        let Some((n, text)) = self.inner.next() else {
            return Err(Error::config(self.source.to_string(), format!("{what}: unexpected end of file")));
        };
        let nums: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| self.err(n, format!("{what}: `{t}` is not a number"))))
            .collect::<Result<_>>()?;
        if nums.len() % 2 != 0 {
            return Err(self.err(n, format!("{what}: odd number of values ({}), entries are re/im pairs", nums.len())));
        }
        if nums.len() != 2 * entries {
            return Err(self.err(n, format!("{what}: expected {entries} complex entries, found {}", nums.len() / 2)));
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(self.err(n, format!("{what}: non-finite value")));
        }
        Ok((n, nums.chunks(2).map(|p| C64::new(p[0], p[1])).collect()))
    }

    fn matrix(&mut self, what: &str, d: usize) -> Result<ComplexMatrix> {
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            data.extend(self.row(&format!("{what} row {}", i + 1), d)?.1);
        }
        ComplexMatrix::from_vec(d, d, data)
    }

    fn state(&mut self, what: &str, dim: usize) -> Result<PureState> {
        let (n, amps) = self.row(what, dim)?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(self.err(n, format!("{what}: state has norm {norm}, expected 1")));
        }
        PureState::normalized(amps)
    }
}

fn parse_usizes(lines: &Lines, n: usize, rest: &str, what: &str) -> Result<Vec<usize>> {
    rest.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| lines.err(n, format!("{what}: `{t}` is not a nonnegative integer"))))
        .collect()
}

pub fn parse_model_text(text: &str, source: &str) -> Result<TargetedModel> {
    let mut lines = Lines::new(text, source);
    let mut name = None;
    let mut layout: Option<HilbertLayout> = None;
    let mut factors: Option<Vec<usize>> = None;
    let mut gamma = None;
    let mut h = None;
    let mut jumps = Vec::new();
    let mut rates = Vec::new();
    let mut zeno = None;
    let mut target = None;

    while let Some((n, line)) = lines.inner.next() {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let need_layout = |layout: &Option<HilbertLayout>| {
            layout.clone().ok_or_else(|| lines.err(n, format!("`{key}` before `factors` and `h0`")))
        };
        match key {
            "name" => name = Some(rest.to_string()),
            "factors" => factors = Some(parse_usizes(&lines, n, rest, "factors")?),
            "h0" => {
                let f = factors.clone().ok_or_else(|| lines.err(n, "`h0` before `factors`"))?;
                let h0 = parse_usizes(&lines, n, rest, "h0")?;
                layout = Some(HilbertLayout::new(f, h0).map_err(|e| lines.err(n, e.to_string()))?);
            }
            "gamma" => {
                gamma = Some(rest.parse::<f64>().map_err(|_| lines.err(n, format!("gamma: `{rest}` is not a number")))?)
            }
            "hamiltonian" => {
                let l = need_layout(&layout)?;
                let m = lines.matrix("hamiltonian", l.dim())?;
                if !m.is_hermitian(1e-10) {
                    return Err(lines.err(n, "hamiltonian is not Hermitian"));
                }
                h = Some(m);
            }
            "jump" => {
                let l = need_layout(&layout)?;
                let r = rest.parse::<f64>().map_err(|_| lines.err(n, format!("jump rate: `{rest}` is not a number")))?;
                let what = format!("jump {}", jumps.len() + 1);
                jumps.push(lines.matrix(&what, l.dim())?);
                rates.push(r);
            }
            "zeno" => {
                let l = need_layout(&layout)?;
                zeno = Some(lines.state("zeno", l.d0())?);
            }
            "target" => {
                let l = need_layout(&layout)?;
                target = Some(lines.state("target", l.d1())?);
            }
            other => return Err(lines.err(n, format!("unknown section `{other}`"))),
        }
    }

    let missing = |what: &str| Error::config(source.to_string(), format!("missing `{what}`"));
    let layout = layout.ok_or_else(|| missing("h0"))?;
    let model = LindbladModel::with_rates(
        h.ok_or_else(|| missing("hamiltonian"))?,
        jumps,
        rates,
        gamma.ok_or_else(|| missing("gamma"))?,
        layout,
    )
    .map_err(|e| Error::config(source.to_string(), e.to_string()))?;
    TargetedModel::new(
        name.unwrap_or_else(|| "custom".to_string()),
        model,
        zeno.ok_or_else(|| missing("zeno"))?,
        target.ok_or_else(|| missing("target"))?,
    )
}
