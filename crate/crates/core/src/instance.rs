//! Plain-text fixture format for channel instances.
//!
//! ```text
//! L N λ
//! θ_1 φ_1 ϑ_1
//! ...                      (L angle lines)
//! re,im re,im ...          (L lines of N entries, row l = path l)
//! ```
//!
//! Floats are written in shortest round-trip form so a written instance reads
//! back bit-identical. Blank lines and lines starting with `#` are ignored.

use std::io::Write;

use num_complex::Complex64;

use crate::channel::{PathAngles, PathResponseMatrix};
use crate::error::{Error, Result};

pub fn write_instance<W: Write>(
    g: &PathResponseMatrix,
    wavelength: f64,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "{} {} {:e}", g.num_paths(), g.num_antennas(), wavelength)?;
    let a = g.angles();
    for l in 0..g.num_paths() {
        writeln!(
            w,
            "{:e} {:e} {:e}",
            a.theta()[l],
            a.phi()[l],
            a.vartheta()[l]
        )?;
    }
    for l in 0..g.num_paths() {
        let row: Vec<String> = g
            .row(l)
            .iter()
            .map(|c| format!("{:e},{:e}", c.re, c.im))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn instance_to_string(g: &PathResponseMatrix, wavelength: f64) -> String {
    let mut buf = Vec::new();
    write_instance(g, wavelength, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses a fixture, returning the matrix and the wavelength from its header.
pub fn read_instance(text: &str) -> Result<(PathResponseMatrix, f64)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty instance".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(hline, "header must be `L N wavelength`"));
    }
    let l: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, "bad path count"))?;
    let n: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, "bad antenna count"))?;
    let wavelength = float(fields[2], hline)?;

    let mut theta = Vec::with_capacity(l);
    let mut phi = Vec::with_capacity(l);
    let mut vartheta = Vec::with_capacity(l);
    for _ in 0..l {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline, "missing angle lines"))?;
        let v: Vec<&str> = line.split_whitespace().collect();
        if v.len() != 3 {
            return Err(parse_err(ln, "angle line must hold `theta phi vartheta`"));
        }
        theta.push(float(v[0], ln)?);
        phi.push(float(v[1], ln)?);
        vartheta.push(float(v[2], ln)?);
    }

    let mut entries = Vec::with_capacity(l * n);
    for _ in 0..l {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline, "missing coefficient rows"))?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != n {
            return Err(parse_err(
                ln,
                &format!("expected {n} coefficients, found {}", row.len()),
            ));
        }
        for cell in row {
            let (re, im) = cell
                .split_once(',')
                .ok_or_else(|| parse_err(ln, "coefficient must be `re,im`"))?;
            entries.push(Complex64::new(float(re, ln)?, float(im, ln)?));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content"));
    }

    let angles = PathAngles::from_parts(theta, phi, vartheta)?;
    Ok((PathResponseMatrix::new(entries, n, angles)?, wavelength))
}

fn float(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| parse_err(line, &format!("`{s}` is not a number")))
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}
