use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use halfstokes::fields::{FieldComponent, FieldSample};
use halfstokes::{HalfSpacePoint, SpaceTimePoint};

fn header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..n).map(|k| format!("x{k}")).collect();
    h.extend(["xn", "t", "component", "value", "error"].map(String::from));
    h
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(f))
}

/// `{:?}` prints the shortest decimal that parses back to the same f64.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Writes field samples of R^n_+ with header `x1,…,x_{n−1},xn,t,component,value,error`.
pub fn emit_series(path: &Path, n: usize, rows: &[FieldSample]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header(n))?;
    for r in rows {
        let p = &r.location.point;
        if p.tangential.len() != n - 1 {
            bail!("sample at {:?} is not a point of R^{n}_+", p.to_vec());
        }
        let mut rec: Vec<String> = p.tangential.iter().map(|&v| num(v)).collect();
        rec.push(num(p.normal));
        rec.push(num(r.location.t));
        rec.push(r.component.to_string());
        rec.push(num(r.value));
        rec.push(num(r.error_estimate));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_component(s: &str) -> Result<FieldComponent> {
    if s == "p" {
        return Ok(FieldComponent::Pressure);
    }
    match s.parse::<usize>() {
        Ok(i) if i >= 1 => Ok(FieldComponent::Velocity(i)),
        _ => bail!("unknown component {s:?}"),
    }
}

/// Reads a file written by [`emit_series`].
pub fn read_series(path: &Path) -> Result<Vec<FieldSample>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let cols = r.headers()?.len();
    if cols < 7 {
        bail!(
            "{}: expected at least 7 columns, found {cols}",
            path.display()
        );
    }
    let n = cols - 4;
    if r.headers()?.iter().collect::<Vec<_>>() != header(n) {
        bail!("{}: unexpected header", path.display());
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |k: usize| -> Result<f64> {
            rec[k]
                .parse()
                .with_context(|| format!("column {k}: {:?} is not a number", &rec[k]))
        };
        let x = (0..n).map(f).collect::<Result<Vec<f64>>>()?;
        let point = HalfSpacePoint::from_slice(&x)?;
        out.push(FieldSample {
            location: SpaceTimePoint::new(point, f(n)?),
            component: parse_component(&rec[n + 1])?,
            value: f(n + 2)?,
            error_estimate: f(n + 3)?,
        });
    }
    Ok(out)
}

/// Writes a plain numeric table.
pub fn emit_table(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| num(v)))?;
    }
    w.flush()?;
    Ok(())
}
