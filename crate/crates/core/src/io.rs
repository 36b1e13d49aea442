//! CSV and JSON output. Floats use 17 significant digits so values round-trip exactly.

use std::io::{Read, Write};

use crate::breadth::suite::TheoremOutcome;
use crate::breadth::{sign_pattern, BreadthCoefficients, CurvePair};
use crate::darboux::CaseTag;
use crate::error::{Error, Result};
use crate::pipeline::FrameRow;

pub const COEFFICIENT_COLUMNS: [&str; 6] = ["s", "m1", "m2", "m3", "h", "breadth"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients<W: Write>(out: W, c: &BreadthCoefficients) -> Result<()> {
    write_rows(
        out,
        &COEFFICIENT_COLUMNS,
        (0..c.len()).map(|i| [c.s[i], c.m1[i], c.m2[i], c.m3[i], c.h[i], c.breadth(i)].map(fmt_f64).to_vec()),
    )
}

/// Reads a coefficient table written by [`write_coefficients`]; the grid must be uniform.
pub fn read_coefficients<R: Read>(input: R, case: CaseTag) -> Result<BreadthCoefficients> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != COEFFICIENT_COLUMNS {
        return Err(Error::Config(format!("coefficient columns must be {}", COEFFICIENT_COLUMNS.join(","))));
    }
    let mut c = BreadthCoefficients {
        case,
        s: Vec::new(),
        m1: Vec::new(),
        m2: Vec::new(),
        m3: Vec::new(),
        h: Vec::new(),
        signs: sign_pattern(case),
        step: 0.0,
        halving_change: f64::NAN,
    };
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let mut vals = [0.0; 6];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = record.get(k).unwrap_or("");
            *v = field
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("row {}: `{field}` is not a number", line + 2)))?;
        }
        c.s.push(vals[0]);
        c.m1.push(vals[1]);
        c.m2.push(vals[2]);
        c.m3.push(vals[3]);
        c.h.push(vals[4]);
    }
    if c.s.len() < 5 {
        return Err(Error::GridMismatch("need at least five coefficient rows".into()));
    }
    let n = c.s.len() - 1;
    c.step = (c.s[n] - c.s[0]) / n as f64;
    if c.s.iter().enumerate().any(|(i, s)| (s - (c.s[0] + i as f64 * c.step)).abs() > 1e-9 * c.step) {
        return Err(Error::GridMismatch("coefficient grid is not uniform".into()));
    }
    Ok(c)
}

pub fn write_frames<W: Write>(out: W, rows: &[FrameRow]) -> Result<()> {
    let header = [
        "s", "x", "y", "z", "t1", "t2", "t3", "n1", "n2", "n3", "b1", "b2", "b3", "kappa", "tau", "kappa_g", "kappa_n",
        "tau_g", "theta",
    ];
    write_rows(
        out,
        &header,
        rows.iter().map(|r| {
            let mut v = vec![r.s];
            v.extend(r.point);
            v.extend(r.t);
            v.extend(r.n);
            v.extend(r.b);
            v.extend([r.kappa, r.tau, r.kappa_g, r.kappa_n, r.tau_g, r.theta]);
            v.into_iter().map(fmt_f64).collect()
        }),
    )
}

pub fn write_pair<W: Write>(out: W, p: &CurvePair) -> Result<()> {
    let header = ["s", "s_star", "alpha_x", "alpha_y", "alpha_z", "beta_x", "beta_y", "beta_z"];
    write_rows(
        out,
        &header,
        (0..p.alpha.len()).map(|i| {
            let a = p.alpha[i].point;
            let b = p.beta[i];
            [p.alpha[i].s, p.s_star[i], a.x, a.y, a.z, b.x, b.y, b.z].map(fmt_f64).to_vec()
        }),
    )
}

pub fn write_sweep<W: Write>(out: W, outcomes: &[TheoremOutcome]) -> Result<()> {
    let header = ["theorem", "case", "kind", "passed", "failed", "unsatisfiable", "verdict", "max_residual"];
    write_rows(
        out,
        &header,
        outcomes.iter().map(|o| {
            vec![
                o.id.clone(),
                o.case.to_string(),
                o.kind.to_string(),
                o.passed.to_string(),
                o.failed.to_string(),
                o.unsatisfiable.to_string(),
                format!("{:?}", o.verdict).to_lowercase(),
                fmt_f64(o.max_residual),
            ]
        }),
    )
}

pub fn write_sweep_samples<W: Write>(out: W, outcomes: &[TheoremOutcome]) -> Result<()> {
    let header = [
        "theorem",
        "index",
        "status",
        "residual",
        "breadth_variation",
        "tangent_opposition",
        "f",
        "kappa",
        "tau",
        "detail",
    ];
    write_rows(
        out,
        &header,
        outcomes.iter().flat_map(|o| {
            o.samples.iter().map(move |s| {
                vec![
                    o.id.clone(),
                    s.index.to_string(),
                    format!("{:?}", s.status).to_lowercase(),
                    fmt_f64(s.residual),
                    fmt_f64(s.breadth_variation),
                    fmt_f64(s.tangent_opposition),
                    s.metric.clone(),
                    s.kappa.clone(),
                    s.tau.clone(),
                    s.detail.clone(),
                ]
            })
        }),
    )
}

pub fn write_json<W: Write, T: serde::Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}
