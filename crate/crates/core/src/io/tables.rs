//! CSV readers and writers for market data, curves and paths.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::curves::{CouponBondQuote, CurveKind, DiscountCurve};
use crate::error::{Error, Result};
use crate::market::{CivilDate, CpiSeries, MonthStamp};

pub const CPI_HEADER: [&str; 2] = ["date", "value"];
pub const QUOTE_HEADER: [&str; 6] = [
    "kind",
    "maturity_years",
    "coupon",
    "frequency",
    "price",
    "face",
];
pub const CURVE_HEADER: [&str; 2] = ["node_time", "forward"];
pub const PATH_HEADER: [&str; 3] = ["path_id", "t", "value"];

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Reads all rows after checking the header; yields `(line, fields)`.
fn read_table<R: Read>(
    reader: R,
    source: &str,
    header: &[&str],
) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| parse_error(source, 1, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_error(
            source,
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(Error::input(format!("{source} has no data rows")));
    }
    Ok(rows)
}

fn number(source: &str, line: usize, column: &str, text: &str) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| {
        parse_error(
            source,
            line,
            format!("column {column}: {text:?} is not a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(parse_error(
            source,
            line,
            format!("column {column}: {text:?} is not finite"),
        ));
    }
    Ok(v)
}

/// Monthly observations from a `date,value` CSV. Dates must be the first of
/// the month and strictly increasing.
pub fn parse_cpi_csv<R: Read>(reader: R, source: &str) -> Result<Vec<(MonthStamp, f64)>> {
    let mut out: Vec<(MonthStamp, f64)> = Vec::new();
    for (line, f) in read_table(reader, source, &CPI_HEADER)? {
        let date: CivilDate = f[0]
            .parse()
            .map_err(|e: Error| parse_error(source, line, e.to_string()))?;
        if date.day() != 1 {
            return Err(parse_error(
                source,
                line,
                format!("date {date} is not the first of a month"),
            ));
        }
        let value = number(source, line, "value", &f[1])?;
        let month = date.month_stamp();
        if let Some((prev, _)) = out.last() {
            if month <= *prev {
                return Err(Error::ordering(format!(
                    "{source} line {line}: {month} does not follow {prev}"
                )));
            }
        }
        out.push((month, value));
    }
    Ok(out)
}

/// Loads a CPI file; the base index defaults to the first observation.
pub fn load_cpi_csv(path: &Path, base_index: Option<f64>) -> Result<CpiSeries> {
    let obs = parse_cpi_csv(open(path)?, &source_name(path))?;
    let base = base_index.unwrap_or(obs[0].1);
    CpiSeries::new(obs, base)
}

/// Bond quotes from a `kind,maturity_years,coupon,frequency,price,face` CSV.
/// `coupon` is an annual rate on face; `frequency` 0 marks a zero-coupon bond.
pub fn parse_quotes_csv<R: Read>(reader: R, source: &str) -> Result<Vec<CouponBondQuote>> {
    read_table(reader, source, &QUOTE_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let kind: CurveKind = f[0]
                .parse()
                .map_err(|e: Error| parse_error(source, line, e.to_string()))?;
            let frequency: u32 = f[3].parse().map_err(|_| {
                parse_error(
                    source,
                    line,
                    format!("column frequency: {:?} is not a count", f[3]),
                )
            })?;
            CouponBondQuote::from_schedule(
                kind,
                number(source, line, "maturity_years", &f[1])?,
                number(source, line, "coupon", &f[2])?,
                frequency,
                number(source, line, "price", &f[4])?,
                number(source, line, "face", &f[5])?,
            )
            .map_err(|e| parse_error(source, line, e.to_string()))
        })
        .collect()
}

pub fn load_quotes_csv(path: &Path) -> Result<Vec<CouponBondQuote>> {
    parse_quotes_csv(open(path)?, &source_name(path))
}

pub fn parse_curve_csv<R: Read>(reader: R, source: &str, kind: CurveKind) -> Result<DiscountCurve> {
    let mut times = Vec::new();
    let mut fwds = Vec::new();
    for (line, f) in read_table(reader, source, &CURVE_HEADER)? {
        times.push(number(source, line, "node_time", &f[0])?);
        fwds.push(number(source, line, "forward", &f[1])?);
    }
    DiscountCurve::new(kind, times, fwds)
}

pub fn load_curve_csv(path: &Path, kind: CurveKind) -> Result<DiscountCurve> {
    parse_curve_csv(open(path)?, &source_name(path), kind)
}

/// Writes a header and rows of displayable cells.
pub fn write_table<W: Write, I, R>(out: W, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: ToString,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(|c| c.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv<W: Write>(out: W, curve: &DiscountCurve) -> Result<()> {
    let rows = curve
        .node_times()
        .iter()
        .zip(curve.forward_values())
        .map(|(t, f)| [*t, *f]);
    write_table(out, &CURVE_HEADER, rows)
}

/// One row per path and grid time.
pub fn write_paths_csv<W: Write>(out: W, times: &[f64], paths: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PATH_HEADER)?;
    for (id, path) in paths.iter().enumerate() {
        for (t, v) in times.iter().zip(path) {
            w.write_record([id.to_string(), t.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpi_examples() {
        let ok = "date,value\n2006-01-01,198.3\n2006-02-01,198.7\n2006-03-01,199.8\n";
        let obs = parse_cpi_csv(ok.as_bytes(), "cpi.csv").unwrap();
        assert_eq!(obs.len(), 3);
        assert_eq!(obs[2], (MonthStamp::new(2006, 3), 199.8));

        let shuffled = "date,value\n2006-01-01,198.3\n2006-03-01,199.8\n2006-02-01,198.7\n";
        match parse_cpi_csv(shuffled.as_bytes(), "cpi.csv") {
            Err(Error::Ordering(m)) => assert!(m.contains("line 4"), "{m}"),
            other => panic!("{other:?}"),
        }

        let missing = "date\n2006-01-01\n";
        match parse_cpi_csv(missing.as_bytes(), "cpi.csv") {
            Err(Error::Parse {
                line: 1, message, ..
            }) => assert!(message.contains("date,value")),
            other => panic!("{other:?}"),
        }

        let bad = "date,value\n2006-01-01,198.3\n2006-02-01,abc\n";
        assert!(matches!(
            parse_cpi_csv(bad.as_bytes(), "x"),
            Err(Error::Parse { line: 3, .. })
        ));
        let mid_month = "date,value\n2006-01-15,198.3\n";
        assert!(matches!(
            parse_cpi_csv(mid_month.as_bytes(), "x"),
            Err(Error::Parse { line: 2, .. })
        ));
        let ragged = "date,value\n2006-01-01,198.3,1\n";
        assert!(matches!(
            parse_cpi_csv(ragged.as_bytes(), "x"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_cpi_csv("date,value\n".as_bytes(), "x"),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn quote_examples() {
        let text = "kind,maturity_years,coupon,frequency,price,face\n\
                    nominal,1,0,0,98,100\n\
                    real,2,0.02,2,101.5,100\n";
        let q = parse_quotes_csv(text.as_bytes(), "q.csv").unwrap();
        assert_eq!(q[0].payment_times, vec![1.0]);
        assert_eq!(q[1].kind, CurveKind::Real);
        assert_eq!(q[1].payment_times, vec![0.5, 1.0, 1.5, 2.0]);
        assert!((q[1].coupon - 1.0).abs() < 1e-15);
        let bad = "kind,maturity_years,coupon,frequency,price,face\nother,1,0,0,98,100\n";
        assert!(matches!(
            parse_quotes_csv(bad.as_bytes(), "q.csv"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn curve_round_trip() {
        let curve =
            DiscountCurve::new(CurveKind::Real, vec![1.0, 2.5], vec![0.011, -0.002]).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &curve).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "node_time,forward\n1,0.011\n2.5,-0.002\n"
        );
        assert_eq!(
            parse_curve_csv(buf.as_slice(), "c", CurveKind::Real).unwrap(),
            curve
        );
    }

    #[test]
    fn path_dump() {
        let mut buf = Vec::new();
        write_paths_csv(&mut buf, &[0.0, 0.5], &[vec![1.0, 1.1], vec![1.0, 0.9]]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "path_id,t,value\n0,0,1\n0,0.5,1.1\n1,0,1\n1,0.5,0.9\n"
        );
    }
}
