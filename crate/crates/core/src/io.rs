//! Price CSV ingestion and CSV/JSON report writers.
//!
//! Input prices are `date,price` with a header row and ISO-8601 dates.
//! Numeric CSV output uses 17 significant digits so values survive a
//! write/read round trip exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::SimulatedPath;

/// Column order of simulated path CSV files.
pub const PATH_COLUMNS: [&str; 7] = ["t", "B", "RB", "sigma", "eta", "r", "P"];
/// Column order of filter CSV files.
pub const FILTER_COLUMNS: [&str; 6] = ["t", "r", "B_hat", "RB", "sigma_hat", "loglik_term"];

/// Dated price series with strictly increasing dates and positive prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::Input(format!("{} dates but {} prices", dates.len(), prices.len())));
        }
        if prices.len() < 2 {
            return Err(Error::Input(format!("need at least 2 prices, got {}", prices.len())));
        }
        for (i, p) in prices.iter().enumerate() {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::Input(format!("price at row {} must be positive, got {p}", i + 1)));
            }
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Input(format!("dates must be strictly increasing at row {}", i + 2)));
            }
        }
        Ok(Self { dates, prices })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Simple returns, see [`prices_to_returns`].
    pub fn returns(&self) -> Vec<f64> {
        prices_to_returns(&self.prices)
    }
}

/// `r(t) = P(t) / P(t-1) - 1`; one shorter than the input.
pub fn prices_to_returns(prices: &[f64]) -> Vec<f64> {
    prices.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
}

fn headers_lower(reader: &mut csv::Reader<impl Read>) -> Result<Vec<String>> {
    Ok(reader.headers()?.iter().map(|h| h.trim().to_ascii_lowercase()).collect())
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> u64 {
    record.position().map_or(fallback as u64, |p| p.line())
}

/// Parses a `date,price` CSV. Errors name the offending file line (the
/// header is line 1).
pub fn read_prices(input: impl Read) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = headers_lower(&mut reader)?;
    if headers != ["date", "price"] {
        return Err(Error::Input(format!("expected header `date,price`, got `{}`", headers.join(","))));
    }
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut prices = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record, i + 2);
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| Error::Input(format!("line {line}: invalid ISO-8601 date `{}`: {e}", &record[0])))?;
        let price: f64 = record[1]
            .parse()
            .map_err(|_| Error::Input(format!("line {line}: price `{}` is not a number", &record[1])))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::Input(format!("line {line}: price must be positive, got {price}")));
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(Error::Input(format!("line {line}: date {date} does not follow {prev}")));
            }
        }
        dates.push(date);
        prices.push(price);
    }
    if prices.len() < 2 {
        return Err(Error::Input(format!("need at least 2 price rows, got {}", prices.len())));
    }
    Ok(PriceSeries { dates, prices })
}

pub fn load_prices(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::File { path: path.to_owned(), message: e.to_string() })?;
    read_prices(file).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// A return series read from disk, with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReturnSource {
    /// Computed from a `date,price` file.
    Prices(PriceSeries),
    /// Taken verbatim from the `r` column of a simulated path or filter file.
    Returns,
}

/// Reads returns from either a `date,price` file or any CSV with an `r`
/// column (such as a simulated path).
pub fn read_returns(mut input: impl Read) -> Result<(Vec<f64>, ReturnSource)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = headers_lower(&mut reader)?;
    if headers == ["date", "price"] {
        let prices = read_prices(text.as_bytes())?;
        return Ok((prices.returns(), ReturnSource::Prices(prices)));
    }
    let Some(col) = headers.iter().position(|h| h == "r") else {
        return Err(Error::Input(format!(
            "expected a `date,price` header or an `r` column, got `{}`",
            headers.join(",")
        )));
    };
    let mut returns = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record, i + 2);
        let field = record.get(col).ok_or_else(|| Error::Input(format!("line {line}: missing `r` field")))?;
        let r: f64 = field.parse().map_err(|_| Error::Input(format!("line {line}: return `{field}` is not a number")))?;
        if !r.is_finite() {
            return Err(Error::Input(format!("line {line}: return is not finite")));
        }
        returns.push(r);
    }
    if returns.is_empty() {
        return Err(Error::Input("no return rows".into()));
    }
    Ok((returns, ReturnSource::Returns))
}

pub fn load_returns(path: impl AsRef<Path>) -> Result<(Vec<f64>, ReturnSource)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::File { path: path.to_owned(), message: e.to_string() })?;
    read_returns(file).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_path_csv(path: &SimulatedPath, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PATH_COLUMNS)?;
    for t in 0..path.len() {
        w.write_record([
            (t + 1).to_string(),
            fmt_f64(path.bullishness[t]),
            fmt_f64(path.sentiment_return[t]),
            fmt_f64(path.sigma[t]),
            fmt_f64(path.eta[t]),
            fmt_f64(path.r[t]),
            fmt_f64(path.price[t]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_filter_csv(returns: &[f64], output: &FilterOutput, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FILTER_COLUMNS)?;
    for t in 0..output.b_hat.len() {
        w.write_record([
            (t + 1).to_string(),
            fmt_f64(returns[t]),
            fmt_f64(output.b_hat[t]),
            fmt_f64(output.sentiment_return[t]),
            fmt_f64(output.sigma_hat[t]),
            fmt_f64(output.loglik_terms[t]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(value: &T, mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Creates (or truncates) `path` and hands a buffered writer to `body`.
pub fn write_file(path: impl AsRef<Path>, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::File { path: path.to_owned(), message: e.to_string() })?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_valid_file() {
        let s = read_prices("date,price\n2008-11-07,100.0\n2008-11-10,98.5\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dates[0], NaiveDate::from_ymd_opt(2008, 11, 7).unwrap());
        assert!((s.returns()[0] - (98.5 / 100.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_price_names_line() {
        let err = read_prices("date,price\n2008-11-07,100.0\n2008-11-10,-98.5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unparsable_price_names_line() {
        let err = read_prices("date,price\n2008-11-07,100.0\n2008-11-10,abc\n2008-11-11,99\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn date_order_and_count() {
        let dup = "date,price\n2008-11-07,100.0\n2008-11-07,98.5\n";
        assert!(read_prices(dup.as_bytes()).unwrap_err().to_string().contains("line 3"));
        let dec = "date,price\n2008-11-07,100.0\n2008-11-06,98.5\n";
        assert!(read_prices(dec.as_bytes()).is_err());
        assert!(read_prices("date,price\n2008-11-07,100.0\n".as_bytes()).is_err());
        assert!(read_prices("day,close\n2008-11-07,100.0\n2008-11-08,1\n".as_bytes()).is_err());
        assert!(read_prices("date,price\n7/11/2008,100.0\n8/11/2008,1\n".as_bytes()).is_err());
    }

    #[test]
    fn returns_examples() {
        assert_eq!(prices_to_returns(&[100.0, 110.0]).len(), 1);
        assert!((prices_to_returns(&[100.0, 110.0])[0] - 0.1).abs() < 1e-15);
        assert_eq!(prices_to_returns(&[5.0, 5.0, 5.0]), vec![0.0, 0.0]);
        assert_eq!(prices_to_returns(&[100.0, 50.0, 100.0]), vec![-0.5, 1.0]);
    }

    #[test]
    fn series_constructor_validates() {
        let d = |day| NaiveDate::from_ymd_opt(2020, 1, day).unwrap();
        assert!(PriceSeries::new(vec![d(1), d(2)], vec![1.0, 2.0]).is_ok());
        assert!(PriceSeries::new(vec![d(2), d(1)], vec![1.0, 2.0]).is_err());
        assert!(PriceSeries::new(vec![d(1), d(2)], vec![1.0, 0.0]).is_err());
        assert!(PriceSeries::new(vec![d(1)], vec![1.0]).is_err());
    }

    #[test]
    fn returns_from_r_column() {
        let text = "t,B,RB,sigma,eta,r,P\n1,0.5,0,0.01,0.02,2.0000000000000000e-2,102\n";
        let (r, src) = read_returns(text.as_bytes()).unwrap();
        assert_eq!(r, vec![0.02]);
        assert_eq!(src, ReturnSource::Returns);
        assert!(read_returns("x,y\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
    }
}
