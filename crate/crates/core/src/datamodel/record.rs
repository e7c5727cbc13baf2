//! Business-record representation and CSV ingestion.

use crate::{Error, Result};
use chrono::NaiveDate;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// One business observation.
#[derive(Debug, Clone, PartialEq)]
pub struct BusinessRecord {
    pub id: String,
    pub category: String,
    pub zip: String,
    /// Price tier, 1 (cheap) through 4 (most expensive).
    pub price: u8,
    /// Average star rating in [1, 5].
    pub rating: f64,
    /// Review count; zero-review records are filtered at ingestion.
    pub n_reviews: u32,
    pub is_closed: bool,
    pub is_groupon: bool,
    /// Proxy for the closing date of a closed business.
    pub last_review_date: Option<NaiveDate>,
}

impl BusinessRecord {
    /// Checks the record invariants, returning the violation if any.
    pub fn check(&self) -> std::result::Result<(), SkipReason> {
        if !(1..=4).contains(&self.price) {
            return Err(SkipReason::PriceOutOfRange(self.price));
        }
        if !(1.0..=5.0).contains(&self.rating) {
            return Err(SkipReason::RatingOutOfRange(self.rating));
        }
        if self.n_reviews == 0 {
            return Err(SkipReason::ZeroReviews);
        }
        Ok(())
    }
}

/// Maps record fields to CSV column names. Defaults to the canonical
/// header: id, category, zip, price, rating, n_reviews, is_closed,
/// is_groupon, last_review_date.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub id: String,
    pub category: String,
    pub zip: String,
    pub price: String,
    pub rating: String,
    pub n_reviews: String,
    pub is_closed: String,
    pub is_groupon: String,
    pub last_review_date: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            id: "id".into(),
            category: "category".into(),
            zip: "zip".into(),
            price: "price".into(),
            rating: "rating".into(),
            n_reviews: "n_reviews".into(),
            is_closed: "is_closed".into(),
            is_groupon: "is_groupon".into(),
            last_review_date: "last_review_date".into(),
        }
    }
}

impl CsvSchema {
    fn columns(&self) -> [(&str, &str); 9] {
        [
            ("id", &self.id),
            ("category", &self.category),
            ("zip", &self.zip),
            ("price", &self.price),
            ("rating", &self.rating),
            ("n_reviews", &self.n_reviews),
            ("is_closed", &self.is_closed),
            ("is_groupon", &self.is_groupon),
            ("last_review_date", &self.last_review_date),
        ]
    }
}

/// Why a row was dropped during ingestion.
#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    ZeroReviews,
    PriceOutOfRange(u8),
    RatingOutOfRange(f64),
    BadField { field: &'static str, value: String },
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::ZeroReviews => write!(f, "zero reviews"),
            SkipReason::PriceOutOfRange(p) => write!(f, "price {p} outside 1..=4"),
            SkipReason::RatingOutOfRange(r) => write!(f, "rating {r} outside [1,5]"),
            SkipReason::BadField { field, value } => {
                write!(f, "unparseable {field} value `{value}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub line: u64,
    pub reason: SkipReason,
}

/// Ingestion summary: rows read, records kept and per-row skip reasons.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub rows_read: usize,
    pub records_loaded: usize,
    pub skipped: Vec<SkippedRow>,
}

impl IngestReport {
    pub fn skip_count(&self) -> usize {
        self.skipped.len()
    }
}

fn field<'a>(
    row: &'a csv::StringRecord,
    idx: &HashMap<&str, usize>,
    name: &'static str,
) -> &'a str {
    row.get(idx[name]).unwrap_or("").trim()
}

fn parse_flag(field_name: &'static str, raw: &str) -> std::result::Result<bool, SkipReason> {
    match raw {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(SkipReason::BadField {
            field: field_name,
            value: raw.to_string(),
        }),
    }
}

/// Loads business records from a headered CSV file.
///
/// Structural problems (missing mandatory columns, malformed CSV) are hard
/// errors; rows that parse but violate the record invariants are skipped
/// and reported.
pub fn load_csv<P: AsRef<Path>>(
    path: P,
    schema: &CsvSchema,
) -> Result<(Vec<BusinessRecord>, IngestReport)> {
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(csv_error)?;
    let headers = reader.headers().map_err(csv_error)?.clone();

    let mut idx = HashMap::new();
    for (key, column) in schema.columns() {
        match headers.iter().position(|h| h == column) {
            Some(i) => {
                idx.insert(key, i);
            }
            None => return Err(Error::MissingColumn(column.to_string())),
        }
    }

    let mut records = Vec::new();
    let mut report = IngestReport::default();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        report.rows_read += 1;
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, &idx) {
            Ok(record) => match record.check() {
                Ok(()) => {
                    records.push(record);
                    report.records_loaded += 1;
                }
                Err(reason) => report.skipped.push(SkippedRow { line, reason }),
            },
            Err(reason) => report.skipped.push(SkippedRow { line, reason }),
        }
    }
    Ok((records, report))
}

fn parse_row(
    row: &csv::StringRecord,
    idx: &HashMap<&str, usize>,
) -> std::result::Result<BusinessRecord, SkipReason> {
    let bad = |field: &'static str, value: &str| SkipReason::BadField {
        field,
        value: value.to_string(),
    };

    let price_raw = field(row, idx, "price");
    let price: u8 = price_raw.parse().map_err(|_| bad("price", price_raw))?;
    let rating_raw = field(row, idx, "rating");
    let rating: f64 = rating_raw.parse().map_err(|_| bad("rating", rating_raw))?;
    let reviews_raw = field(row, idx, "n_reviews");
    let n_reviews: u32 = reviews_raw
        .parse()
        .map_err(|_| bad("n_reviews", reviews_raw))?;
    let is_closed = parse_flag("is_closed", field(row, idx, "is_closed"))?;
    let is_groupon = parse_flag("is_groupon", field(row, idx, "is_groupon"))?;
    let date_raw = field(row, idx, "last_review_date");
    let last_review_date = if date_raw.is_empty() {
        None
    } else {
        Some(
            date_raw
                .parse::<NaiveDate>()
                .map_err(|_| bad("last_review_date", date_raw))?,
        )
    };

    Ok(BusinessRecord {
        id: field(row, idx, "id").to_string(),
        category: field(row, idx, "category").to_string(),
        zip: field(row, idx, "zip").to_string(),
        price,
        rating,
        n_reviews,
        is_closed,
        is_groupon,
        last_review_date,
    })
}

fn csv_error(err: csv::Error) -> Error {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    Error::Csv {
        line,
        message: err.to_string(),
    }
}

/// Writes records back out in the canonical column order; floats use the
/// shortest round-trip representation so reloading is bit-exact.
pub fn write_records_csv<P: AsRef<Path>>(path: P, records: &[BusinessRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_error)?;
    writer
        .write_record([
            "id",
            "category",
            "zip",
            "price",
            "rating",
            "n_reviews",
            "is_closed",
            "is_groupon",
            "last_review_date",
        ])
        .map_err(csv_error)?;
    for r in records {
        writer
            .write_record([
                r.id.as_str(),
                r.category.as_str(),
                r.zip.as_str(),
                &r.price.to_string(),
                &r.rating.to_string(),
                &r.n_reviews.to_string(),
                if r.is_closed { "1" } else { "0" },
                if r.is_groupon { "1" } else { "0" },
                &r.last_review_date.map_or(String::new(), |d| d.to_string()),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}
