use std::collections::HashMap;
use std::io::{Read, Write};

use super::WeatherRecord;
use crate::error::{Error, Result};

/// The seven columns every weather log must provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Timestamp,
    Radiation,
    Temperature,
    Pressure,
    Humidity,
    WindDirection,
    WindSpeed,
}

impl Field {
    pub const ALL: [Field; 7] = [
        Field::Timestamp,
        Field::Radiation,
        Field::Temperature,
        Field::Pressure,
        Field::Humidity,
        Field::WindDirection,
        Field::WindSpeed,
    ];

    /// Key used in schema files.
    pub fn key(self) -> &'static str {
        match self {
            Field::Timestamp => "timestamp",
            Field::Radiation => "radiation",
            Field::Temperature => "temperature",
            Field::Pressure => "pressure",
            Field::Humidity => "humidity",
            Field::WindDirection => "wind_direction",
            Field::WindSpeed => "wind_speed",
        }
    }

    /// Column name used by the HI-SEAS export.
    pub fn default_column(self) -> &'static str {
        match self {
            Field::Timestamp => "UNIXTime",
            Field::Radiation => "Radiation",
            Field::Temperature => "Temperature",
            Field::Pressure => "Pressure",
            Field::Humidity => "Humidity",
            Field::WindDirection => "WindDirection(Degrees)",
            Field::WindSpeed => "Speed",
        }
    }

    fn from_key(key: &str) -> Option<Field> {
        Field::ALL
            .into_iter()
            .find(|f| f.key().eq_ignore_ascii_case(key) || f.default_column() == key)
    }
}

/// Maps each [`Field`] to the header name it appears under in a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: [String; 7],
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            columns: Field::ALL.map(|f| f.default_column().to_string()),
        }
    }
}

impl Schema {
    pub fn column(&self, field: Field) -> &str {
        &self.columns[field as usize]
    }

    pub fn with_column(mut self, field: Field, name: impl Into<String>) -> Self {
        self.columns[field as usize] = name.into();
        self
    }

    /// Parses a `key=value` schema file. Blank lines and `#` comments are
    /// ignored; fields not mentioned keep their default column names.
    ///
    /// ```text
    /// # remap a differently-named export
    /// radiation = GHI
    /// wind_speed = WindSpeed
    /// ```
    pub fn parse(text: &str) -> Result<Schema> {
        let mut schema = Schema::default();
        let mut seen = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Schema(format!("line {lineno}: expected key=value, got {line:?}"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let field = Field::from_key(key)
                .ok_or_else(|| Error::Schema(format!("line {lineno}: unknown field {key:?}")))?;
            if value.is_empty() {
                return Err(Error::Schema(format!(
                    "line {lineno}: empty column name for {}",
                    field.key()
                )));
            }
            if let Some(prev) = seen.insert(field, lineno) {
                return Err(Error::Schema(format!(
                    "line {lineno}: {} already mapped on line {prev}",
                    field.key()
                )));
            }
            schema.columns[field as usize] = value.to_string();
        }
        Ok(schema)
    }
}

/// Reads a header-bearing CSV weather log. Records come back in file order.
///
/// Extra columns are ignored. Humidity above 100 % is saturated to 100 and
/// wind direction is wrapped into [0, 360); every other out-of-domain or
/// unparseable cell is a row error.
pub fn parse_csv<R: Read>(source: R, schema: &Schema) -> Result<Vec<WeatherRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let headers = reader.byte_headers().map_err(csv_error)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput("CSV has no header row".into()));
    }
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let h = if i == 0 {
                h.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(h)
            } else {
                h
            };
            String::from_utf8_lossy(h).trim().to_string()
        })
        .collect();

    let mut index = [0usize; 7];
    for field in Field::ALL {
        let wanted = schema.column(field);
        index[field as usize] = names.iter().position(|n| n == wanted).ok_or_else(|| {
            Error::Schema(format!(
                "missing required column {wanted:?} ({})",
                field.key()
            ))
        })?;
    }

    let mut out = Vec::new();
    let mut row = csv::ByteRecord::new();
    loop {
        match reader.read_byte_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(e)),
        }
        let line = row.position().map_or(0, |p| p.line());
        out.push(decode_row(&row, &index, schema, line)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput(
            "CSV has a header but no data rows".into(),
        ));
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Row {
            line,
            column: "<record>".into(),
            message: format!("{other:?}"),
        },
    }
}

fn decode_row(
    row: &csv::ByteRecord,
    index: &[usize; 7],
    schema: &Schema,
    line: u64,
) -> Result<WeatherRecord> {
    let row_err = |field: Field, message: String| Error::Row {
        line,
        column: schema.column(field).to_string(),
        message,
    };
    let cell = |field: Field| -> Result<&str> {
        let raw = row
            .get(index[field as usize])
            .ok_or_else(|| row_err(field, "missing cell".into()))?;
        let text = std::str::from_utf8(raw)
            .map_err(|_| row_err(field, "cell is not valid UTF-8".into()))?
            .trim();
        if text.is_empty() {
            return Err(row_err(field, "blank cell".into()));
        }
        Ok(text)
    };
    let real = |field: Field| -> Result<f64> {
        let text = cell(field)?;
        let v: f64 = text
            .parse()
            .map_err(|_| row_err(field, format!("cannot parse {text:?} as a number")))?;
        if !v.is_finite() {
            return Err(row_err(field, format!("non-finite value {text:?}")));
        }
        Ok(v)
    };

    let ts_text = cell(Field::Timestamp)?;
    let timestamp: i64 = ts_text.parse().map_err(|_| {
        row_err(
            Field::Timestamp,
            format!("cannot parse {ts_text:?} as integer seconds"),
        )
    })?;

    let radiation = real(Field::Radiation)?;
    if radiation < 0.0 {
        return Err(row_err(
            Field::Radiation,
            format!("negative radiation {radiation}"),
        ));
    }
    let humidity = real(Field::Humidity)?;
    if humidity < 0.0 {
        return Err(row_err(
            Field::Humidity,
            format!("negative humidity {humidity}"),
        ));
    }
    let mut wind_direction = real(Field::WindDirection)?.rem_euclid(360.0);
    if wind_direction >= 360.0 {
        wind_direction = 0.0;
    }

    Ok(WeatherRecord {
        timestamp,
        radiation,
        temperature: real(Field::Temperature)?,
        pressure: real(Field::Pressure)?,
        humidity: humidity.min(100.0),
        wind_direction,
        wind_speed: real(Field::WindSpeed)?,
    })
}

/// Writes records with full round-trip precision under the schema's column names.
pub fn write_csv<W: Write>(records: &[WeatherRecord], schema: &Schema, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let header: Vec<&str> = Field::ALL.iter().map(|&f| schema.column(f)).collect();
    w.write_record(&header).map_err(csv_error)?;
    for r in records {
        w.write_record(&[
            r.timestamp.to_string(),
            r.radiation.to_string(),
            r.temperature.to_string(),
            r.pressure.to_string(),
            r.humidity.to_string(),
            r.wind_direction.to_string(),
            r.wind_speed.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
