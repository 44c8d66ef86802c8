//! Three-column CSV tables: a `# params:` comment line, a column header, then
//! rows printed with 17 significant digits so they parse back bit for bit.

use std::fmt::{self, Write as _};
use std::io::Write;

/// A non-finite value was about to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct NonFiniteValue {
    pub row: usize,
    pub value: f64,
}

impl fmt::Display for NonFiniteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "refusing to write non-finite value {} in row {}", self.value, self.row)
    }
}

impl std::error::Error for NonFiniteValue {}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    columns: [String; 3],
    params: Vec<(String, String)>,
    rows: Vec<[f64; 3]>,
}

impl DensityTable {
    /// Table with the usual `x,t,value` columns.
    pub fn new() -> Self {
        Self::with_columns(["x", "t", "value"])
    }

    pub fn with_columns(columns: [&str; 3]) -> Self {
        DensityTable {
            columns: columns.map(String::from),
            params: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, a: f64, b: f64, value: f64) {
        self.rows.push([a, b, value]);
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    /// The complete file; fails before producing anything if a value is not finite.
    pub fn to_csv(&self) -> Result<String, NonFiniteValue> {
        let mut out = String::with_capacity(64 * (self.rows.len() + 2));
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str("# params: ");
        out.push_str(&params.join(";"));
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(NonFiniteValue { row: i, value: *v });
            }
            writeln!(out, "{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2]).expect("writing to a String");
        }
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> anyhow::Result<()> {
        let text = self.to_csv()?;
        out.write_all(text.as_bytes())?;
        out.flush()?;
        Ok(())
    }

    /// Inverse of [`DensityTable::to_csv`].
    pub fn parse_csv(text: &str) -> Option<Self> {
        let mut lines = text.split('\n');
        let params = lines.next()?.strip_prefix("# params: ")?;
        let params = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(';')
                .map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
                .collect::<Option<Vec<_>>>()?
        };
        let cols: Vec<String> = lines.next()?.split(',').map(String::from).collect();
        let columns: [String; 3] = cols.try_into().ok()?;
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let v: Vec<f64> = line.split(',').map(|f| f.parse().ok()).collect::<Option<_>>()?;
            rows.push(v.try_into().ok()?);
        }
        Some(DensityTable { columns, params, rows })
    }
}

impl Default for DensityTable {
    fn default() -> Self {
        Self::new()
    }
}
