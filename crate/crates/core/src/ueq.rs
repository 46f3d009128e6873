//! User Experience Questionnaire scoring.
//!
//! Answers are 1..=7 on 26 semantic-differential items. Each item is mapped
//! onto −3..=+3 so that +3 is always the positive pole, averaged into six
//! scales per participant, and then aggregated over participants and
//! compared with the published benchmark borders.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ITEM_COUNT: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scale {
    Attractiveness,
    Perspicuity,
    Efficiency,
    Dependability,
    Stimulation,
    Novelty,
}

impl Scale {
    pub const ALL: [Scale; 6] = [
        Scale::Attractiveness,
        Scale::Perspicuity,
        Scale::Efficiency,
        Scale::Dependability,
        Scale::Stimulation,
        Scale::Novelty,
    ];

    pub fn items(self) -> &'static [usize] {
        match self {
            Scale::Attractiveness => &[1, 12, 14, 16, 24, 25],
            Scale::Perspicuity => &[2, 4, 13, 21],
            Scale::Efficiency => &[9, 20, 22, 23],
            Scale::Dependability => &[8, 11, 17, 19],
            Scale::Stimulation => &[5, 6, 7, 18],
            Scale::Novelty => &[3, 10, 15, 26],
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pole {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemMeta {
    pub index: usize,
    pub scale: Scale,
    pub positive_pole: Pole,
}

/// Items whose left-hand adjective is the positive one.
const LEFT_POSITIVE: [usize; 13] = [3, 4, 5, 9, 10, 12, 17, 18, 19, 21, 23, 24, 25];

pub fn item_meta(index: usize) -> Option<ItemMeta> {
    if !(1..=ITEM_COUNT).contains(&index) {
        return None;
    }
    let scale = Scale::ALL.into_iter().find(|s| s.items().contains(&index))?;
    let positive_pole = if LEFT_POSITIVE.contains(&index) {
        Pole::Left
    } else {
        Pole::Right
    };
    Some(ItemMeta {
        index,
        scale,
        positive_pole,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UeqError {
    #[error("a response needs {ITEM_COUNT} items, got {0}")]
    WrongItemCount(usize),
    #[error("item {item} has value {value}, expected 1 to 7")]
    OutOfRange { item: usize, value: i64 },
    #[error("at least 2 responses are needed, got {0}")]
    TooFewResponses(usize),
    #[error("cannot read questionnaire table: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UeqResponse {
    values: Vec<u8>,
}

impl UeqResponse {
    pub fn new(values: Vec<i64>) -> Result<Self, UeqError> {
        if values.len() != ITEM_COUNT {
            return Err(UeqError::WrongItemCount(values.len()));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(1..=7).contains(*v)) {
            return Err(UeqError::OutOfRange { item: i + 1, value: v });
        }
        Ok(UeqResponse {
            values: values.into_iter().map(|v| v as u8).collect(),
        })
    }

    /// Raw value of item `index` (1-based).
    pub fn item(&self, index: usize) -> u8 {
        self.values[index - 1]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }
}

pub fn transform_value(meta: ItemMeta, raw: u8) -> i8 {
    match meta.positive_pole {
        Pole::Right => raw as i8 - 4,
        Pole::Left => 4 - raw as i8,
    }
}

pub fn inverse_transform_value(meta: ItemMeta, score: i8) -> u8 {
    match meta.positive_pole {
        Pole::Right => (score + 4) as u8,
        Pole::Left => (4 - score) as u8,
    }
}

pub fn transform_response(resp: &UeqResponse) -> [i8; ITEM_COUNT] {
    let mut out = [0; ITEM_COUNT];
    for (i, slot) in out.iter_mut().enumerate() {
        let meta = item_meta(i + 1).expect("every item has a scale");
        *slot = transform_value(meta, resp.item(i + 1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleScores(pub [f64; 6]);

impl ScaleScores {
    pub fn get(&self, scale: Scale) -> f64 {
        self.0[scale.index()]
    }
}

pub fn participant_scale_scores(resp: &UeqResponse) -> ScaleScores {
    let t = transform_response(resp);
    let mut scores = [0.0; 6];
    for scale in Scale::ALL {
        let items = scale.items();
        let sum: i32 = items.iter().map(|&i| t[i - 1] as i32).sum();
        scores[scale.index()] = sum as f64 / items.len() as f64;
    }
    ScaleScores(scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Benchmark {
    Excellent,
    Good,
    AboveAverage,
    BelowAverage,
    Bad,
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Benchmark::Excellent => "Excellent",
            Benchmark::Good => "Good",
            Benchmark::AboveAverage => "Above average",
            Benchmark::BelowAverage => "Below average",
            Benchmark::Bad => "Bad",
        })
    }
}

/// Lower borders (inclusive) for Excellent, Good, Above average and Below average.
fn borders(scale: Scale) -> [f64; 4] {
    match scale {
        Scale::Attractiveness => [1.75, 1.52, 1.17, 0.7],
        Scale::Perspicuity => [1.78, 1.47, 0.98, 0.54],
        Scale::Efficiency => [1.9, 1.56, 1.08, 0.64],
        Scale::Dependability => [1.65, 1.48, 1.14, 0.78],
        Scale::Stimulation => [1.55, 1.31, 0.99, 0.5],
        Scale::Novelty => [1.4, 1.05, 0.71, 0.3],
    }
}

pub fn classify_benchmark(mean: f64, scale: Scale) -> Benchmark {
    let [excellent, good, above, below] = borders(scale);
    if mean >= excellent {
        Benchmark::Excellent
    } else if mean >= good {
        Benchmark::Good
    } else if mean >= above {
        Benchmark::AboveAverage
    } else if mean >= below {
        Benchmark::BelowAverage
    } else {
        Benchmark::Bad
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaleSummary {
    pub scale: Scale,
    pub mean: f64,
    pub variance: f64,
    pub benchmark: Benchmark,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub participants: usize,
    pub scales: Vec<ScaleSummary>,
}

impl ScaleReport {
    pub fn get(&self, scale: Scale) -> &ScaleSummary {
        &self.scales[scale.index()]
    }
}

/// Per scale: mean and sample variance (n−1) of the participants' scale means.
pub fn aggregate_scales(responses: &[UeqResponse]) -> Result<ScaleReport, UeqError> {
    if responses.len() < 2 {
        return Err(UeqError::TooFewResponses(responses.len()));
    }
    let scores: Vec<ScaleScores> = responses.iter().map(participant_scale_scores).collect();
    let n = scores.len() as f64;
    let scales = Scale::ALL
        .into_iter()
        .map(|scale| {
            let mean = scores.iter().map(|s| s.get(scale)).sum::<f64>() / n;
            let variance = scores.iter().map(|s| (s.get(scale) - mean).powi(2)).sum::<f64>() / (n - 1.0);
            ScaleSummary {
                scale,
                mean,
                variance,
                benchmark: classify_benchmark(mean, scale),
            }
        })
        .collect();
    Ok(ScaleReport {
        participants: responses.len(),
        scales,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Quartiles are medians of the lower and upper halves, each half including
/// the overall median when the count is odd. `None` for empty input.
pub fn five_number_summary(values: &[f64]) -> Option<FiveNumberSummary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let half = n.div_ceil(2);
    Some(FiveNumberSummary {
        min: v[0],
        q1: median_sorted(&v[..half]),
        median: median_sorted(&v),
        q3: median_sorted(&v[n - half..]),
        max: v[n - 1],
    })
}

pub fn box_plot(responses: &[UeqResponse]) -> Vec<(Scale, FiveNumberSummary)> {
    let scores: Vec<ScaleScores> = responses.iter().map(participant_scale_scores).collect();
    Scale::ALL
        .into_iter()
        .filter_map(|scale| {
            let values: Vec<f64> = scores.iter().map(|s| s.get(scale)).collect();
            five_number_summary(&values).map(|f| (scale, f))
        })
        .collect()
}

fn detect_delimiter(first_line: &str) -> u8 {
    [b'\t', b';', b',']
        .into_iter()
        .max_by_key(|d| first_line.bytes().filter(|b| b == d).count())
        .filter(|d| first_line.as_bytes().contains(d))
        .unwrap_or(b',')
}

fn parse_value(cell: &str, item: usize) -> Result<i64, UeqError> {
    cell.trim()
        .parse::<i64>()
        .map_err(|_| UeqError::Parse(format!("item {item}: {cell:?} is not an integer")))
}

/// Reads answers from a delimited table. Tab, semicolon and comma are
/// detected from the first line.
///
/// With a header whose first cell is `Item`, rows are items (first column the
/// item number) and every further column is a participant. Otherwise rows are
/// participants; a non-numeric first row is a header and a non-numeric first
/// column holds participant labels.
pub fn parse_responses(text: &str) -> Result<Vec<UeqResponse>, UeqError> {
    let first_line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(first_line))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| UeqError::Parse(e.to_string()))?;
        let row: Vec<String> = record.iter().map(str::to_string).collect();
        if row.iter().any(|c| !c.is_empty()) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(UeqError::Parse("no rows".into()));
    }
    let numeric = |s: &str| s.parse::<i64>().is_ok();
    let header = !rows[0].iter().all(|c| numeric(c));
    let item_rows = header && rows[0][0].to_ascii_lowercase().starts_with("item");
    let body = if header { &rows[1..] } else { &rows[..] };

    if item_rows {
        if body.len() != ITEM_COUNT {
            return Err(UeqError::WrongItemCount(body.len()));
        }
        let participants = rows[0].len() - 1;
        let mut columns = vec![Vec::with_capacity(ITEM_COUNT); participants];
        for (i, row) in body.iter().enumerate() {
            if row.len() != participants + 1 {
                return Err(UeqError::Parse(format!(
                    "item row {} has {} values, expected {participants}",
                    i + 1,
                    row.len().saturating_sub(1)
                )));
            }
            for (p, cell) in row[1..].iter().enumerate() {
                columns[p].push(parse_value(cell, i + 1)?);
            }
        }
        columns.into_iter().map(UeqResponse::new).collect()
    } else {
        body.iter()
            .map(|row| {
                let cells = if row.len() == ITEM_COUNT + 1 && (header || !numeric(&row[0])) {
                    &row[1..]
                } else {
                    &row[..]
                };
                let values = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| parse_value(c, i + 1))
                    .collect::<Result<Vec<_>, _>>()?;
                UeqResponse::new(values)
            })
            .collect()
    }
}

pub fn render_report(report: &ScaleReport, benchmark: bool, boxes: Option<&[(Scale, FiveNumberSummary)]>) -> String {
    let mut out = String::new();
    write!(out, "{:<14}  {:>6}  {:>8}", "scale", "mean", "variance").unwrap();
    if benchmark {
        write!(out, "  benchmark").unwrap();
    }
    out.push('\n');
    for s in &report.scales {
        write!(out, "{:<14}  {:>6.3}  {:>8.4}", s.scale.to_string(), s.mean, s.variance).unwrap();
        if benchmark {
            write!(out, "  {}", s.benchmark).unwrap();
        }
        out.push('\n');
    }
    if let Some(boxes) = boxes {
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<14}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}",
            "scale", "min", "q1", "median", "q3", "max"
        )
        .unwrap();
        for (scale, f) in boxes {
            writeln!(
                out,
                "{:<14}  {:>6.3}  {:>6.3}  {:>6.3}  {:>6.3}  {:>6.3}",
                scale.to_string(),
                f.min,
                f.q1,
                f.median,
                f.q3,
                f.max
            )
            .unwrap();
        }
    }
    out
}
