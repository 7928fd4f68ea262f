//! JSON and CSV renderings of run reports and benchmark sweeps.

use std::io::{self, Write};

use kcore::RunReport;

pub const SUPERSTEP_CSV_HEADER: &str =
    "superstep,active_vertices,messages_sent,vertices_updated,pct_updated";
pub const BENCH_CSV_HEADER: &str =
    "dataset,workers,partitions,repeat,wall_ms,supersteps,total_messages";

/// Rounds to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// The report as one JSON object, keys in field order, with a trailing
/// newline.
pub fn emit_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serialisable");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> serde_json::Result<RunReport> {
    serde_json::from_str(text)
}

fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Per-superstep series, one row per superstep.
pub fn emit_superstep_csv(report: &RunReport) -> String {
    let mut w = csv_writer(Vec::new());
    w.write_record(SUPERSTEP_CSV_HEADER.split(','))
        .expect("in-memory write");
    for s in &report.per_superstep {
        w.write_record([
            s.superstep.to_string(),
            s.active_vertices.to_string(),
            s.messages_sent.to_string(),
            s.vertices_updated.to_string(),
            format!("{:?}", s.pct_updated),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// One timed run within a benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub workers: u64,
    pub partitions: u64,
    pub repeat: u32,
    pub wall_ms: f64,
    pub supersteps: u64,
    pub total_messages: u64,
}

impl BenchRow {
    pub fn from_report(report: &RunReport, repeat: u32) -> Self {
        Self {
            dataset: report.dataset.clone(),
            workers: report.workers,
            partitions: report.partitions,
            repeat,
            wall_ms: report.wall_ms,
            supersteps: report.supersteps,
            total_messages: report.total_messages,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("a benchmark CSV needs at least one row")]
pub struct NoRows;

/// Streams benchmark rows, flushing after each so an interrupted sweep keeps
/// the rows it finished.
pub struct BenchCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> BenchCsvWriter<W> {
    pub fn new(sink: W) -> io::Result<Self> {
        let mut inner = csv_writer(sink);
        inner
            .write_record(BENCH_CSV_HEADER.split(','))
            .map_err(into_io)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write_row(&mut self, row: &BenchRow) -> io::Result<()> {
        self.inner
            .write_record([
                row.dataset.clone(),
                row.workers.to_string(),
                row.partitions.to_string(),
                row.repeat.to_string(),
                format!("{:?}", row.wall_ms),
                row.supersteps.to_string(),
                row.total_messages.to_string(),
            ])
            .map_err(into_io)?;
        self.inner.flush()
    }

    pub fn into_inner(self) -> io::Result<W> {
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

pub fn emit_bench_csv(rows: &[BenchRow]) -> Result<String, NoRows> {
    if rows.is_empty() {
        return Err(NoRows);
    }
    let mut w = BenchCsvWriter::new(Vec::new()).expect("in-memory write");
    for row in rows {
        w.write_row(row).expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kcore::{decompose, normalize, EdgeList, EngineConfig, Graph, Serial};

    fn report_for(edges: &[(u64, u64)]) -> RunReport {
        let g = normalize(&EdgeList::new(edges.to_vec()));
        decompose(&g, &EngineConfig::default(), &Serial).unwrap().1
    }

    fn row(workers: u64, repeat: u32) -> BenchRow {
        BenchRow {
            dataset: "g".into(),
            workers,
            partitions: workers,
            repeat,
            wall_ms: 1.25,
            supersteps: 4,
            total_messages: 10,
        }
    }

    #[test]
    fn json_of_empty_graph() {
        let r = decompose(&Graph::default(), &EngineConfig::default(), &Serial)
            .unwrap()
            .1;
        let v: serde_json::Value = serde_json::from_str(&emit_json(&r)).unwrap();
        assert_eq!(v["n"], 0);
        assert_eq!(v["per_superstep"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn json_keys_follow_field_order() {
        let text = emit_json(&report_for(&[(0, 1), (1, 2), (2, 0)]));
        assert!(text.contains("\"k_max\": 2"));
        let keys = [
            "dataset",
            "n",
            "m",
            "supersteps",
            "total_messages",
            "avg_updates_per_vertex",
            "k_max",
            "k_avg",
            "wall_ms",
            "workers",
            "partitions",
            "per_superstep",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_round_trip() {
        let mut r = report_for(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 0)]);
        r.dataset = "square \"with\" chord".into();
        r.wall_ms = round_sig6(12.3456789);
        assert_eq!(parse_json(&emit_json(&r)).unwrap(), r);
    }

    #[test]
    fn superstep_csv_for_triangle() {
        let csv = emit_superstep_csv(&report_for(&[(0, 1), (1, 2), (2, 0)]));
        assert_eq!(
            csv,
            "superstep,active_vertices,messages_sent,vertices_updated,pct_updated\n\
             0,3,6,0,0.0\n\
             1,3,0,0,0.0\n\
             2,0,0,0,0.0\n"
        );
    }

    #[test]
    fn superstep_csv_for_empty_graph() {
        let r = decompose(&Graph::default(), &EngineConfig::default(), &Serial)
            .unwrap()
            .1;
        let csv = emit_superstep_csv(&r);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn bench_csv_rows() {
        let one = emit_bench_csv(&[row(1, 1)]).unwrap();
        assert_eq!(one, format!("{BENCH_CSV_HEADER}\ng,1,1,1,1.25,4,10\n"));

        let sweep: Vec<BenchRow> = [1, 2, 4]
            .iter()
            .flat_map(|&w| (1..=3).map(move |r| row(w, r)))
            .collect();
        assert_eq!(emit_bench_csv(&sweep).unwrap().lines().count(), 10);
        assert!(emit_bench_csv(&[]).is_err());
    }

    #[test]
    fn dataset_names_are_quoted() {
        let mut r = row(1, 1);
        r.dataset = "a,b".into();
        assert!(emit_bench_csv(&[r]).unwrap().contains("\"a,b\",1"));
    }

    #[test]
    fn sig6() {
        assert_eq!(round_sig6(12.3456789), 12.3457);
        assert_eq!(round_sig6(0.000123456789), 0.000123457);
        assert_eq!(round_sig6(0.0), 0.0);
        assert_eq!(round_sig6(1234567.0), 1234570.0);
    }
}
