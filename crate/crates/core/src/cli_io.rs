//! Matrix input, result serialization and the command-line driver.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;
use crate::invariants::{
    characteristic_polynomial, mobius, rank_counts, CharPolynomial, MobiusTable,
};
use crate::matroid::DEFAULT_MAX_GROUND_SET;
use crate::oracle;
use crate::poset_builder::{self, HasseDiagram, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Dot,
    Summary,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "dot" => Ok(OutputFormat::Dot),
            "summary" => Ok(OutputFormat::Summary),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub mode: Mode,
    pub output_format: OutputFormat,
    pub compute_invariants: bool,
    pub verify: bool,
    pub max_ground_set: usize,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            input_path: input_path.into(),
            mode: Mode::Toric,
            output_format: OutputFormat::Summary,
            compute_invariants: false,
            verify: false,
            max_ground_set: DEFAULT_MAX_GROUND_SET,
        }
    }
}

/// Möbius table and characteristic polynomial, bundled for output.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub mobius: MobiusTable,
    pub char_poly: CharPolynomial,
}

impl Invariants {
    pub fn compute(h: &HasseDiagram) -> Result<Self> {
        Ok(Invariants {
            mobius: mobius(h)?,
            char_poly: characteristic_polynomial(h)?,
        })
    }
}

/// Parses whitespace-separated integers, one matrix row per line. Lines
/// starting with `#` and blank lines are skipped.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 0;
        for token in line.split_whitespace() {
            // 1-based character column of the token
            let offset = line[column..].find(token).expect("token from this line") + column;
            column = offset + token.len();
            let value = token.parse::<BigInt>().map_err(|_| Error::Parse {
                line: lineno + 1,
                column: line[..offset].chars().count() + 1,
                message: format!("`{token}` is not an integer"),
            })?;
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::RaggedRows {
                    line: lineno + 1,
                    expected: w,
                    found: row.len(),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    let cols = width.ok_or(Error::EmptyMatrix)?;
    let d = rows.len();
    IntMatrix::new(d, cols, rows.into_iter().flatten().collect())
}

fn int_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

/// Deterministic JSON: object keys are sorted, vertices by id and edges
/// lexicographically.
pub fn emit_json(h: &HasseDiagram, inv: Option<&Invariants>) -> String {
    let vertices: Vec<Value> = h
        .vertices
        .iter()
        .map(|v| {
            json!({
                "id": v.id,
                "rank": v.rank,
                "dim": v.dim,
                "max_subset": v.canonical_name.subset.indices(),
                "canonical_k": v.canonical_name.lift.iter().map(int_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<Value> = h.arcs.iter().map(|&(a, b)| json!([a, b])).collect();
    let mut root = Map::new();
    root.insert("d".into(), json!(h.d));
    root.insert("n".into(), json!(h.n));
    root.insert("mode".into(), json!(h.mode.to_string()));
    root.insert("vertices".into(), Value::Array(vertices));
    root.insert("edges".into(), Value::Array(edges));
    if let Some(inv) = inv {
        let mu: Map<String, Value> = inv
            .mobius
            .values
            .iter()
            .enumerate()
            .map(|(id, &m)| (id.to_string(), json!(m)))
            .collect();
        root.insert("mobius".into(), Value::Object(mu));
        root.insert("char_poly".into(), json!(inv.char_poly.coefficients));
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    out.push('\n');
    out
}

/// DOT digraph with one `rank=same` subgraph per rank.
pub fn emit_dot(h: &HasseDiagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph poset {{");
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box];");
    for r in 0..=h.d {
        let ids: Vec<usize> = h
            .vertices
            .iter()
            .filter(|v| v.rank == r)
            .map(|v| v.id)
            .collect();
        if ids.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  subgraph rank_{r} {{");
        let _ = writeln!(out, "    rank=same;");
        for id in ids {
            let label = h.vertices[id]
                .canonical_name
                .to_string()
                .replace('"', "\\\"");
            let _ = writeln!(out, "    v{id} [label=\"{label}\"];");
        }
        let _ = writeln!(out, "  }}");
    }
    for &(a, b) in &h.arcs {
        let _ = writeln!(out, "  v{a} -> v{b};");
    }
    let _ = writeln!(out, "}}");
    out
}

pub fn emit_summary(h: &HasseDiagram, inv: Option<&Invariants>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", h.mode);
    let _ = writeln!(out, "d = {}, n = {}", h.d, h.n);
    for (r, c) in rank_counts(h).iter().enumerate() {
        let _ = writeln!(out, "rank {r}: {c}");
    }
    let _ = writeln!(out, "vertices: {}", h.len());
    let _ = writeln!(out, "cover relations: {}", h.arcs.len());
    if let Some(inv) = inv {
        let _ = writeln!(
            out,
            "characteristic polynomial: {}",
            format_poly(&inv.char_poly)
        );
    }
    out
}

fn format_poly(p: &CharPolynomial) -> String {
    let mut terms = Vec::new();
    for (deg, &c) in p.coefficients.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        let body = match (deg, mag) {
            (0, m) => m.to_string(),
            (1, 1) => "t".to_string(),
            (1, m) => format!("{m}t"),
            (e, 1) => format!("t^{e}"),
            (e, m) => format!("{m}t^{e}"),
        };
        terms.push((sign, body));
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (sign, body)) in terms.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => s.push('-'),
            (0, _) => {}
            (_, sg) => {
                let _ = write!(s, " {sg} ");
            }
        }
        s.push_str(body);
    }
    s
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Parse, build, optionally verify, and print. Results go to `out`,
/// diagnostics to `err`; the return value is the process exit status.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.max_ground_set < 1 {
        let _ = writeln!(err, "error: --max-n must be at least 1");
        return EXIT_INPUT;
    }
    let text = match std::fs::read_to_string(&config.input_path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(
                err,
                "error: cannot read {}: {e}",
                config.input_path.display()
            );
            return EXIT_INPUT;
        }
    };
    let x = match parse_matrix(&text) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let h = match poset_builder::build(&x, config.mode, config.max_ground_set) {
        Ok(h) => h,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let inv = if config.compute_invariants {
        match Invariants::compute(&h) {
            Ok(i) => Some(i),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        None
    };
    if config.verify {
        let reference = match config.mode {
            Mode::Toric => oracle::brute_force_layer_poset(&x),
            Mode::Hyperplane => oracle::brute_force_intersection_lattice(&x),
        };
        match reference {
            Err(e) => {
                let _ = writeln!(err, "error: cannot verify: {e}");
                return EXIT_INPUT;
            }
            Ok(reference) => match h.compare_by_name(&reference) {
                Ok(()) => {
                    let _ = writeln!(
                        err,
                        "verify: OK ({} layers agree with the brute-force construction)",
                        h.len()
                    );
                }
                Err(msg) => {
                    let _ = writeln!(err, "verify: MISMATCH: {msg}");
                    return EXIT_VERIFY;
                }
            },
        }
    }
    let rendered = match config.output_format {
        OutputFormat::Json => emit_json(&h, inv.as_ref()),
        OutputFormat::Dot => emit_dot(&h),
        OutputFormat::Summary => emit_summary(&h, inv.as_ref()),
    };
    if let Err(e) = out.write_all(rendered.as_bytes()) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset_builder::{build_intersection_lattice, build_layer_poset};
    use proptest::prelude::*;

    const FOUR_VECTORS: &str = "2 0 1 2\n0 1 -1 2\n";

    #[test]
    fn parses_four_vectors() {
        let x = parse_matrix(FOUR_VECTORS).unwrap();
        assert_eq!(x, IntMatrix::from_rows(&[[2, 0, 1, 2], [0, 1, -1, 2]]));
        assert_eq!((x.rows(), x.cols()), (2, 4));
    }

    #[test]
    fn parse_edge_cases() {
        assert_eq!(parse_matrix("1\n").unwrap(), IntMatrix::from_rows(&[[1]]));
        assert_eq!(
            parse_matrix("# header\n1 2\n\n3 4\n\n\n").unwrap(),
            IntMatrix::from_rows(&[[1, 2], [3, 4]])
        );
        assert_eq!(
            parse_matrix("1 2\n3\n"),
            Err(Error::RaggedRows {
                line: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(parse_matrix("# nothing\n\n"), Err(Error::EmptyMatrix));
        assert_eq!(
            parse_matrix("1 2\n3 x4\n"),
            Err(Error::Parse {
                line: 2,
                column: 3,
                message: "`x4` is not an integer".into()
            })
        );
    }

    #[test]
    fn json_for_boolean_lattice() {
        let h = build_layer_poset(&IntMatrix::identity(2)).unwrap();
        let inv = Invariants::compute(&h).unwrap();
        let v: Value = serde_json::from_str(&emit_json(&h, Some(&inv))).unwrap();
        assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(v["edges"].as_array().unwrap().len(), 4);
        assert_eq!(v["char_poly"], json!([1, -2, 1]));
        assert_eq!(v["mode"], json!("toric"));
        assert_eq!(v["vertices"][3]["max_subset"], json!([0, 1]));
        assert_eq!(v["vertices"][3]["canonical_k"], json!([0, 0]));
    }

    #[test]
    fn json_for_four_vectors() {
        let h = build_layer_poset(&parse_matrix(FOUR_VECTORS).unwrap()).unwrap();
        let text = emit_json(&h, None);
        let v: Value = serde_json::from_str(&text).unwrap();
        let rank1 = v["vertices"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["rank"] == json!(1))
            .count();
        assert_eq!(rank1, 6);
        assert!(v.get("mobius").is_none());
        assert_eq!(
            text,
            emit_json(
                &build_layer_poset(&parse_matrix(FOUR_VECTORS).unwrap()).unwrap(),
                None
            )
        );
    }

    #[test]
    fn dot_output() {
        let h = build_layer_poset(&IntMatrix::from_rows(&[[1]])).unwrap();
        let dot = emit_dot(&h);
        assert_eq!(dot.matches("[label=").count(), 2);
        assert!(dot.starts_with("digraph poset {"));

        let h = build_intersection_lattice(&IntMatrix::identity(2)).unwrap();
        let dot = emit_dot(&h);
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(dot.matches(" -> ").count(), 4);

        let h = build_layer_poset(&parse_matrix(FOUR_VECTORS).unwrap()).unwrap();
        let total: usize = rank_counts(&h).iter().sum();
        assert_eq!(emit_dot(&h).matches("[label=").count(), total);
    }

    #[test]
    fn polynomial_formatting() {
        let p = |c: &[i64]| {
            format_poly(&CharPolynomial {
                coefficients: c.to_vec(),
            })
        };
        assert_eq!(p(&[1, -2, 1]), "t^2 - 2t + 1");
        assert_eq!(p(&[-2, 1]), "t - 2");
        assert_eq!(p(&[0, 0, 0]), "0");
    }

    fn run_on(text: &str, configure: impl FnOnce(&mut RunConfig)) -> (i32, String, String) {
        let dir = tempdir();
        let path = dir.join("x.txt");
        std::fs::write(&path, text).unwrap();
        let mut cfg = RunConfig::new(&path);
        configure(&mut cfg);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cfg, &mut out, &mut err);
        let _ = std::fs::remove_dir_all(&dir);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn tempdir() -> PathBuf {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let dir = std::env::temp_dir().join(format!(
            "toric-poset-test-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn run_summary_on_four_vectors() {
        let (code, out, _) = run_on(FOUR_VECTORS, |_| {});
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("rank 1: 6"));
    }

    #[test]
    fn run_verify_hyperplane_unimodular() {
        let (code, _, err) = run_on("1 0 1\n0 1 1\n", |c| {
            c.mode = Mode::Hyperplane;
            c.verify = true;
        });
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(err.contains("verify: OK"));
    }

    #[test]
    fn run_rejects_large_ground_set() {
        let row = vec!["1"; 25].join(" ");
        let (code, _, err) = run_on(&format!("{row}\n"), |_| {});
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("GroundSetTooLarge"));
    }

    #[test]
    fn run_reports_parse_errors() {
        let (code, out, err) = run_on("1 2\n3\n", |_| {});
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.contains("RaggedRows"));
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(
            (r, c, v) in (1usize..=4, 1usize..=5).prop_flat_map(|(r, c)| {
                (Just(r), Just(c), proptest::collection::vec(-1000i64..=1000, r * c))
            })
        ) {
            let m = IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap();
            prop_assert_eq!(parse_matrix(&m.to_string()).unwrap(), m);
        }
    }
}
