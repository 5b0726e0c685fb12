//! The 15 x 15 table of which operator pairs satisfy the rearrangement
//! inequality (`C`) and its dual (`D`).
//!
//! Rows are the fourteen T-norms plus the bounded sum used in the `⊗`
//! role; columns are the fourteen T-conorms plus the Łukasiewicz norm used
//! in the `⊕` role. A direction is marked when no counterexample turns up
//! for any sampled parameter combination. Marks that are not backed by a
//! theorem are flagged so a clean search never silently passes as proof.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{make_operator, Family, FamilyId, Polarity};
use crate::error::{Error, Result};
use crate::properties::expected_flags;
use crate::rearrangement::{search_counterexample, Direction, PairCheckResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub resolution: usize,
    /// Random quadruples per direction per parameter combination.
    pub budget: usize,
    pub seed: u64,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Parameter values per parametric family.
    pub samples: BTreeMap<Family, Vec<f64>>,
    /// Also evaluate the two drastic cells against Clayton at `alpha = -1`.
    pub clayton_footnote: bool,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let samples = Family::ALL
            .into_iter()
            .filter(|f| f.is_parametric())
            .map(|f| {
                let values = f.parameter_samples().iter().copied();
                // Negative Clayton parameters belong to the footnote cells only.
                let values = values.filter(|&a| f != Family::Clayton || a > 0.0);
                (f, values.collect())
            })
            .collect();
        RunConfig {
            resolution: 17,
            budget: 20_000,
            seed: 1,
            workers: None,
            samples,
            clayton_footnote: true,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidGrid(self.resolution));
        }
        for (family, values) in &self.samples {
            for &a in values {
                make_operator(FamilyId::norm(*family), Some(a))?;
            }
        }
        Ok(())
    }

    fn alphas(&self, family: Family) -> Vec<Option<f64>> {
        if !family.is_parametric() {
            return vec![None];
        }
        match self.samples.get(&family) {
            Some(v) if !v.is_empty() => v.iter().copied().map(Some).collect(),
            _ => family.sampled_alphas(),
        }
    }
}

/// Row operands in table order.
pub fn table_rows() -> Vec<FamilyId> {
    let mut rows: Vec<FamilyId> = Family::ALL.into_iter().map(FamilyId::norm).collect();
    rows.push(FamilyId::conorm(Family::Lukasiewicz));
    rows
}

/// Column operands in table order.
pub fn table_columns() -> Vec<FamilyId> {
    let mut cols: Vec<FamilyId> = Family::ALL.into_iter().map(FamilyId::conorm).collect();
    cols.push(FamilyId::norm(Family::Lukasiewicz));
    cols
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Marks {
    /// Rearrangement inequality.
    pub ri: bool,
    /// Dual rearrangement inequality.
    pub dri: bool,
}

impl Marks {
    pub fn get(&self, direction: Direction) -> bool {
        match direction {
            Direction::Primal => self.ri,
            Direction::Dual => self.dri,
        }
    }

    /// `""`, `"C"`, `"D"` or `"CD"`.
    pub fn text(&self) -> &'static str {
        match (self.ri, self.dri) {
            (false, false) => "",
            (true, false) => "C",
            (false, true) => "D",
            (true, true) => "CD",
        }
    }

    pub fn parse(text: &str) -> Option<Marks> {
        match text {
            "" => Some(Marks {
                ri: false,
                dri: false,
            }),
            "C" => Some(Marks {
                ri: true,
                dri: false,
            }),
            "D" => Some(Marks {
                ri: false,
                dri: true,
            }),
            "CD" => Some(Marks {
                ri: true,
                dri: true,
            }),
            _ => None,
        }
    }
}

fn has_zero_divisors(family: Family, alpha: Option<f64>) -> bool {
    match family {
        Family::Lukasiewicz
        | Family::Drastic
        | Family::NilpotentMinimum
        | Family::Yager
        | Family::SugenoWeber => true,
        Family::Clayton | Family::MayorTorrens => alpha.is_some_and(|a| a > 0.0),
        _ => false,
    }
}

/// Order-property flags of an operand in its table role: A and B in the
/// `⊗` role, A' and B' in the `⊕` role.
fn role_flags(id: FamilyId, alpha: Option<f64>, role: Polarity) -> (bool, bool) {
    if id.polarity != role {
        // Only the Łukasiewicz pair appears crossed: the bounded sum has A
        // but not B, the Łukasiewicz norm has A' but not B'.
        debug_assert_eq!(id.family, Family::Lukasiewicz);
        return (true, false);
    }
    let flags = expected_flags(id, alpha).expect("table operands are valid");
    (flags.property_a, flags.property_b)
}

/// Marks implied by the known sufficient conditions for one parameter combination.
pub fn theorem_marks(
    row: FamilyId,
    row_alpha: Option<f64>,
    col: FamilyId,
    col_alpha: Option<f64>,
) -> Marks {
    let row_is_norm = row.polarity == Polarity::Norm;
    let col_is_conorm = col.polarity == Polarity::Conorm;
    let (row_a, row_b) = role_flags(row, row_alpha, Polarity::Norm);
    let (col_a, col_b) = role_flags(col, col_alpha, Polarity::Conorm);

    let row_min = row == FamilyId::norm(Family::Minimum);
    let col_max = col == FamilyId::conorm(Family::Minimum);
    let row_drastic = row == FamilyId::norm(Family::Drastic);
    let col_drastic = col == FamilyId::conorm(Family::Drastic);
    // Table norms are conjunctive and table conorms disjunctive; the crossed
    // operands are the other way round.
    let row_conjunctive = row_is_norm;
    let col_disjunctive = col_is_conorm;
    let special = matches!(
        (row, col),
        (
            FamilyId {
                family: Family::NilpotentMinimum,
                polarity: Polarity::Norm
            },
            FamilyId {
                family: Family::Lukasiewicz,
                polarity: Polarity::Norm
            }
        ) | (
            FamilyId {
                family: Family::Lukasiewicz,
                polarity: Polarity::Conorm
            },
            FamilyId {
                family: Family::NilpotentMinimum,
                polarity: Polarity::Conorm
            }
        ) | (
            FamilyId {
                family: Family::NilpotentMinimum,
                polarity: Polarity::Norm
            },
            FamilyId {
                family: Family::NilpotentMinimum,
                polarity: Polarity::Conorm
            }
        )
    );

    let ri = (row_b && col_a)
        || row_min
        || col_max
        || (row_drastic && col_disjunctive)
        || (col_drastic && row_is_norm && !has_zero_divisors(row.family, row_alpha))
        || special;
    let dri = (row_a && col_b)
        || row_min
        || col_max
        || (col_drastic && row_conjunctive)
        || (row_drastic && col_is_conorm && !has_zero_divisors(col.family, col_alpha))
        || special;
    Marks { ri, dri }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    TheoremExpected,
    SearchClean,
    Counterexample { result: Box<PairCheckResult> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Cell {
    pub row: FamilyId,
    pub column: FamilyId,
    /// Parameter combinations searched, as `(row alpha, column alpha)`.
    pub parameters: Vec<(Option<f64>, Option<f64>)>,
    pub marks: Marks,
    /// Marks backed by a theorem at every parameter combination.
    pub expected: Marks,
    pub primal: Evidence,
    pub dual: Evidence,
    /// Extra cell outside the main grid (negative Clayton parameter).
    pub footnote: bool,
}

impl Table3Cell {
    /// A marked direction with no theorem behind it.
    pub fn unbacked(&self) -> Vec<Direction> {
        [Direction::Primal, Direction::Dual]
            .into_iter()
            .filter(|&d| self.marks.get(d) && !self.expected.get(d))
            .collect()
    }

    pub fn evidence(&self, direction: Direction) -> &Evidence {
        match direction {
            Direction::Primal => &self.primal,
            Direction::Dual => &self.dual,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let unbacked: Vec<Direction> = self.unbacked();
        json!({
            "row": self.row.symbol(),
            "column": self.column.symbol(),
            "row_operator": self.row.name(),
            "column_operator": self.column.name(),
            "parameters": self.parameters,
            "marks": self.marks.text(),
            "expected": self.expected.text(),
            "primal": self.primal,
            "dual": self.dual,
            "unbacked": unbacked,
            "footnote": self.footnote,
        })
    }
}

struct CellJob {
    row: FamilyId,
    column: FamilyId,
    parameters: Vec<(Option<f64>, Option<f64>)>,
    footnote: bool,
}

fn evaluate(job: &CellJob, config: &RunConfig) -> Result<Table3Cell> {
    let mut expected = Marks {
        ri: true,
        dri: true,
    };
    let mut found: [Option<PairCheckResult>; 2] = [None, None];
    for &(ra, ca) in &job.parameters {
        let t = theorem_marks(job.row, ra, job.column, ca);
        expected.ri &= t.ri;
        expected.dri &= t.dri;
        let otimes = make_operator(job.row, ra)?;
        let oplus = make_operator(job.column, ca)?;
        for (slot, direction) in found.iter_mut().zip([Direction::Primal, Direction::Dual]) {
            if slot.is_some() {
                continue;
            }
            let r = search_counterexample(
                &otimes,
                &oplus,
                direction,
                config.budget,
                config.seed,
                config.resolution,
            )?;
            if r.is_violated() {
                *slot = Some(r);
            }
        }
    }
    let [primal_hit, dual_hit] = found;
    let marks = Marks {
        ri: primal_hit.is_none(),
        dri: dual_hit.is_none(),
    };
    let evidence = |hit: Option<PairCheckResult>, backed: bool| match hit {
        Some(r) => Evidence::Counterexample {
            result: Box::new(r),
        },
        None if backed => Evidence::TheoremExpected,
        None => Evidence::SearchClean,
    };
    Ok(Table3Cell {
        row: job.row,
        column: job.column,
        parameters: job.parameters.clone(),
        marks,
        expected,
        primal: evidence(primal_hit, expected.ri),
        dual: evidence(dual_hit, expected.dri),
        footnote: job.footnote,
    })
}

fn jobs(config: &RunConfig) -> Vec<CellJob> {
    let combos = |row: FamilyId,
                  column: FamilyId,
                  row_alphas: &[Option<f64>],
                  col_alphas: &[Option<f64>]| {
        let parameters = row_alphas
            .iter()
            .flat_map(|&ra| col_alphas.iter().map(move |&ca| (ra, ca)))
            .collect();
        CellJob {
            row,
            column,
            parameters,
            footnote: false,
        }
    };
    let mut out = Vec::new();
    for row in table_rows() {
        for column in table_columns() {
            out.push(combos(
                row,
                column,
                &config.alphas(row.family),
                &config.alphas(column.family),
            ));
        }
    }
    if config.clayton_footnote {
        let neg = [Some(-1.0)];
        let mut a = combos(
            FamilyId::norm(Family::Drastic),
            FamilyId::conorm(Family::Clayton),
            &[None],
            &neg,
        );
        let mut b = combos(
            FamilyId::norm(Family::Clayton),
            FamilyId::conorm(Family::Drastic),
            &neg,
            &[None],
        );
        a.footnote = true;
        b.footnote = true;
        out.extend([a, b]);
    }
    out
}

/// Runs every cell. Main-table cells come first in row-major order,
/// followed by footnote cells when enabled.
pub fn reproduce_table3(config: &RunConfig) -> Result<Vec<Table3Cell>> {
    config.validate()?;
    let jobs = jobs(config);
    let run = || {
        jobs.par_iter()
            .map(|job| evaluate(job, config))
            .collect::<Result<Vec<_>>>()
    };
    match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Comma-separated grid of mark strings with a header row of column
/// symbols and a first column of row symbols. Footnote cells are omitted.
pub fn write_csv<W: Write>(cells: &[Table3Cell], mut out: W) -> Result<()> {
    let cols = table_columns();
    let header: Vec<String> = std::iter::once(String::new())
        .chain(cols.iter().map(|c| c.symbol()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let main: Vec<&Table3Cell> = cells.iter().filter(|c| !c.footnote).collect();
    for row in table_rows() {
        let mut line = vec![row.symbol()];
        for col in &cols {
            let cell = main.iter().find(|c| c.row == row && c.column == *col);
            line.push(cell.map(|c| c.marks.text()).unwrap_or("").to_string());
        }
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// One JSON object per cell, footnote cells included.
pub fn write_jsonl<W: Write>(cells: &[Table3Cell], mut out: W) -> Result<()> {
    for cell in cells {
        writeln!(out, "{}", cell.to_json())?;
    }
    Ok(())
}

pub fn write_table<W: Write>(cells: &[Table3Cell], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(cells, out),
        OutputFormat::Jsonl => write_jsonl(cells, out),
    }
}
