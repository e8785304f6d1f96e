//! OTU count tables to proportion time series.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ObservationSeries;
use crate::numerics::DenseMatrix;
use crate::simulator::csv_error;

pub const RANKS: [&str; 6] = ["kingdom", "phylum", "class", "order", "family", "genus"];

/// Ranked lineage, kingdom to genus. Empty ranks are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Lineage(pub Vec<Option<String>>);

impl Lineage {
    pub fn rank(&self, i: usize) -> Option<&str> {
        self.0.get(i).and_then(|r| r.as_deref())
    }

    /// Name of the group at `level`, or `"<parent> (unsp.)"` when the rank is
    /// missing; `parent` is the nearest named coarser rank.
    pub fn group_name(&self, level: usize) -> String {
        if let Some(name) = self.rank(level) {
            return name.to_string();
        }
        match (0..level).rev().find_map(|i| self.rank(i)) {
            Some(parent) => format!("{parent} (unsp.)"),
            None => "unclassified".to_string(),
        }
    }

    /// Lineage truncated at `level`, with the group name in place.
    fn truncated(&self, level: usize) -> Self {
        let mut ranks: Vec<Option<String>> = (0..level).map(|i| self.rank(i).map(str::to_string)).collect();
        ranks.push(Some(self.group_name(level)));
        ranks.resize(RANKS.len(), None);
        Self(ranks)
    }
}

fn rank_index(level: &str) -> Result<usize> {
    RANKS
        .iter()
        .position(|r| r.eq_ignore_ascii_case(level))
        .ok_or_else(|| Error::InvalidInput(format!("unknown rank '{level}', expected one of {RANKS:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub sample_times: Vec<f64>,
    pub taxa_ids: Vec<String>,
    /// `n_samples × n_taxa`.
    pub counts: Vec<Vec<u64>>,
    pub taxonomy: BTreeMap<String, Lineage>,
    /// Per-sample totals over the full community, kept through top-k
    /// selection for full-community proportions.
    pub community_totals: Vec<u64>,
    pub community_taxa: usize,
}

impl CountTable {
    /// Validates and sorts rows by time. Taxa missing from `taxonomy` get an
    /// empty lineage.
    pub fn new(
        sample_times: Vec<f64>,
        taxa_ids: Vec<String>,
        counts: Vec<Vec<u64>>,
        mut taxonomy: BTreeMap<String, Lineage>,
    ) -> Result<Self> {
        if counts.len() != sample_times.len() {
            return Err(Error::Dimension(format!(
                "{} count rows for {} sample times",
                counts.len(),
                sample_times.len()
            )));
        }
        if let Some(row) = counts.iter().find(|r| r.len() != taxa_ids.len()) {
            return Err(Error::Dimension(format!(
                "count row has {} entries, expected {}",
                row.len(),
                taxa_ids.len()
            )));
        }
        if sample_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("sample times must be finite".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = taxa_ids.iter().find(|t| !seen.insert(t.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate taxon id '{dup}'")));
        }
        let mut order: Vec<usize> = (0..sample_times.len()).collect();
        order.sort_by(|&a, &b| sample_times[a].total_cmp(&sample_times[b]));
        if let Some(w) = order.windows(2).find(|w| sample_times[w[0]] == sample_times[w[1]]) {
            return Err(Error::InvalidInput(format!(
                "duplicate sample time {}",
                sample_times[w[0]]
            )));
        }
        for id in &taxa_ids {
            taxonomy.entry(id.clone()).or_default();
        }
        let counts: Vec<Vec<u64>> = order.iter().map(|&i| counts[i].clone()).collect();
        let community_totals = counts.iter().map(|r| r.iter().sum()).collect();
        Ok(Self {
            sample_times: order.iter().map(|&i| sample_times[i]).collect(),
            community_taxa: taxa_ids.len(),
            taxa_ids,
            counts,
            taxonomy,
            community_totals,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.sample_times.len()
    }

    pub fn n_taxa(&self) -> usize {
        self.taxa_ids.len()
    }

    pub fn sample_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn taxon_totals(&self) -> Vec<u64> {
        (0..self.n_taxa())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// Samples with `start ≤ t ≤ end`.
    pub fn filter_time(&self, start: Option<f64>, end: Option<f64>) -> Self {
        let keep: Vec<usize> = (0..self.n_samples())
            .filter(|&i| {
                let t = self.sample_times[i];
                start.is_none_or(|s| t >= s) && end.is_none_or(|e| t <= e)
            })
            .collect();
        Self {
            sample_times: keep.iter().map(|&i| self.sample_times[i]).collect(),
            counts: keep.iter().map(|&i| self.counts[i].clone()).collect(),
            community_totals: keep.iter().map(|&i| self.community_totals[i]).collect(),
            taxa_ids: self.taxa_ids.clone(),
            taxonomy: self.taxonomy.clone(),
            community_taxa: self.community_taxa,
        }
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads `time,<taxon>...` counts and `taxon_id,kingdom,...,genus` taxonomy.
pub fn load_counts_csv(counts_path: impl AsRef<Path>, taxonomy_path: impl AsRef<Path>) -> Result<CountTable> {
    let counts_path = counts_path.as_ref();
    let taxonomy_path = taxonomy_path.as_ref();

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(counts_path)
        .map_err(|e| csv_error(counts_path, e))?;
    let header = reader.headers().map_err(|e| csv_error(counts_path, e))?.clone();
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("time") {
        return Err(parse_error(counts_path, 1, "header must be time,<taxon_id>,..."));
    }
    let taxa_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut times = Vec::new();
    let mut counts = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(counts_path, e))?;
        let line = record_line(&record);
        let t: f64 = record[0]
            .parse()
            .map_err(|_| parse_error(counts_path, line, format!("bad time '{}'", &record[0])))?;
        let mut row = Vec::with_capacity(taxa_ids.len());
        for (j, field) in record.iter().skip(1).enumerate() {
            let value: i64 = field
                .parse()
                .map_err(|_| parse_error(counts_path, line, format!("bad count '{field}' for {}", taxa_ids[j])))?;
            if value < 0 {
                return Err(parse_error(
                    counts_path,
                    line,
                    format!("negative count {value} for {}", taxa_ids[j]),
                ));
            }
            row.push(value as u64);
        }
        times.push(t);
        counts.push(row);
    }

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(taxonomy_path)
        .map_err(|e| csv_error(taxonomy_path, e))?;
    let header = reader.headers().map_err(|e| csv_error(taxonomy_path, e))?.clone();
    let expected = std::iter::once("taxon_id").chain(RANKS);
    if header.len() != RANKS.len() + 1 || !header.iter().zip(expected).all(|(a, b)| a.eq_ignore_ascii_case(b)) {
        return Err(parse_error(
            taxonomy_path,
            1,
            "header must be taxon_id,kingdom,phylum,class,order,family,genus",
        ));
    }
    let mut taxonomy = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(taxonomy_path, e))?;
        let ranks = record
            .iter()
            .skip(1)
            .map(|f| (!f.is_empty()).then(|| f.to_string()))
            .collect();
        taxonomy.insert(record[0].to_string(), Lineage(ranks));
    }
    CountTable::new(times, taxa_ids, counts, taxonomy)
}

/// Sums counts of taxa sharing a group at `level`. Groups are named by the
/// rank value (see [`Lineage::group_name`]) and ordered by first appearance.
pub fn aggregate_taxa(table: &CountTable, level: &str) -> Result<CountTable> {
    let level = rank_index(level)?;
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut taxonomy = BTreeMap::new();
    let mut target = Vec::with_capacity(table.n_taxa());
    for id in &table.taxa_ids {
        let lineage = &table.taxonomy[id];
        let name = lineage.group_name(level);
        let j = *index.entry(name.clone()).or_insert_with(|| {
            ids.push(name.clone());
            taxonomy.insert(name.clone(), lineage.truncated(level));
            ids.len() - 1
        });
        target.push(j);
    }
    let counts = table
        .counts
        .iter()
        .map(|row| {
            let mut out = vec![0u64; ids.len()];
            row.iter().zip(&target).for_each(|(c, &j)| out[j] += c);
            out
        })
        .collect();
    Ok(CountTable {
        sample_times: table.sample_times.clone(),
        taxa_ids: ids,
        counts,
        taxonomy,
        community_totals: table.community_totals.clone(),
        community_taxa: table.community_taxa,
    })
}

/// Keeps the `k` taxa with the largest total counts, ties broken by name.
/// Retained taxa are ordered by decreasing total.
pub fn select_top_k(table: &CountTable, k: usize) -> Result<CountTable> {
    if k == 0 || k > table.n_taxa() {
        return Err(Error::InvalidInput(format!(
            "k = {k} must be in 1..={}",
            table.n_taxa()
        )));
    }
    let totals = table.taxon_totals();
    let mut order: Vec<usize> = (0..table.n_taxa()).collect();
    order.sort_by(|&a, &b| {
        totals[b]
            .cmp(&totals[a])
            .then_with(|| table.taxa_ids[a].cmp(&table.taxa_ids[b]))
    });
    order.truncate(k);
    let taxa_ids: Vec<String> = order.iter().map(|&j| table.taxa_ids[j].clone()).collect();
    Ok(CountTable {
        sample_times: table.sample_times.clone(),
        counts: table
            .counts
            .iter()
            .map(|row| order.iter().map(|&j| row[j]).collect())
            .collect(),
        taxonomy: taxa_ids
            .iter()
            .map(|id| (id.clone(), table.taxonomy[id].clone()))
            .collect(),
        taxa_ids,
        community_totals: table.community_totals.clone(),
        community_taxa: table.community_taxa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Renormalize {
    /// Denominator over the retained taxa only. Rows then sum to one, which
    /// makes the estimators' design matrix exactly collinear.
    Top,
    /// Denominator over the whole community before selection.
    #[default]
    Full,
}

/// `x_k = (c_k + p) / Σ_l (c_l + p)`. With [`Renormalize::Full`] the sum runs
/// over every taxon of the original community.
pub fn to_proportions(table: &CountTable, pseudocount: f64, renormalize: Renormalize) -> Result<ObservationSeries> {
    if !(pseudocount >= 0.0 && pseudocount.is_finite()) {
        return Err(Error::InvalidInput(format!("pseudocount {pseudocount} must be ≥ 0")));
    }
    let n = table.n_taxa();
    if n == 0 {
        return Err(Error::InvalidInput("table has no taxa".into()));
    }
    let mut data = Vec::with_capacity(table.n_samples() * n);
    for (i, row) in table.counts.iter().enumerate() {
        let shifted: Vec<f64> = row.iter().map(|&c| c as f64 + pseudocount).collect();
        let denom = match renormalize {
            Renormalize::Top => shifted.iter().sum::<f64>(),
            Renormalize::Full => table.community_totals[i] as f64 + pseudocount * table.community_taxa as f64,
        };
        if denom <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sample at time {} has zero total; use a positive pseudocount",
                table.sample_times[i]
            )));
        }
        if shifted.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample at time {} has a zero count; use a positive pseudocount",
                table.sample_times[i]
            )));
        }
        data.extend(shifted.iter().map(|v| v / denom));
    }
    ObservationSeries::with_labels(
        table.sample_times.clone(),
        DenseMatrix::from_row_major(table.n_samples(), n, data)?,
        table.taxa_ids.clone(),
    )
}
