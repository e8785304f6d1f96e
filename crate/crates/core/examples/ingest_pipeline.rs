//! OTU counts and taxonomy to a family-level proportion series, then a fit.

use std::fs;

use sglv::ingest::{aggregate_taxa, load_counts_csv, select_top_k, to_proportions, Renormalize};

const TAXONOMY: &str = "\
taxon_id,kingdom,phylum,class,order,family,genus
otu1,Bacteria,Bacteroidetes,Bacteroidia,Bacteroidales,Bacteroidaceae,Bacteroides
otu2,Bacteria,Bacteroidetes,Bacteroidia,Bacteroidales,Bacteroidaceae,
otu3,Bacteria,Bacteroidetes,Bacteroidia,Bacteroidales,,
otu4,Bacteria,Firmicutes,Clostridia,Clostridiales,Lachnospiraceae,Blautia
otu5,Bacteria,Firmicutes,Clostridia,Clostridiales,Ruminococcaceae,
otu6,Bacteria,Proteobacteria,Gammaproteobacteria,Enterobacteriales,Enterobacteriaceae,
";

fn counts_csv() -> String {
    let mut s = String::from("time,otu1,otu2,otu3,otu4,otu5,otu6\n");
    for i in 0..40u64 {
        let t = i * 3 + (i % 2);
        let w = |base: u64, period: u64| base + (i * 7 + period) % (base / 2 + 3);
        s.push_str(&format!(
            "{t},{},{},{},{},{},{}\n",
            w(120, 1),
            w(40, 2),
            w(60, 5),
            w(90, 3),
            w(70, 4),
            i % 4
        ));
    }
    s
}

fn main() -> sglv::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let counts = dir.path().join("counts.csv");
    let taxonomy = dir.path().join("taxonomy.csv");
    fs::write(&counts, counts_csv()).expect("write counts");
    fs::write(&taxonomy, TAXONOMY).expect("write taxonomy");

    let table = load_counts_csv(&counts, &taxonomy)?;
    let families = aggregate_taxa(&table, "family")?;
    println!("{} OTUs -> {} families", table.n_taxa(), families.n_taxa());
    for (id, total) in families.taxa_ids.iter().zip(families.taxon_totals()) {
        println!("  {id:28} {total}");
    }
    let top = select_top_k(&families, 4)?;
    let series = to_proportions(&top, 0.5, Renormalize::Full)?;
    println!("top 4: {:?}", series.labels());
    println!("first sample proportions: {:?}", series.x(0));

    let fit = sglv::inference::fit_sglv_amle(&series)?;
    println!(
        "fitted diagonal: {:?}",
        (0..4).map(|k| fit.a_hat[(k, k)]).collect::<Vec<_>>()
    );
    Ok(())
}
