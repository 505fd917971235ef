//! Debug serialization of form fields: one CSV row per node, one column per
//! index tuple (1-based, lexicographic), preceded by the node index.

use std::io::{Read, Write};

use super::field::FormField;
use super::grid::GridTorus;
use crate::error::{Error, Result};
use crate::index::{index_sets, label, parse_label};

const SCALAR_LABEL: &str = "scalar";

pub fn write_form_csv<W: Write>(form: &FormField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let sets = form.index_sets();
    let mut header = vec!["node".to_string()];
    header.extend(sets.iter().map(|s| {
        if s.is_empty() {
            SCALAR_LABEL.to_string()
        } else {
            label(s)
        }
    }));
    w.write_record(&header)?;
    for node in 0..form.base().node_count() {
        let mut row = vec![node.to_string()];
        row.extend(form.at(node).iter().map(|v| format!("{v:e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field written by [`write_form_csv`] back onto `base`.
pub fn read_form_csv<R: Read>(base: GridTorus, input: R) -> Result<FormField> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let cols: Vec<&str> = header.iter().skip(1).collect();
    let degree = match cols.first() {
        Some(&SCALAR_LABEL) => 0,
        Some(first) => parse_label(first)
            .ok_or_else(|| Error::Input(format!("bad column label {first:?}")))?
            .len(),
        None => return Err(Error::Input("form CSV has no coefficient columns".into())),
    };
    let expected: Vec<String> = index_sets(base.dim(), degree)
        .iter()
        .map(|s| if s.is_empty() { SCALAR_LABEL.to_string() } else { label(s) })
        .collect();
    if cols != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Input(format!("columns {cols:?} do not match {expected:?}")));
    }
    let n = base.node_count();
    let mut comps = vec![vec![0.0; n]; expected.len()];
    let mut seen = 0;
    for rec in r.records() {
        let rec = rec?;
        let node: usize = rec[0]
            .parse()
            .map_err(|_| Error::Input(format!("bad node index {:?}", &rec[0])))?;
        if node >= n {
            return Err(Error::Input(format!("node {node} out of range")));
        }
        for (c, field) in rec.iter().skip(1).enumerate() {
            comps[c][node] = field
                .parse()
                .map_err(|_| Error::Input(format!("bad coefficient {field:?}")))?;
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::Input(format!("{seen} rows for {n} nodes")));
    }
    Ok(FormField::from_components(base, degree, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip(degree in 0usize..=2, seed in -5.0f64..5.0) {
            let g = GridTorus::cube(2, 8).unwrap();
            let f = FormField::from_fn(g.clone(), degree, |x| {
                (0..crate::index::binomial(2, degree))
                    .map(|c| seed * (c as f64 + 1.0) * (x[0] - 0.3 * x[1]).sin())
                    .collect()
            }).unwrap();
            let mut buf = Vec::new();
            write_form_csv(&f, &mut buf).unwrap();
            let back = read_form_csv(g, buf.as_slice()).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn header_lists_tuples() {
        let g = GridTorus::cube(3, 8).unwrap();
        let f = FormField::zeros(g, 2).unwrap();
        let mut buf = Vec::new();
        write_form_csv(&f, &mut buf).unwrap();
        let first = String::from_utf8(buf).unwrap().lines().next().unwrap().to_string();
        assert_eq!(first, "node,\"1,2\",\"1,3\",\"2,3\"");
    }
}
