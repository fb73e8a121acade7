//! Dataset files: CSV, one observation per row.
//!
//! The header holds `p_<state>` columns for the prior, then `f_<state>` for
//! the likelihood of the realized signal, then `q_<state>` for the reported
//! posterior, with states in the same order in each group. Lines starting
//! with `#` are comments; `simulate` records its seed and parameters there.
//! Values are written with full round-trip precision.

use std::io::{Read, Write};

use super::CliError;
use crate::estimation::UpdateObservation;
use crate::space::{Distribution, StateSpace};

pub fn write_dataset<W: Write>(
    out: W,
    comment: &str,
    space: &StateSpace,
    observations: &[UpdateObservation],
) -> Result<(), CliError> {
    let mut out = out;
    writeln!(out, "# {comment}").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = ["p_", "f_", "q_"]
        .iter()
        .flat_map(|prefix| space.labels().iter().map(move |l| format!("{prefix}{l}")))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for obs in observations {
        let record: Vec<String> = obs
            .prior
            .mass()
            .iter()
            .chain(&obs.likelihood_row)
            .chain(obs.posterior.mass())
            .map(|v| format!("{v:?}"))
            .collect();
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn read_dataset<R: Read>(input: R) -> Result<Vec<UpdateObservation>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let space = space_from_header(&headers)?;
    let n = space.len();

    let mut observations = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = r + 1;
        let values = record
            .iter()
            .enumerate()
            .map(|(c, v)| {
                v.parse::<f64>().map_err(|_| {
                    CliError::Domain(format!(
                        "dataset row {row}, column `{}`: cannot parse `{v}` as a number",
                        &headers[c]
                    ))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let group = |prefix: &str, slice: &[f64]| {
            Distribution::from_input(space.clone(), slice, prefix)
                .map(|(d, _)| d)
                .map_err(|e| CliError::Domain(format!("dataset row {row}: {e}")))
        };
        let prior = group("p_", &values[..n])?;
        let posterior = group("q_", &values[2 * n..])?;
        let likelihood = values[n..2 * n].to_vec();
        if let Some(v) = likelihood.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(CliError::Domain(format!(
                "dataset row {row}: likelihood value {v} is not a probability"
            )));
        }
        observations.push(
            UpdateObservation::new(prior, likelihood, posterior)
                .map_err(|e| CliError::Domain(format!("dataset row {row}: {e}")))?,
        );
    }
    Ok(observations)
}

fn space_from_header(headers: &csv::StringRecord) -> Result<StateSpace, CliError> {
    let bad = |msg: String| CliError::Domain(format!("dataset header: {msg}"));
    if headers.is_empty() || !headers.len().is_multiple_of(3) {
        return Err(bad(format!(
            "expected 3·|S| columns, found {}",
            headers.len()
        )));
    }
    let n = headers.len() / 3;
    let mut labels = Vec::with_capacity(n);
    for (g, prefix) in ["p_", "f_", "q_"].iter().enumerate() {
        for i in 0..n {
            let h = &headers[g * n + i];
            let label = h
                .strip_prefix(prefix)
                .ok_or_else(|| bad(format!("column `{h}` should start with `{prefix}`")))?;
            if g == 0 {
                labels.push(label.to_string());
            } else if labels[i] != label {
                return Err(bad(format!(
                    "column `{h}` does not match state `{}`",
                    labels[i]
                )));
            }
        }
    }
    StateSpace::new(labels).map_err(|e| bad(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Domain(format!("dataset: {e}"))
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Domain(format!("dataset: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::simulate_dataset;
    use crate::params::ExponentParams;
    use crate::space::Experiment;

    #[test]
    fn written_dataset_reads_back_exactly() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let f = Experiment::new(
            space.clone(),
            ["x", "y"],
            vec![vec![0.9, 0.1], vec![0.4, 0.6]],
        )
        .unwrap();
        let data = simulate_dataset(
            4,
            &space,
            &f,
            ExponentParams::new(3.0, 0.2).unwrap(),
            7,
            0.0,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, "seed=4", &space, &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=4\np_a,p_b,f_a,f_b,q_a,q_b\n"));
        assert_eq!(read_dataset(&buf[..]).unwrap(), data);
    }

    #[test]
    fn header_problems_are_reported() {
        let err = read_dataset("p_a,f_a\n0.5,0.5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("3·|S|"));
        let err = read_dataset("p_a,p_b,f_a,f_c,q_a,q_b\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("f_c"));
    }

    #[test]
    fn bad_rows_are_reported() {
        let text = "p_a,p_b,f_a,f_b,q_a,q_b\n0.5,0.5,0.2,0.4,0.9,0.3\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        let text = "p_a,p_b,f_a,f_b,q_a,q_b\n0.5,0.5,abc,0.4,0.7,0.3\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("f_a"), "{err}");
    }
}
