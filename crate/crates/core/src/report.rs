// Copyright 2026 The qsearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! CSV and JSON output.
//!
//! Reals are rounded to 12 significant digits and then printed in shortest
//! round-trip form, so identical runs produce identical bytes. CSV uses `,`
//! and `\n` with a header row; JSON reports are a single flat object.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::ensemble::SpreadTrace;

/// `x` rounded to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        // Also folds -0 into 0.
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_sig12(x: f64) -> String {
    format!("{}", round_sig12(x))
}

pub fn ser_sig12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*x))
}

pub fn ser_sig12_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| round_sig12(x)))
}

/// Pretty-free single-line JSON followed by a newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

pub const TRACE_HEADER: &str = "t,spread,theta,bound_thm2,bound_thm3,envelope";

/// `t,spread,theta,bound_thm2,bound_thm3,envelope`, plus `dev_0..dev_{N-1}`
/// when `per_alpha` is set.
pub fn trace_csv(trace: &SpreadTrace, per_alpha: bool) -> String {
    let mut out = String::from(TRACE_HEADER);
    if per_alpha {
        for alpha in 0..trace.dim {
            write!(out, ",dev_{alpha}").unwrap();
        }
    }
    out.push('\n');
    for row in &trace.rows {
        write!(
            out,
            "{},{},{},{},{},{}",
            row.t,
            fmt_sig12(row.spread),
            fmt_sig12(row.theta),
            fmt_sig12(row.bound_thm2),
            fmt_sig12(row.bound_thm3),
            fmt_sig12(row.envelope)
        )
        .unwrap();
        if per_alpha {
            for &d in &row.deviations {
                write!(out, ",{}", fmt_sig12(d)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub const GROVER_HEADER: &str = "t,success_prob,spread,bound_thm2,bound_thm3,envelope";

/// Grover run table; `success` holds the success probability per row of
/// `trace`.
pub fn grover_csv(trace: &SpreadTrace, success: &[f64]) -> String {
    let mut out = String::from(GROVER_HEADER);
    out.push('\n');
    for (row, p) in trace.rows.iter().zip(success) {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.t,
            fmt_sig12(*p),
            fmt_sig12(row.spread),
            fmt_sig12(row.bound_thm2),
            fmt_sig12(row.bound_thm3),
            fmt_sig12(row.envelope)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::run_schedule;
    use crate::grover::grover_schedule;
    use crate::state::uniform_state;

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(4.0), "4");
        assert_eq!(fmt_sig12(0.0625), "0.0625");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(2.0f64.sqrt() * 1e6), "1414213.56237");
        assert_eq!(fmt_sig12(3.9999999999999996), "4");
    }

    #[test]
    fn trace_csv_layout() {
        let trace =
            run_schedule(&grover_schedule(4, 1).unwrap(), &uniform_state(4).unwrap()).unwrap();
        let csv = trace_csv(&trace, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,0,0,0,0,0"));
        assert!(lines[2].starts_with("1,4,"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));

        let wide = trace_csv(&trace, true);
        assert!(wide
            .lines()
            .next()
            .unwrap()
            .ends_with(",dev_0,dev_1,dev_2,dev_3"));
        assert!(wide.lines().nth(2).unwrap().ends_with(",1,1,1,1"));
    }
}
