//! Report serialization.
//!
//! Machine formats (json, csv) are byte-deterministic for a given
//! configuration and seed: floating-point fields are printed with 17
//! significant digits, rows are canonically ordered by the caller, and the
//! elapsed-time field is pinned to zero (wall-clock noise would break
//! byte-level reproducibility; the text format shows measured times
//! instead).

use qjackson_core::verify::CheckReport;

fn f(v: f64) -> String {
    format!("{:.16e}", v)
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn to_json(reports: &[CheckReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        out.push_str("  {");
        out.push_str(&format!("\"check_id\":\"{}\",", json_escape(&r.check_id)));
        out.push_str(&format!("\"paper_anchor\":\"{}\",", json_escape(&r.paper_anchor)));
        out.push_str(&format!("\"lhs\":{{\"re\":{},\"im\":{}}},", f(r.lhs.re), f(r.lhs.im)));
        out.push_str(&format!("\"rhs\":{{\"re\":{},\"im\":{}}},", f(r.rhs.re), f(r.rhs.im)));
        out.push_str(&format!("\"rel_dev\":{},", f(r.rel_dev)));
        out.push_str(&format!("\"tol\":{},", f(r.tol)));
        out.push_str(&format!("\"passed\":{},", r.passed));
        out.push_str(&format!("\"seed\":{},", r.seed));
        out.push_str(&format!("\"params_echo\":\"{}\",", json_escape(&r.params_echo)));
        out.push_str(&format!("\"terms\":{},", r.terms));
        out.push_str("\"elapsed_ms\":0}");
        if i + 1 < reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from(
        "check_id,paper_anchor,lhs_re,lhs_im,rhs_re,rhs_im,rel_dev,tol,passed,seed,params_echo,terms,elapsed_ms\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},0\n",
            csv_field(&r.check_id),
            csv_field(&r.paper_anchor),
            f(r.lhs.re),
            f(r.lhs.im),
            f(r.rhs.re),
            f(r.rhs.im),
            f(r.rel_dev),
            f(r.tol),
            r.passed,
            r.seed,
            csv_field(&r.params_echo),
            r.terms,
        ));
    }
    out
}

pub fn to_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{} rel_dev={:.3e} {} (tol {:.1e}, {} terms, {} ms)\n",
            r.check_id,
            r.rel_dev,
            if r.passed { "PASS" } else { "FAIL" },
            r.tol,
            r.terms,
            r.elapsed_ms,
        ));
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", reports.len()));
    out
}
