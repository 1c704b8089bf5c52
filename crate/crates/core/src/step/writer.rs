use std::fmt::Write;

use super::{Entity, ExchangeStructure, Parameter, Record};

/// Part-21 real literal that parses back to exactly `v`.
pub(crate) fn format_real(v: f64) -> String {
    let s = format!("{v:?}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let mantissa = if mantissa.contains('.') { mantissa.to_string() } else { format!("{mantissa}.") };
            format!("{mantissa}E{exp}")
        }
        None if s.contains('.') => s,
        None => format!("{s}."),
    }
}

fn write_param(out: &mut String, p: &Parameter) {
    match p {
        Parameter::Integer(v) => write!(out, "{v}").unwrap(),
        Parameter::Real(v) => out.push_str(&format_real(*v)),
        Parameter::String(s) => write!(out, "'{s}'").unwrap(),
        Parameter::Binary(s) => write!(out, "\"{s}\"").unwrap(),
        Parameter::Enumeration(e) => write!(out, ".{e}.").unwrap(),
        Parameter::Reference(id) => write!(out, "#{id}").unwrap(),
        Parameter::List(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_param(out, item);
            }
            out.push(')');
        }
        Parameter::Typed { keyword, value } => {
            write!(out, "{keyword}(").unwrap();
            write_param(out, value);
            out.push(')');
        }
        Parameter::Unset => out.push('$'),
        Parameter::Derived => out.push('*'),
    }
}

fn write_record(out: &mut String, r: &Record) {
    out.push_str(&r.keyword);
    out.push('(');
    for (i, p) in r.params.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_param(out, p);
    }
    out.push(')');
}

pub(crate) fn write(xs: &ExchangeStructure) -> String {
    let mut out = String::from("ISO-10303-21;\nHEADER;\n");
    for r in &xs.header.records {
        write_record(&mut out, r);
        out.push_str(";\n");
    }
    out.push_str("ENDSEC;\nDATA;\n");
    for (id, e) in &xs.entities {
        write!(out, "#{id}=").unwrap();
        match e {
            Entity::Simple(r) => write_record(&mut out, r),
            Entity::Complex(parts) => {
                out.push('(');
                for r in parts {
                    write_record(&mut out, r);
                }
                out.push(')');
            }
        }
        out.push_str(";\n");
    }
    out.push_str("ENDSEC;\nEND-ISO-10303-21;\n");
    out
}
