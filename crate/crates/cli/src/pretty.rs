//! Plain-text rendering of the JSON results for `--pretty`.

use serde_json::Value;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.trim_end().to_string()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.6}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, val) in map {
                if is_scalar(val) || is_flat_array(val) {
                    out.push_str(&format!("{pad}{k:<width$}  {}\n", inline(val)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    write_value(out, val, indent + 2);
                }
            }
        }
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::Object(_))) && !items.is_empty() => {
            write_table(out, items, &pad);
        }
        Value::Array(items) => {
            for item in items {
                write_value(out, item, indent + 2);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn is_flat_array(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(|i| is_scalar(i) || is_flat_array(i)))
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar(other),
    }
}

/// Rows of objects as aligned columns; nested values are shown inline.
fn write_table(out: &mut String, rows: &[Value], pad: &str) {
    let mut columns: Vec<String> = Vec::new();
    for row in rows {
        if let Value::Object(map) = row {
            for k in map.keys() {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            columns
                .iter()
                .map(|c| row.get(c).map(|v| if is_scalar(v) { scalar(v) } else { compact(v) }).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0).max(c.len()))
        .collect();
    let line = |vals: &[String]| {
        let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    out.push_str(&line(&columns));
    for r in &cells {
        out.push_str(&line(r));
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Array(_) if is_flat_array(v) => inline(v),
        other => serde_json::to_string(other).expect("serializable"),
    }
}
