//! Sparse operator dump: one `row col re im` line per stored entry, ordered
//! by row then column.

use std::io::Write;

use dualrail_core::fock::FockOperator;

use crate::table::format_number;

pub fn write_operator(op: &FockOperator, out: &mut impl Write) -> std::io::Result<()> {
    // triplets() walks CSR rows with sorted columns, so the order is (row, col)
    for (r, c, v) in op.triplets() {
        writeln!(
            out,
            "{r} {c} {} {}",
            format_number(v.re),
            format_number(v.im)
        )?;
    }
    Ok(())
}

pub fn operator_to_string(op: &FockOperator) -> String {
    let mut buf = Vec::new();
    write_operator(op, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("dump is ASCII")
}
