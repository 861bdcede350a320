//! Regenerates `data/stieltjes.tsv` from the Euler–Maclaurin backend.
//!
//! cargo run --release -p zx-core --example gen_stieltjes > crates/core/data/stieltjes.tsv

use zx_core::scalar::with_digits;
use zx_core::stieltjes::{StieltjesTable, J_MAX, TABLE_DIGITS};

fn main() {
    let table = with_digits(TABLE_DIGITS + 10, || {
        StieltjesTable::computed(J_MAX, TABLE_DIGITS + 10).expect("computed table")
    });
    print!("{}", table.render(TABLE_DIGITS as usize));
}
