use num_rational::BigRational;

use crate::numeric::{format_decimal, to_f64};

#[derive(Clone, Debug, PartialEq)]
pub struct ValueRow {
    pub state: String,
    pub value: BigRational,
    pub actions: String,
}

/// Exported dynamic-programming values, one row per canonical state.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValueTable {
    pub rows: Vec<ValueRow>,
}

impl ValueTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,value_num,value_den,value,optimal_actions\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.state,
                r.value.numer(),
                r.value.denom(),
                format_decimal(to_f64(&r.value)),
                r.actions
            ));
        }
        out
    }
}
