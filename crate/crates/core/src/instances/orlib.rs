use super::{InstanceError, Tokens};
use crate::model::{Instance, Sense};

/// OR-Library set covering format: `m n`, then `n` column costs, then for
/// each row a count `k` followed by `k` one-based column indices. Tokens may
/// wrap across lines freely.
pub fn parse_orlib_scp(text: &str) -> Result<Instance, InstanceError> {
    let mut tokens = Tokens::new(text);
    let (line, m) = tokens.next_usize("row count m")?;
    let (_, n) = tokens.next_usize("column count n")?;
    if m == 0 || n == 0 {
        return Err(InstanceError::parse(line, "m and n must be positive"));
    }
    let mut c = Vec::with_capacity(n);
    for j in 0..n {
        let (_, cost) = tokens.next_number(&format!("cost of column {}", j + 1))?;
        c.push(cost);
    }
    let mut a = vec![vec![0u8; n]; m];
    for (i, row) in a.iter_mut().enumerate() {
        let (line, k) = tokens.next_usize(&format!("column count of row {}", i + 1))?;
        if k == 0 {
            return Err(InstanceError::parse(
                line,
                format!("row {} is covered by no column", i + 1),
            ));
        }
        for _ in 0..k {
            let (line, j) = tokens.next_usize(&format!("column index in row {}", i + 1))?;
            if j == 0 || j > n {
                return Err(InstanceError::parse(
                    line,
                    format!("column index {j} out of range 1..={n}"),
                ));
            }
            row[j - 1] = 1;
        }
    }
    tokens.finish()?;
    Ok(Instance::linear(a, c, Sense::Cover)?)
}
