use std::fmt::Write as _;

use qsp_core::instances::{all_records, verify_record, CounterexampleId};

use crate::args::VerifyArgs;
use crate::Output;

pub fn run(args: &VerifyArgs) -> Output {
    let mut records = all_records();
    if args.tamper {
        let rec = records
            .iter_mut()
            .find(|r| r.id == CounterexampleId::T1)
            .expect("corpus contains every id");
        let mut d = rec.instance.d().to_vec();
        d[0][0] = 3.0;
        rec.instance = rec
            .instance
            .with_costs(rec.instance.c().to_vec(), d)
            .expect("same shape");
    }
    let mut outcomes: Vec<_> = records.iter().flat_map(verify_record).collect();
    outcomes.sort_by(|a, b| a.id.cmp(&b.id));

    let mut text = String::new();
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let _ = write!(text, "{tag} {}  [{}]  {}", o.id, o.operation, o.actual);
        if !o.passed {
            failed += 1;
            let _ = write!(text, "  (expected {})", o.expected);
        }
        text.push('\n');
    }
    let _ = writeln!(text, "{} of {} claims passed", outcomes.len() - failed, outcomes.len());
    Output {
        text,
        code: if failed == 0 { 0 } else { 1 },
    }
}
