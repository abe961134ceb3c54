use pspectra::acceptance::{run_criterion, CRITERIA};

#[test]
fn acceptance_criteria() {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let r = run_criterion(id, threads).unwrap();
        println!("{}", r.line());
        if !r.passed {
            failed.push(id);
        }
    }
    println!("passed {}/{CRITERIA}", CRITERIA - failed.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
