use hardy_core::decay::consistency_matrix;

#[test]
fn catalogue_matrix_is_consistent() {
    let m = consistency_matrix();
    for r in &m.rows {
        println!(
            "{:<18} {:<26} {:<14} consistent={} {}",
            r.pair_id,
            r.role.as_str(),
            r.verdict.kind(),
            r.consistent,
            r.error.clone().unwrap_or_default()
        );
    }
    print!("{}", m.to_csv());
    assert!(m.rows.len() >= 13);
    assert!(m.all_consistent());
}
