use std::collections::BTreeSet;

use tandyn_core::registered_checks;

/// Check names in the second column of the README's verification table.
fn documented_checks() -> BTreeSet<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md");
    let readme = std::fs::read_to_string(path).unwrap();
    let section = readme
        .split("## Verification checks")
        .nth(1)
        .expect("section present");
    section
        .lines()
        .skip_while(|l| !l.starts_with('|'))
        .take_while(|l| l.starts_with('|'))
        .skip(2)
        .map(|row| {
            let cell = row.trim_end_matches('|').rsplit('|').next().unwrap().trim();
            cell.trim_matches('`').to_string()
        })
        .collect()
}

#[test]
fn readme_table_matches_registry() {
    let registry: BTreeSet<String> = registered_checks().into_iter().map(String::from).collect();
    assert_eq!(documented_checks(), registry);
}
