//! Configuration schema shipped with the binary. Report schemas live next to
//! it in `schemas/` and are checked by the integration tests.

use serde_json::Value;

pub const RUN_CONFIG: &str = include_str!("../schemas/run_config.schema.json");

/// Validates `instance` against a schema, joining all violations.
pub fn check(schema: &str, instance: &Value) -> Result<(), String> {
    let schema: Value = serde_json::from_str(schema).expect("bundled schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let errors: Vec<String> =
        validator.iter_errors(instance).map(|e| format!("{} at '{}'", e, e.instance_path())).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors.join("; "))
    }
}
