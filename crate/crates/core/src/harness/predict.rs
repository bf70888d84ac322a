use super::{fmt_real, ExperimentConfig, Scenario, Table};
use crate::analysis::{predict, Variant};
use crate::error::Result;

pub const PREDICT_HEADER: [&str; 7] = ["K", "slot", "variant", "E_L", "P", "P_patterns", "R"];

/// Predictor table over every `K`, every slot (1-based) and both variants.
pub fn run_predict(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate(Scenario::Predict)?;
    let profile = cfg.profile_or_default();
    let mut table = Table::new(PREDICT_HEADER.map(String::from).to_vec());
    for users in cfg.users.values() {
        for slot in 0..profile.sections() {
            for variant in [Variant::Full, Variant::OneStep] {
                let p = predict(users, &profile, slot, variant);
                table.rows.push(vec![
                    users.to_string(),
                    (slot + 1).to_string(),
                    variant.as_str().to_string(),
                    fmt_real(p.erroneous_paths),
                    fmt_real(p.partial_paths),
                    fmt_real(p.admissible_patterns),
                    fmt_real(p.reduction_ratio),
                ]);
            }
        }
    }
    Ok(table)
}
