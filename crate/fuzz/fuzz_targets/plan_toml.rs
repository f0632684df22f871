#![no_main]

use libfuzzer_sys::fuzz_target;
use polarsat::experiments::TrialPlan;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(plan) = TrialPlan::from_toml(text) {
        let again = TrialPlan::from_toml(&plan.to_toml()).expect("round trip parses");
        assert_eq!(plan.to_toml(), again.to_toml());
    }
});
