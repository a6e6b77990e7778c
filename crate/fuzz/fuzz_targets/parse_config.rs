#![no_main]

use boxhhg::config::{RawConfig, RunConfig, Sweep};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = Sweep::parse(text);
    if let Ok(raw) = RawConfig::parse(text) {
        if let Ok(cfg) = RunConfig::from_raw(&raw) {
            if let Ok(members) = cfg.members() {
                for m in members {
                    let text = m.to_config_text("out", cfg.format);
                    RawConfig::parse(&text).expect("member config text reparses");
                }
            }
        }
    }
});
