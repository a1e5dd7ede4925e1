#![no_main]

use libfuzzer_sys::fuzz_target;
use solrad::cli::artifact::ModelArtifact;
use solrad::network::forward;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = ModelArtifact::from_json(text) {
        let x = vec![0.0; model.net_config.input_dim];
        let _ = forward(&model.net_config, &model.params, &x);
        let again = ModelArtifact::from_json(&model.to_json()).expect("reload own output");
        assert_eq!(again, model);
    }
});
