use fleetsim_cli::{load_config, ExperimentConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn printed_config_loads_back(
        setup in prop_oneof![1u8..=10, 12u8..=15, 18u8..=19],
        agents in 1usize..200,
        duration in 1.0f64..1000.0,
        seed in any::<u32>(),
        latency in 0.0f64..1.0,
        noise in any::<bool>(),
    ) {
        let mut c = ExperimentConfig::from_preset(setup).unwrap();
        c.agents = agents;
        c.duration = duration;
        c.seed = seed as u64;
        c.comm.latency = latency;
        c.noise.enabled = noise;
        let back = load_config(&c.to_toml()).unwrap();
        prop_assert_eq!(back, c);
    }
}
