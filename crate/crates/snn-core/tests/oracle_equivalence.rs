//! Differential test: the kernel against the brute-force re-simulation.

mod common;

use common::scenario;
use proptest::prelude::*;
use snn_core::reference;

proptest! {
    #[test]
    fn kernel_matches_bruteforce_resimulation(sc in scenario()) {
        let mut net = sc.build();
        let raster = net.run(&sc.schedule, sc.until).unwrap();
        let got: Vec<(usize, String, usize)> = raster
            .iter_named()
            .map(|(t, p, n)| (t, p.to_string(), n))
            .collect();
        let want = reference::simulate(&sc.pops, &sc.statics, &sc.plastics, &sc.schedule, sc.until);
        prop_assert_eq!(got, want);
    }
}
