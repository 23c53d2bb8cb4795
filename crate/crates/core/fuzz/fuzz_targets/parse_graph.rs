#![no_main]

use bcdpf::topology::NetworkGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = NetworkGraph::parse_text(text) {
        let again = NetworkGraph::parse_text(&g.to_text()).expect("rendered graph must parse");
        assert_eq!(again, g);
    }
});
