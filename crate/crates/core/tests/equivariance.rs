mod common;

use common::max_equivariance_error;

#[test]
fn hundred_relabelings_within_1e9() {
    let worst = max_equivariance_error(100);
    assert!(worst <= 1e-9, "max deviation {worst:e}");
}
