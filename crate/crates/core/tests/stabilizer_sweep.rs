use rigid_core::ring::q;
use rigid_core::rootsys::{Family, GroupType};
use rigid_core::stabilizer::{StabilizerContext, WeightKind};

fn cases(max_n: usize) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for f in [Family::GL, Family::SL, Family::SOOdd, Family::Sp, Family::SOEven] {
        for n in GroupType::min_admissible_rank(f)..=max_n {
            let lo = if f == Family::SOEven { 3 } else { 1 };
            for m in lo..=n {
                out.push((f, n, m));
            }
        }
    }
    out
}

#[test]
fn weight_kinds_follow_case_table() {
    let mut literal_failures = Vec::new();
    for (f, n, m) in cases(7) {
        let c = StabilizerContext::new(f, n, m, q(1)).unwrap_or_else(|e| panic!("{:?} {} {}: {}", f, n, m, e));
        let d = c.d() as usize;
        let has = |k: WeightKind| c.weights.iter().any(|w| w.kind == k);
        match f {
            Family::GL | Family::SL | Family::Sp => assert!(!has(WeightKind::II) && !has(WeightKind::III)),
            Family::SOOdd => {
                assert!(!has(WeightKind::II));
                assert_eq!(has(WeightKind::III), 2 * n >= 3 * d, "{} {}", n, m);
            }
            Family::SOEven => {
                if n <= d {
                    assert!(!has(WeightKind::II) && !has(WeightKind::III));
                } else if 2 * n <= 3 * d {
                    assert!(has(WeightKind::II) && !has(WeightKind::III), "{} {}", n, m);
                } else {
                    assert!(has(WeightKind::II) && has(WeightKind::III), "{} {}", n, m);
                }
            }
        }
        assert_eq!(c.tphi.dim, c.bases.uc_weights.len() + c.tphi.z_g_phi_dim);
        if !c.bases.literal_difference_sign {
            literal_failures.push((f, n, m));
        }
    }
    assert!(literal_failures.is_empty(), "{:?}", literal_failures);
}
