use rigid_core::grading::*;
use rigid_core::rootsys::*;

fn admissible_cases(max_n: usize) -> Vec<(Family, usize, usize)> {
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
fn delta_g0_lists_counts_and_types() {
    for (f, n, m) in admissible_cases(7) {
        let rs = build_root_system(GroupType::new(f, n)).unwrap();
        let levi = rs.admissible_levi(m).unwrap();
        let g = grade(&rs, &levi);
        let dec = delta_g0(&g).unwrap_or_else(|e| panic!("{:?} n={} m={}: {}", f, n, m, e));
        assert_eq!(dec.delta_g0.len(), delta_g0_count_formula(f, n, m), "{:?} n={} m={}", f, n, m);
        assert!(types_match_case_analysis(&dec, f, n, m), "{:?} n={} m={}: {:?}", f, n, m, dec.components);
        for (i, a) in dec.components.iter().enumerate() {
            for b in dec.components.iter().skip(i + 1) {
                assert!(a.chi_support.is_disjoint(&b.chi_support));
            }
        }
    }
}

#[test]
fn g1_components_count() {
    for (f, n, m) in admissible_cases(7) {
        let rs = build_root_system(GroupType::new(f, n)).unwrap();
        let levi = rs.admissible_levi(m).unwrap();
        let g = grade(&rs, &levi);
        let c = g1_components(&g).unwrap();
        assert_eq!(c.count, c.highest_weights, "{:?} n={} m={}", f, n, m);
        assert_eq!(c.count, c.expected_count, "{:?} n={} m={}", f, n, m);
    }
}
