//! The cyclic grading by `rho_check / d`, the root system of `G_0` and its components.

use crate::error::{Error, Result};
use crate::rootsys::{Family, LeviData, Root, RootSystem};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Grading of the roots by height modulo `d`.
#[derive(Clone, Debug, Serialize)]
pub struct CoxeterGrading {
    #[serde(skip)]
    pub rs: RootSystem,
    pub levi: LeviData,
    pub d: i64,
    /// `pieces[i]` holds the roots of grade `i`, for `i` in `0..d`.
    pub pieces: Vec<Vec<Root>>,
}

impl CoxeterGrading {
    /// Grade of a root, in `0..d`.
    pub fn grade_of(&self, r: &Root) -> i64 {
        self.rs.height_unchecked(r).rem_euclid(self.d)
    }

    /// `Phi(G_0)`.
    pub fn phi_g0(&self) -> &[Root] {
        &self.pieces[0]
    }

    /// Positive roots of `G_0`.
    pub fn phi_g0_pos(&self) -> Vec<Root> {
        self.pieces[0].iter().filter(|r| self.rs.is_positive(r)).cloned().collect()
    }

    /// `Phi(m_1) = Delta_M + {-theta_M}`.
    pub fn phi_m1(&self) -> Vec<Root> {
        let mut v = self.levi.delta_m.clone();
        v.push(self.levi.theta_m.neg());
        v
    }

    /// `Phi(m_{-1})`.
    pub fn phi_m_minus1(&self) -> Vec<Root> {
        self.phi_m1().iter().map(Root::neg).collect()
    }

    /// `Phi(k) = Phi(g_1) \ Phi(m_1)`.
    pub fn phi_k(&self) -> Vec<Root> {
        let m1: BTreeSet<Root> = self.phi_m1().into_iter().collect();
        self.pieces[1 % self.d as usize].iter().filter(|r| !m1.contains(r)).cloned().collect()
    }

    /// `Phi(u_0)`: positive roots of grade zero.
    pub fn phi_u0(&self) -> Vec<Root> {
        self.phi_g0_pos()
    }

    pub fn family(&self) -> Family {
        self.rs.family()
    }

    pub fn n(&self) -> usize {
        self.rs.n()
    }

    pub fn m(&self) -> usize {
        self.levi.m
    }
}

/// Compute the grading.
pub fn grade(rs: &RootSystem, levi: &LeviData) -> CoxeterGrading {
    let d = levi.d;
    let mut pieces = vec![Vec::new(); d as usize];
    for r in &rs.roots {
        let k = rs.height_unchecked(r).rem_euclid(d) as usize;
        pieces[k].push(r.clone());
    }
    CoxeterGrading { rs: rs.clone(), levi: levi.clone(), d, pieces }
}

/// One component of `Phi(G_0)` after merging components with overlapping supports.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct G0Component {
    pub delta: Vec<Root>,
    pub chi_support: BTreeSet<usize>,
    /// Cartan label of the merged component, e.g. `A3`, `B2`, `D4`.
    pub cartan_type: String,
    /// Labels of the irreducible factors after the low rank identifications.
    pub irreducible: Vec<String>,
}

/// Simple system of `G_0` and its decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct G0Decomposition {
    pub phi_g0: Vec<Root>,
    pub delta_g0: Vec<Root>,
    pub components: Vec<G0Component>,
}

/// Indecomposable elements of a set of positive roots.
pub fn indecomposables(pos: &[Root]) -> Vec<Root> {
    let set: BTreeSet<&Root> = pos.iter().collect();
    let mut out: Vec<Root> = pos
        .iter()
        .filter(|g| !pos.iter().any(|a| set.contains(&g.sub(a)) && g.sub(a) != **g))
        .cloned()
        .collect();
    out.sort();
    out
}

fn e(dim: usize, i: i64) -> Root {
    Root::chi(dim, (i - 1) as usize, 1)
}

/// The explicit lists of simple roots of `G_0` (1-based index formulas).
pub fn delta_g0_closed_form(fam: Family, n: usize, m: usize) -> Vec<Root> {
    let n = n as i64;
    let m = m as i64;
    let mut out = Vec::new();
    match fam {
        Family::GL | Family::SL => {
            let dim = (n + 1) as usize;
            let d = m + 1;
            for i in 1..=n + 1 - d {
                out.push(e(dim, i).sub(&e(dim, i + d)));
            }
        }
        Family::SOOdd => {
            let dim = n as usize;
            let d = 2 * m;
            for i in 1..=n - d {
                out.push(e(dim, i).sub(&e(dim, i + d)));
            }
            if n >= d {
                out.push(e(dim, n + 1 - d));
            }
            for i in (n + 2 - d).max(1)..=n - m {
                let ib = 2 * n + 2 - d - i;
                if ib > i && ib <= n {
                    out.push(e(dim, i).add(&e(dim, ib)));
                }
            }
            if 2 * n >= 3 * d {
                out.push(e(dim, n + 1 - d - m).add(&e(dim, n + 1 - m)));
            }
        }
        Family::Sp => {
            let dim = n as usize;
            let d = 2 * m;
            for i in 1..=n - d {
                out.push(e(dim, i).sub(&e(dim, i + d)));
            }
            for i in (n + 1 - d).max(1)..=n - m {
                let ib = 2 * n + 1 - d - i;
                if ib > i && ib <= n {
                    out.push(e(dim, i).add(&e(dim, ib)));
                }
            }
        }
        Family::SOEven => {
            let dim = n as usize;
            let d = 2 * m - 2;
            for i in 1..=n - d {
                out.push(e(dim, i).sub(&e(dim, i + d)));
            }
            for i in (n + 1 - d).max(1)..=n - m {
                let ib = 2 * n - d - i;
                if ib > i && ib <= n {
                    out.push(e(dim, i).add(&e(dim, ib)));
                }
            }
            if n > d {
                out.push(e(dim, n - d).add(&e(dim, n)));
            }
            if 2 * n >= 3 * d + 2 {
                out.push(e(dim, n + 1 - d - m).add(&e(dim, n + 1 - m)));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Piecewise count of `|Delta(G_0)|`.
pub fn delta_g0_count_formula(fam: Family, n: usize, m: usize) -> usize {
    let (n, m) = (n as i64, m as i64);
    let c = match fam {
        Family::GL | Family::SL | Family::Sp => n - m,
        Family::SOOdd => {
            let d = 2 * m;
            if 2 * n < 3 * d {
                n - m
            } else {
                n - m + 1
            }
        }
        Family::SOEven => {
            let d = 2 * m - 2;
            if n <= d {
                n - m
            } else if 2 * n <= 3 * d {
                n - m + 1
            } else {
                n - m + 2
            }
        }
    };
    c as usize
}

/// Cartan label of a connected set of simple roots from its rank, support and lengths.
pub fn cartan_label(delta: &[Root]) -> Result<String> {
    let r = delta.len();
    let support: BTreeSet<usize> = delta.iter().flat_map(|a| a.support()).collect();
    let s = support.len();
    if delta.iter().any(|a| a.norm2() == 1) {
        return Ok(format!("B{}", r));
    }
    if delta.iter().any(|a| a.norm2() == 4) {
        return Ok(format!("C{}", r));
    }
    if s == r + 1 || r == 1 {
        Ok(format!("A{}", r))
    } else if s == r {
        Ok(format!("D{}", r))
    } else {
        Err(Error::Internal(format!("cannot classify component of rank {} on {} coordinates", r, s)))
    }
}

/// Irreducible factors after `B1 = A1`, `C1 = A1`, `D2 = A1 + A1`, `D3 = A3`, `C2 = B2`.
pub fn normalize_label(label: &str) -> Vec<String> {
    match label {
        "B1" | "C1" => vec!["A1".into()],
        "D2" => vec!["A1".into(), "A1".into()],
        "D3" => vec!["A3".into()],
        "C2" => vec!["B2".into()],
        other => vec![other.into()],
    }
}

/// Group simple roots: Dynkin-connected, then merged on shared support.
pub fn components_of(delta: &[Root]) -> Result<Vec<G0Component>> {
    let k = delta.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            let linked = delta[i].dot(&delta[j]) != 0 || !delta[i].support().is_disjoint(&delta[j].support());
            if linked {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Root>> = BTreeMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(delta[i].clone());
    }
    let mut comps = Vec::new();
    for (_, mut roots) in groups {
        roots.sort();
        let chi_support: BTreeSet<usize> = roots.iter().flat_map(|a| a.support()).collect();
        let cartan_type = cartan_label(&roots)?;
        let irreducible = normalize_label(&cartan_type);
        comps.push(G0Component { delta: roots, chi_support, cartan_type, irreducible });
    }
    comps.sort_by_key(|c| *c.chi_support.iter().next().unwrap_or(&0));
    Ok(comps)
}

/// Simple roots of `G_0`, checked against the explicit lists.
pub fn delta_g0(g: &CoxeterGrading) -> Result<G0Decomposition> {
    let pos = g.phi_g0_pos();
    let delta = indecomposables(&pos);
    let closed = delta_g0_closed_form(g.family(), g.n(), g.m());
    if delta != closed {
        return Err(Error::Internal(format!(
            "Delta(G_0) for {}{} m={}: computed {:?} but explicit list gives {:?}",
            g.family(),
            g.n(),
            g.m(),
            delta.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            closed.iter().map(|r| r.to_string()).collect::<Vec<_>>()
        )));
    }
    let components = components_of(&delta)?;
    let mut phi_g0 = g.phi_g0().to_vec();
    phi_g0.sort();
    Ok(G0Decomposition { phi_g0, delta_g0: delta, components })
}

/// The multiset of irreducible factor labels expected from the case analysis.
///
/// Entries `"A?"`, `"B?"`, `"D?"` stand for a factor of that letter and unspecified rank.
pub fn expected_irreducible_types(fam: Family, n: usize, m: usize) -> Vec<String> {
    let (ni, mi) = (n as i64, m as i64);
    let mut out: Vec<String>;
    let a_ranks = |total: i64, parts: i64| -> Vec<String> {
        let tau = total / parts;
        let sigma = total % parts;
        let mut v = Vec::new();
        for i in 0..parts {
            let r = if i < sigma { tau } else { tau - 1 };
            if r > 0 {
                v.push(format!("A{}", r));
            }
        }
        v
    };
    match fam {
        Family::GL | Family::SL => out = a_ranks(ni + 1, mi + 1),
        Family::Sp => {
            let d = 2 * mi;
            if ni < d {
                out = vec!["A1".to_string(); (ni - mi) as usize];
            } else {
                out = a_ranks(ni, mi);
            }
        }
        Family::SOOdd => {
            let d = 2 * mi;
            if ni < d {
                out = vec!["A1".to_string(); (ni - mi) as usize];
            } else if 2 * ni < 3 * d {
                out = vec!["A?".to_string(); (mi - 1) as usize];
                out.push("A1".into());
            } else {
                out = vec!["A?".to_string(); (mi - 1) as usize];
                out.push("B?".into());
                out.push("D?".into());
            }
        }
        Family::SOEven => {
            let d = 2 * mi - 2;
            if ni <= d {
                out = vec!["A1".to_string(); (ni - mi) as usize];
            } else if 2 * ni <= 3 * d {
                out = vec!["A?".to_string(); (mi - 2) as usize];
                out.push("A1".into());
                out.push("A1".into());
            } else {
                out = vec!["A?".to_string(); (mi - 2) as usize];
                out.push("D?".into());
                out.push("D?".into());
            }
        }
    }
    out
}

/// Compare computed components against [`expected_irreducible_types`].
///
/// A `D?` slot accepts `D_r` for `r >= 4` or its normalized forms (`A3`, `A1 + A1`).
pub fn types_match_case_analysis(dec: &G0Decomposition, fam: Family, n: usize, m: usize) -> bool {
    let expected = expected_irreducible_types(fam, n, m);
    let mut labels: Vec<String> = dec.components.iter().map(|c| c.cartan_type.clone()).collect();
    labels.sort();
    let mut exp = expected.clone();
    exp.sort();
    // Try to assign each computed merged component to one expected slot.
    fn letter(s: &str) -> char {
        s.chars().next().unwrap()
    }
    fn fits(slot: &str, label: &str) -> bool {
        if !slot.ends_with('?') {
            return normalize_label(label) == vec![slot.to_string()];
        }
        match letter(slot) {
            'A' => normalize_label(label).iter().all(|l| letter(l) == 'A') && normalize_label(label).len() == 1,
            'B' => letter(label) == 'B',
            'D' => letter(label) == 'D',
            _ => false,
        }
    }
    // Expected components are counted before merging the D2 fork, so a merged D2 may fill two A1 slots.
    fn assign(labels: &[String], slots: &mut Vec<String>) -> bool {
        let Some((l, rest)) = labels.split_first() else { return slots.is_empty() };
        for i in 0..slots.len() {
            if fits(&slots[i], l) {
                let s = slots.remove(i);
                if assign(rest, slots) {
                    return true;
                }
                slots.insert(i, s);
            }
        }
        if l == "D2" {
            for i in 0..slots.len() {
                for j in i + 1..slots.len() {
                    if slots[i] == "A1" && slots[j] == "A1" {
                        let sj = slots.remove(j);
                        let si = slots.remove(i);
                        if assign(rest, slots) {
                            return true;
                        }
                        slots.insert(i, si);
                        slots.insert(j, sj);
                    }
                }
            }
        }
        false
    }
    assign(&labels, &mut exp)
}

/// Result of the `g_1` component analysis.
#[derive(Clone, Debug, Serialize)]
pub struct G1Components {
    pub components: Vec<Vec<Root>>,
    pub count: usize,
    /// `n + 1 - |Delta(G_0)|`.
    pub expected_count: usize,
    /// Number of highest weights of `g_1` under the positive roots of `G_0`.
    pub highest_weights: usize,
    /// True when `M = G`, where `G_0` is the torus.
    pub m_equals_g: bool,
}

/// Connected components of `Phi(g_1)` under steps by `Phi(G_0)`.
pub fn g1_components(g: &CoxeterGrading) -> Result<G1Components> {
    let g1: Vec<Root> = g.pieces[1 % g.d as usize].clone();
    let idx: BTreeMap<&Root, usize> = g1.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut parent: Vec<usize> = (0..g1.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        r
    }
    for (i, gamma) in g1.iter().enumerate() {
        for b in g.phi_g0() {
            if let Some(&j) = idx.get(&gamma.add(b)) {
                let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = c;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Root>> = BTreeMap::new();
    for i in 0..g1.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(g1[i].clone());
    }
    let m1: BTreeSet<Root> = g.phi_m1().into_iter().collect();
    let mut components: Vec<Vec<Root>> = groups.into_values().collect();
    for c in components.iter_mut() {
        c.sort();
    }
    components.sort();
    for c in &components {
        if !c.iter().any(|r| m1.contains(r)) {
            return Err(Error::violation(
                "g1 submodules meet m1",
                format!("component {:?} misses Phi(m_1)", c.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
            ));
        }
    }
    let pos0 = g.phi_g0_pos();
    let highest_weights = g1.iter().filter(|gm| pos0.iter().all(|b| !g.rs.is_root(&gm.add(b)))).count();
    let dg0 = indecomposables(&pos0).len();
    let count = components.len();
    Ok(G1Components {
        components,
        count,
        expected_count: g.n() + 1 - dg0,
        highest_weights,
        m_equals_g: g.m() == g.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, GroupType};

    fn setup(f: Family, n: usize, m: usize) -> CoxeterGrading {
        let rs = build_root_system(GroupType::new(f, n)).unwrap();
        let l = rs.admissible_levi(m).unwrap();
        grade(&rs, &l)
    }

    #[test]
    fn kloosterman_case_has_torus_g0() {
        let g = setup(Family::GL, 3, 3);
        assert!(g.pieces[0].is_empty());
        let c = g1_components(&g).unwrap();
        assert_eq!(c.count, 4);
        assert!(c.m_equals_g);
    }

    #[test]
    fn sp3_examples() {
        let g = setup(Family::Sp, 3, 2);
        // Height of 2x1 is 5 with rho_check = (5/2, 3/2, 1/2).
        assert_eq!(g.grade_of(&Root(vec![2, 0, 0])), 1);
        let dec = delta_g0(&g).unwrap();
        assert_eq!(dec.delta_g0, vec![Root(vec![1, 1, 0])]);
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].cartan_type, "A1");
        assert_eq!(g1_components(&g).unwrap().count, 3);
    }

    #[test]
    fn so13_example() {
        let g = setup(Family::SOOdd, 6, 2);
        assert_eq!(g.grade_of(&Root(vec![1, 0, 0, 0, 1, 0])), 0);
        let dec = delta_g0(&g).unwrap();
        assert_eq!(dec.delta_g0.len(), 5);
        assert!(types_match_case_analysis(&dec, Family::SOOdd, 6, 2));
    }

    #[test]
    fn gl5_example() {
        let g = setup(Family::GL, 4, 2);
        let dec = delta_g0(&g).unwrap();
        assert_eq!(dec.delta_g0, vec![Root(vec![0, 1, 0, 0, -1]), Root(vec![1, 0, 0, -1, 0])]);
        let labels: Vec<_> = dec.components.iter().map(|c| c.cartan_type.as_str()).collect();
        assert_eq!(labels, vec!["A1", "A1"]);
    }
}
