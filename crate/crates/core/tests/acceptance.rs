//! Acceptance criteria, one line per criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gbraid::cell::Flavor;
use gbraid::corpus::corpus;
use gbraid::fast;
use gbraid::formula::{self, beta2_formula, h1_formula, FormulaFlavor};
use gbraid::graph::{builtin, subdivide, theta, Graph};
use gbraid::homology::{self, OneCellTag};
use gbraid::morse::{build_subdivided, collect_chain, from_tree, Method, MorseComplex, Reducer};
use gbraid::planar;
use gbraid::presentation::{commutator_form, exponent_sum, letter_commutators, raw_presentation, simplify_with, Presentation};
use gbraid::snf::AbelianGroup;
use gbraid::tree::{fixtures, Mode};
use gbraid::Policy;

type Outcome = Result<String, String>;

const CAP: usize = 20_000_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(rank: usize, torsion: &[u64]) -> AbelianGroup {
    AbelianGroup { rank, torsion: torsion.to_vec() }
}

fn text(g: &AbelianGroup) -> String {
    let mut parts = vec![];
    if g.rank > 0 {
        parts.push(format!("Z^{}", g.rank));
    }
    parts.extend(g.torsion.iter().map(|t| format!("Z_{t}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn auto(g: &Graph, n: usize, f: Flavor) -> Result<MorseComplex, String> {
    build_subdivided(g, n, f, Method::Generic, Mode::Generic, Policy::Auto, CAP).map(|p| p.1).map_err(err)
}

fn fixture(t: gbraid::tree::OrderedTree, n: usize, f: Flavor, m: Method) -> Result<MorseComplex, String> {
    from_tree(t, n, f, m, CAP).map_err(err)
}

/// Every H1 route of the complex plus the closed formula must equal `want`.
fn both_routes(mc: &MorseComplex, g: &Graph, n: usize, ff: FormulaFlavor, want: &AbelianGroup) -> Outcome {
    let mut seen = vec![];
    for (route, h) in homology::h1_routes(mc) {
        ensure(&h == want, || format!("Morse route {route}: {}", text(&h)))?;
        seen.push(route);
    }
    let f = h1_formula(g, n, ff).map_err(err)?.group;
    ensure(&f == want, || format!("formula: {}", text(&f)))?;
    Ok(format!("{} by Morse ({}) and formula", text(want), seen.join(", ")))
}

fn c1() -> Outcome {
    let mc = fixture(fixtures::k33(), 2, Flavor::Unordered, Method::Generic)?;
    both_routes(&mc, &builtin("K33").map_err(err)?, 2, FormulaFlavor::B, &group(4, &[2]))
}

fn c2() -> Outcome {
    let mc = fixture(fixtures::k33(), 2, Flavor::Ordered, Method::Generic)?;
    both_routes(&mc, &builtin("K33").map_err(err)?, 2, FormulaFlavor::P2, &group(8, &[]))
}

fn c3() -> Outcome {
    let t = fixtures::k5();
    ensure(t.len() == 25, || format!("fixture has {} vertices", t.len()))?;
    let mc = fixture(t, 4, Flavor::Unordered, Method::Both)?;
    let s = both_routes(&mc, &builtin("K5").map_err(err)?, 4, FormulaFlavor::B, &group(6, &[2]))?;
    Ok(format!("{s}; 25 vertices, {} boundaries checked against closed formulas", mc.fast_cells))
}

fn c4() -> Outcome {
    let g = builtin("K5").map_err(err)?;
    let mc = auto(&g, 2, Flavor::Ordered)?;
    both_routes(&mc, &g, 2, FormulaFlavor::P2, &group(12, &[]))
}

/// Free 1-cells of B3 on the two-circles-and-theta graph, as listed with the example.
/// The loops d3 and d4 are compared by edge only: their blocked vertices sit on the loop.
fn census() -> BTreeSet<String> {
    let mut s: BTreeSet<String> = ["d_1", "d_2", "d_3", "d_4"].map(String::from).into();
    let v5 = ["1,0,0,0", "0,1,0,0", "2,0,0,0", "1,1,0,0", "0,2,0,0"];
    for d in ["d_1", "d_2"] {
        s.extend(v5.iter().map(|a| format!("{d}({a})")));
    }
    s.extend(["1,0,0,0", "2,0,0,0", "1,1,0,0"].iter().map(|a| format!("A_2({a})")));
    s.extend(v5.iter().map(|a| format!("A_3({a})")));
    s.extend(["1,0,0,0", "0,1,0,0", "0,0,1,0", "2,0,0,0", "1,1,0,0", "0,2,0,0"].iter().map(|a| format!("A_4({a})")));
    s
}

fn c5() -> Outcome {
    let mc = fixture(fixtures::fig_b3n3(), 3, Flavor::Unordered, Method::Generic)?;
    let g = builtin("FigB3n3").map_err(err)?;
    let s = both_routes(&mc, &g, 3, FormulaFlavor::B, &group(28, &[]))?;
    let tags = homology::classify_1cells(&mc).map_err(err)?;
    let free: BTreeSet<String> = mc.critical[1]
        .iter()
        .zip(&tags)
        .filter(|(_, t)| **t == OneCellTag::Free)
        .map(|(c, _)| {
            let l = mc.label(c);
            if l.starts_with("d_3") || l.starts_with("d_4") {
                l[..3].to_string()
            } else {
                l
            }
        })
        .collect();
    let want = census();
    ensure(free == want, || format!("free cells differ: extra {:?}, missing {:?}", free.difference(&want).collect::<Vec<_>>(), want.difference(&free).collect::<Vec<_>>()))?;
    let nc = formula::n_cut(3, 3, 7);
    ensure(nc == 23, || format!("N_cut(3,3,7) = {nc}"))?;
    Ok(format!("{s}; 28 free cells match the census; N_cut(3,3,7) = 23"))
}

fn c6() -> Outcome {
    let k4 = builtin("K4").map_err(err)?;
    both_routes(&auto(&k4, 2, Flavor::Unordered)?, &k4, 2, FormulaFlavor::B, &group(4, &[]))?;
    let mut out = vec!["K4: Z^4".to_string()];
    for m in [3, 4, 5] {
        let g = theta(m);
        let r = (m - 1) * (m - 2) / 2 + (m - 1);
        both_routes(&auto(&g, 2, Flavor::Unordered)?, &g, 2, FormulaFlavor::B, &group(r, &[]))?;
        out.push(format!("Theta{m}: Z^{r}"));
    }
    Ok(format!("{} by Morse and formula", out.join(", ")))
}

fn homology_vector(mc: &MorseComplex) -> Vec<AbelianGroup> {
    homology::homology(mc).iter().map(|h| h.group()).collect()
}

fn c7() -> Outcome {
    let mc = fixture(fixtures::theta4(), 3, Flavor::Unordered, Method::Generic)?;
    let counts = mc.counts();
    ensure(counts == [1, 8, 3], || format!("critical cells {counts:?}"))?;
    ensure(mc.euler_characteristic() == -4, || format!("chi = {}", mc.euler_characteristic()))?;
    let h = homology_vector(&mc);
    ensure(h[1] == group(6, &[]) && h[2] == group(1, &[]), || format!("H1 = {}, H2 = {}", text(&h[1]), text(&h[2])))?;
    let p = simplify_with(&raw_presentation(&mc).map_err(err)?, &mc, &mut |_| {}).map_err(err)?;
    ensure(p.generator_count() == 6 && p.relators.len() == 1, || format!("{} generators, {} relators", p.generator_count(), p.relators.len()))?;
    let r = &p.relators[0];
    let k = letter_commutators(r).map(|v| v.len());
    ensure(k == Some(3) && commutator_form(r).is_none(), || format!("relator {}", p.relator_text(r)))?;
    Ok(format!("cells (1,8,3), chi = -4, H1 = Z^6, H2 = Z; relator {}", p.relator_text(r)))
}

fn c8() -> Outcome {
    let mc = fixture(fixtures::theta4(), 3, Flavor::Ordered, Method::Generic)?;
    ensure(mc.euler_characteristic() == -24, || format!("chi = {}", mc.euler_characteristic()))?;
    let h = homology_vector(&mc);
    ensure(h[1] == group(26, &[]) && h[2] == group(1, &[]), || format!("H1 = {}, H2 = {}", text(&h[1]), text(&h[2])))?;
    ensure(h.iter().all(|g| g.is_torsion_free()), || "torsion present".into())?;
    Ok(format!("critical cells {:?}, chi = -24, H1 = Z^26, H2 = Z, torsion-free", mc.counts()))
}

const K5_BLOCK: [[i64; 7]; 7] = [
    [0, 0, -1, 0, -1, 0, 0],
    [0, 0, 0, 1, -1, 0, 0],
    [-1, 0, 0, 0, -1, 0, 0],
    [0, -1, 0, 0, 0, 0, -1],
    [0, 0, 0, 0, 1, 0, -1],
    [0, 0, 0, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, -1, -1],
];

fn c9() -> Outcome {
    let mc = fixture(fixtures::k5(), 4, Flavor::Unordered, Method::Fast)?;
    let b = homology::undetermined_block(&mc).map_err(err)?;
    let want: Vec<Vec<i64>> = K5_BLOCK.iter().map(|r| r.to_vec()).collect();
    ensure(b.matrix.len() == 7 && b.matrix.iter().all(|r| r.len() == 7), || format!("block is {}x{}", b.matrix.len(), b.cols.len()))?;
    let mut sorted_want = want.clone();
    sorted_want.sort();
    let found = (0u32..128).any(|signs| {
        let mut rows: Vec<Vec<i64>> = b
            .matrix
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &x)| if signs >> j & 1 == 1 { -x } else { x }).collect())
            .collect();
        rows.sort();
        rows == sorted_want
    });
    ensure(found, || format!("block {:?}", b.matrix))?;
    let f: Vec<String> = b.factors().iter().map(|x| x.to_string()).collect();
    ensure(f == ["1", "1", "1", "1", "1", "1", "2"], || format!("factors {f:?}"))?;
    Ok(format!("7x7 block over {}; SNF factors ({})", b.col_labels.join(", "), f.join(",")))
}

fn beta2(mc: &MorseComplex) -> usize {
    homology::homology(mc).get(2).map_or(0, |h| h.rank)
}

fn c10() -> Outcome {
    let k33 = builtin("K33").map_err(err)?;
    let k5 = builtin("K5").map_err(err)?;
    let mut out = vec![];
    for (name, g, mc) in [
        ("P2 K33", &k33, fixture(fixtures::k33(), 2, Flavor::Ordered, Method::Generic)?),
        ("P2 K5", &k5, auto(&k5, 2, Flavor::Ordered)?),
    ] {
        let f = beta2_formula(g, FormulaFlavor::P2).map_err(err)?;
        let d = beta2(&mc);
        ensure(f == 1 && d == 1, || format!("{name}: formula {f}, direct {d}"))?;
        out.push(format!("{name}: 1"));
    }
    let direct = beta2(&fixture(fixtures::k33(), 2, Flavor::Unordered, Method::Generic)?);
    let corrected = beta2_formula(&k33, FormulaFlavor::B).map_err(err)?;
    ensure(direct == 0 && corrected == 0, || format!("B2 K33: direct {direct}, formula {corrected}"))?;
    Ok(format!("{}; B2 K33: 0 direct and by the corrected formula (with a +2 constant it would be {})", out.join(", "), corrected + 2))
}

fn c11() -> Outcome {
    const SEED: u64 = 20_240_611;
    let graphs = corpus(SEED, 60);
    let mut stats = (0usize, 0usize, 0usize, 0usize);
    for (i, g) in graphs.iter().enumerate() {
        let tag = |m: String| format!("graph #{i} {}: {m}", g.to_json());
        let planar = planar::is_planar(g);
        stats.0 += usize::from(!planar);
        let mut h1 = vec![];
        for (n, f, ff) in [(2, Flavor::Unordered, FormulaFlavor::B), (3, Flavor::Unordered, FormulaFlavor::B), (2, Flavor::Ordered, FormulaFlavor::P2)] {
            let mc = auto(g, n, f).map_err(&tag)?;
            let morse = homology::h1(&mc);
            let form = h1_formula(g, n, ff).map_err(err).map_err(&tag)?.group;
            ensure(form == morse, || tag(format!("n = {n} {f:?}: formula {} vs Morse {}", text(&form), text(&morse))))?;
            ensure(morse.torsion.iter().all(|&x| x == 2), || tag(format!("torsion {:?}", morse.torsion)))?;
            ensure(!(planar || f == Flavor::Ordered) || morse.is_torsion_free(), || tag(format!("unexpected torsion, n = {n} {f:?}")))?;
            stats.1 += usize::from(!morse.is_torsion_free());
            ensure(mc.euler_characteristic() == mc.complex_euler_characteristic(), || tag("Euler characteristic".into()))?;
            for k in 2..mc.boundary.len() {
                ensure(mc.boundary[k - 1].compose(&mc.boundary[k]).is_zero(), || tag(format!("Morse boundary squares to nonzero in degree {k}")))?;
            }
            if fast::applicable(&mc.tree) {
                let mut red = Reducer::new(&mc.tree, f, false);
                for c in mc.critical.get(2).into_iter().flatten() {
                    if let Some(ch) = fast::fast_morse_boundary(&mc.tree, n, f, c).map_err(err)? {
                        let generic = red.morse_boundary(c).map_err(err)?;
                        ensure(collect_chain(ch) == collect_chain(generic), || tag(format!("closed formula differs on {}", mc.label(c))))?;
                        stats.2 += 1;
                    }
                }
            }
            h1.push(morse);
        }
        let (fine, _) = subdivide(g, 2, Policy::Fixed(2)).map_err(err)?;
        let again = homology::h1(&auto(&fine, 2, Flavor::Unordered)?);
        ensure(again == h1[0], || tag(format!("subdivision changed H1 to {}", text(&again))))?;
        if planar::biconnected_components(g).cut_vertices.is_empty() {
            ensure(h1[0] == h1[1], || tag("biconnected graph with n-dependent H1".into()))?;
            stats.3 += 1;
        }
    }
    Ok(format!(
        "{} graphs (seed {SEED}): {} non-planar, {} groups with torsion, {} biconnected, {} closed-formula boundaries checked",
        graphs.len(),
        stats.0,
        stats.1,
        stats.3,
        stats.2
    ))
}

/// Abelianization against H1 after every move; returns the simplified presentation.
fn tracked(mc: &MorseComplex) -> Result<Presentation, String> {
    let h1 = homology::h1(mc);
    let raw = raw_presentation(mc).map_err(err)?;
    ensure(raw.abelianization() == h1, || "raw presentation".into())?;
    let mut bad = None;
    let p = simplify_with(&raw, mc, &mut |p| {
        if bad.is_none() && p.abelianization() != h1 {
            bad = Some(format!("{:?}", p.history.last()));
        }
    })
    .map_err(err)?;
    match bad {
        Some(step) => Err(format!("abelianization differs from H1 after {step}")),
        None => Ok(p),
    }
}

fn c12() -> Outcome {
    let k5 = builtin("K5").map_err(err)?;
    let mut steps = 0;
    let mut cases: Vec<(String, MorseComplex, bool)> = vec![
        ("B2 K33".into(), fixture(fixtures::k33(), 2, Flavor::Unordered, Method::Generic)?, false),
        ("P2 K33".into(), fixture(fixtures::k33(), 2, Flavor::Ordered, Method::Generic)?, true),
        ("B4 K5".into(), fixture(fixtures::k5(), 4, Flavor::Unordered, Method::Fast)?, false),
        ("P2 K5".into(), auto(&k5, 2, Flavor::Ordered)?, true),
        ("B3 FigB3n3".into(), fixture(fixtures::fig_b3n3(), 3, Flavor::Unordered, Method::Generic)?, true),
        ("B3 Theta4".into(), fixture(fixtures::theta4(), 3, Flavor::Unordered, Method::Generic)?, true),
    ];
    for (name, f) in [("K4", builtin("K4").map_err(err)?), ("Theta3", theta(3)), ("Theta4", theta(4)), ("Theta5", theta(5)), ("FigB3n3", builtin("FigB3n3").map_err(err)?)] {
        for fl in [Flavor::Unordered, Flavor::Ordered] {
            let (h, _) = subdivide(&f, 2, Policy::Strict).map_err(err)?;
            let mc = gbraid::morse::build_morse_complex(&h, 2, fl, Method::Generic, Mode::Planar, CAP).map_err(err)?;
            let p = if fl == Flavor::Ordered { "P2" } else { "B2" };
            cases.push((format!("{p} {name} planar"), mc, true));
        }
    }
    for (name, mc, commutator_related) in &cases {
        let p = tracked(mc).map_err(|e| format!("{name}: {e}"))?;
        steps += p.history.len();
        if *commutator_related {
            for r in &p.relators {
                ensure(p.generators().iter().all(|&g| exponent_sum(r, g) == 0), || format!("{name}: relator {} has nonzero exponent sum", p.word_text(r)))?;
            }
        }
        if name.ends_with("planar") {
            let hom = homology::homology(mc);
            let (b1, b2) = (hom[1].rank, hom.get(2).map_or(0, |h| h.rank));
            ensure(p.generator_count() == b1 && p.relators.len() == b2, || {
                format!("{name}: {} generators / {} relators, want {b1} / {b2}", p.generator_count(), p.relators.len())
            })?;
            ensure(p.relators.iter().all(|r| commutator_form(r).is_some()), || format!("{name}: relator not a commutator"))?;
        }
    }
    Ok(format!("{} presentations, {steps} recorded moves, abelianization = H1 throughout", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("H1(B2 K33) = Z^4 + Z_2", c1, Duration::from_secs(1)),
        ("H1(P2 K33) = Z^8", c2, Duration::from_secs(1)),
        ("H1(B4 K5) = Z^6 + Z_2", c3, Duration::from_secs(300)),
        ("H1(P2 K5) = Z^12", c4, Duration::from_secs(30)),
        ("H1(B3 FigB3n3) = Z^28, free-cell census", c5, Duration::MAX),
        ("H1(B2 K4) and H1(B2 Theta_m)", c6, Duration::MAX),
        ("B3 Theta4 complex, homology and genus-3 relator", c7, Duration::MAX),
        ("D3 Theta4 Euler characteristic and homology", c8, Duration::MAX),
        ("undetermined block of B4 K5", c9, Duration::MAX),
        ("second Betti numbers", c10, Duration::MAX),
        ("random-corpus property suite", c11, Duration::from_secs(600)),
        ("presentation suite", c12, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (title, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(s) if took > *limit => Err(format!("{s}; took {took:.2?}, limit {limit:.0?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
