//! Self-similar actions on the |X|-regular rooted tree, used as an
//! oracle that is independent of the quotient engine: each machine
//! generator carries a root permutation and one section per letter, and
//! relators of a presentation can be checked to act trivially on all
//! vertices up to a chosen depth.

use crate::lpres::{self, word_string, LPresentation, LpresError, Parser, Tok};
use crate::words::{commutator, FreeWord};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

const SECTION_GUARD: u64 = 2_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfSimilarMachine {
    alphabet: usize,
    generator_names: Vec<String>,
    perms: Vec<Vec<usize>>,
    sections: Vec<Vec<FreeWord>>,
}

impl SelfSimilarMachine {
    pub fn new(
        alphabet: usize,
        generator_names: Vec<String>,
        gens: Vec<(Vec<usize>, Vec<FreeWord>)>,
    ) -> Self {
        assert!(alphabet >= 1);
        assert_eq!(generator_names.len(), gens.len());
        let n = gens.len() as u32;
        let mut perms = Vec::new();
        let mut sections = Vec::new();
        for (perm, secs) in gens {
            assert_eq!(perm.len(), alphabet, "permutation has wrong length");
            let mut seen = vec![false; alphabet];
            for &y in &perm {
                assert!(y < alphabet && !seen[y], "not a permutation of the alphabet");
                seen[y] = true;
            }
            assert_eq!(secs.len(), alphabet, "one section per letter required");
            for s in &secs {
                assert!(s.max_gen() <= n, "section references an unknown generator");
            }
            perms.push(perm);
            sections.push(secs);
        }
        SelfSimilarMachine { alphabet, generator_names, perms, sections }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn num_gens(&self) -> usize {
        self.generator_names.len()
    }

    /// Root permutation and sections of a single signed letter.
    fn letter_perm(&self, g: u32, sign: i8, x: usize) -> (usize, FreeWord) {
        let gi = (g - 1) as usize;
        if sign > 0 {
            (self.perms[gi][x], self.sections[gi][x].clone())
        } else {
            let y = self.perms[gi].iter().position(|&im| im == x).unwrap();
            (y, self.sections[gi][y].inverse())
        }
    }

    /// Root permutation and all first-level sections of a word, with the
    /// convention w(x v) = perm[x] · sections[x](v).
    pub fn decompose(&self, w: &FreeWord) -> (Vec<usize>, Vec<FreeWord>) {
        let mut perm: Vec<usize> = (0..self.alphabet).collect();
        let mut secs: Vec<FreeWord> = vec![FreeWord::identity(); self.alphabet];
        // extend on the right: (u v)@x = u@(perm_v(x)) * v@x for each
        // single letter v, so walk the letters left to right
        for (g, sign) in w.letters() {
            let mut new_perm = vec![0; self.alphabet];
            let mut new_secs = vec![FreeWord::identity(); self.alphabet];
            for x in 0..self.alphabet {
                let (lx, lsec) = self.letter_perm(g, sign, x);
                new_perm[x] = perm[lx];
                let mut s = std::mem::take(&mut secs[lx]);
                for (h, e) in lsec.syllables() {
                    s.push_syllable(*h, e.clone());
                }
                new_secs[x] = s;
            }
            perm = new_perm;
            secs = new_secs;
        }
        (perm, secs)
    }

    /// Image of the vertex v (a path from the root) under the word g.
    pub fn act(&self, g: &FreeWord, v: &[usize]) -> Vec<usize> {
        for &x in v {
            assert!(x < self.alphabet, "letter out of range");
        }
        let letters: Vec<(u32, i8)> = g.letters().collect();
        let mut cur = v.to_vec();
        for &(gen, sign) in letters.iter().rev() {
            cur = self.act_letter(gen, sign, &cur);
        }
        cur
    }

    fn act_letter(&self, gen: u32, sign: i8, v: &[usize]) -> Vec<usize> {
        if v.is_empty() {
            return Vec::new();
        }
        let (y, sec) = self.letter_perm(gen, sign, v[0]);
        let mut out = Vec::with_capacity(v.len());
        out.push(y);
        out.extend(self.act(&sec, &v[1..]));
        out
    }

    /// Lexicographically first vertex of depth ≤ d moved by g, if any.
    pub fn find_moved_vertex(&self, g: &FreeWord, d: usize) -> Option<Vec<usize>> {
        let mut prefix = Vec::new();
        let mut steps = 0u64;
        self.find_rec(g, d, &mut prefix, &mut steps)
    }

    fn find_rec(
        &self,
        w: &FreeWord,
        d: usize,
        prefix: &mut Vec<usize>,
        steps: &mut u64,
    ) -> Option<Vec<usize>> {
        if w.is_identity() || d == 0 {
            return None;
        }
        *steps += w.length().expect("word too long for the tree oracle");
        assert!(*steps < SECTION_GUARD, "tree oracle guard exceeded; word does not contract");
        let (perm, secs) = self.decompose(w);
        for (x, &y) in perm.iter().enumerate() {
            if y != x {
                let mut v = prefix.clone();
                v.push(x);
                return Some(v);
            }
        }
        for (x, sec) in secs.iter().enumerate() {
            prefix.push(x);
            if let Some(v) = self.find_rec(sec, d - 1, prefix, steps) {
                return Some(v);
            }
            prefix.pop();
        }
        None
    }

    /// True iff g fixes every vertex of depth ≤ d.
    pub fn trivial_to_depth(&self, g: &FreeWord, d: usize) -> bool {
        self.find_moved_vertex(g, d).is_none()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("machine {\n");
        out.push_str(&format!("  alphabet: {};\n", self.alphabet));
        for (i, name) in self.generator_names.iter().enumerate() {
            let perm: Vec<String> = self.perms[i].iter().map(|x| x.to_string()).collect();
            let secs: Vec<String> = self.sections[i]
                .iter()
                .map(|w| word_string(&self.generator_names, w))
                .collect();
            out.push_str(&format!(
                "  gen {}: perm ({}), sections ({});\n",
                name,
                perm.join(" "),
                secs.join(", ")
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn parse(text: &str) -> Result<SelfSimilarMachine, LpresError> {
        // pre-scan for generator names so sections can reference machine
        // generators declared later
        let scan = Parser::new(text)?;
        let mut names: Vec<String> = Vec::new();
        let mut toks = scan.tokens().peekable();
        while let Some(t) = toks.next() {
            if let Tok::Ident(s) = t {
                if s == "gen" {
                    if let Some(Tok::Ident(name)) = toks.peek() {
                        names.push(name.clone());
                    }
                }
            }
        }

        let mut p = Parser::new(text)?;
        p.gens = names.clone();
        match p.next() {
            Some(Tok::Ident(s)) if s == "machine" => {}
            _ => return Err(p.err("expected 'machine'")),
        }
        p.expect(&Tok::LBrace)?;
        let mut alphabet: Option<usize> = None;
        let mut gens: Vec<(Vec<usize>, Vec<FreeWord>)> = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        loop {
            match p.peek() {
                Some(Tok::RBrace) => {
                    p.next();
                    break;
                }
                None => return Err(p.err("unterminated 'machine' block")),
                _ => {}
            }
            let key = p.expect_ident()?;
            match key.as_str() {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(p.err("duplicate 'alphabet'"));
                    }
                    p.expect(&Tok::Colon)?;
                    let n = p.expect_int()?;
                    let n = n.to_usize().filter(|&n| n >= 1).ok_or_else(|| {
                        p.err("alphabet size must be a positive integer")
                    })?;
                    alphabet = Some(n);
                    p.expect(&Tok::Semi)?;
                }
                "gen" => {
                    let size = alphabet.ok_or_else(|| p.err("'alphabet' must come first"))?;
                    let name = p.expect_ident()?;
                    if seen.contains(&name) {
                        return Err(p.err(format!("duplicate generator {:?}", name)));
                    }
                    p.expect(&Tok::Colon)?;
                    let kw = p.expect_ident()?;
                    if kw != "perm" {
                        return Err(p.err("expected 'perm'"));
                    }
                    p.expect(&Tok::LParen)?;
                    let mut perm = Vec::new();
                    while p.peek() != Some(&Tok::RParen) {
                        let v = p.expect_int()?;
                        let v = v
                            .to_usize()
                            .filter(|&v| v < size)
                            .ok_or_else(|| p.err("permutation image out of range"))?;
                        perm.push(v);
                    }
                    p.expect(&Tok::RParen)?;
                    p.expect(&Tok::Comma)?;
                    let kw = p.expect_ident()?;
                    if kw != "sections" {
                        return Err(p.err("expected 'sections'"));
                    }
                    p.expect(&Tok::LParen)?;
                    let mut secs = Vec::new();
                    loop {
                        secs.push(p.parse_word()?);
                        match p.next() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RParen) => break,
                            _ => return Err(p.err("expected ',' or ')'")),
                        }
                    }
                    p.expect(&Tok::Semi)?;
                    if perm.len() != size || secs.len() != size {
                        return Err(p.err(format!(
                            "generator {:?} needs {} permutation images and sections",
                            name, size
                        )));
                    }
                    let mut check = vec![false; size];
                    for &v in &perm {
                        if check[v] {
                            return Err(p.err("not a permutation"));
                        }
                        check[v] = true;
                    }
                    seen.push(name);
                    gens.push((perm, secs));
                }
                other => return Err(p.err(format!("unknown section {:?}", other))),
            }
        }
        if !p.at_end() {
            return Err(p.err("trailing input after closing '}'"));
        }
        let alphabet = alphabet.ok_or_else(|| p.err("missing 'alphabet'"))?;
        Ok(SelfSimilarMachine::new(alphabet, seen, gens))
    }
}

/// Substitute machine words for presentation generators.
pub fn map_word(generator_map: &[FreeWord], w: &FreeWord) -> FreeWord {
    let mut out = FreeWord::identity();
    for (g, e) in w.syllables() {
        out = out.multiply(&generator_map[(*g - 1) as usize].pow(e));
    }
    out
}

#[derive(Clone, Debug)]
pub struct VerifyFailure {
    /// Where the relator instance came from, e.g. "iter[2] via sigma,sigma".
    pub source: String,
    /// The relator instance over presentation generators.
    pub relator: FreeWord,
    /// Its image over machine generators.
    pub mapped: FreeWord,
    /// A vertex it moves.
    pub vertex: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checked: usize,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check that every fixed relator, and every image of an iterated relator
/// under endomorphism words of length ≤ iter_bound, acts trivially on the
/// tree to the given depth under the map presentation generator ↦ machine
/// word.
pub fn verify_lpres(
    m: &SelfSimilarMachine,
    p: &LPresentation,
    generator_map: &[FreeWord],
    iter_bound: usize,
    depth: usize,
) -> VerifyReport {
    assert_eq!(generator_map.len(), p.num_gens(), "one machine word per generator");
    for w in generator_map {
        assert!(w.max_gen() as usize <= m.num_gens());
    }
    let mut report = VerifyReport::default();
    let check = |source: String, relator: &FreeWord, report: &mut VerifyReport| {
        let mapped = map_word(generator_map, relator);
        report.checked += 1;
        if let Some(vertex) = m.find_moved_vertex(&mapped, depth) {
            report.failures.push(VerifyFailure {
                source,
                relator: relator.clone(),
                mapped,
                vertex,
            });
        }
    };
    for (qi, q) in p.fixed_relators().iter().enumerate() {
        check(format!("fixed[{}]", qi), q, &mut report);
    }
    // endomorphism words of length 0..=iter_bound, shortest first
    let endos = p.endomorphisms();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..iter_bound {
        let mut next = Vec::new();
        for w in &frontier {
            for e in 0..endos.len() {
                let mut w2 = w.clone();
                w2.push(e);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
        if endos.is_empty() {
            break;
        }
    }
    for seq in &words {
        for (ri, r) in p.iterated_relators().iter().enumerate() {
            // apply the sequence with the leftmost name outermost
            let mut inst = r.clone();
            for &e in seq.iter().rev() {
                inst = endos[e].1.apply(&inst);
            }
            let names: Vec<&str> = seq.iter().map(|&e| endos[e].0.as_str()).collect();
            let source = if names.is_empty() {
                format!("iter[{}]", ri)
            } else {
                format!("iter[{}] via {}", ri, names.join(","))
            };
            check(source, &inst, &mut report);
        }
    }
    report
}

// ---------------------------------------------------------------------------
// catalog machines

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn shift_perm(p: usize) -> Vec<usize> {
    (0..p).map(|x| (x + 1) % p).collect()
}

fn id_perm(p: usize) -> Vec<usize> {
    (0..p).collect()
}

fn trivial_sections(p: usize) -> Vec<FreeWord> {
    vec![FreeWord::identity(); p]
}

/// Fabrykowski-Gupta machine on {a, r}: a is the cyclic shift with
/// trivial sections; r fixes the top level with r@0 = r, r@1 = a.
pub fn fg_machine(p: usize) -> SelfSimilarMachine {
    assert!(p >= 3);
    let mut r_secs = trivial_sections(p);
    r_secs[0] = FreeWord::gen(2);
    r_secs[1] = FreeWord::gen(1);
    SelfSimilarMachine::new(
        p,
        names(&["a", "r"]),
        vec![(shift_perm(p), trivial_sections(p)), (id_perm(p), r_secs)],
    )
}

/// Gupta-Sidki machine on {a, t}: a is the cyclic shift; t@0 = t and
/// t@x = a^x for x > 0.
pub fn gs_machine(p: usize) -> SelfSimilarMachine {
    assert!(p >= 3);
    let mut t_secs: Vec<FreeWord> = (0..p).map(|x| FreeWord::gen_pow(1, x as i64)).collect();
    t_secs[0] = FreeWord::gen(2);
    SelfSimilarMachine::new(
        p,
        names(&["a", "t"]),
        vec![(shift_perm(p), trivial_sections(p)), (id_perm(p), t_secs)],
    )
}

/// Grigorchuk machine on {a, c, d} over the binary tree: a swaps the two
/// subtrees, c = (a, d), d = (1, cd). The section cd realizes the fourth
/// standard generator b, consistent with the relators b², c², d², bcd.
pub fn grigorchuk_machine() -> SelfSimilarMachine {
    let (a, c, d) = (FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3));
    SelfSimilarMachine::new(
        2,
        names(&["a", "c", "d"]),
        vec![
            (vec![1, 0], trivial_sections(2)),
            (vec![0, 1], vec![a, d.clone()]),
            (vec![0, 1], vec![FreeWord::identity(), c.multiply(&d)]),
        ],
    )
}

/// Machine, presentation, and generator map for a named catalog pairing:
/// `grigorchuk`, `grigorchuk-invariant`, `fg:P`, `fg-full:P`, `gs:P`.
pub fn catalog_pairing(
    name: &str,
) -> Result<(SelfSimilarMachine, LPresentation, Vec<FreeWord>), LpresError> {
    let p = lpres::catalog(name)?;
    let mut parts = name.splitn(2, ':');
    let head = parts.next().unwrap_or("");
    let param: usize = parts.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    match head {
        "grigorchuk" => {
            let map = vec![FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3)];
            Ok((grigorchuk_machine(), p, map))
        }
        "grigorchuk-invariant" => {
            let map = vec![
                FreeWord::gen(1),
                FreeWord::gen(2).multiply(&FreeWord::gen(3)),
                FreeWord::gen(2),
                FreeWord::gen(3),
            ];
            Ok((grigorchuk_machine(), p, map))
        }
        "fg" | "fg-full" => {
            let map = vec![FreeWord::gen(1), FreeWord::gen(2)];
            Ok((fg_machine(param), p, map))
        }
        "gs" => {
            let map = (1..=param as i64)
                .map(|i| {
                    FreeWord::gen_pow(1, -i)
                        .multiply(&FreeWord::gen(2))
                        .multiply(&FreeWord::gen_pow(1, i))
                })
                .collect();
            Ok((gs_machine(param), p, map))
        }
        _ => Err(LpresError::Invalid(format!("no machine pairing for {:?}", name))),
    }
}

/// Check one instance of the commutator-transversal identity in the
/// Gupta-Sidki action: the bracket of sigma_i^{(j-k)e} sigma_j^{(k-i)e}
/// with sigma_k^{(i-j)e} sigma_i^{(j-k)e} must equal
/// sigma_{i,(j-i)(i-k)e}^{-2(j-k)e} sigma_i^{2(j-k)e} to the given depth.
pub fn gs_commutator_identity_holds(
    p: u32,
    i: u32,
    j: u32,
    k: u32,
    e: i64,
    depth: usize,
) -> bool {
    assert!(i != j && j != k && i != k, "indices must be distinct");
    assert!((1..=p).contains(&i) && (1..=p).contains(&j) && (1..=p).contains(&k));
    let (pi, ii, jj, kk) = (p as i64, i as i64, j as i64, k as i64);
    let lhs = commutator(
        &FreeWord::gen_pow(i, (jj - kk) * e).multiply(&FreeWord::gen_pow(j, (kk - ii) * e)),
        &FreeWord::gen_pow(k, (ii - jj) * e).multiply(&FreeWord::gen_pow(i, (jj - kk) * e)),
    );
    let ell = ((jj - ii) * (ii - kk) * e).rem_euclid(pi) as u32;
    let rhs = lpres::sigma_i_ell(p, i, ell)
        .pow(&BigInt::from(-2 * (jj - kk) * e))
        .multiply(&FreeWord::gen_pow(i, 2 * (jj - kk) * e));
    let diff = lhs.multiply(&rhs.inverse());
    let map: Vec<FreeWord> = (1..=pi)
        .map(|idx| {
            FreeWord::gen_pow(1, -idx)
                .multiply(&FreeWord::gen(2))
                .multiply(&FreeWord::gen_pow(1, idx))
        })
        .collect();
    gs_machine(p as usize).trivial_to_depth(&map_word(&map, &diff), depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fg_machine_action_examples() {
        let m = fg_machine(3);
        let (a, r) = (FreeWord::gen(1), FreeWord::gen(2));
        assert_eq!(m.act(&a, &[0, 0]), vec![1, 0]);
        assert_eq!(m.act(&r, &[0]), vec![0]);
        assert_eq!(m.act(&r, &[1, 0]), vec![1, 1]);
        assert_eq!(m.act(&FreeWord::identity(), &[2, 1, 0]), vec![2, 1, 0]);
        // a has order 3 on the first level
        assert_eq!(m.act(&a.pow(&BigInt::from(3)), &[0]), vec![0]);
    }

    #[test]
    fn action_is_homomorphic_and_prefix_preserving() {
        let machines = [fg_machine(3), gs_machine(5), grigorchuk_machine()];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for m in &machines {
            let ng = m.num_gens() as u32;
            let p = m.alphabet_size();
            for _ in 0..50 {
                let rand_word = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let n = rng.gen_range(0..6);
                    FreeWord::from_syllables((0..n).map(|_| {
                        (rng.gen_range(1..=ng), BigInt::from(rng.gen_range(-2..=2i64)))
                    }))
                };
                let u = rand_word(&mut rng);
                let v = rand_word(&mut rng);
                let w: Vec<usize> = (0..5).map(|_| rng.gen_range(0..p)).collect();
                assert_eq!(m.act(&u.multiply(&v), &w), m.act(&u, &m.act(&v, &w)));
                let img = m.act(&u, &w);
                assert_eq!(img.len(), w.len());
                assert_eq!(img[..3].to_vec(), m.act(&u, &w[..3]));
                // decompose agrees with direct action
                let (perm, secs) = m.decompose(&u);
                let mut via = vec![perm[w[0]]];
                via.extend(m.act(&secs[w[0]], &w[1..]));
                assert_eq!(via, img);
                // inverses act inversely
                assert_eq!(m.act(&u.inverse(), &img), w);
            }
        }
    }

    #[test]
    fn triviality_checks() {
        let gs = gs_machine(3);
        let t = FreeWord::gen(2);
        assert!(gs.trivial_to_depth(&t.pow(&BigInt::from(3)), 6));
        assert!(!gs.trivial_to_depth(&t, 2));
        assert_eq!(gs.find_moved_vertex(&FreeWord::gen(1), 3), Some(vec![0]));
        assert!(gs.trivial_to_depth(&FreeWord::identity(), 8));

        let gr = grigorchuk_machine();
        let (a, c, d) = (FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3));
        assert!(gr.trivial_to_depth(&a.pow(&BigInt::from(2)), 8));
        let da = crate::words::conjugate(&d, &a);
        assert!(gr.trivial_to_depth(&commutator(&d, &da), 8));
        let acaca = a.multiply(&c).multiply(&a).multiply(&c).multiply(&a);
        assert!(gr.trivial_to_depth(&commutator(&d, &crate::words::conjugate(&d, &acaca)), 8));
        // b = cd has order 2 and bcd = 1
        let b = c.multiply(&d);
        assert!(gr.trivial_to_depth(&b.pow(&BigInt::from(2)), 8));
        assert!(gr.trivial_to_depth(&b.multiply(&c).multiply(&d), 8));
        assert!(!gr.trivial_to_depth(&commutator(&a, &c), 4));
        // witness vertices really move
        let w = commutator(&a, &c);
        let v = gr.find_moved_vertex(&w, 4).unwrap();
        assert_ne!(gr.act(&w, &v), v);
    }

    #[test]
    fn verify_catalog_pairings_quickly() {
        for name in ["grigorchuk", "grigorchuk-invariant", "fg:3", "gs:3"] {
            let (m, p, map) = catalog_pairing(name).unwrap();
            let report = verify_lpres(&m, &p, &map, 1, 4);
            assert!(
                report.ok(),
                "{}: {} failures, first: {:?}",
                name,
                report.failures.len(),
                report.failures.first().map(|f| (&f.source, &f.vertex))
            );
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn verify_detects_a_wrong_machine() {
        // break the Grigorchuk machine: d = (a, c) instead of (1, cd),
        // which ruins the disjoint supports of d and d^a
        let (a, c) = (FreeWord::gen(1), FreeWord::gen(2));
        let bad = SelfSimilarMachine::new(
            2,
            names(&["a", "c", "d"]),
            vec![
                (vec![1, 0], trivial_sections(2)),
                (vec![0, 1], vec![a.clone(), FreeWord::gen(3)]),
                (vec![0, 1], vec![a, c]),
            ],
        );
        let p = lpres::grigorchuk_ascending();
        let map = vec![FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3)];
        let report = verify_lpres(&bad, &p, &map, 1, 6);
        assert!(!report.ok());
        for f in &report.failures {
            assert_ne!(bad.act(&f.mapped, &f.vertex), f.vertex);
        }
    }

    #[test]
    fn machine_file_round_trip() {
        for m in [fg_machine(3), gs_machine(5), grigorchuk_machine()] {
            let text = m.serialize();
            let back = SelfSimilarMachine::parse(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.serialize(), text);
        }
        // sections may reference later generators
        let m = SelfSimilarMachine::parse(
            "machine { alphabet: 2; gen a: perm (1 0), sections (b, 1); gen b: perm (0 1), sections (1, a); }",
        )
        .unwrap();
        assert_eq!(m.num_gens(), 2);
        assert!(SelfSimilarMachine::parse("machine { alphabet: 2; gen a: perm (1 1), sections (1, 1); }").is_err());
        assert!(SelfSimilarMachine::parse("machine { gen a: perm (0), sections (1); }").is_err());
    }

    #[test]
    fn gs_commutator_identity_spot_checks() {
        assert!(gs_commutator_identity_holds(3, 1, 2, 3, 1, 4));
        assert!(gs_commutator_identity_holds(3, 2, 3, 1, 2, 4));
        assert!(gs_commutator_identity_holds(5, 1, 3, 4, 2, 3));
    }
}
