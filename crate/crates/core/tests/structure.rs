use nilcoxeter::cosets;
use nilcoxeter::expressions::{self, Expression};
use nilcoxeter::frobenius::{self, Modify};
use nilcoxeter::rewrite::DEFAULT_BUDGET;
use nilcoxeter::{CoxeterSystem, DoubleCoset, GenSet, Poly, Realization, Side};
use rand::SeedableRng;

fn all_cosets(sys: &CoxeterSystem) -> Vec<DoubleCoset> {
    let mut out = Vec::new();
    for i in sys.all().subsets() {
        for j in sys.all().subsets() {
            out.extend(cosets::enumerate_cosets(sys, i, j).unwrap());
        }
    }
    out
}

#[test]
fn s3_coset_examples() {
    let sys = CoxeterSystem::named("A2").unwrap();
    let (s, t) = (GenSet::singleton(0), GenSet::singleton(1));
    let p = cosets::coset_of(&sys, &sys.element(&[0, 1]).unwrap(), s, t).unwrap();
    assert!(p.pmin().is_identity());
    assert_eq!(p.pmax(), &sys.element(&[0, 1]).unwrap());
    let q = cosets::coset_of(&sys, &sys.element(&[0, 1, 0]).unwrap(), s, t).unwrap();
    assert_eq!(q.pmin(), &sys.element(&[1, 0]).unwrap());
    assert_eq!(q.pmax(), &sys.element(&[0, 1, 0]).unwrap());
    assert_eq!((q.left_redundancy(), q.right_redundancy()), (s, t));
    let c = cosets::core(&sys, &q).unwrap();
    assert_eq!((c.left(), c.right()), (s, t));
    assert_eq!(cosets::coset_descents(&sys, &p), (s, t));
}

#[test]
fn factorizations_hold_in_b3() {
    let sys = CoxeterSystem::named("B3").unwrap();
    for p in all_cosets(&sys) {
        let w = |s| sys.longest_element(s).unwrap();
        let right = sys.multiply(&w(p.right_redundancy()), &w(p.right())).unwrap();
        let top = sys.product([&w(p.left()), p.pmin(), &right]).unwrap();
        assert_eq!(&top, p.pmax());
        assert_eq!(w(p.left()).length() + p.pmin().length() + right.length(), top.length());
    }
}

#[test]
fn reduced_expressions_in_s4() {
    let sys = CoxeterSystem::named("A3").unwrap();
    for p in all_cosets(&sys) {
        let es = expressions::reduced_expressions_of(&sys, &p, None, DEFAULT_BUDGET).unwrap();
        assert!(!es.is_empty(), "{p:?}");
        let (lr, rr) = (p.left_redundancy(), p.right_redundancy());
        let (down, up) = (p.left().len() - lr.len(), p.right().len() - rr.len());
        let through_core = es.iter().any(|e| {
            let s = e.sets();
            s.len() > down + up && s[down] == lr && s[s.len() - 1 - up] == rr && s[..=down].windows(2).all(|w| w[1].is_subset(w[0])) && s[s.len() - 1 - up..].windows(2).all(|w| w[0].is_subset(w[1]))
        });
        assert!(through_core, "no expression of {p:?} passes through its core");
        for e in &es {
            assert_eq!(&e.element(&sys).unwrap(), p.pmax());
            assert_eq!(e.alternating_length(&sys).unwrap(), p.pmax().length());
            if e.width() > 8 {
                continue;
            }
            let r = e.reverse();
            assert!(r.is_reduced(&sys).unwrap());
            let rp = r.expressed_coset(&sys).unwrap();
            assert_eq!((rp.left(), rp.right()), (p.right(), p.left()));
            assert_eq!(rp.pmax(), &sys.inverse(p.pmax()));
            assert_eq!(r.reverse(), *e);
            for a in 0..=e.width() {
                for b in a..=e.width() {
                    assert!(e.subword(a, b).is_reduced(&sys).unwrap(), "{e} [{a}..{b}]");
                }
            }
            let m = e.to_multistep();
            let back = m.to_singlestep().to_multistep();
            assert_eq!((back.bottoms(), back.tops()), (m.bottoms(), m.tops()));
            assert_eq!(m.to_singlestep().expressed_coset(&sys).unwrap(), p);
        }
    }
}

#[test]
fn top_element_criterion_in_s4() {
    let sys = CoxeterSystem::named("A3").unwrap();
    for p in all_cosets(&sys) {
        let (ld, rd) = cosets::coset_descents(&sys, &p);
        assert!(p.left().is_subset(ld) && p.right().is_subset(rd));
        for x in cosets::elements(&sys, &p).unwrap() {
            let top = p.left().is_subset(sys.descents(&x, Side::Left)) && p.right().is_subset(sys.descents(&x, Side::Right));
            assert_eq!(top, &x == p.pmax());
        }
    }
}

#[test]
fn composition_matches_concatenation_in_s3() {
    let sys = CoxeterSystem::named("A2").unwrap();
    let ps = all_cosets(&sys);
    for p in &ps {
        for q in ps.iter().filter(|q| q.left() == p.right()) {
            let r = expressions::reduced_composition(&sys, p, q).unwrap();
            for e1 in expressions::reduced_expressions_of(&sys, p, None, DEFAULT_BUDGET).unwrap() {
                for e2 in expressions::reduced_expressions_of(&sys, q, None, DEFAULT_BUDGET).unwrap() {
                    let e = e1.concatenate(&e2).unwrap();
                    assert_eq!(e.is_reduced(&sys).unwrap(), r.is_some(), "{e1} ∘ {e2}");
                    if let Some(r) = &r {
                        assert_eq!(&e.expressed_coset(&sys).unwrap(), r);
                    }
                }
            }
        }
    }
}

#[test]
fn minimal_coset_has_all_ascending_orders() {
    let sys = CoxeterSystem::named("A3").unwrap();
    let p = cosets::identity_coset(&sys, GenSet::EMPTY, sys.all()).unwrap();
    let es = expressions::reduced_expressions_of(&sys, &p, Some(3), DEFAULT_BUDGET).unwrap();
    let ascending: Vec<&Expression> = es.iter().filter(|e| e.width() == 3).collect();
    assert_eq!(ascending.len(), 6);
}

#[test]
fn bases_over_chains_in_s4() {
    let real = Realization::permutation(4).unwrap();
    let sys = real.system();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for j in sys.all().subsets() {
        for i in j.subsets() {
            let basis = frobenius::basis_over(&real, i, j).unwrap();
            let n = sys.parabolic(j).unwrap().order() / sys.parabolic(i).unwrap().order();
            assert_eq!(basis.len(), n);
            let dual = frobenius::gram_schmidt_dualize(&real, &frobenius::almost_dual_bases(&real, i, j).unwrap(), Modify::D).unwrap();
            for (k, c) in dual.c.iter().enumerate() {
                let coeffs = dual.express_in_basis(&real, c).unwrap();
                for (m, a) in coeffs.iter().enumerate() {
                    assert_eq!(*a, if m == k { real.one() } else { real.zero() });
                }
            }
            let f = nilcoxeter::demazure::DemazureOp::parabolic(&real, i).unwrap().apply_unchecked(&real, &Poly::random(&mut rng, 4, 8, 4)).unwrap();
            dual.express_in_basis(&real, &f).unwrap();
            dual.express_in_basis(&real, &real.one()).unwrap();
        }
    }
    let s = GenSet::singleton(0);
    let b = frobenius::basis_over(&real, GenSet::EMPTY, s).unwrap();
    assert_eq!(b, vec![frobenius::p_of(&real, s).unwrap(), real.one()]);
}

#[test]
fn degenerate_and_identity_cosets() {
    let real = Realization::permutation(4).unwrap();
    let sys = real.system();
    for l in sys.all().subsets() {
        let full = cosets::identity_coset(sys, l, l).unwrap();
        let pair = frobenius::dual_bases_in_image(&real, &full, l).unwrap();
        assert_eq!((pair.c.clone(), pair.d.clone()), (vec![real.one()], vec![real.one()]));
    }
    let i = GenSet::from_iter([0, 2]);
    let p = cosets::from_min(sys, i, i, sys.element(&[1]).unwrap()).unwrap();
    let pair = frobenius::dual_bases_in_image(&real, &p, sys.all()).unwrap();
    assert_eq!(pair.ext, GenSet::EMPTY);
    assert_eq!(pair.len(), 4);
    assert!(pair.d.contains(&real.one()));
}
