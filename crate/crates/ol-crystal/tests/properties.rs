use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

use ol_crystal::arith::{BaseFieldDatum, Fq, LocalFieldDatum, Ring};
use ol_crystal::bt1::{ArtinAlgebra, Bt1Crystal};
use ol_crystal::crystal::*;
use ol_crystal::io;
use ol_crystal::polygon::Polygon;

const SHAPES: [(u64, usize, usize, usize); 6] = [(2, 1, 1, 1), (3, 1, 2, 1), (5, 1, 3, 2), (2, 2, 2, 2), (3, 2, 1, 4), (7, 1, 2, 1)];

fn ring(shape: usize, h: usize) -> Arc<Ring> {
    let (p, f, e, n) = SHAPES[shape];
    Ring::new(&LocalFieldDatum::new(p, f, e), &BaseFieldDatum::new(p, n, default_precision(p, n, h, e))).unwrap()
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..20, 1i64..7).prop_map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
}

fn polygon(width: usize) -> impl Strategy<Value = Polygon> {
    prop::collection::vec(rational(), width).prop_map(Polygon::from_slopes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(shape in 0..SHAPES.len(), seed: u64) {
        let r = ring(shape, 2);
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let tau = (seed % r.f() as u64) as usize;
        let (x, y, z) = (r.random(&mut rng, tau), r.random(&mut rng, tau), r.random(&mut rng, tau));
        prop_assert!(r.eq_at(&r.mul(&x, &y), &r.mul(&y, &x)));
        prop_assert!(r.eq_at(&r.mul(&r.mul(&x, &y), &z), &r.mul(&x, &r.mul(&y, &z))));
        prop_assert!(r.eq_at(&r.mul(&x, &r.add(&y, &z)), &r.add(&r.mul(&x, &y), &r.mul(&x, &z))));
        prop_assert!(r.is_zero(&r.add(&x, &r.neg(&x))));
        prop_assert!(r.eq_at(&r.mul(&x, &r.one(tau)), &x));
    }

    #[test]
    fn frobenius_is_a_ring_automorphism_of_order_n(shape in 0..SHAPES.len(), seed: u64) {
        let r = ring(shape, 2);
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let (x, y) = (r.random(&mut rng, 0), r.random(&mut rng, 0));
        let s = |v: &ol_crystal::arith::Elem| r.sigma(v);
        prop_assert!(r.eq_at(&s(&r.mul(&x, &y)), &r.mul(&s(&x), &s(&y))));
        prop_assert!(r.eq_at(&s(&r.add(&x, &y)), &r.add(&s(&x), &s(&y))));
        prop_assert!(r.eq_at(&r.sigma_inv(&s(&x)), &x));
        prop_assert!(r.eq_at(&r.sigma_pow(&x, r.n() as i64), &x));
        prop_assert_eq!(r.residue(&s(&x)), r.residue_field().frob(r.residue(&x)));
    }

    #[test]
    fn units_invert_and_pi_divides(shape in 0..SHAPES.len(), seed: u64, j in 0u32..4) {
        let r = ring(shape, 2);
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let u = r.random_unit(&mut rng, 0);
        prop_assert!(r.eq_at(&r.mul(&u, &r.inv_unit(&u).unwrap()), &r.one(0)));
        let x = r.random(&mut rng, 0);
        let shifted = r.mul(&r.pi_pow(j, 0), &x);
        let back = r.div_pi_pow(&shifted, j).unwrap();
        prop_assert!(r.eq_at(&back, &x));
        let p_elem = r.from_int(r.p() as i128, 0);
        prop_assert_eq!(r.val(&p_elem), Some(r.e() as u32));
    }

    #[test]
    fn finite_field_frobenius_and_inverses(shape in 0..SHAPES.len(), seed: u64) {
        let (p, _, _, n) = SHAPES[shape];
        let fq = Fq::new(p, &Fq::default_modulus(p, n)).unwrap();
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let a = fq.random(&mut rng);
        prop_assert_eq!(fq.frob_pow(a, n as i64), a);
        prop_assert_eq!(fq.frob(a), fq.pow(a, p as u128));
        if !fq.is_zero(a) {
            prop_assert_eq!(fq.mul(a, fq.inv(a).unwrap()), fq.one());
        }
    }

    #[test]
    fn polygon_values_round_trip(p in (0usize..6).prop_flat_map(polygon)) {
        let back = Polygon::from_values(&p.values()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert!(p.is_convex());
        prop_assert!(p.dominates(&p).unwrap());
        prop_assert_eq!(p.contact_abscissas(&p).unwrap(), (0..=p.width()).collect::<Vec<_>>());
        prop_assert_eq!(io::parse_polygon(&io::polygon_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn polygon_operations(
        (a, b) in (1usize..6).prop_flat_map(|w| (polygon(w), polygon(w))),
        c in polygon(3),
    ) {
        let mean = Polygon::mean(&[a.clone(), b.clone()]).unwrap();
        prop_assert!(mean.is_convex());
        let two = BigRational::from_integer(BigInt::from(2));
        for i in 0..=a.width() {
            prop_assert_eq!(mean.eval(i).unwrap() * &two, a.eval(i).unwrap() + b.eval(i).unwrap());
        }
        let joined = a.concat(&c);
        prop_assert_eq!(joined.width(), a.width() + c.width());
        prop_assert_eq!(joined.eval(joined.width()).unwrap(), a.eval(a.width()).unwrap() + c.eval(3).unwrap());
        let doubled = a.scale(&two);
        prop_assert_eq!(doubled.eval(a.width()).unwrap(), a.eval(a.width()).unwrap() * &two);
        if a.dominates(&b).unwrap() && b.dominates(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
    }

    #[test]
    fn integers_round_trip_through_json(u: u128, i: i128) {
        prop_assert_eq!(io::parse_uint(&io::uint_json(u), "u").unwrap(), u);
        prop_assert_eq!(io::parse_int(&io::int_json(i), "i").unwrap(), i);
        let text = serde_json::to_string(&io::uint_json(u)).unwrap();
        let reparsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(io::parse_uint(&reparsed, "u").unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn crystal_files_round_trip_bit_exactly(shape in 0..SHAPES.len(), h in 1usize..4, seed: u64) {
        let r = ring(shape, h);
        let (_, f, e, _) = SHAPES[shape];
        let levels = (0..f)
            .map(|t| {
                let mut l: Vec<usize> = (0..e).map(|i| ((seed as usize >> (i + t)) + i) % (h + 1)).collect();
                l.sort_unstable_by(|a, b| b.cmp(a));
                l
            })
            .collect();
        let mu = PRDatum::new(h, levels).unwrap();
        let (c, fil) = random_pr_crystal(&r, &mu, seed, RandomMode::Mixed).unwrap();
        let v = io::crystal_to_json(&c, Some(&fil), Some(&mu));
        let text = io::to_pretty(&v);
        let file = io::parse_crystal_str(&text, None).unwrap();
        prop_assert_eq!(&file.crystal.y, &c.y);
        prop_assert_eq!(file.fil.as_ref(), Some(&fil));
        prop_assert_eq!(file.mu.as_ref(), Some(&mu));
        let again = io::to_pretty(&io::crystal_to_json(&file.crystal, file.fil.as_ref(), file.mu.as_ref()));
        prop_assert_eq!(again, text);

        let b = Bt1Crystal::from_crystal(&c, &fil).unwrap();
        let lifted = b.base_change(&ArtinAlgebra::dual_numbers(r.residue_field().clone())).unwrap();
        let bt = io::bt1_to_json(&lifted, Some(&mu));
        let (parsed, pmu) = io::parse_bt1(&bt).unwrap();
        prop_assert_eq!(&parsed, &lifted);
        prop_assert_eq!(pmu, Some(mu));
    }
}
