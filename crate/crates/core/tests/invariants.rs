use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use toridyn::homology::{region_class, RegionTag};
use toridyn::hull::hausdorff_distance;
use toridyn::periodic::{find_periodic_realizing, RealizationTarget};
use toridyn::winding::{linking_number_periodic, linking_number_region, winding_index, Polyline};
use toridyn::{convex_hull, make_map, ConvexPolygon, GridRegion, IntVec, TorusPoint, Vec2};

fn pt() -> impl Strategy<Value = Vec2> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn hull() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec(pt(), 1..12).prop_map(|p| convex_hull(&p).unwrap())
}

fn bitmap(r: usize) -> impl Strategy<Value = GridRegion> {
    prop::collection::vec(any::<bool>(), r * r)
        .prop_map(move |bits| GridRegion::from_fn(r, |i, j| bits[j * r + i]).unwrap())
}

fn transpose(g: &GridRegion) -> GridRegion {
    GridRegion::from_fn(g.resolution(), |i, j| g.get(j, i)).unwrap()
}

fn swap(tag: &RegionTag) -> RegionTag {
    match tag {
        RegionTag::EssentialAnnular { direction } => {
            RegionTag::EssentialAnnular { direction: IntVec::new(direction.b, direction.a).primitive_canonical() }
        }
        t => *t,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(a in hull(), b in hull(), c in hull()) {
        let (ab, ba) = (hausdorff_distance(&a, &b), hausdorff_distance(&b, &a));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(hausdorff_distance(&a, &a) < 1e-12);
        prop_assert!(ab <= hausdorff_distance(&a, &c) + hausdorff_distance(&c, &b) + 1e-9);
    }

    #[test]
    fn hausdorff_of_a_translate_is_bounded_by_the_shift(a in hull(), d in pt()) {
        prop_assert!(hausdorff_distance(&a, &a.translated(d)) <= d.norm() + 1e-12);
    }

    #[test]
    fn region_class_is_shift_invariant(g in bitmap(12), di in 0usize..12, dj in 0usize..12) {
        prop_assert_eq!(region_class(&g).tag, region_class(&g.shifted(di, dj)).tag);
    }

    #[test]
    fn transposing_swaps_the_annular_direction(g in bitmap(10)) {
        prop_assert_eq!(swap(&region_class(&g).tag), region_class(&transpose(&g)).tag);
    }

    #[test]
    fn pbm_round_trips(g in bitmap(9)) {
        prop_assert_eq!(GridRegion::from_pbm(&g.to_pbm()).unwrap(), g);
    }

    #[test]
    fn winding_reverses_and_translates(
        pts in prop::collection::vec(pt(), 3..10),
        z in pt(),
        shift in pt(),
    ) {
        let fwd = Polyline::closed_loop(pts.clone()).unwrap();
        prop_assume!(fwd.distance_to(z) > 1e-6);
        let w = winding_index(&fwd, z).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let back = Polyline::closed_loop(rev).unwrap();
        prop_assert_eq!(winding_index(&back, z).unwrap(), -w);
        let moved = Polyline::closed_loop(pts.iter().map(|&p| p + shift).collect()).unwrap();
        prop_assert_eq!(winding_index(&moved, z + shift).unwrap(), w);
    }

    #[test]
    fn region_linking_agrees_with_the_periodic_orbit(
        theta in 0.0..std::f64::consts::TAU,
        base in 0usize..1000,
    ) {
        let tw = make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap();
        let q = Vec2::new(0.5 + 0.1 * theta.cos(), 0.5 + 0.1 * theta.sin());
        let p = Vec2::new(0.5, 0.5);
        let disk = GridRegion::ball(128, toridyn::project(q), 0.02).unwrap();
        let cells = disk.active_cells();
        let (i, j) = cells[base % cells.len()];
        let expected = linking_number_periodic(&tw, q, 4, p).unwrap();
        prop_assert_eq!(expected, 1);
        prop_assert_eq!(linking_number_region(&tw, &disk, 4, p, Some(disk.index(i, j))).unwrap(), expected);
    }

    #[test]
    fn translation_roots_realize_their_target(num in 0i64..4, q in 1u32..4) {
        let alpha = num as f64 / q as f64;
        let map = make_map("translation", &[alpha, 0.0]).unwrap();
        let t = RealizationTarget::new(num, 0, q);
        prop_assume!(t.is_ok());
        let search = find_periodic_realizing(&map, &t.unwrap(), 3, 20, 1e-10).unwrap();
        prop_assert!(!search.empty);
        prop_assert!(search.roots.iter().all(|r| r.residual < 1e-10));
    }
}

#[test]
fn torus_points_wrap_into_the_unit_square() {
    let p = TorusPoint::new(1.25, -0.5);
    assert_eq!((p.x, p.y), (0.25, 0.5));
}
