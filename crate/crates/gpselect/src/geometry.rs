//! Exact planar geometry: rational points, orientation, and canonical
//! slope/line keys.
//!
//! Coordinates are arbitrary-precision rationals in lowest terms, so every
//! predicate in the crate is exact. Point sets whose coordinates share a
//! small common denominator additionally expose a scaled integer view
//! ([`PointSet::int_view`]) that the counting kernels use as a fast path;
//! slope keys, line identities, orientations and descending pairs are all
//! invariant under that positive rescaling.

use crate::util::gcd_i64;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::OnceLock;

/// Exact coordinate type. Always kept in lowest terms by `num-rational`.
pub type Rational = BigRational;

/// Planar point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point {
            x: Rational::from_integer(BigInt::from(x)),
            y: Rational::from_integer(BigInt::from(y)),
        }
    }

    /// Both coordinates as i64 if they are integers in range.
    pub fn as_int_pair(&self) -> Option<(i64, i64)> {
        if self.x.is_integer() && self.y.is_integer() {
            Some((self.x.numer().to_i64()?, self.y.numer().to_i64()?))
        } else {
            None
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", fmt_coord(&self.x), fmt_coord(&self.y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_coord(&self.x), fmt_coord(&self.y))
    }
}

/// Renders a coordinate as `n` for integers and `p/q` otherwise.
pub fn fmt_coord(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `n` or `p/q` into a rational in lowest terms.
pub fn parse_coord(s: &str) -> std::result::Result<Rational, String> {
    let parse_int = |t: &str| -> std::result::Result<BigInt, String> {
        t.parse::<BigInt>().map_err(|_| format!("bad integer {t:?}"))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rational::new(parse_int(num)?, den))
        }
    }
}

/// Integer lattice point in three dimensions, used by the projected grid
/// sampling construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Point3 {
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        Point3 { x, y, z }
    }
}

/// Canonical reduced direction of a segment.
///
/// Invariants: `gcd(|dx|, |dy|) = 1`, `(dx, dy) != (0, 0)`, and either
/// `dx > 0` or (`dx = 0` and `dy = 1`). Two pairs of points receive equal
/// keys iff the segments they span are parallel.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SlopeKey {
    pub dx: BigInt,
    pub dy: BigInt,
}

/// Canonical integer form `a x + b y + c = 0` of a line.
///
/// Invariants: `gcd(|a|, |b|, |c|) = 1`, `(a, b) != (0, 0)`, and the leading
/// nonzero of `(a, b)` is positive. Two pairs of points receive equal keys
/// iff they span the same line.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineKey {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl LineKey {
    /// True iff `p` satisfies `a x + b y + c = 0`.
    pub fn contains(&self, p: &Point) -> bool {
        let v = &self.a * p.x.numer() * p.y.denom()
            + &self.b * p.y.numer() * p.x.denom()
            + &self.c * p.x.denom() * p.y.denom();
        v.is_zero()
    }
}

/// Sign of the cross product `(q - p) x (r - p)`: `+1` for a counterclockwise
/// turn, `-1` for clockwise, `0` iff the triple is collinear. Exact.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> Result<i8> {
    if p == q || p == r || q == r {
        return Err(Error::DegenerateTriple);
    }
    let ux = &q.x - &p.x;
    let uy = &q.y - &p.y;
    let vx = &r.x - &p.x;
    let vy = &r.y - &p.y;
    let cross = ux * vy - uy * vx;
    Ok(match cross.numer().sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    })
}

/// Reduces a rational direction to a primitive, sign-normalized integer pair.
fn reduced_direction(dx: &Rational, dy: &Rational) -> (BigInt, BigInt) {
    // (p1/q1, p2/q2) is parallel to (p1*q2, p2*q1).
    let mut a = dx.numer() * dy.denom();
    let mut b = dy.numer() * dx.denom();
    let g = a.gcd(&b);
    if !g.is_zero() {
        a /= &g;
        b /= &g;
    }
    if a.is_negative() || (a.is_zero() && b.is_negative()) {
        a = -a;
        b = -b;
    }
    (a, b)
}

/// Canonical direction key of the segment `pq`; symmetric in its arguments.
pub fn slope_key(p: &Point, q: &Point) -> Result<SlopeKey> {
    if p == q {
        return Err(Error::ZeroDirection);
    }
    let (dx, dy) = reduced_direction(&(&q.x - &p.x), &(&q.y - &p.y));
    Ok(SlopeKey { dx, dy })
}

/// Canonical key of the line spanned by `p` and `q`.
pub fn line_key(p: &Point, q: &Point) -> Result<LineKey> {
    if p == q {
        return Err(Error::ZeroDirection);
    }
    let (dx, dy) = reduced_direction(&(&q.x - &p.x), &(&q.y - &p.y));
    // Normal (a, b) = (dy, -dx); c = -(a*px + b*py), then clear denominators.
    let a = dy;
    let b = -dx;
    let c_rat = -(&a * &p.x + &b * &p.y);
    let den = c_rat.denom().clone();
    let mut a = a * &den;
    let mut b = b * &den;
    let mut c = c_rat.numer().clone();
    let g = a.gcd(&b).gcd(&c);
    if !g.is_zero() {
        a /= &g;
        b /= &g;
        c /= &g;
    }
    if a.is_negative() || (a.is_zero() && b.is_negative()) {
        a = -a;
        b = -b;
        c = -c;
    }
    Ok(LineKey { a, b, c })
}

/// Largest coordinate magnitude allowed in the scaled integer view. With
/// coordinates bounded by 2^30, coordinate differences fit in 2^31, cross
/// products in i128, and line-key offsets in i64.
const INT_VIEW_LIMIT: i64 = 1 << 30;

/// Scaled integer coordinates of a point set, in the same order as the
/// canonical point order. Produced by multiplying every coordinate by the
/// least common denominator; only exists when the result stays within
/// [`INT_VIEW_LIMIT`].
#[derive(Debug)]
pub(crate) struct IntView {
    pub coords: Vec<(i64, i64)>,
}

/// Ordered, duplicate-free set of points. Points are kept sorted in the
/// canonical lexicographic `(x, y)` order.
pub struct PointSet {
    points: Vec<Point>,
    int_view: OnceLock<Option<IntView>>,
}

impl Clone for PointSet {
    fn clone(&self) -> Self {
        PointSet {
            points: self.points.clone(),
            int_view: OnceLock::new(),
        }
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}
impl Eq for PointSet {}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("len", &self.points.len())
            .field("points", &self.points)
            .finish()
    }
}

impl PointSet {
    /// Builds a set from arbitrary points. Sorts into canonical order and
    /// rejects duplicates.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint { line: None });
        }
        Ok(PointSet {
            points,
            int_view: OnceLock::new(),
        })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        PointSet::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn empty() -> Self {
        PointSet {
            points: Vec::new(),
            int_view: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// True iff every point of `self` is in `other`.
    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Coordinate extremes `(min_x, max_x, min_y, max_y)`; `None` when empty.
    pub fn extremes(&self) -> Option<(&Rational, &Rational, &Rational, &Rational)> {
        if self.points.is_empty() {
            return None;
        }
        // Points are sorted by (x, y), so x extremes are free.
        let min_x = &self.points[0].x;
        let max_x = &self.points[self.points.len() - 1].x;
        let mut min_y = &self.points[0].y;
        let mut max_y = min_y;
        for p in &self.points {
            if &p.y < min_y {
                min_y = &p.y;
            }
            if &p.y > max_y {
                max_y = &p.y;
            }
        }
        Some((min_x, max_x, min_y, max_y))
    }

    /// Scaled integer coordinates when all coordinates share a small common
    /// denominator; computed once and cached. All per-pair structure the
    /// crate counts (orientation signs, slope-key equality, line identity,
    /// descending pairs) is invariant under the common positive scaling.
    pub(crate) fn int_view(&self) -> Option<&IntView> {
        self.int_view
            .get_or_init(|| {
                let limit = BigInt::from(INT_VIEW_LIMIT);
                let mut lcm = BigInt::one();
                for p in &self.points {
                    lcm = lcm.lcm(p.x.denom()).lcm(p.y.denom());
                    if lcm > limit {
                        return None;
                    }
                }
                let mut coords = Vec::with_capacity(self.points.len());
                for p in &self.points {
                    let sx = p.x.numer() * (&lcm / p.x.denom());
                    let sy = p.y.numer() * (&lcm / p.y.denom());
                    if sx.magnitude() > limit.magnitude() || sy.magnitude() > limit.magnitude() {
                        return None;
                    }
                    coords.push((sx.to_i64()?, sy.to_i64()?));
                }
                Some(IntView { coords })
            })
            .as_ref()
    }

    /// Builds a subset from indices into the canonical order.
    pub(crate) fn subset(&self, indices: &[usize]) -> PointSet {
        let mut points: Vec<Point> = indices.iter().map(|&i| self.points[i].clone()).collect();
        points.sort_unstable();
        debug_assert!(points.windows(2).all(|w| w[0] != w[1]));
        PointSet {
            points,
            int_view: OnceLock::new(),
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Primitive, sign-normalized direction of an integer segment. Same
/// convention as [`slope_key`], packed for the fast path.
#[inline]
pub(crate) fn reduced_dir_i64(mut dx: i64, mut dy: i64) -> (i64, i64) {
    debug_assert!(dx != 0 || dy != 0);
    let g = gcd_i64(dx, dy);
    dx /= g;
    dy /= g;
    if dx < 0 || (dx == 0 && dy < 0) {
        dx = -dx;
        dy = -dy;
    }
    (dx, dy)
}

/// Canonical `(a, b, c)` line form through two integer points, i64
/// components. Valid for coordinates within [`INT_VIEW_LIMIT`].
#[inline]
pub(crate) fn line_key_i64(p: (i64, i64), q: (i64, i64)) -> (i64, i64, i64) {
    let (dx, dy) = reduced_dir_i64(q.0 - p.0, q.1 - p.1);
    let mut a = dy;
    let mut b = -dx;
    let mut c = -(a * p.0 + b * p.1);
    // a, b are coprime already, so only the sign needs fixing.
    if a < 0 || (a == 0 && b < 0) {
        a = -a;
        b = -b;
        c = -c;
    }
    (a, b, c)
}

/// Orientation sign for integer coordinates within [`INT_VIEW_LIMIT`].
#[inline]
pub(crate) fn orientation_i64(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i8 {
    let ux = (q.0 - p.0) as i128;
    let uy = (q.1 - p.1) as i128;
    let vx = (r.0 - p.0) as i128;
    let vy = (r.1 - p.1) as i128;
    let cross = ux * vy - uy * vx;
    match cross.cmp(&0) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(2, 0)).unwrap(), 0);
        assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(1, 1)).unwrap(), 1);
        assert_eq!(orientation(&pt(0, 0), &pt(1, 1), &pt(2, 0)).unwrap(), -1);
    }

    #[test]
    fn orientation_rejects_duplicates() {
        assert_eq!(
            orientation(&pt(0, 0), &pt(0, 0), &pt(1, 1)),
            Err(Error::DegenerateTriple)
        );
    }

    #[test]
    fn slope_key_examples() {
        let k = slope_key(&pt(0, 0), &pt(2, 4)).unwrap();
        assert_eq!((k.dx, k.dy), (BigInt::from(1), BigInt::from(2)));
        let k = slope_key(&pt(0, 0), &pt(0, 7)).unwrap();
        assert_eq!((k.dx, k.dy), (BigInt::from(0), BigInt::from(1)));
        let k = slope_key(&pt(3, 1), &pt(1, 2)).unwrap();
        assert_eq!((k.dx, k.dy), (BigInt::from(2), BigInt::from(-1)));
        assert_eq!(slope_key(&pt(1, 1), &pt(1, 1)), Err(Error::ZeroDirection));
    }

    #[test]
    fn slope_key_symmetric() {
        let a = pt(3, -2);
        let b = pt(-5, 9);
        assert_eq!(slope_key(&a, &b).unwrap(), slope_key(&b, &a).unwrap());
    }

    #[test]
    fn line_key_examples() {
        let k = line_key(&pt(0, 0), &pt(1, 1)).unwrap();
        assert_eq!(
            (k.a, k.b, k.c),
            (BigInt::from(1), BigInt::from(-1), BigInt::from(0))
        );
        let k = line_key(&pt(0, 3), &pt(5, 3)).unwrap();
        assert_eq!(
            (k.a, k.b, k.c),
            (BigInt::from(0), BigInt::from(1), BigInt::from(-3))
        );
        let half = Point::new(rat(1, 2), rat(0, 1));
        let k = line_key(&half, &pt(0, 1)).unwrap();
        assert_eq!(
            (k.a, k.b, k.c),
            (BigInt::from(2), BigInt::from(1), BigInt::from(-1))
        );
    }

    #[test]
    fn point_set_rejects_duplicates() {
        let r = PointSet::from_ints(&[(1, 2), (1, 2)]);
        assert_eq!(r, Err(Error::DuplicatePoint { line: None }));
    }

    #[test]
    fn point_set_canonical_order_and_extremes() {
        let s = PointSet::from_ints(&[(2, 0), (0, 5), (1, -1), (0, 2)]).unwrap();
        let xs: Vec<(i64, i64)> = s.iter().map(|p| p.as_int_pair().unwrap()).collect();
        assert_eq!(xs, vec![(0, 2), (0, 5), (1, -1), (2, 0)]);
        let (min_x, max_x, min_y, max_y) = s.extremes().unwrap();
        assert_eq!(min_x, &rat(0, 1));
        assert_eq!(max_x, &rat(2, 1));
        assert_eq!(min_y, &rat(-1, 1));
        assert_eq!(max_y, &rat(5, 1));
    }

    #[test]
    fn int_view_scales_common_denominator() {
        let s = PointSet::new(vec![
            Point::new(rat(1, 2), rat(0, 1)),
            Point::new(rat(1, 3), rat(1, 1)),
        ])
        .unwrap();
        let view = s.int_view().unwrap();
        // lcm(2, 3) = 6; sorted order is (1/3, 1) then (1/2, 0).
        assert_eq!(view.coords, vec![(2, 6), (3, 0)]);
    }

    #[test]
    fn int_view_refuses_huge_denominators() {
        let q = BigInt::from((1u64 << 61) - 1);
        let s = PointSet::new(vec![
            Point::new(Rational::new(BigInt::from(1), q.clone()), rat(0, 1)),
            Point::new(rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        assert!(s.int_view().is_none());
    }

    #[test]
    fn coord_round_trip() {
        for s in ["5", "-3", "1/2", "-7/3"] {
            let v = parse_coord(s).unwrap();
            assert_eq!(fmt_coord(&v), s);
        }
        assert!(parse_coord("1/0").is_err());
        assert!(parse_coord("x").is_err());
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (-50i64..50, 1i64..8, -50i64..50, 1i64..8)
            .prop_map(|(xn, xd, yn, yd)| Point::new(rat(xn, xd), rat(yn, yd)))
    }

    proptest! {
        #[test]
        fn orientation_antisymmetric(p in arb_point(), q in arb_point(), r in arb_point()) {
            prop_assume!(p != q && q != r && p != r);
            let o = orientation(&p, &q, &r).unwrap();
            prop_assert_eq!(orientation(&p, &r, &q).unwrap(), -o);
            prop_assert_eq!(orientation(&q, &p, &r).unwrap(), -o);
        }

        /// orientation(p,q,r) = 0  <=>  r on line_key(p,q)  <=>  equal slope keys.
        #[test]
        fn collinearity_routes_agree(p in arb_point(), q in arb_point(), r in arb_point()) {
            prop_assume!(p != q && q != r && p != r);
            let collinear = orientation(&p, &q, &r).unwrap() == 0;
            let line = line_key(&p, &q).unwrap();
            prop_assert_eq!(line.contains(&r), collinear);
            let same_slope = slope_key(&p, &q).unwrap() == slope_key(&p, &r).unwrap();
            prop_assert_eq!(same_slope, collinear);
            if collinear {
                prop_assert_eq!(line_key(&p, &r).unwrap(), line);
            }
        }

        /// Keys are invariant under a common positive rational rescaling;
        /// slope keys are also translation invariant.
        #[test]
        fn key_invariances(p in arb_point(), q in arb_point(),
                           sn in 1i64..6, sd in 1i64..6, tx in -9i64..9, ty in -9i64..9) {
            prop_assume!(p != q);
            let s = rat(sn, sd);
            let scale = |v: &Point| Point::new(&v.x * &s, &v.y * &s);
            prop_assert_eq!(
                slope_key(&scale(&p), &scale(&q)).unwrap(),
                slope_key(&p, &q).unwrap()
            );
            prop_assert_eq!(
                line_key(&scale(&p), &scale(&q)).unwrap(),
                line_key(&scale(&q), &scale(&p)).unwrap()
            );
            let shift = |v: &Point| Point::new(&v.x + rat(tx, 1), &v.y + rat(ty, 1));
            prop_assert_eq!(
                slope_key(&shift(&p), &shift(&q)).unwrap(),
                slope_key(&p, &q).unwrap()
            );
        }

        /// Pairs sampled on one common line share a line key.
        #[test]
        fn line_key_equal_on_common_line(a in arb_point(), b in arb_point(),
                                         t1 in -6i64..6, t2 in -6i64..6) {
            prop_assume!(a != b && t1 != t2 && t1 != 0 && t2 != 0);
            let at = |t: i64| Point::new(
                &a.x + (&b.x - &a.x) * rat(t, 1),
                &a.y + (&b.y - &a.y) * rat(t, 1),
            );
            prop_assert_eq!(
                line_key(&a, &b).unwrap(),
                line_key(&at(t1), &at(t2)).unwrap()
            );
        }

        /// The fast-path primitives agree with the rational ones on integers.
        #[test]
        fn int_fast_path_matches(px in -40i64..40, py in -40i64..40,
                                 qx in -40i64..40, qy in -40i64..40,
                                 rx in -40i64..40, ry in -40i64..40) {
            let (p, q, r) = (pt(px, py), pt(qx, qy), pt(rx, ry));
            prop_assume!(p != q && q != r && p != r);
            prop_assert_eq!(
                orientation_i64((px, py), (qx, qy), (rx, ry)),
                orientation(&p, &q, &r).unwrap()
            );
            let sk = slope_key(&p, &q).unwrap();
            let (dx, dy) = reduced_dir_i64(qx - px, qy - py);
            prop_assert_eq!((BigInt::from(dx), BigInt::from(dy)), (sk.dx, sk.dy));
            let lk = line_key(&p, &q).unwrap();
            let (a, b, c) = line_key_i64((px, py), (qx, qy));
            prop_assert_eq!(
                (BigInt::from(a), BigInt::from(b), BigInt::from(c)),
                (lk.a, lk.b, lk.c)
            );
        }
    }
}
