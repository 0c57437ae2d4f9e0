//! Deterministic encounter geometry in a local North-East tangent plane.
//!
//! Positions are in meters, speeds in m/s, times in seconds and every angle
//! that crosses a public boundary is in degrees. Courses are measured
//! clockwise from North, so a vessel on course `psi` with speed `U` moves with
//! velocity `[U cos psi, U sin psi]` in `[N, E]` order.

use crate::error::{Error, Result};

/// Below this value of `|dv|^2` (in (m/s)^2) the relative motion is treated
/// as zero and TCPA is undefined.
pub const REL_SPEED_SQ_EPS: f64 = 1e-9;

/// Positions closer than this (per component, meters) are coincident.
pub const POSITION_EPS: f64 = 1e-9;

/// Kinematic state of one vessel.
///
/// `speed` is the speed over ground. States built with [`VesselState::new`]
/// have `speed >= 0` and `course` in `[0, 360)`; Monte-Carlo draws may carry a
/// signed speed (see [`crate::sampling::SpeedPolicy`]), which simply reverses
/// the velocity vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselState {
    pub north: f64,
    pub east: f64,
    pub course: f64,
    pub speed: f64,
}

impl VesselState {
    /// Validated constructor. The course is wrapped into `[0, 360)`.
    pub fn new(north: f64, east: f64, course: f64, speed: f64) -> Result<Self> {
        if !(north.is_finite() && east.is_finite() && course.is_finite() && speed.is_finite()) {
            return Err(Error::InvalidState("non-finite component".into()));
        }
        if speed < 0.0 {
            return Err(Error::InvalidState(format!("speed {speed} < 0")));
        }
        Ok(Self {
            north,
            east,
            course: wrap_360(course),
            speed,
        })
    }

    pub fn position(&self) -> [f64; 2] {
        [self.north, self.east]
    }

    pub fn velocity(&self) -> VelocityVector {
        velocity_of(self)
    }

    /// Position after `t` seconds of constant-velocity motion.
    pub fn position_at(&self, t: f64) -> [f64; 2] {
        let v = self.velocity();
        [self.north + v.v_north * t, self.east + v.v_east * t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityVector {
    pub v_north: f64,
    pub v_east: f64,
}

/// Closest point of approach between two constant-velocity vessels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpaResult {
    /// Time to CPA; negative when the closest approach is in the past.
    pub tcpa: f64,
    /// Distance at CPA.
    pub dcpa: f64,
    pub pos_j_at_cpa: [f64; 2],
    pub pos_k_at_cpa: [f64; 2],
    /// `|v_j - v_k|^2`.
    pub rel_speed_sq: f64,
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn wrap_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

pub fn velocity_of(state: &VesselState) -> VelocityVector {
    let (s, c) = state.course.to_radians().sin_cos();
    VelocityVector {
        v_north: state.speed * c,
        v_east: state.speed * s,
    }
}

/// Current Euclidean separation of the two vessels.
pub fn separation(j: &VesselState, k: &VesselState) -> f64 {
    (j.north - k.north).hypot(j.east - k.east)
}

/// TCPA and DCPA for vessels `j` and `k`.
///
/// TCPA is not clamped. Returns [`Error::DegenerateRelativeMotion`] when the
/// relative velocity vanishes; the caller decides how to treat that case.
pub fn cpa(j: &VesselState, k: &VesselState) -> Result<CpaResult> {
    let vj = j.velocity();
    let vk = k.velocity();
    let dp = [j.north - k.north, j.east - k.east];
    let dv = [vj.v_north - vk.v_north, vj.v_east - vk.v_east];
    let rel_speed_sq = dv[0] * dv[0] + dv[1] * dv[1];
    if !(rel_speed_sq > REL_SPEED_SQ_EPS) {
        return Err(Error::DegenerateRelativeMotion { rel_speed_sq });
    }
    let tcpa = -(dp[0] * dv[0] + dp[1] * dv[1]) / rel_speed_sq;
    let pos_j_at_cpa = j.position_at(tcpa);
    let pos_k_at_cpa = k.position_at(tcpa);
    let dcpa = (pos_j_at_cpa[0] - pos_k_at_cpa[0]).hypot(pos_j_at_cpa[1] - pos_k_at_cpa[1]);
    Ok(CpaResult {
        tcpa,
        dcpa,
        pos_j_at_cpa,
        pos_k_at_cpa,
        rel_speed_sq,
    })
}

/// Relative bearing in `[0, 360)` to `to` as seen from `from`, measured
/// clockwise from `from`'s course.
pub fn relative_bearing(from: &VesselState, to: &VesselState) -> Result<f64> {
    let dn = to.north - from.north;
    let de = to.east - from.east;
    if dn.abs() <= POSITION_EPS && de.abs() <= POSITION_EPS {
        return Err(Error::CoincidentPositions);
    }
    Ok(wrap_360(de.atan2(dn).to_degrees() - from.course))
}

/// Reciprocal course difference in `[-180, 180)`: zero for exactly opposite
/// courses, -180 for identical courses.
pub fn reciprocal_course(psi_j: f64, psi_k: f64) -> f64 {
    wrap_360(psi_j - psi_k) - 180.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn st(n: f64, e: f64, c: f64, u: f64) -> VesselState {
        VesselState::new(n, e, c, u).unwrap()
    }

    #[test]
    fn velocity_examples() {
        let v = velocity_of(&st(0.0, 0.0, 0.0, 10.0));
        assert_abs_diff_eq!(v.v_north, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.v_east, 0.0, epsilon = 1e-12);
        let v = velocity_of(&st(0.0, 0.0, 270.0, 10.0));
        assert_abs_diff_eq!(v.v_north, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.v_east, -10.0, epsilon = 1e-12);
        let v = velocity_of(&st(0.0, 0.0, 90.0, 0.0));
        assert_eq!((v.v_north, v.v_east), (0.0, 0.0));
    }

    #[test]
    fn starboard_crossing_cpa() {
        let r = cpa(&st(0.0, 0.0, 0.0, 10.0), &st(1250.0, 1000.0, 270.0, 10.0)).unwrap();
        assert_abs_diff_eq!(r.dcpa, 176.78, epsilon = 0.005);
        // dp.dv = -22500, |dv|^2 = 200
        assert_abs_diff_eq!(r.tcpa, 112.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rel_speed_sq, 200.0, epsilon = 1e-9);
    }

    #[test]
    fn head_on_port_cpa() {
        let r = cpa(&st(0.0, 0.0, 0.0, 10.0), &st(995.40, -95.85, 174.5, 10.0)).unwrap();
        assert_abs_diff_eq!(r.dcpa, 47.98, epsilon = 0.005);
    }

    #[test]
    fn identical_velocity_is_degenerate() {
        let e = cpa(&st(0.0, 0.0, 0.0, 10.0), &st(100.0, 0.0, 0.0, 10.0)).unwrap_err();
        assert!(matches!(e, Error::DegenerateRelativeMotion { .. }));
    }

    #[test]
    fn bearing_examples() {
        let os = st(0.0, 0.0, 0.0, 10.0);
        assert_abs_diff_eq!(relative_bearing(&os, &st(1000.0, 0.0, 0.0, 0.0)).unwrap(), 0.0);
        let b = relative_bearing(&os, &st(995.40, -95.85, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b, 354.5, epsilon = 0.01);
        let b = relative_bearing(&os, &st(1250.0, 1000.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b, 1000f64.atan2(1250.0).to_degrees(), epsilon = 1e-12);
        assert_abs_diff_eq!(b, 38.66, epsilon = 0.005);
        assert_eq!(relative_bearing(&os, &os), Err(Error::CoincidentPositions));
    }

    #[test]
    fn reciprocal_course_examples() {
        assert_abs_diff_eq!(reciprocal_course(0.0, 180.0), 0.0);
        assert_abs_diff_eq!(reciprocal_course(0.0, 174.5), 5.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reciprocal_course(90.0, 90.0), -180.0);
    }

    #[test]
    fn constructor_validates() {
        assert!(VesselState::new(0.0, 0.0, 0.0, -1.0).is_err());
        assert!(VesselState::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert_eq!(VesselState::new(0.0, 0.0, -90.0, 1.0).unwrap().course, 270.0);
    }

    fn state() -> impl Strategy<Value = VesselState> {
        (-5e3..5e3f64, -5e3..5e3f64, 0.0..360.0f64, 0.0..20.0f64).prop_map(|(n, e, c, u)| st(n, e, c, u))
    }

    proptest! {
        #[test]
        fn cpa_symmetric(j in state(), k in state()) {
            if let (Ok(a), Ok(b)) = (cpa(&j, &k), cpa(&k, &j)) {
                prop_assert!((a.tcpa - b.tcpa).abs() <= 1e-9 * a.tcpa.abs().max(1.0));
                prop_assert!((a.dcpa - b.dcpa).abs() <= 1e-9 * a.dcpa.max(1.0));
            }
        }

        #[test]
        fn cpa_translation_invariant(j in state(), k in state(), dn in -1e4..1e4f64, de in -1e4..1e4f64) {
            let shift = |s: VesselState| VesselState { north: s.north + dn, east: s.east + de, ..s };
            if let (Ok(a), Ok(b)) = (cpa(&j, &k), cpa(&shift(j), &shift(k))) {
                // offsets up to 1e4 m cost a few ulps of the position magnitude
                let tol = 1e-9 * (1.0 + a.tcpa.abs()) + 1e-11 * 2e4 / a.rel_speed_sq.sqrt();
                prop_assert!((a.tcpa - b.tcpa).abs() <= tol * 10.0);
                prop_assert!((a.dcpa - b.dcpa).abs() <= 1e-9 * a.dcpa.max(1.0) + 1e-7);
                prop_assert!((a.dcpa - (a.pos_j_at_cpa[0] - a.pos_k_at_cpa[0]).hypot(a.pos_j_at_cpa[1] - a.pos_k_at_cpa[1])).abs() < 1e-12);
            }
        }

        #[test]
        fn dcpa_is_min_separation(j in state(), k in state()) {
            if let Ok(r) = cpa(&j, &k) {
                // dense grid oracle around TCPA, step 0.01 s
                let mut best = f64::INFINITY;
                for i in -10_000..=10_000 {
                    let t = r.tcpa + i as f64 * 0.01;
                    let pj = j.position_at(t);
                    let pk = k.position_at(t);
                    best = best.min((pj[0] - pk[0]).hypot(pj[1] - pk[1]));
                }
                prop_assert!(r.dcpa >= 0.0);
                prop_assert!((best - r.dcpa).abs() < 1e-3, "grid {} cpa {}", best, r.dcpa);
            }
        }

        #[test]
        fn bearing_rotation_invariant(tn in -5e3..5e3f64, te in -5e3..5e3f64, course in 0.0..360.0f64, delta in -720.0..720.0f64) {
            prop_assume!(tn.abs() > 1e-3 || te.abs() > 1e-3);
            let from = st(0.0, 0.0, course, 1.0);
            let to = st(tn, te, 0.0, 0.0);
            let b0 = relative_bearing(&from, &to).unwrap();
            let (s, c) = delta.to_radians().sin_cos();
            let rot_to = st(tn * c - te * s, tn * s + te * c, 0.0, 0.0);
            let rot_from = st(0.0, 0.0, course + delta, 1.0);
            let b1 = relative_bearing(&rot_from, &rot_to).unwrap();
            let diff = wrap_360(b1 - b0 + 180.0) - 180.0;
            prop_assert!(diff.abs() < 1e-8);
            prop_assert!((0.0..360.0).contains(&b0));
        }

        #[test]
        fn wrap_ranges(a in -1e6..1e6f64, b in -1e6..1e6f64) {
            let w = wrap_360(a);
            prop_assert!((0.0..360.0).contains(&w));
            let d = reciprocal_course(a, b);
            prop_assert!((-180.0..=180.0).contains(&d));
        }
    }
}
