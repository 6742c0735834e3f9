use std::f64::consts::TAU;

use super::Position;
use crate::sim::{RandomStream, SimTime};

/// Rectangular area `[0, width] x [0, height]` plus the radio range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arena {
    pub width: f64,
    pub height: f64,
    pub tx_radius: f64,
}

impl Arena {
    pub fn new(width: f64, height: f64, tx_radius: f64) -> Self {
        assert!(width > 0.0 && height > 0.0 && tx_radius > 0.0, "arena dimensions must be positive");
        Arena { width, height, tx_radius }
    }

    pub fn contains(&self, p: &Position) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    fn clamp(&self, p: Position) -> Position {
        Position::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }
}

/// Piecewise-linear motion state. `position` is valid at `updated_at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeKinematics {
    pub position: Position,
    pub velocity: (f64, f64),
    pub leg_end: SimTime,
    pub updated_at: SimTime,
}

impl NodeKinematics {
    pub fn stationary(position: Position) -> Self {
        NodeKinematics {
            position,
            velocity: (0.0, 0.0),
            leg_end: SimTime::MAX,
            updated_at: SimTime::ZERO,
        }
    }

    pub fn speed(&self) -> f64 {
        self.velocity.0.hypot(self.velocity.1)
    }

    pub fn is_moving(&self) -> bool {
        self.velocity != (0.0, 0.0)
    }

    /// Position extrapolated to `t`, kept inside the arena.
    pub fn position_at(&self, t: SimTime, arena: &Arena) -> Position {
        if !self.is_moving() || t <= self.updated_at {
            return self.position;
        }
        let dt = (t - self.updated_at).as_secs_f64();
        arena.clamp(Position::new(
            self.position.x + self.velocity.0 * dt,
            self.position.y + self.velocity.1 * dt,
        ))
    }

    /// Earliest time the node touches a wall on its current heading.
    pub fn wall_contact(&self, arena: &Arena) -> SimTime {
        if !self.is_moving() {
            return SimTime::MAX;
        }
        let axis = |pos: f64, v: f64, hi: f64| -> f64 {
            if v > 0.0 {
                (hi - pos) / v
            } else if v < 0.0 {
                pos / -v
            } else {
                f64::INFINITY
            }
        };
        let dt = axis(self.position.x, self.velocity.0, arena.width)
            .min(axis(self.position.y, self.velocity.1, arena.height));
        if dt.is_finite() {
            self.updated_at + SimTime::from_secs_f64_ceil(dt)
        } else {
            SimTime::MAX
        }
    }
}

/// Random-walk mobility: constant speed, a fresh uniform heading every leg,
/// specular reflection at the arena walls, no pauses.
#[derive(Debug, Clone, Copy)]
pub struct RandomWalk {
    pub speed: f64,
    pub leg: SimTime,
    pub arena: Arena,
}

impl RandomWalk {
    pub fn new(speed: f64, leg: SimTime, arena: Arena) -> Self {
        assert!(speed >= 0.0, "speed must be non-negative");
        RandomWalk { speed, leg, arena }
    }

    /// Initial state at `now`. With zero speed the node never moves.
    pub fn start(&self, position: Position, now: SimTime, rng: &mut RandomStream) -> NodeKinematics {
        let mut kin = NodeKinematics::stationary(self.arena.clamp(position));
        kin.updated_at = now;
        if self.speed > 0.0 {
            self.new_leg(&mut kin, now, rng);
            self.reflect(&mut kin);
        }
        kin
    }

    /// Advance to `now` (a leg boundary or a wall contact): draw a new heading
    /// when the leg is over, then reflect off any wall the node is pressing against.
    pub fn step(&self, kin: NodeKinematics, now: SimTime, rng: &mut RandomStream) -> NodeKinematics {
        if !kin.is_moving() {
            return kin;
        }
        let mut next = kin;
        next.position = kin.position_at(now, &self.arena);
        next.updated_at = now;
        if now >= kin.leg_end {
            self.new_leg(&mut next, now, rng);
        }
        self.reflect(&mut next);
        next
    }

    /// When [`RandomWalk::step`] must next be called.
    pub fn next_event(&self, kin: &NodeKinematics) -> SimTime {
        kin.leg_end.min(kin.wall_contact(&self.arena))
    }

    fn new_leg(&self, kin: &mut NodeKinematics, now: SimTime, rng: &mut RandomStream) {
        let theta = rng.uniform() * TAU;
        kin.velocity = (self.speed * theta.cos(), self.speed * theta.sin());
        kin.leg_end = now + self.leg;
    }

    fn reflect(&self, kin: &mut NodeKinematics) {
        let Position { x, y } = kin.position;
        let (vx, vy) = &mut kin.velocity;
        if (x <= 0.0 && *vx < 0.0) || (x >= self.arena.width && *vx > 0.0) {
            *vx = -*vx;
        }
        if (y <= 0.0 && *vy < 0.0) || (y >= self.arena.height && *vy > 0.0) {
            *vy = -*vy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arena() -> Arena {
        Arena::new(1500.0, 1000.0, 125.0)
    }

    #[test]
    fn zero_speed_never_moves() {
        let walk = RandomWalk::new(0.0, SimTime::from_secs(5), arena());
        let mut rng = RandomStream::derive(1, "m");
        let kin = walk.start(Position::new(300.0, 200.0), SimTime::ZERO, &mut rng);
        assert_eq!(walk.next_event(&kin), SimTime::MAX);
        assert_eq!(kin.position_at(SimTime::from_secs(100), &walk.arena), Position::new(300.0, 200.0));
    }

    #[test]
    fn leg_displacement_is_speed_times_duration() {
        let walk = RandomWalk::new(8.0, SimTime::from_secs(5), arena());
        let mut rng = RandomStream::derive(4, "m");
        let start = Position::new(750.0, 500.0);
        let kin = walk.start(start, SimTime::ZERO, &mut rng);
        assert_eq!(walk.next_event(&kin), SimTime::from_secs(5));
        let end = kin.position_at(SimTime::from_secs(5), &walk.arena);
        assert!((start.distance(&end) - 40.0).abs() < 1e-9);
        assert!((kin.speed() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_keeps_node_inside() {
        let a = arena();
        let walk = RandomWalk::new(8.0, SimTime::from_secs(5), a);
        let mut rng = RandomStream::derive(1, "m");
        // heading straight at the left wall from 4 m away
        let mut kin = NodeKinematics {
            position: Position::new(4.0, 500.0),
            velocity: (-8.0, 0.0),
            leg_end: SimTime::from_secs(5),
            updated_at: SimTime::ZERO,
        };
        let contact = walk.next_event(&kin);
        assert_eq!(contact, SimTime::from_millis(500));
        kin = walk.step(kin, contact, &mut rng);
        assert!(kin.velocity.0 > 0.0);
        let later = kin.position_at(SimTime::from_secs(2), &a);
        assert!(later.x > 0.0 && a.contains(&later));
        assert!((later.x - 12.0).abs() < 1e-3);
    }
}
