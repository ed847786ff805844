//! Shared fixtures for the benchmarks.

use coxtile::coxeter::{enumerate_ball, DEFAULT_BALL_CAP};
use coxtile::walls::{enumerate_walls, peel_levels, Palette, WallSet};
use coxtile::{Ball, CoxeterSystem, Word};

pub struct Fixture {
    pub sys: CoxeterSystem,
    pub palette: Palette,
    pub ball: Ball,
    pub walls: WallSet,
}

/// The right-angled `2n`-gon group with its two-class palette.
pub fn polygon_fixture(n: usize, radius: usize) -> Fixture {
    let sys = CoxeterSystem::right_angled_polygon(2 * n);
    let ball = enumerate_ball(&sys, radius, DEFAULT_BALL_CAP).expect("ball fits");
    let walls = enumerate_walls(&sys, &ball);
    Fixture {
        palette: Palette::alternating(2 * n),
        sys,
        ball,
        walls,
    }
}

impl Fixture {
    pub fn peel(&self) -> usize {
        let levels = peel_levels(&self.sys, &self.ball, &self.walls, &self.palette, &Word::identity())
            .expect("palette is valid");
        levels.levels.iter().filter(|l| l.value().is_some()).count()
    }
}
