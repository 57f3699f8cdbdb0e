//! Receiver mobility: dwells at grid positions joined by constant-speed walks.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::seed;

/// Dwell durations drawn uniformly, in seconds.
pub const DWELL_CHOICES_S: [f64; 5] = [180.0, 240.0, 300.0, 360.0, 420.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentKind {
    Dwell { position: f64 },
    Walk { from: f64, to: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn is_dwell(&self) -> bool {
        matches!(self.kind, SegmentKind::Dwell { .. })
    }

    pub fn position_at(&self, t: f64) -> f64 {
        match self.kind {
            SegmentKind::Dwell { position } => position,
            SegmentKind::Walk { from, to } => {
                let frac = ((t - self.start) / self.duration).clamp(0.0, 1.0);
                from + (to - from) * frac
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    segments: Vec<Segment>,
    duration: f64,
}

impl MobilityTrace {
    /// Random trace over `positions` lasting `duration` seconds.
    pub fn generate(positions: &[f64], duration: f64, walk_speed: f64, run_seed: u64) -> Self {
        assert!(!positions.is_empty(), "no positions to dwell at");
        assert!(walk_speed > 0.0, "walk speed must be positive");
        let mut rng = seed::rng_for(run_seed, seed::TRACE_DOMAIN);
        let mut segments = Vec::new();
        let mut t = 0.0;
        let mut here = *positions.choose(&mut rng).expect("non-empty");
        while t < duration {
            let dwell = *DWELL_CHOICES_S.choose(&mut rng).expect("non-empty");
            segments.push(Segment {
                start: t,
                duration: dwell.min(duration - t),
                kind: SegmentKind::Dwell { position: here },
            });
            t += dwell;
            if t >= duration || positions.len() < 2 {
                break;
            }
            let next = loop {
                let p = positions[rng.random_range(0..positions.len())];
                if p != here {
                    break p;
                }
            };
            let walk = (next - here).abs() / walk_speed;
            segments.push(Segment {
                start: t,
                duration: walk.min(duration - t),
                kind: SegmentKind::Walk { from: here, to: next },
            });
            t += walk;
            here = next;
        }
        MobilityTrace { segments, duration }
    }

    /// A single dwell at `position`.
    pub fn stationary(position: f64, duration: f64) -> Self {
        MobilityTrace {
            segments: vec![Segment {
                start: 0.0,
                duration,
                kind: SegmentKind::Dwell { position },
            }],
            duration,
        }
    }

    pub fn from_segments(segments: Vec<Segment>) -> Self {
        let duration = segments.last().map_or(0.0, Segment::end);
        MobilityTrace { segments, duration }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Index of the segment covering time `t`; segment starts are inclusive.
    pub fn segment_index(&self, t: f64) -> usize {
        self.segments
            .partition_point(|s| s.start <= t)
            .saturating_sub(1)
    }

    pub fn position_at(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].position_at(t)
    }

    pub fn dwell_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_dwell()).count()
    }
}
