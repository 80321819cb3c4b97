//! Unoptimized reference filter: keeps every event per group and derives
//! the map contents by scanning that history. Group indices come from
//! integer division, never from shifts.

use evfilt_core::{Event, FilterConfig, FilterKind, SensorGeometry, Verdict};

pub struct ReferenceFilter {
    geometry: SensorGeometry,
    s: usize,
    cols: usize,
    rows: usize,
    history: Vec<Vec<Event>>,
}

impl ReferenceFilter {
    pub fn new(geometry: SensorGeometry, s: u32) -> Self {
        let s = s as usize;
        let cols = (geometry.width as usize).div_ceil(s);
        let rows = (geometry.height as usize).div_ceil(s);
        ReferenceFilter {
            geometry,
            s,
            cols,
            rows,
            history: vec![Vec::new(); cols * rows],
        }
    }

    fn group(&self, e: &Event) -> (usize, usize) {
        (e.x as usize / self.s, e.y as usize / self.s)
    }

    fn caught_by(&self, kind: FilterKind, e: &Event, cfg: &FilterConfig) -> bool {
        let (gx, gy) = self.group(e);
        let last = self.history[gy * self.cols + gx].last();
        let stored = last.map_or(0, |p| p.ts);
        let age = e.ts as i128 - stored as i128;
        match kind {
            FilterKind::FirstEvent => stored == 0,
            FilterKind::BackgroundActivity => age >= cfg.dt_ba_us as i128,
            FilterKind::Refractory => stored > 0 && age <= cfg.dt_refr_us as i128,
            FilterKind::HotPixel => {
                let (cx, cy) =
                    last.map_or((self.geometry.width, self.geometry.height), |p| (p.x, p.y));
                if cfg.strict_hotpixel {
                    !(cx != e.x && cy != e.y)
                } else {
                    (cx, cy) == (e.x, e.y)
                }
            }
            FilterKind::Polarity => {
                let mut supported = false;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (gx as i64 + dx, gy as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= self.cols as i64 || ny >= self.rows as i64 {
                            continue;
                        }
                        let hist = &self.history[ny as usize * self.cols + nx as usize];
                        let t = hist
                            .iter()
                            .rev()
                            .find(|p| p.pol != e.pol)
                            .map_or(0, |p| p.ts);
                        if t > 0 && e.ts as i128 - t as i128 <= cfg.dt_pol_us as i128 {
                            supported = true;
                        }
                    }
                }
                !supported
            }
        }
    }

    pub fn process(&mut self, e: &Event, cfg: &FilterConfig) -> Verdict {
        let verdict = cfg
            .order
            .iter()
            .copied()
            .find(|&k| self.caught_by(k, e, cfg))
            .map_or(Verdict::Pass, Verdict::Caught);
        let (gx, gy) = self.group(e);
        self.history[gy * self.cols + gx].push(*e);
        verdict
    }

    pub fn run(geometry: SensorGeometry, events: &[Event], cfg: &FilterConfig) -> Vec<Verdict> {
        let mut r = ReferenceFilter::new(geometry, cfg.subsampling());
        events.iter().map(|e| r.process(e, cfg)).collect()
    }
}
