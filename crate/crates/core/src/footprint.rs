//! 128×128 raster building footprints and data-driven seed placement.

use std::collections::VecDeque;
use std::io::Cursor;

use image::{GrayImage, ImageFormat, Luma};
use serde::Serialize;
use thiserror::Error;

pub const FOOTPRINT_SIZE: u32 = 128;
/// Smallest interior that still admits a seed block plus room to grow.
pub const MIN_INTERIOR: usize = 25;
/// Interior pixels per seed when bounding the seed count.
pub const PIXELS_PER_SEED: usize = 25;
const LUMA_THRESHOLD: u8 = 128;

/// Pixel coordinate: `x` is the column, `y` the row (top row is 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
pub struct Pixel {
    pub x: i32,
    pub y: i32,
}

impl Pixel {
    pub const fn new(x: i32, y: i32) -> Self {
        Pixel { x, y }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FootprintError {
    #[error("footprint must be 128x128, got {0}x{1}")]
    WrongDimensions(u32, u32),
    #[error("footprint interior is not a single 4-connected region")]
    MultipleComponents,
    #[error("footprint interior has {0} pixels, need at least 25")]
    TooSmallInterior(usize),
    #[error("could not decode footprint image: {0}")]
    Decode(String),
    #[error("requested {requested} seeds, footprint admits 1..={max}")]
    TooManySeeds { requested: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    id: String,
    mask: Vec<bool>,
    interior_count: usize,
    boundary: Vec<Pixel>,
}

impl Footprint {
    /// Builds a footprint from a row-major mask (`true` = interior).
    pub fn from_mask(id: impl Into<String>, mask: Vec<bool>) -> Result<Self, FootprintError> {
        let n = (FOOTPRINT_SIZE * FOOTPRINT_SIZE) as usize;
        if mask.len() != n {
            return Err(FootprintError::WrongDimensions(FOOTPRINT_SIZE, (mask.len() / FOOTPRINT_SIZE as usize) as u32));
        }
        let interior_count = mask.iter().filter(|m| **m).count();
        if interior_count < MIN_INTERIOR {
            return Err(FootprintError::TooSmallInterior(interior_count));
        }
        if component_size(&mask) != interior_count {
            return Err(FootprintError::MultipleComponents);
        }
        let mut fp = Footprint {
            id: id.into(),
            mask,
            interior_count,
            boundary: Vec::new(),
        };
        fp.boundary = fp.compute_boundary();
        Ok(fp)
    }

    pub fn from_png(id: impl Into<String>, bytes: &[u8]) -> Result<Self, FootprintError> {
        load_footprint(id, bytes)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn interior_count(&self) -> usize {
        self.interior_count
    }

    /// Interior pixels with at least one exterior 8-neighbour (the image
    /// border counts as exterior), row-major.
    pub fn boundary(&self) -> &[Pixel] {
        &self.boundary
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn in_bounds(p: Pixel) -> bool {
        (0..FOOTPRINT_SIZE as i32).contains(&p.x) && (0..FOOTPRINT_SIZE as i32).contains(&p.y)
    }

    pub fn is_interior(&self, p: Pixel) -> bool {
        Self::in_bounds(p) && self.mask[(p.y as u32 * FOOTPRINT_SIZE + p.x as u32) as usize]
    }

    /// True when the 3×3 block centred on `p` lies inside the interior.
    pub fn block_inside(&self, p: Pixel) -> bool {
        (-1..=1).all(|dy| (-1..=1).all(|dx| self.is_interior(Pixel::new(p.x + dx, p.y + dy))))
    }

    fn compute_boundary(&self) -> Vec<Pixel> {
        let mut out = Vec::new();
        for y in 0..FOOTPRINT_SIZE as i32 {
            for x in 0..FOOTPRINT_SIZE as i32 {
                let p = Pixel::new(x, y);
                if !self.is_interior(p) {
                    continue;
                }
                let touches = (-1..=1).any(|dy| (-1..=1).any(|dx| !self.is_interior(Pixel::new(x + dx, y + dy))));
                if touches {
                    out.push(p);
                }
            }
        }
        out
    }

    /// 8-bit grayscale PNG, white interior on black.
    pub fn encode_png(&self) -> Vec<u8> {
        let img = GrayImage::from_fn(FOOTPRINT_SIZE, FOOTPRINT_SIZE, |x, y| {
            Luma([if self.mask[(y * FOOTPRINT_SIZE + x) as usize] { 255 } else { 0 }])
        });
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).expect("png encoding to memory");
        out.into_inner()
    }

    pub fn max_seeds(&self) -> usize {
        self.interior_count / PIXELS_PER_SEED
    }

    /// Squared Euclidean distance from each pixel to the nearest exterior
    /// pixel, row-major. Pixels beyond the image border count as exterior.
    pub fn exterior_distance_sq(&self) -> Vec<i64> {
        distance_transform_sq(&self.mask)
    }
}

pub fn load_footprint(id: impl Into<String>, bytes: &[u8]) -> Result<Footprint, FootprintError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| FootprintError::Decode(e.to_string()))?;
    if img.width() != FOOTPRINT_SIZE || img.height() != FOOTPRINT_SIZE {
        return Err(FootprintError::WrongDimensions(img.width(), img.height()));
    }
    let gray = img.to_luma8();
    let mask = gray.pixels().map(|p| p.0[0] >= LUMA_THRESHOLD).collect();
    Footprint::from_mask(id, mask)
}

/// Size of the 4-connected component containing the first interior pixel.
fn component_size(mask: &[bool]) -> usize {
    let w = FOOTPRINT_SIZE as usize;
    let Some(start) = mask.iter().position(|m| *m) else {
        return 0;
    };
    let mut seen = vec![false; mask.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 0;
    while let Some(i) = queue.pop_front() {
        count += 1;
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if mask[j] && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < w {
            visit(i + w);
        }
    }
    count
}

/// Exact squared EDT (Felzenszwalb & Huttenlocher) over a grid padded with a
/// one-pixel exterior frame.
fn distance_transform_sq(mask: &[bool]) -> Vec<i64> {
    let n = FOOTPRINT_SIZE as usize;
    let p = n + 2;
    const INF: i64 = i64::MAX / 4;
    let mut grid = vec![0i64; p * p];
    for y in 0..n {
        for x in 0..n {
            if mask[y * n + x] {
                grid[(y + 1) * p + x + 1] = INF;
            }
        }
    }
    let mut line = vec![0i64; p];
    let mut out = vec![0i64; p];
    for x in 0..p {
        for y in 0..p {
            line[y] = grid[y * p + x];
        }
        edt_1d(&line, &mut out);
        for y in 0..p {
            grid[y * p + x] = out[y];
        }
    }
    for y in 0..p {
        line.copy_from_slice(&grid[y * p..(y + 1) * p]);
        edt_1d(&line, &mut out);
        grid[y * p..(y + 1) * p].copy_from_slice(&out);
    }
    let mut result = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            result.push(grid[(y + 1) * p + x + 1]);
        }
    }
    result
}

fn edt_1d(f: &[i64], d: &mut [i64]) {
    let n = f.len();
    const INF: i64 = i64::MAX / 4;
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut k = 0usize;
    // the first finite sample anchors the lower envelope
    let Some(first) = f.iter().position(|x| *x < INF) else {
        d.fill(INF);
        return;
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if f[q] >= INF {
            continue;
        }
        let mut s;
        loop {
            let r = v[k];
            s = ((f[q] + (q * q) as i64) - (f[r] + (r * r) as i64)) as f64 / (2.0 * (q as f64 - r as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    let mut k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let r = v[k];
        let dq = q as i64 - r as i64;
        *out = dq * dq + f[r];
    }
}

/// Greedy farthest-point seeds. The first seed maximizes distance to the
/// exterior; every later seed maximizes its minimum distance to the seeds
/// already chosen. Ties go to the first pixel in row-major order. Each seed's
/// 3×3 block lies inside the interior and is disjoint from the other blocks.
pub fn auto_seed_points(fp: &Footprint, n: usize) -> Result<Vec<Pixel>, FootprintError> {
    let max = fp.max_seeds();
    if n == 0 || n > max {
        return Err(FootprintError::TooManySeeds { requested: n, max });
    }
    let size = FOOTPRINT_SIZE as i32;
    let mut candidates = Vec::new();
    for y in 0..size {
        for x in 0..size {
            let p = Pixel::new(x, y);
            if fp.block_inside(p) {
                candidates.push(p);
            }
        }
    }
    let dist = fp.exterior_distance_sq();
    let first = candidates
        .iter()
        .copied()
        .fold(None::<(i64, Pixel)>, |best, p| {
            let d = dist[(p.y * size + p.x) as usize];
            match best {
                Some((bd, _)) if bd >= d => best,
                _ => Some((d, p)),
            }
        })
        .map(|(_, p)| p)
        .ok_or(FootprintError::TooManySeeds { requested: n, max: 0 })?;

    let mut chosen = vec![first];
    // running min squared distance to the chosen set, per candidate
    let mut nearest: Vec<i64> = candidates.iter().map(|c| dist_sq(*c, first)).collect();
    let mut blocked: Vec<bool> = candidates.iter().map(|c| blocks_overlap(*c, first)).collect();
    while chosen.len() < n {
        let mut best: Option<usize> = None;
        for (i, d) in nearest.iter().enumerate() {
            if blocked[i] {
                continue;
            }
            if best.is_none_or(|b| *d > nearest[b]) {
                best = Some(i);
            }
        }
        let Some(i) = best else {
            return Err(FootprintError::TooManySeeds { requested: n, max: chosen.len() });
        };
        let p = candidates[i];
        chosen.push(p);
        for (j, c) in candidates.iter().enumerate() {
            nearest[j] = nearest[j].min(dist_sq(*c, p));
            blocked[j] |= blocks_overlap(*c, p);
        }
    }
    Ok(chosen)
}

fn dist_sq(a: Pixel, b: Pixel) -> i64 {
    let dx = (a.x - b.x) as i64;
    let dy = (a.y - b.y) as i64;
    dx * dx + dy * dy
}

fn blocks_overlap(a: Pixel, b: Pixel) -> bool {
    (a.x - b.x).abs() < 3 && (a.y - b.y).abs() < 3
}

/// Synthetic footprints shipped with the engine.
pub mod bundled {
    use super::{Footprint, FOOTPRINT_SIZE};

    macro_rules! bundled_pngs {
        ($($id:literal),* $(,)?) => {
            const FILES: &[(&str, &[u8])] = &[
                $(($id, include_bytes!(concat!("../footprints/", $id, ".png")))),*
            ];
        };
    }

    bundled_pngs!(
        "fp01-rectangle",
        "fp02-square",
        "fp03-l-wing",
        "fp04-t-hall",
        "fp05-u-court",
        "fp06-cross",
        "fp07-h-block",
        "fp08-ring",
        "fp09-stepped",
        "fp10-rotunda",
        "fp11-ellipse",
        "fp12-trapezoid",
        "fp13-z-block",
        "fp14-e-comb",
        "fp15-notched",
        "fp16-twin-pavilions",
        "fp17-diamond",
        "fp18-long-gallery",
        "fp19-octagon",
        "fp20-terraces",
    );

    pub fn ids() -> Vec<&'static str> {
        FILES.iter().map(|(id, _)| *id).collect()
    }

    pub fn png(id: &str) -> Option<&'static [u8]> {
        FILES.iter().find(|(k, _)| *k == id).map(|(_, b)| *b)
    }

    pub fn load(id: &str) -> Option<Footprint> {
        png(id).map(|b| Footprint::from_png(id, b).expect("bundled footprint is valid"))
    }

    pub fn all() -> Vec<Footprint> {
        ids().into_iter().filter_map(load).collect()
    }

    /// The procedural masks the bundled PNGs were rendered from.
    pub fn synthesize(id: &str) -> Option<Vec<bool>> {
        let n = FOOTPRINT_SIZE as i32;
        let rect = |x0: i32, y0: i32, x1: i32, y1: i32| move |x: i32, y: i32| x >= x0 && x < x1 && y >= y0 && y < y1;
        let f: Box<dyn Fn(i32, i32) -> bool> = match id {
            "fp01-rectangle" => Box::new(rect(14, 34, 114, 94)),
            "fp02-square" => Box::new(rect(32, 32, 96, 96)),
            "fp03-l-wing" => Box::new(move |x, y| rect(12, 12, 52, 116)(x, y) || rect(12, 76, 116, 116)(x, y)),
            "fp04-t-hall" => Box::new(move |x, y| rect(10, 14, 118, 50)(x, y) || rect(44, 50, 84, 118)(x, y)),
            "fp05-u-court" => Box::new(move |x, y| rect(12, 12, 116, 116)(x, y) && !rect(48, 12, 80, 80)(x, y)),
            "fp06-cross" => Box::new(move |x, y| rect(44, 8, 84, 120)(x, y) || rect(8, 44, 120, 84)(x, y)),
            "fp07-h-block" => Box::new(move |x, y| {
                rect(12, 12, 44, 116)(x, y) || rect(84, 12, 116, 116)(x, y) || rect(44, 50, 84, 78)(x, y)
            }),
            "fp08-ring" => Box::new(move |x, y| rect(10, 10, 118, 118)(x, y) && !rect(46, 46, 82, 82)(x, y)),
            "fp09-stepped" => Box::new(move |x, y| {
                rect(10, 10, 50, 50)(x, y) || rect(10, 50, 86, 86)(x, y) || rect(10, 86, 118, 118)(x, y)
            }),
            "fp10-rotunda" => Box::new(move |x, y| {
                let (dx, dy) = (x as f64 - 63.5, y as f64 - 63.5);
                dx * dx + dy * dy <= 54.0 * 54.0
            }),
            "fp11-ellipse" => Box::new(move |x, y| {
                let (dx, dy) = ((x as f64 - 63.5) / 58.0, (y as f64 - 63.5) / 36.0);
                dx * dx + dy * dy <= 1.0
            }),
            "fp12-trapezoid" => Box::new(move |x, y| {
                (16..112).contains(&y) && {
                    let inset = (112 - y) / 3;
                    x >= 10 + inset && x < 118 - inset
                }
            }),
            "fp13-z-block" => Box::new(move |x, y| {
                rect(8, 10, 84, 46)(x, y) || rect(46, 46, 82, 82)(x, y) || rect(44, 82, 120, 118)(x, y)
            }),
            "fp14-e-comb" => Box::new(move |x, y| {
                rect(12, 10, 44, 118)(x, y)
                    || rect(44, 10, 116, 36)(x, y)
                    || rect(44, 51, 104, 77)(x, y)
                    || rect(44, 92, 116, 118)(x, y)
            }),
            "fp15-notched" => Box::new(move |x, y| {
                rect(10, 20, 118, 108)(x, y)
                    && !rect(10, 20, 34, 44)(x, y)
                    && !rect(94, 84, 118, 108)(x, y)
                    && !rect(54, 96, 74, 108)(x, y)
            }),
            "fp16-twin-pavilions" => Box::new(move |x, y| {
                rect(6, 24, 54, 104)(x, y) || rect(74, 24, 122, 104)(x, y) || rect(54, 56, 74, 72)(x, y)
            }),
            "fp17-diamond" => Box::new(move |x, y| (x - 64).abs() + (y - 64).abs() <= 58),
            "fp18-long-gallery" => Box::new(rect(4, 50, 124, 78)),
            "fp19-octagon" => Box::new(move |x, y| {
                let (dx, dy) = ((x - 64).abs(), (y - 64).abs());
                dx <= 56 && dy <= 56 && dx + dy <= 80
            }),
            "fp20-terraces" => Box::new(move |x, y| {
                rect(8, 8, 120, 40)(x, y) || rect(20, 40, 108, 80)(x, y) || rect(36, 80, 92, 120)(x, y)
            }),
            _ => return None,
        };
        let mut mask = Vec::with_capacity((n * n) as usize);
        for y in 0..n {
            for x in 0..n {
                mask.push(f(x, y));
            }
        }
        Some(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(f: impl Fn(i32, i32) -> bool) -> Vec<bool> {
        let n = FOOTPRINT_SIZE as i32;
        (0..n).flat_map(|y| (0..n).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect()
    }

    fn png_of(w: u32, h: u32, f: impl Fn(u32, u32) -> u8) -> Vec<u8> {
        let img = GrayImage::from_fn(w, h, |x, y| Luma([f(x, y)]));
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).unwrap();
        out.into_inner()
    }

    /// Brute-force squared distance to the nearest exterior pixel, with the
    /// image surrounded by an exterior frame.
    fn brute_distance_sq(fp: &Footprint, p: Pixel) -> i64 {
        let n = FOOTPRINT_SIZE as i32;
        let mut best = i64::MAX;
        for y in -1..=n {
            for x in -1..=n {
                let q = Pixel::new(x, y);
                if !fp.is_interior(q) {
                    best = best.min(dist_sq(p, q));
                }
            }
        }
        best
    }

    /// Exhaustive farthest-point oracle.
    fn brute_seeds(fp: &Footprint, n: usize) -> Vec<Pixel> {
        let size = FOOTPRINT_SIZE as i32;
        let candidates: Vec<Pixel> = (0..size)
            .flat_map(|y| (0..size).map(move |x| Pixel::new(x, y)))
            .filter(|p| fp.block_inside(*p))
            .collect();
        let mut chosen: Vec<Pixel> = Vec::new();
        while chosen.len() < n {
            let mut best: Option<(i64, Pixel)> = None;
            for c in &candidates {
                if chosen.iter().any(|s| (s.x - c.x).abs() < 3 && (s.y - c.y).abs() < 3) {
                    continue;
                }
                let score = if chosen.is_empty() {
                    brute_distance_sq(fp, *c)
                } else {
                    chosen.iter().map(|s| dist_sq(*s, *c)).min().unwrap()
                };
                if best.is_none_or(|(b, _)| score > b) {
                    best = Some((score, *c));
                }
            }
            chosen.push(best.unwrap().1);
        }
        chosen
    }

    #[test]
    fn all_white_is_full_interior() {
        let fp = load_footprint("white", &png_of(128, 128, |_, _| 255)).unwrap();
        assert_eq!(fp.interior_count(), 16384);
        assert_eq!(fp.boundary().len(), 4 * 127);
    }

    #[test]
    fn centered_square() {
        let fp = load_footprint("sq", &png_of(128, 128, |x, y| if (32..96).contains(&x) && (32..96).contains(&y) { 200 } else { 10 })).unwrap();
        assert_eq!(fp.interior_count(), 4096);
        let ring: Vec<Pixel> = (32..96)
            .flat_map(|y| (32..96).map(move |x| Pixel::new(x, y)))
            .filter(|p| p.x == 32 || p.x == 95 || p.y == 32 || p.y == 95)
            .collect();
        assert_eq!(fp.boundary(), ring.as_slice());
    }

    #[test]
    fn rejects_bad_images() {
        assert_eq!(
            load_footprint("x", &png_of(64, 128, |_, _| 255)),
            Err(FootprintError::WrongDimensions(64, 128))
        );
        let blobs = png_of(128, 128, |x, y| if (x < 20 || x > 100) && (10..40).contains(&y) { 255 } else { 0 });
        assert_eq!(load_footprint("x", &blobs), Err(FootprintError::MultipleComponents));
        // diagonal contact is not 4-connectivity
        let diag = mask_from(|x, y| (x < 10 && y < 10) || ((10..20).contains(&x) && (10..20).contains(&y)));
        assert_eq!(Footprint::from_mask("d", diag), Err(FootprintError::MultipleComponents));
        let tiny = png_of(128, 128, |x, y| if x < 4 && y < 4 { 255 } else { 0 });
        assert_eq!(load_footprint("x", &tiny), Err(FootprintError::TooSmallInterior(16)));
        assert!(matches!(load_footprint("x", b"not a png"), Err(FootprintError::Decode(_))));
    }

    #[test]
    fn rgba_input_uses_luminance() {
        let img = image::RgbaImage::from_fn(128, 128, |x, _| if x < 64 { image::Rgba([250, 250, 250, 255]) } else { image::Rgba([0, 0, 90, 255]) });
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).unwrap();
        let fp = load_footprint("rgba", &out.into_inner()).unwrap();
        assert_eq!(fp.interior_count(), 64 * 128);
    }

    #[test]
    fn png_round_trip_is_idempotent() {
        let fp = Footprint::from_mask("l", bundled::synthesize("fp03-l-wing").unwrap()).unwrap();
        let again = load_footprint("l", &fp.encode_png()).unwrap();
        assert_eq!(again, fp);
        assert_eq!(again.encode_png(), fp.encode_png());
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        for id in ["fp05-u-court", "fp10-rotunda", "fp17-diamond"] {
            let fp = bundled::load(id).unwrap();
            let fast = fp.exterior_distance_sq();
            for y in (0..128).step_by(7) {
                for x in (0..128).step_by(5) {
                    let p = Pixel::new(x, y);
                    let expect = if fp.is_interior(p) { brute_distance_sq(&fp, p) } else { 0 };
                    assert_eq!(fast[(y * 128 + x) as usize], expect, "{id} {p:?}");
                }
            }
        }
    }

    #[test]
    fn one_seed_in_square_is_its_center() {
        let fp = Footprint::from_mask("sq", mask_from(|x, y| (32..96).contains(&x) && (32..96).contains(&y))).unwrap();
        let seeds = auto_seed_points(&fp, 1).unwrap();
        assert_eq!(seeds, vec![Pixel::new(63, 63)]);
        assert_eq!(seeds, brute_seeds(&fp, 1));
    }

    #[test]
    fn two_seeds_on_a_bar_sit_at_opposite_ends() {
        let fp = Footprint::from_mask("bar", mask_from(|x, y| (40..80).contains(&x) && (60..70).contains(&y))).unwrap();
        let seeds = auto_seed_points(&fp, 2).unwrap();
        // frozen from the exhaustive oracle
        assert_eq!(seeds, brute_seeds(&fp, 2));
        assert_eq!(seeds, vec![Pixel::new(44, 64), Pixel::new(78, 68)]);
    }

    #[test]
    fn seed_count_bounds() {
        let fp = bundled::load("fp02-square").unwrap();
        assert_eq!(
            auto_seed_points(&fp, 0),
            Err(FootprintError::TooManySeeds { requested: 0, max: fp.max_seeds() })
        );
        assert!(auto_seed_points(&fp, fp.max_seeds() + 1).is_err());
    }

    #[test]
    fn seeds_match_oracle_on_bundled_shapes() {
        for id in ["fp04-t-hall", "fp08-ring"] {
            let fp = bundled::load(id).unwrap();
            assert_eq!(auto_seed_points(&fp, 4).unwrap(), brute_seeds(&fp, 4), "{id}");
        }
    }

    #[test]
    fn bundled_pngs_match_their_generators() {
        assert_eq!(bundled::ids().len(), 20);
        for fp in bundled::all() {
            assert_eq!(fp.mask(), bundled::synthesize(fp.id()).unwrap().as_slice(), "{}", fp.id());
        }
    }
}
