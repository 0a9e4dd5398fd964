//! Dynamical- and parameter-plane rasters and binary PPM output.

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{normalize_lambda, ParamInfo, Region, HIGH_STRIP_FLOOR};
use crate::classify::{ClassifyConfig, Fate, OrbitClassifier};
use crate::error::{Error, Result};
use crate::map::EvalLimits;

/// A rectangular viewport sampled at pixel centers. Row `j = 0` is the top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl GridSpec {
    pub fn new(
        center: Complex64,
        width: f64,
        height: f64,
        px_w: usize,
        px_h: usize,
    ) -> Result<Self> {
        let spec = GridSpec {
            center,
            width,
            height,
            px_w,
            px_h,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid covering `[re_lo, re_hi] x [im_lo, im_hi]`.
    pub fn from_bounds(
        (re_lo, re_hi): (f64, f64),
        (im_lo, im_hi): (f64, f64),
        px_w: usize,
        px_h: usize,
    ) -> Result<Self> {
        GridSpec::new(
            Complex64::new(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)),
            re_hi - re_lo,
            im_hi - im_lo,
            px_w,
            px_h,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "center {} is not finite",
                self.center
            )));
        }
        if !(self.width.is_finite()
            && self.width > 0.0
            && self.height.is_finite()
            && self.height > 0.0)
        {
            return Err(Error::InvalidGrid(format!(
                "width and height must be positive, got {} x {}",
                self.width, self.height
            )));
        }
        if self.px_w == 0 || self.px_h == 0 {
            return Err(Error::InvalidGrid(format!(
                "pixel dimensions must be at least 1, got {}x{}",
                self.px_w, self.px_h
            )));
        }
        if self.px_w.checked_mul(self.px_h).is_none() {
            return Err(Error::InvalidGrid("pixel count overflows".into()));
        }
        Ok(())
    }

    /// Plane coordinate sampled by pixel `(i, j)`.
    pub fn sample(&self, i: usize, j: usize) -> Complex64 {
        let (w, h) = (self.px_w as f64, self.px_h as f64);
        Complex64::new(
            self.center.re + (i as f64 + 0.5 - w / 2.0) * self.width / w,
            self.center.im - (j as f64 + 0.5 - h / 2.0) * self.height / h,
        )
    }

    pub fn len(&self) -> usize {
        self.px_w * self.px_h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Row-major cells, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<C> {
    pub spec: GridSpec,
    pub cells: Vec<C>,
}

impl<C> Raster<C> {
    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.cells[j * self.spec.px_w + i]
    }

    /// Cells paired with their sample points.
    pub fn samples(&self) -> impl Iterator<Item = (Complex64, &C)> {
        let w = self.spec.px_w;
        self.cells
            .iter()
            .enumerate()
            .map(move |(idx, c)| (self.spec.sample(idx % w, idx / w), c))
    }

    pub fn count(&self, pred: impl Fn(&C) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(c)).count()
    }
}

/// One classified pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub fate: Fate,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamMode {
    /// Color by parameter region.
    Analytic,
    /// Color by the fate of the lower critical value.
    CriticalOrbit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamRaster {
    Analytic(Raster<Region>),
    CriticalOrbit(Raster<Cell>),
}

impl ParamRaster {
    pub fn spec(&self) -> &GridSpec {
        match self {
            ParamRaster::Analytic(r) => &r.spec,
            ParamRaster::CriticalOrbit(r) => &r.spec,
        }
    }
}

fn fill<C: Send>(spec: &GridSpec, pixel: impl Fn(Complex64) -> C + Sync) -> Result<Raster<C>> {
    spec.validate()?;
    let w = spec.px_w;
    let mut cells: Vec<Option<C>> = Vec::with_capacity(spec.len());
    cells.resize_with(spec.len(), || None);
    cells.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = Some(pixel(spec.sample(i, j)));
        }
    });
    Ok(Raster {
        spec: *spec,
        cells: cells
            .into_iter()
            .map(|c| c.expect("every row is filled"))
            .collect(),
    })
}

/// Classifies every pixel of the dynamical plane of `param`. Sample points
/// are read in the input plane; conjugated parameters are handled.
pub fn render_dynamical(
    param: &ParamInfo,
    spec: &GridSpec,
    cfg: &ClassifyConfig,
    limits: &EvalLimits,
) -> Result<Raster<Cell>> {
    let classifier = OrbitClassifier::new(*param, *cfg, *limits)?;
    fill(spec, |z| {
        let out = classifier.classify_input_plane(z);
        Cell {
            fate: out.fate,
            steps: out.steps,
        }
    })
}

/// `lambda + pi/2 - i (sqrt 2 + asinh 1)`.
pub fn lower_critical_value(lambda: Complex64) -> Complex64 {
    lambda + Complex64::new(FRAC_PI_2, -HIGH_STRIP_FLOOR)
}

/// Rasterizes the parameter plane, one `lambda` per pixel.
pub fn render_parameter(
    spec: &GridSpec,
    mode: ParamMode,
    cfg: &ClassifyConfig,
    limits: &EvalLimits,
) -> Result<ParamRaster> {
    cfg.validate()?;
    limits.validate()?;
    match mode {
        ParamMode::Analytic => Ok(ParamRaster::Analytic(fill(spec, |lambda| {
            normalize_lambda(lambda).region
        })?)),
        ParamMode::CriticalOrbit => {
            Ok(ParamRaster::CriticalOrbit(fill(
                spec,
                |lambda| match OrbitClassifier::new(normalize_lambda(lambda), *cfg, *limits) {
                    Ok(classifier) => {
                        let out = classifier.classify_input_plane(lower_critical_value(lambda));
                        Cell {
                            fate: out.fate,
                            steps: out.steps,
                        }
                    }
                    Err(_) => Cell {
                        fate: Fate::Undecided,
                        steps: 0,
                    },
                },
            )?))
        }
    }
}

/// Runs `op` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, op: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    Ok(pool.install(op))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

/// Flat colors per fate; undecided pixels are gray, darker the longer the
/// orbit ran.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatePalette {
    pub budget: usize,
}

impl FatePalette {
    pub fn color(&self, cell: &Cell) -> Rgb {
        match cell.fate {
            Fate::PrimaryBaker => Rgb(247, 220, 111),
            Fate::LowerBaker => Rgb(230, 126, 34),
            Fate::AttractingFixed(_) => Rgb(41, 98, 255),
            Fate::WanderingStrip(_) => Rgb(39, 174, 96),
            Fate::PoleHit(_) => Rgb(192, 57, 43),
            Fate::Undecided => {
                let frac = cell.steps.min(self.budget) as f64 / self.budget.max(1) as f64;
                let level = (200.0 - 180.0 * frac).round() as u8;
                Rgb(level, level, level)
            }
        }
    }
}

pub fn region_color(region: &Region) -> Rgb {
    match region {
        Region::RealAxis => Rgb(0, 0, 0),
        Region::AttractingLobe => Rgb(41, 98, 255),
        Region::BakerStrip => Rgb(230, 126, 34),
        Region::BakerStripAligned => Rgb(211, 84, 0),
        Region::HighStrip => Rgb(247, 220, 111),
        Region::WanderingLine(_) => Rgb(39, 174, 96),
        Region::Other => Rgb(120, 120, 120),
    }
}

/// Binary PPM bytes: `P6\n<w> <h>\n255\n` then RGB triples, top row first.
pub fn encode_ppm<C>(raster: &Raster<C>, palette: impl Fn(&C) -> Rgb) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", raster.spec.px_w, raster.spec.px_h);
    let mut bytes = Vec::with_capacity(header.len() + 3 * raster.cells.len());
    bytes.extend_from_slice(header.as_bytes());
    for cell in &raster.cells {
        let Rgb(r, g, b) = palette(cell);
        bytes.extend_from_slice(&[r, g, b]);
    }
    bytes
}

pub fn write_ppm<C>(raster: &Raster<C>, palette: impl Fn(&C) -> Rgb, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    out.write_all(&encode_ppm(raster, palette))
        .map_err(io_err)?;
    out.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pixel_centers() {
        let spec = GridSpec::new(c(1.0, -1.0), 4.0, 2.0, 4, 2).unwrap();
        assert_eq!(spec.sample(0, 0), c(-0.5, -0.5));
        assert_eq!(spec.sample(3, 1), c(2.5, -1.5));
        let one = GridSpec::new(c(0.3, 0.7), 1.0, 1.0, 1, 1).unwrap();
        assert_eq!(one.sample(0, 0), c(0.3, 0.7));
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::new(c(0.0, 0.0), 0.0, 1.0, 1, 1).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, -1.0, 1, 1).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 1.0, 0, 1).is_err());
        assert!(GridSpec::new(c(f64::NAN, 0.0), 1.0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn ppm_single_pixel() {
        let spec = GridSpec::new(c(0.0, 1.0), 1.0, 1.0, 1, 1).unwrap();
        let raster = Raster {
            spec,
            cells: vec![Fate::PrimaryBaker],
        };
        let bytes = encode_ppm(&raster, |_| Rgb(255, 0, 0));
        assert_eq!(bytes, b"P6\n1 1\n255\n\xff\x00\x00");
    }

    #[test]
    fn ppm_payload_size() {
        let spec = GridSpec::new(c(0.0, 0.0), 2.0, 1.0, 2, 1).unwrap();
        let raster = Raster {
            spec,
            cells: vec![Fate::Undecided; 2],
        };
        let bytes = encode_ppm(&raster, |_| Rgb(1, 2, 3));
        assert_eq!(bytes.len() - b"P6\n2 1\n255\n".len(), 6);
    }

    #[test]
    fn pole_pixel() {
        let spec = GridSpec::new(c(FRAC_PI_2, 0.0), 0.1, 0.1, 1, 1).unwrap();
        let r = render_dynamical(
            &normalize_lambda(c(0.0, 1.5)),
            &spec,
            &ClassifyConfig::default(),
            &EvalLimits::default(),
        )
        .unwrap();
        assert_eq!(r.cells[0].fate, Fate::PoleHit(0));
    }

    #[test]
    fn upper_rows_are_primary() {
        let spec = GridSpec::new(c(0.0, 0.0), 4.0 * PI, 4.0 * PI, 64, 64).unwrap();
        let r = render_dynamical(
            &normalize_lambda(c(0.0, 1.5)),
            &spec,
            &ClassifyConfig::default(),
            &EvalLimits::default(),
        )
        .unwrap();
        for (z, cell) in r.samples() {
            if z.im > 0.0 {
                assert_eq!(cell.fate, Fate::PrimaryBaker, "{z}");
            }
        }
    }

    #[test]
    fn analytic_parameter_pixels() {
        let lim = EvalLimits::default();
        let cfg = ClassifyConfig::default();
        for (lambda, want) in [
            (c(0.0, 1.5), Region::AttractingLobe),
            (c(PI, 3.0), Region::HighStrip),
        ] {
            let spec = GridSpec::new(lambda, 1e-3, 1e-3, 1, 1).unwrap();
            match render_parameter(&spec, ParamMode::Analytic, &cfg, &lim).unwrap() {
                ParamRaster::Analytic(r) => assert_eq!(r.cells[0], want),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn critical_orbit_pixel_wanders() {
        let lambda = c(PI, FRAC_PI_2);
        // Oracle: the critical value iterated directly settles near
        // Im = -0.7524 while Re advances by pi.
        let mut z = lower_critical_value(lambda);
        for _ in 0..60 {
            z = lambda + z + z.tan();
        }
        assert!((z.im + 0.7524).abs() < 1e-3);

        let spec = GridSpec::new(lambda, 1e-3, 1e-3, 1, 1).unwrap();
        let r = render_parameter(
            &spec,
            ParamMode::CriticalOrbit,
            &ClassifyConfig::default(),
            &EvalLimits::default(),
        )
        .unwrap();
        match r {
            ParamRaster::CriticalOrbit(r) => assert_eq!(r.cells[0].fate, Fate::WanderingStrip(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undecided_shading_darkens() {
        let p = FatePalette { budget: 100 };
        let fast = p.color(&Cell {
            fate: Fate::Undecided,
            steps: 1,
        });
        let slow = p.color(&Cell {
            fate: Fate::Undecided,
            steps: 100,
        });
        assert!(slow.0 < fast.0);
    }

    #[test]
    fn write_reports_path_on_failure() {
        let spec = GridSpec::new(c(0.0, 0.0), 1.0, 1.0, 1, 1).unwrap();
        let raster = Raster {
            spec,
            cells: vec![()],
        };
        let path = Path::new("/nonexistent-dir/x.ppm");
        match write_ppm(&raster, |_| Rgb(0, 0, 0), path) {
            Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
            other => panic!("{other:?}"),
        }
    }
}
