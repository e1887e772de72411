use clap::{Args, Parser, ValueEnum};
use footprint_core::synth::{Shape, TraceMode};
use footprint_core::SynthSpec;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ShapeArg {
    Rectangle,
    #[value(alias = "l_shape")]
    LShape,
    Pentagon,
    #[value(alias = "random_orthogonal")]
    Orthogonal,
}

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    #[arg(long, value_enum, default_value = "l-shape")]
    pub shape: ShapeArg,
    /// Corner count for orthogonal shapes (even, at least 4).
    #[arg(long, default_value_t = 8)]
    pub corners: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Raster pixel size in meters.
    #[arg(long, default_value_t = 0.25)]
    pub gsd: f64,
    /// Degrees, or "random" for a uniform draw from [0, 90).
    #[arg(long, default_value = "random")]
    pub rotation: String,
    #[arg(long, default_value_t = 0)]
    pub burrs: usize,
    /// Burr height in meters.
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,
    /// Burr base width in meters.
    #[arg(long, default_value_t = 0.15)]
    pub base: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Subdivide the exact outline to this spacing instead of tracing pixels.
    #[arg(long, value_name = "M")]
    pub densify: Option<f64>,
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct Compact {
    #[command(flatten)]
    args: CorpusArgs,
}

impl CorpusArgs {
    /// Reads "key=value,key=value" using the same keys as the flags.
    pub fn parse_compact(spec: &str) -> Result<Self, String> {
        let mut argv = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("corpus spec entry {part:?} is not key=value"))?;
            argv.push(format!("--{}", k.trim().replace('_', "-")));
            argv.push(v.trim().to_string());
        }
        Compact::try_parse_from(argv).map(|c| c.args).map_err(|e| e.to_string())
    }

    pub fn resolve(&self) -> Result<(SynthSpec, usize, u64, bool), String> {
        let shape = match self.shape {
            ShapeArg::Rectangle => Shape::Rectangle,
            ShapeArg::LShape => Shape::LShape,
            ShapeArg::Pentagon => Shape::Pentagon,
            ShapeArg::Orthogonal => Shape::RandomOrthogonal { corners: self.corners },
        };
        let (rotation, random) = if self.rotation.eq_ignore_ascii_case("random") {
            (0.0, true)
        } else {
            let deg = self.rotation.parse::<f64>().map_err(|_| format!("bad rotation {:?}", self.rotation))?;
            (deg, false)
        };
        let spec = SynthSpec {
            shape,
            gsd: self.gsd,
            rotation,
            burr_count: self.burrs,
            burr_amplitude: self.amplitude,
            burr_base: self.base,
            seed: self.seed,
            scale: self.scale,
            trace: self.densify.map_or(TraceMode::Staircase, |spacing| TraceMode::Densify { spacing }),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok((spec, self.count, self.seed, random))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_spec() {
        let a = CorpusArgs::parse_compact("shape=l_shape, count=3, seed=9, burrs=5, rotation=12.5").unwrap();
        let (spec, count, seed, random) = a.resolve().unwrap();
        assert_eq!(spec.shape, Shape::LShape);
        assert_eq!((count, seed, random), (3, 9, false));
        assert_eq!(spec.burr_count, 5);
        assert_eq!(spec.rotation, 12.5);
    }

    #[test]
    fn compact_spec_rejects_junk() {
        assert!(CorpusArgs::parse_compact("shape").is_err());
        assert!(CorpusArgs::parse_compact("colour=red").is_err());
    }
}
