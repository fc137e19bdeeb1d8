//! Synthetic measurement noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::{Map, SpectrumData};

/// Adds zero-mean Gaussian noise of `sigma_db` to every dB cell. The result
/// is a magnitude-only map; metadata is kept.
pub fn add_db_noise(map: &Map, sigma_db: f64, seed: u64) -> Result<Map> {
    let normal = Normal::new(0.0, sigma_db)
        .map_err(|_| Error::InvalidArgument(format!("noise level must be finite and >= 0, got {sigma_db}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = map.db_values().into_iter().map(|v| v + normal.sample(&mut rng)).collect();
    let mut out = Map::new(map.grid().clone(), SpectrumData::MagnitudeDb(data))?;
    out.metadata = map.metadata.clone();
    out.metadata.insert("noise_db".into(), sigma_db.to_string());
    out.metadata.insert("noise_seed".into(), seed.to_string());
    Ok(out)
}
